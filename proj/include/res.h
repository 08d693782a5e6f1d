/* C interface to the refined exponential solver library.
 *
 * All functions return res_status; RES_OK is 0. Output parameters are
 * only written on success. Handles are opaque and must be released with
 * the matching *_free function; strings returned through char** are
 * heap-allocated and released with res_string_free.
 */
#ifndef RES_H
#define RES_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum res_status {
    RES_OK = 0,
    RES_ERR_DOMAIN = 1,      /* argument outside the mathematical domain */
    RES_ERR_UNSUPPORTED = 2, /* order/scheme outside the supported range */
    RES_ERR_USAGE = 3,       /* inconsistent arguments or null handle */
    RES_ERR_DEGENERATE = 4,  /* degenerate tableau nodes */
    RES_ERR_REFERENCE = 5,   /* reference solution failed its self-check */
    RES_ERR_IO = 6,          /* file could not be read or parsed */
    RES_ERR_INTERNAL = 7
} res_status;

const char* res_status_message(res_status status);

/* ---- phi kernel ---- */

res_status res_phi(int k, double z, double* out);
/* out must hold q+1 doubles; out[k] = phi_k(z) */
res_status res_phi_table(int q, double z, double* out);

/* ---- tableau audits ---- */

res_status res_gamma_for(double c2, double c3, double* out);

/* CSV table of psi order-condition checks for one scheme. Pass NaN for
 * c2/c3/gamma to use the scheme defaults; for 3-stage schemes a NaN
 * gamma is resolved through the node constraint. pass_out may be NULL. */
res_status res_psi_check_csv(const char* scheme, double c2, double c3, double gamma,
                             char** csv_out, int* pass_out);

/* ---- noise schedules ---- */

typedef struct res_schedule res_schedule;

res_status res_schedule_create(const char* kind, double sigma_min, double sigma_max, int n,
                               double rho, res_schedule** out);
int res_schedule_len(const res_schedule* schedule);
res_status res_schedule_sigmas(const res_schedule* schedule, double* out);
void res_schedule_free(res_schedule* schedule);

/* ---- mixture oracles and denoisers ---- */

typedef struct res_mixture res_mixture;
typedef struct res_denoiser res_denoiser;

/* means is component-major: n_components * dim doubles */
res_status res_mixture_create(int dim, int n_components, const double* weights,
                              const double* means, const double* scales, res_mixture** out);
res_status res_mixture_load(const char* path, res_mixture** out);
/* the built-in toy mixture used by the experiment harness */
res_status res_mixture_default(res_mixture** out);
void res_mixture_free(res_mixture* mixture);

res_status res_denoiser_create(const res_mixture* mixture, res_denoiser** out);
res_status res_denoiser_eval(res_denoiser* denoiser, const double* x, double sigma, double* out);
long long res_denoiser_nfe(const res_denoiser* denoiser);
void res_denoiser_reset_nfe(res_denoiser* denoiser);
int res_denoiser_dim(const res_denoiser* denoiser);
void res_denoiser_free(res_denoiser* denoiser);

/* ---- sampling ---- */

typedef struct res_run res_run;

typedef struct res_solve_options {
    const char* scheme;  /* expeuler, res2, res3, dpmpp2, dpmpp3, heun, rk4 */
    const char* param;   /* edm, logsnr, neglogsnr */
    double c2, c3, gamma;  /* NaN = scheme defaults */
    int multistep;
    int final_denoise;
    double eta;               /* uniform churn level, 0 = deterministic */
    unsigned long long seed;
    const double* initial_state;  /* NULL = draw N(0, sigma_0^2 I) from seed */
} res_solve_options;

void res_solve_options_init(res_solve_options* options);

res_status res_solve(const res_schedule* schedule, res_denoiser* denoiser,
                     const res_solve_options* options, res_run** out);

int res_run_dim(const res_run* run);
int res_run_len(const res_run* run);
long long res_run_nfe(const res_run* run);
res_status res_run_state(const res_run* run, int index, double* out);
res_status res_run_final(const res_run* run, double* out);
res_status res_run_csv(const res_run* run, char** csv_out);
void res_run_free(res_run* run);

/* ---- experiment harness (CSV emitters used by the CLI) ---- */

typedef struct res_experiment_config {
    const char* schedule_kind;  /* edm, uniform-sigma, uniform-lambda */
    double rho;
    double sigma_min, sigma_max;
    const char* param;
    unsigned long long seed;
    int reference_steps;
} res_experiment_config;

void res_experiment_config_init(res_experiment_config* config);

/* mixture may be NULL, which selects the built-in toy mixture */
res_status res_defects_csv(const res_mixture* mixture, const res_experiment_config* config,
                           const char* const* methods, int n_methods,
                           const long long* nfe_budgets, int n_budgets, char** csv_out);

res_status res_convergence_csv(const char* method, const char* problem, unsigned long long seed,
                               const int* n_steps, int n_counts, char** csv_out);

res_status res_eta_sweep_csv(const res_mixture* mixture, const res_experiment_config* config,
                             const char* method, long long nfe_budget, const double* etas,
                             int n_etas, char** csv_out);

void res_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RES_H */
