#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "res/denoiser.hpp"
#include "res/parametrization.hpp"
#include "res/tableau.hpp"

namespace res {

// Nonlinear part g(x, lambda) of the semilinear ODE dx/dlambda = -x + g.
using SemilinearFn = std::function<Vec(const Vec&, double)>;

// Generic black-box ODE right-hand side for the classical baselines.
using OdeRhs = std::function<Vec(const Vec&, double)>;

// One s-stage exponential update from lambda over a signed step h:
//   x_{n,i} = e^{-c_i h} x_n + h sum_{j<i} a_ij(-h) g(x_{n,j}, lambda + c_j h)
//   x_{n+1} = e^{-h} x_n + h sum_i b_i(-h) g(x_{n,i}, lambda + c_i h)
// cached_d1, when supplied, replaces the stage-1 evaluation g(x, lambda).
Vec single_step(const Vec& x, double lambda, double h, const TableauSpec& spec,
                const SemilinearFn& g, const Vec* cached_d1 = nullptr);

// Second-order multistep update reusing the previous step's evaluation.
// Weights: c2 = (lambda_prev - lambda)/h < 0, b2 = phi_2(-h)/c2,
// b1 = phi_1(-h) - b2. Exactly one new g evaluation; it is returned via
// g_at_x for the caller's history.
struct MultistepHistory {
    double lambda_prev = 0.0;
    Vec g_prev;
};
Vec multistep_step(const Vec& x, double lambda, double h, const MultistepHistory& history,
                   const SemilinearFn& g, Vec* g_at_x = nullptr);

// Classical explicit RK (Heun or RK4) over an arbitrary time grid,
// velocity treated as a black box.
Vec classical_solve(const OdeRhs& f, const std::vector<double>& t_grid, Vec x, SchemeId scheme);

// Integrates dx/dlambda = -x + g over a uniform grid on [lambda0, lambda1].
// Exponential schemes use single_step / multistep_step (multistep
// bootstraps with an exponential Euler first step); Heun/RK4 run on the
// full velocity. Used by the convergence harness.
Vec integrate_semilinear(const SemilinearFn& g, const Vec& x0, double lambda0, double lambda1,
                         int n_steps, const TableauSpec& spec, bool multistep = false);

struct SolveOptions {
    TableauSpec tableau = TableauSpec::with_defaults(SchemeId::Res2);
    Parametrization param = Parametrization::LogSnr;
    bool multistep = false;
    std::vector<double> eta;       // empty = deterministic; scalar broadcast or per-step
    bool final_denoise = false;
    uint64_t seed = 0;
    std::optional<Vec> initial_state;  // default: N(0, sigma_0^2 I) from seed
};

struct SolveRun {
    Schedule schedule;
    std::vector<Vec> trace;  // one state per schedule grid point
    Vec final_state;
    long long nfe = 0;
    uint64_t seed = 0;
    bool sigma_clamped = false;  // (1+eta) sigma_i hit the sigma_max clamp
};

// One deterministic sampler update from sigma_from to sigma_to in the
// requested parametrization (noise flavor runs in y-space internally).
Vec sample_step(const Vec& x, double sigma_from, double sigma_to, const TableauSpec& spec,
                Denoiser& denoiser, Parametrization param);

// Churn-then-step update: sigma_bar = (1+eta) sigma_i, noise injection
// x + sqrt(sigma_bar^2 - sigma_i^2) eps, then one single_step from
// sigma_bar to sigma_next. eta = 0 skips the draw and is bit-identical
// to sample_step.
Vec stochastic_step(const Vec& x, double sigma_i, double sigma_next, double eta,
                    std::mt19937_64& rng, const TableauSpec& spec, Denoiser& denoiser,
                    Parametrization param, double sigma_max, bool* clamped = nullptr);

// Full sampling loop over the schedule.
SolveRun solve(const Schedule& schedule, DenoiserPtr denoiser, const SolveOptions& options);

// Classical baselines on the EDM-sigma parametrization.
SolveRun heun_solve(const Schedule& schedule, DenoiserPtr denoiser, const SolveOptions& options = {});
// RK4 reference on a dense uniform-lambda grid from sigma_max to sigma_min.
SolveRun rk4_solve(double sigma_max, double sigma_min, int n_steps, DenoiserPtr denoiser,
                   const Vec& x0);

double norm_l1(const Vec& v);
double norm_l2(const Vec& v);

}  // namespace res
