#include "res.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "res/analysis.hpp"
#include "res/denoiser.hpp"
#include "res/manufactured.hpp"
#include "res/parametrization.hpp"
#include "res/phi.hpp"
#include "res/stepper.hpp"
#include "res/tableau.hpp"

struct res_schedule {
    res::Schedule impl;
};

struct res_mixture {
    res::GaussianMixture impl;
};

struct res_denoiser {
    res::DenoiserPtr impl;
};

struct res_run {
    res::SolveRun impl;
};

namespace {

// Exceptions crossing the C boundary are mapped onto status codes by
// type; message detail is lost, which is the price of a C ABI.
res_status translate_exception() {
    try {
        throw;
    } catch (const std::domain_error&) {
        return RES_ERR_DOMAIN;
    } catch (const std::out_of_range&) {
        return RES_ERR_UNSUPPORTED;
    } catch (const std::invalid_argument&) {
        return RES_ERR_USAGE;
    } catch (const std::ios_base::failure&) {
        return RES_ERR_IO;
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        if (what.find("degenerate") != std::string::npos) return RES_ERR_DEGENERATE;
        if (what.find("self-check") != std::string::npos) return RES_ERR_REFERENCE;
        if (what.find("cannot open") != std::string::npos ||
            what.find("parse") != std::string::npos) {
            return RES_ERR_IO;
        }
        return RES_ERR_INTERNAL;
    } catch (...) {
        return RES_ERR_INTERNAL;
    }
}

template <typename Fn>
res_status guarded(Fn&& fn) {
    try {
        fn();
        return RES_OK;
    } catch (...) {
        return translate_exception();
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

res::TableauSpec spec_from_options(const std::string& scheme, double c2, double c3, double gamma) {
    res::TableauSpec spec = res::TableauSpec::with_defaults(res::scheme_from_name(scheme));
    if (!std::isnan(c2)) spec.c2 = c2;
    if (!std::isnan(c3)) spec.c3 = c3;
    if (!std::isnan(gamma)) {
        spec.gamma = gamma;
    } else if (!std::isnan(c2) || !std::isnan(c3)) {
        if (spec.scheme == res::SchemeId::Res3) spec.gamma = res::gamma_for(spec.c2, spec.c3);
    }
    return spec;
}

res::GaussianMixture mixture_or_default(const res_mixture* mixture) {
    return mixture != nullptr ? mixture->impl : res::default_toy_mixture();
}

res::DefectConfig defect_config(const res_mixture* mixture, const res_experiment_config* config) {
    res::DefectConfig cfg;
    cfg.mixture = mixture_or_default(mixture);
    cfg.schedule_kind = res::schedule_kind_from_name(
        config->schedule_kind != nullptr ? config->schedule_kind : "edm");
    cfg.rho = config->rho;
    cfg.sigma_min = config->sigma_min;
    cfg.sigma_max = config->sigma_max;
    cfg.param = res::parametrization_from_name(config->param != nullptr ? config->param : "logsnr");
    cfg.seed = config->seed;
    cfg.reference_steps = config->reference_steps;
    return cfg;
}

}  // namespace

extern "C" {

const char* res_status_message(res_status status) {
    switch (status) {
        case RES_OK: return "ok";
        case RES_ERR_DOMAIN: return "argument outside the mathematical domain";
        case RES_ERR_UNSUPPORTED: return "order or scheme outside the supported range";
        case RES_ERR_USAGE: return "inconsistent arguments or null handle";
        case RES_ERR_DEGENERATE: return "degenerate tableau nodes";
        case RES_ERR_REFERENCE: return "reference solution failed its self-check";
        case RES_ERR_IO: return "file could not be read or parsed";
        case RES_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

res_status res_phi(int k, double z, double* out) {
    if (out == nullptr) return RES_ERR_USAGE;
    return guarded([&] { *out = res::phi(k, z); });
}

res_status res_phi_table(int q, double z, double* out) {
    if (out == nullptr || q < 0) return RES_ERR_USAGE;
    return guarded([&] {
        res::PhiTable table = res::phi_table(q, z);
        for (int k = 0; k <= q; ++k) out[k] = table[k];
    });
}

res_status res_gamma_for(double c2, double c3, double* out) {
    if (out == nullptr) return RES_ERR_USAGE;
    return guarded([&] { *out = res::gamma_for(c2, c3); });
}

res_status res_psi_check_csv(const char* scheme, double c2, double c3, double gamma,
                             char** csv_out, int* pass_out) {
    if (scheme == nullptr || csv_out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        res::TableauSpec spec = spec_from_options(scheme, c2, c3, gamma);
        res::AuditReport report = res::audit_order(spec);
        *csv_out = copy_string(res::psi_check_to_csv({report}));
        if (pass_out != nullptr) *pass_out = report.pass ? 1 : 0;
    });
}

res_status res_schedule_create(const char* kind, double sigma_min, double sigma_max, int n,
                               double rho, res_schedule** out) {
    if (kind == nullptr || out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        auto handle = std::make_unique<res_schedule>();
        handle->impl = res::make_schedule(res::schedule_kind_from_name(kind), sigma_min,
                                          sigma_max, n, rho);
        *out = handle.release();
    });
}

int res_schedule_len(const res_schedule* schedule) {
    return schedule != nullptr ? schedule->impl.size() : 0;
}

res_status res_schedule_sigmas(const res_schedule* schedule, double* out) {
    if (schedule == nullptr || out == nullptr) return RES_ERR_USAGE;
    for (int i = 0; i < schedule->impl.size(); ++i) {
        out[i] = schedule->impl.sigmas[static_cast<size_t>(i)];
    }
    return RES_OK;
}

void res_schedule_free(res_schedule* schedule) { delete schedule; }

res_status res_mixture_create(int dim, int n_components, const double* weights,
                              const double* means, const double* scales, res_mixture** out) {
    if (weights == nullptr || means == nullptr || scales == nullptr || out == nullptr ||
        dim < 1 || n_components < 1) {
        return RES_ERR_USAGE;
    }
    return guarded([&] {
        auto handle = std::make_unique<res_mixture>();
        res::GaussianMixture& m = handle->impl;
        m.dim = dim;
        m.weights.assign(weights, weights + n_components);
        m.scales.assign(scales, scales + n_components);
        for (int i = 0; i < n_components; ++i) {
            const double* row = means + static_cast<size_t>(i) * dim;
            m.means.emplace_back(row, row + dim);
        }
        m.validate();
        *out = handle.release();
    });
}

res_status res_mixture_load(const char* path, res_mixture** out) {
    if (path == nullptr || out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        auto handle = std::make_unique<res_mixture>();
        handle->impl = res::load_mixture_config(path);
        *out = handle.release();
    });
}

res_status res_mixture_default(res_mixture** out) {
    if (out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        auto handle = std::make_unique<res_mixture>();
        handle->impl = res::default_toy_mixture();
        *out = handle.release();
    });
}

void res_mixture_free(res_mixture* mixture) { delete mixture; }

res_status res_denoiser_create(const res_mixture* mixture, res_denoiser** out) {
    if (mixture == nullptr || out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        auto handle = std::make_unique<res_denoiser>();
        handle->impl = res::mixture_denoiser(mixture->impl);
        *out = handle.release();
    });
}

res_status res_denoiser_eval(res_denoiser* denoiser, const double* x, double sigma, double* out) {
    if (denoiser == nullptr || x == nullptr || out == nullptr) return RES_ERR_USAGE;
    return guarded([&] {
        res::Vec xv(x, x + denoiser->impl->dim());
        res::Vec d = denoiser->impl->denoise(xv, sigma);
        for (size_t i = 0; i < d.size(); ++i) out[i] = d[i];
    });
}

long long res_denoiser_nfe(const res_denoiser* denoiser) {
    return denoiser != nullptr ? denoiser->impl->nfe() : 0;
}

void res_denoiser_reset_nfe(res_denoiser* denoiser) {
    if (denoiser != nullptr) denoiser->impl->reset_nfe();
}

int res_denoiser_dim(const res_denoiser* denoiser) {
    return denoiser != nullptr ? denoiser->impl->dim() : 0;
}

void res_denoiser_free(res_denoiser* denoiser) { delete denoiser; }

void res_solve_options_init(res_solve_options* options) {
    if (options == nullptr) return;
    options->scheme = "res2";
    options->param = "logsnr";
    options->c2 = std::nan("");
    options->c3 = std::nan("");
    options->gamma = std::nan("");
    options->multistep = 0;
    options->final_denoise = 0;
    options->eta = 0.0;
    options->seed = 0;
    options->initial_state = nullptr;
}

res_status res_solve(const res_schedule* schedule, res_denoiser* denoiser,
                     const res_solve_options* options, res_run** out) {
    if (schedule == nullptr || denoiser == nullptr || options == nullptr || out == nullptr) {
        return RES_ERR_USAGE;
    }
    return guarded([&] {
        res::SolveOptions opts;
        opts.tableau = spec_from_options(options->scheme != nullptr ? options->scheme : "res2",
                                         options->c2, options->c3, options->gamma);
        opts.param = res::parametrization_from_name(
            options->param != nullptr ? options->param : "logsnr");
        opts.multistep = options->multistep != 0;
        opts.final_denoise = options->final_denoise != 0;
        opts.seed = options->seed;
        if (options->eta != 0.0) opts.eta = {options->eta};
        if (options->initial_state != nullptr) {
            opts.initial_state = res::Vec(options->initial_state,
                                          options->initial_state + denoiser->impl->dim());
        }
        if (!res::scheme_is_exponential(opts.tableau.scheme)) {
            opts.param = res::Parametrization::EdmSigma;
        }
        auto handle = std::make_unique<res_run>();
        handle->impl = res::solve(schedule->impl, denoiser->impl, opts);
        *out = handle.release();
    });
}

int res_run_dim(const res_run* run) {
    return run != nullptr ? static_cast<int>(run->impl.final_state.size()) : 0;
}

int res_run_len(const res_run* run) {
    return run != nullptr ? static_cast<int>(run->impl.trace.size()) : 0;
}

long long res_run_nfe(const res_run* run) { return run != nullptr ? run->impl.nfe : 0; }

res_status res_run_state(const res_run* run, int index, double* out) {
    if (run == nullptr || out == nullptr) return RES_ERR_USAGE;
    if (index < 0 || index >= static_cast<int>(run->impl.trace.size())) return RES_ERR_USAGE;
    const res::Vec& state = run->impl.trace[static_cast<size_t>(index)];
    for (size_t i = 0; i < state.size(); ++i) out[i] = state[i];
    return RES_OK;
}

res_status res_run_final(const res_run* run, double* out) {
    if (run == nullptr || out == nullptr) return RES_ERR_USAGE;
    for (size_t i = 0; i < run->impl.final_state.size(); ++i) out[i] = run->impl.final_state[i];
    return RES_OK;
}

res_status res_run_csv(const res_run* run, char** csv_out) {
    if (run == nullptr || csv_out == nullptr) return RES_ERR_USAGE;
    return guarded([&] { *csv_out = copy_string(res::run_to_csv(run->impl)); });
}

void res_run_free(res_run* run) { delete run; }

void res_experiment_config_init(res_experiment_config* config) {
    if (config == nullptr) return;
    config->schedule_kind = "edm";
    config->rho = 7.0;
    config->sigma_min = 0.002;
    config->sigma_max = 80.0;
    config->param = "logsnr";
    config->seed = 0;
    config->reference_steps = 10000;
}

res_status res_defects_csv(const res_mixture* mixture, const res_experiment_config* config,
                           const char* const* methods, int n_methods,
                           const long long* nfe_budgets, int n_budgets, char** csv_out) {
    if (config == nullptr || methods == nullptr || nfe_budgets == nullptr || csv_out == nullptr ||
        n_methods < 1 || n_budgets < 1) {
        return RES_ERR_USAGE;
    }
    return guarded([&] {
        res::DefectConfig cfg = defect_config(mixture, config);
        std::vector<std::string> method_names(methods, methods + n_methods);
        std::vector<long long> budgets(nfe_budgets, nfe_budgets + n_budgets);
        *csv_out = copy_string(res::defects_to_csv(res::measure_defects(cfg, method_names, budgets)));
    });
}

res_status res_convergence_csv(const char* method, const char* problem, unsigned long long seed,
                               const int* n_steps, int n_counts, char** csv_out) {
    if (method == nullptr || problem == nullptr || n_steps == nullptr || csv_out == nullptr ||
        n_counts < 1) {
        return RES_ERR_USAGE;
    }
    return guarded([&] {
        res::ManufacturedProblem prob;
        std::string name = problem;
        if (name == "sin") {
            prob.trajectory = res::AnalyticTrajectory::scalar_sin();
        } else if (name == "sin8") {
            prob.trajectory = res::AnalyticTrajectory::random_sin(8, seed);
        } else {
            throw std::invalid_argument("unknown problem: " + name);
        }
        std::vector<int> counts(n_steps, n_steps + n_counts);
        res::OrderEstimate est = res::estimate_order(prob, method, counts, 0.0, 2.0);
        est.problem = name;
        *csv_out = copy_string(res::order_to_csv(est));
    });
}

res_status res_eta_sweep_csv(const res_mixture* mixture, const res_experiment_config* config,
                             const char* method, long long nfe_budget, const double* etas,
                             int n_etas, char** csv_out) {
    if (config == nullptr || method == nullptr || etas == nullptr || csv_out == nullptr ||
        n_etas < 1) {
        return RES_ERR_USAGE;
    }
    return guarded([&] {
        res::DefectConfig cfg = defect_config(mixture, config);
        std::vector<double> eta_values(etas, etas + n_etas);
        *csv_out = copy_string(
            res::eta_sweep_to_csv(method, res::eta_sweep(cfg, method, nfe_budget, eta_values)));
    });
}

void res_string_free(char* s) { delete[] s; }

}  // extern "C"
