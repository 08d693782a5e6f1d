#include "res/stepper.hpp"

#include <cmath>
#include <stdexcept>

#include "res/phi.hpp"

namespace res {

double norm_l1(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
}

double norm_l2(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

Vec single_step(const Vec& x, double lambda, double h, const TableauSpec& spec,
                const SemilinearFn& g, const Vec* cached_d1) {
    if (!scheme_is_exponential(spec.scheme)) {
        throw std::invalid_argument("single_step: requires an exponential tableau");
    }
    ConcreteTableau tab = detail::concretize_at(spec, h);
    const size_t n = x.size();

    std::vector<Vec> d(static_cast<size_t>(tab.s));
    d[0] = cached_d1 ? *cached_d1 : g(x, lambda);

    for (int i = 1; i < tab.s; ++i) {
        double ci = tab.c[static_cast<size_t>(i)];
        double decay = std::exp(-ci * h);
        Vec stage(n);
        for (size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int j = 0; j < i; ++j) {
                acc += tab.a[static_cast<size_t>(i)][static_cast<size_t>(j)] * d[static_cast<size_t>(j)][k];
            }
            stage[k] = decay * x[k] + h * acc;
        }
        d[static_cast<size_t>(i)] = g(stage, lambda + ci * h);
    }

    double decay = std::exp(-h);
    Vec out(n);
    for (size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < tab.s; ++i) {
            acc += tab.b[static_cast<size_t>(i)] * d[static_cast<size_t>(i)][k];
        }
        out[k] = decay * x[k] + h * acc;
    }
    return out;
}

Vec multistep_step(const Vec& x, double lambda, double h, const MultistepHistory& history,
                   const SemilinearFn& g, Vec* g_at_x) {
    if (history.g_prev.empty()) {
        throw std::invalid_argument("multistep_step: empty history, bootstrap step required");
    }
    double c2 = (history.lambda_prev - lambda) / h;
    if (!(c2 < 0.0)) {
        throw std::invalid_argument("multistep_step: history node must lie behind the step");
    }
    double b2 = phi(2, -h) / c2;
    double b1 = phi(1, -h) - b2;

    Vec d1 = g(x, lambda);
    double decay = std::exp(-h);
    Vec out(x.size());
    for (size_t k = 0; k < x.size(); ++k) {
        out[k] = decay * x[k] + h * (b1 * d1[k] + b2 * history.g_prev[k]);
    }
    if (g_at_x) *g_at_x = std::move(d1);
    return out;
}

Vec classical_solve(const OdeRhs& f, const std::vector<double>& t_grid, Vec x, SchemeId scheme) {
    if (scheme != SchemeId::Heun && scheme != SchemeId::Rk4) {
        throw std::invalid_argument("classical_solve: scheme must be heun or rk4");
    }
    const size_t n = x.size();
    for (size_t i = 0; i + 1 < t_grid.size(); ++i) {
        double t0 = t_grid[i];
        double h = t_grid[i + 1] - t0;
        if (h == 0.0) continue;
        if (scheme == SchemeId::Heun) {
            Vec k1 = f(x, t0);
            Vec pred(n);
            for (size_t k = 0; k < n; ++k) pred[k] = x[k] + h * k1[k];
            Vec k2 = f(pred, t0 + h);
            for (size_t k = 0; k < n; ++k) x[k] += 0.5 * h * (k1[k] + k2[k]);
        } else {
            Vec k1 = f(x, t0);
            Vec tmp(n);
            for (size_t k = 0; k < n; ++k) tmp[k] = x[k] + 0.5 * h * k1[k];
            Vec k2 = f(tmp, t0 + 0.5 * h);
            for (size_t k = 0; k < n; ++k) tmp[k] = x[k] + 0.5 * h * k2[k];
            Vec k3 = f(tmp, t0 + 0.5 * h);
            for (size_t k = 0; k < n; ++k) tmp[k] = x[k] + h * k3[k];
            Vec k4 = f(tmp, t0 + h);
            for (size_t k = 0; k < n; ++k) {
                x[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
        }
    }
    return x;
}

Vec integrate_semilinear(const SemilinearFn& g, const Vec& x0, double lambda0, double lambda1,
                         int n_steps, const TableauSpec& spec, bool multistep) {
    if (n_steps < 1) throw std::invalid_argument("integrate_semilinear: need at least one step");
    const double h = (lambda1 - lambda0) / n_steps;

    if (!scheme_is_exponential(spec.scheme)) {
        std::vector<double> grid(static_cast<size_t>(n_steps) + 1);
        for (int i = 0; i <= n_steps; ++i) grid[static_cast<size_t>(i)] = lambda0 + h * i;
        OdeRhs velocity = [&g](const Vec& x, double lambda) {
            Vec v = g(x, lambda);
            for (size_t k = 0; k < x.size(); ++k) v[k] -= x[k];
            return v;
        };
        return classical_solve(velocity, grid, x0, spec.scheme);
    }

    Vec x = x0;
    if (multistep) {
        // exponential Euler bootstrap; its g evaluation seeds the history
        MultistepHistory hist;
        hist.lambda_prev = lambda0;
        hist.g_prev = g(x, lambda0);
        double b1 = phi(1, -h);
        double decay = std::exp(-h);
        for (size_t k = 0; k < x.size(); ++k) x[k] = decay * x[k] + h * b1 * hist.g_prev[k];
        for (int i = 1; i < n_steps; ++i) {
            double lambda = lambda0 + h * i;
            Vec g_here;
            x = multistep_step(x, lambda, h, hist, g, &g_here);
            hist.lambda_prev = lambda;
            hist.g_prev = std::move(g_here);
        }
        return x;
    }

    for (int i = 0; i < n_steps; ++i) {
        x = single_step(x, lambda0 + h * i, h, spec, g);
    }
    return x;
}

namespace {

// coordinate frame of a semilinear flavor: lambda axis, solver state,
// and the g seen by the scheme
struct Flavor {
    Parametrization param;

    double lambda(double sigma) const {
        return param == Parametrization::NegLogSnr ? sigma_to_lambda_noise(sigma)
                                                   : sigma_to_lambda_data(sigma);
    }
    Vec to_state(const Vec& x, double sigma) const {
        return param == Parametrization::NegLogSnr ? to_y_space(x, sigma) : x;
    }
    Vec to_x(const Vec& state, double sigma) const {
        return param == Parametrization::NegLogSnr ? from_y_space(state, sigma) : state;
    }
    SemilinearFn make_g(Denoiser& denoiser) const {
        if (param == Parametrization::NegLogSnr) {
            return [&denoiser](const Vec& y, double lambda) {
                double sigma = lambda_noise_to_sigma(lambda);
                return denoiser.predict_noise(from_y_space(y, sigma), sigma);
            };
        }
        return [&denoiser](const Vec& x, double lambda) {
            return denoiser.denoise(x, lambda_data_to_sigma(lambda));
        };
    }
};

void check_semilinear_param(Parametrization param) {
    if (param == Parametrization::EdmSigma) {
        throw std::invalid_argument(
            "exponential tableau requires a semilinear parametrization (logsnr or neglogsnr)");
    }
}

}  // namespace

Vec sample_step(const Vec& x, double sigma_from, double sigma_to, const TableauSpec& spec,
                Denoiser& denoiser, Parametrization param) {
    check_semilinear_param(param);
    Flavor flavor{param};
    double l0 = flavor.lambda(sigma_from);
    double h = flavor.lambda(sigma_to) - l0;
    SemilinearFn g = flavor.make_g(denoiser);
    Vec state = single_step(flavor.to_state(x, sigma_from), l0, h, spec, g);
    return flavor.to_x(state, sigma_to);
}

Vec stochastic_step(const Vec& x, double sigma_i, double sigma_next, double eta,
                    std::mt19937_64& rng, const TableauSpec& spec, Denoiser& denoiser,
                    Parametrization param, double sigma_max, bool* clamped) {
    if (eta < 0.0) throw std::domain_error("stochastic_step: eta must be nonnegative");
    if (eta == 0.0) {
        return sample_step(x, sigma_i, sigma_next, spec, denoiser, param);
    }
    double sigma_bar = (1.0 + eta) * sigma_i;
    if (sigma_bar > sigma_max) {
        sigma_bar = sigma_max;
        if (clamped) *clamped = true;
    }
    double amp = std::sqrt(sigma_bar * sigma_bar - sigma_i * sigma_i);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec churned(x.size());
    for (size_t k = 0; k < x.size(); ++k) churned[k] = x[k] + amp * normal(rng);
    return sample_step(churned, sigma_bar, sigma_next, spec, denoiser, param);
}

SolveRun solve(const Schedule& schedule, DenoiserPtr denoiser, const SolveOptions& options) {
    if (schedule.size() < 2) throw std::invalid_argument("solve: schedule needs at least two levels");
    const int n_steps = schedule.steps();
    const bool classical = !scheme_is_exponential(options.tableau.scheme);

    if (classical && options.param != Parametrization::EdmSigma) {
        throw std::invalid_argument("solve: classical schemes run on the EDM-sigma parametrization");
    }
    if (!classical) check_semilinear_param(options.param);

    std::vector<double> eta(static_cast<size_t>(n_steps), 0.0);
    if (options.eta.size() == 1) {
        eta.assign(static_cast<size_t>(n_steps), options.eta[0]);
    } else if (!options.eta.empty()) {
        if (static_cast<int>(options.eta.size()) != n_steps) {
            throw std::invalid_argument("solve: eta list must match the step count");
        }
        eta = options.eta;
    }
    bool any_eta = false;
    for (double e : eta) {
        if (e < 0.0) throw std::domain_error("solve: eta must be nonnegative");
        any_eta = any_eta || e > 0.0;
    }
    if (any_eta && (classical || options.multistep)) {
        throw std::invalid_argument("solve: churn is only supported with single-step exponential schemes");
    }

    std::mt19937_64 rng(options.seed);
    const double sigma0 = schedule.sigmas.front();
    Vec x;
    if (options.initial_state) {
        x = *options.initial_state;
        if (static_cast<int>(x.size()) != denoiser->dim()) {
            throw std::invalid_argument("solve: initial state dimension mismatch");
        }
    } else {
        std::normal_distribution<double> normal(0.0, sigma0);
        x.resize(static_cast<size_t>(denoiser->dim()));
        for (double& v : x) v = normal(rng);
    }

    denoiser->reset_nfe();

    SolveRun run;
    run.schedule = schedule;
    run.seed = options.seed;
    run.trace.reserve(static_cast<size_t>(schedule.size()));
    run.trace.push_back(x);

    Flavor flavor{options.param};
    SemilinearFn g;
    if (!classical) g = flavor.make_g(*denoiser);

    MultistepHistory hist;
    for (int i = 0; i < n_steps; ++i) {
        double s_from = schedule.sigmas[static_cast<size_t>(i)];
        double s_to = schedule.sigmas[static_cast<size_t>(i + 1)];

        if (classical) {
            OdeRhs velocity = [&](const Vec& xv, double sigma) {
                Vec v = denoiser->denoise(xv, sigma);
                for (size_t k = 0; k < xv.size(); ++k) v[k] = (xv[k] - v[k]) / sigma;
                return v;
            };
            x = classical_solve(velocity, {s_from, s_to}, x, options.tableau.scheme);
        } else if (options.multistep) {
            double l_from = flavor.lambda(s_from);
            double h = flavor.lambda(s_to) - l_from;
            Vec state = flavor.to_state(x, s_from);
            if (i == 0) {
                hist.lambda_prev = l_from;
                hist.g_prev = g(state, l_from);
                double decay = std::exp(-h);
                double b1 = phi(1, -h);
                for (size_t k = 0; k < state.size(); ++k) {
                    state[k] = decay * state[k] + h * b1 * hist.g_prev[k];
                }
            } else {
                Vec g_here;
                state = multistep_step(state, l_from, h, hist, g, &g_here);
                hist.lambda_prev = l_from;
                hist.g_prev = std::move(g_here);
            }
            x = flavor.to_x(state, s_to);
        } else if (eta[static_cast<size_t>(i)] > 0.0) {
            bool clamped = false;
            x = stochastic_step(x, s_from, s_to, eta[static_cast<size_t>(i)], rng, options.tableau,
                                *denoiser, options.param, sigma0, &clamped);
            run.sigma_clamped = run.sigma_clamped || clamped;
        } else {
            x = sample_step(x, s_from, s_to, options.tableau, *denoiser, options.param);
        }
        run.trace.push_back(x);
    }

    if (options.final_denoise) {
        x = denoiser->denoise(x, schedule.sigmas.back());
        run.trace.back() = x;
    }

    run.final_state = std::move(x);
    run.nfe = denoiser->nfe();
    return run;
}

SolveRun heun_solve(const Schedule& schedule, DenoiserPtr denoiser, const SolveOptions& options) {
    SolveOptions opts = options;
    opts.tableau = TableauSpec::with_defaults(SchemeId::Heun);
    opts.param = Parametrization::EdmSigma;
    return solve(schedule, std::move(denoiser), opts);
}

SolveRun rk4_solve(double sigma_max, double sigma_min, int n_steps, DenoiserPtr denoiser,
                   const Vec& x0) {
    Schedule grid = uniform_lambda_schedule(sigma_min, sigma_max, n_steps + 1);
    SolveOptions opts;
    opts.tableau = TableauSpec::with_defaults(SchemeId::Rk4);
    opts.param = Parametrization::EdmSigma;
    opts.initial_state = x0;
    return solve(grid, std::move(denoiser), opts);
}

}  // namespace res
