// End-to-end acceptance checks. One line of output per criterion; the
// process exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "res/analysis.hpp"
#include "res/denoiser.hpp"
#include "res/manufactured.hpp"
#include "res/phi.hpp"
#include "res/stepper.hpp"
#include "res/tableau.hpp"

using namespace res;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double simpson_phi(int k, double z, int panels) {
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i;
    auto f = [&](double t) { return std::exp(z * (1.0 - t)) * std::pow(t, k - 1) / fact; };
    double h = 1.0 / panels;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

// ---- 1: phi kernel ----
Check phi_kernel() {
    Check c;
    double fact = 1.0;
    for (int k = 0; k <= 5; ++k) {
        if (k >= 2) fact *= k;
        for (double z : {-50.0, -5.0, -1.0, -0.1, -1e-6}) {
            double resid = std::abs(z * phi(k + 1, z) - phi(k, z) + 1.0 / fact);
            c.require(resid <= 1e-12, "recursion residual " + std::to_string(resid));
        }
    }
    for (double h : {0.1, 1.0, 5.0}) {
        for (int k : {1, 2, 3}) {
            double diff = std::abs(phi(k, -h) - simpson_phi(k, -h, 100000));
            c.require(diff <= 1e-9, "quadrature gap " + std::to_string(diff));
        }
    }
    return c;
}

// ---- 2: order-condition audit ----
Check order_audit() {
    Check c;
    for (double c2 : {0.25, 0.5, 1.0}) {
        TableauSpec spec = TableauSpec::with_defaults(SchemeId::Res2);
        spec.c2 = c2;
        AuditReport rep = audit_order(spec);
        for (const auto& cond : rep.conditions) {
            c.require(cond.max_violation <= 1e-10,
                      "res2 c2=" + std::to_string(c2) + " " + cond.name);
        }
    }
    AuditReport res3 = audit_order(TableauSpec::with_defaults(SchemeId::Res3));
    c.require(res3.pass, "res3 audit failed");

    AuditReport dpmpp2 = audit_order(TableauSpec::with_defaults(SchemeId::DpmPp2));
    c.require(!dpmpp2.pass, "dpmpp2 audit unexpectedly passed");
    PsiReport at_one = psi_report(concretize(TableauSpec::with_defaults(SchemeId::DpmPp2), 1.0), 2);
    c.require(std::abs(std::abs(at_one.psi[2]) - 0.0518) <= 1e-4,
              "dpmpp2 psi_2(-1) = " + std::to_string(at_one.psi[2]));

    AuditReport dpmpp3 = audit_order(TableauSpec::with_defaults(SchemeId::DpmPp3));
    c.require(!dpmpp3.pass, "dpmpp3 audit unexpectedly passed");
    return c;
}

// ---- 3: convergence orders ----
Check convergence_orders() {
    Check c;
    ManufacturedProblem problem{AnalyticTrajectory::random_sin(4, 1), 0.0};
    std::vector<int> counts = {8, 16, 32, 64, 128};
    auto slope = [&](const std::string& method) {
        return estimate_order(problem, method, counts, 0.0, 4.0).slope;
    };
    double s = slope("expeuler");
    c.require(std::abs(s - 1.0) <= 0.1, "expeuler slope " + std::to_string(s));
    for (const std::string& method : {"res2", "res2-m", "dpmpp2", "heun"}) {
        s = slope(method);
        c.require(std::abs(s - 2.0) <= 0.15, method + " slope " + std::to_string(s));
    }
    s = slope("res3");
    c.require(std::abs(s - 3.0) <= 0.25, "res3 slope " + std::to_string(s));
    return c;
}

// ---- 4: error-constant dominance ----
Check error_dominance() {
    Check c;
    int wins = 0, total = 0;
    std::vector<double> reductions;

    std::vector<int> counts = {8, 16, 32, 64, 128};
    for (uint64_t seed = 3; seed <= 7; ++seed) {
        ManufacturedProblem problem{AnalyticTrajectory::random_sin(4, seed), 0.0};
        OrderEstimate res2 = estimate_order(problem, "res2", counts, 0.0, 4.0);
        OrderEstimate dpmpp2 = estimate_order(problem, "dpmpp2", counts, 0.0, 4.0);
        for (size_t i = 0; i < counts.size(); ++i) {
            double a = res2.points[i].second;
            double b = dpmpp2.points[i].second;
            ++total;
            if (a <= b) ++wins;
            if (b > 0.0) reductions.push_back(1.0 - a / b);
        }
    }

    DefectConfig cfg;
    cfg.mixture = default_toy_mixture();
    cfg.reference_steps = 10000;
    auto reports = measure_defects(cfg, {"res2", "dpmpp2"}, {10, 20, 50});
    for (size_t i = 0; i < 3; ++i) {
        double a = reports[i].defect_l2;
        double b = reports[i + 3].defect_l2;
        ++total;
        if (a <= b) ++wins;
        if (b > 0.0) reductions.push_back(1.0 - a / b);
    }

    double frac = static_cast<double>(wins) / total;
    c.require(frac >= 0.90, "res2 beat dpmpp2 at only " + std::to_string(100.0 * frac) + "%");

    std::sort(reductions.begin(), reductions.end());
    double median = reductions[reductions.size() / 2];
    c.detail = "win rate " + std::to_string(100.0 * frac) + "%, median defect reduction " +
               std::to_string(100.0 * median) + "%";
    return c;
}

// ---- 5: single-gaussian exact recovery ----
Check exact_recovery() {
    Check c;
    GaussianMixture m;
    m.dim = 4;
    m.weights = {1.0};
    m.means = {Vec(4, 0.0)};
    m.scales = {0.8};
    double smax = 2.0, smin = 0.5;
    Vec x0 = {3.0, -1.0, 0.5, 2.0};
    double s2 = 0.64;
    double factor = std::sqrt((s2 + smin * smin) / (s2 + smax * smax));

    Schedule schedule = edm_schedule(smin, smax, 257, 7.0);
    SolveOptions opts;
    opts.initial_state = x0;
    SolveRun res2 = solve(schedule, mixture_denoiser(m), opts);
    for (int j = 0; j < 4; ++j) {
        double rel = std::abs(res2.final_state[j] / (x0[j] * factor) - 1.0);
        c.require(rel <= 1e-6, "res2 relative error " + std::to_string(rel));
    }

    SolveRun rk4 = rk4_solve(smax, smin, 10000, mixture_denoiser(m), x0);
    for (int j = 0; j < 4; ++j) {
        double rel = std::abs(rk4.final_state[j] / (x0[j] * factor) - 1.0);
        c.require(rel <= 1e-10, "rk4 relative error " + std::to_string(rel));
    }
    return c;
}

// ---- 6: schedule correctness ----
Check schedule_correctness() {
    Check c;
    Schedule s = edm_schedule(0.002, 80.0, 10, 7.0);
    c.require(s.sigmas.front() == 80.0, "sigma_max endpoint inexact");
    c.require(s.sigmas.back() == 0.002, "sigma_min endpoint inexact");

    Schedule lin = edm_schedule(0.002, 80.0, 10, 1.0);
    for (int i = 0; i < 10; ++i) {
        double expected = 80.0 + (0.002 - 80.0) * i / 9.0;
        c.require(std::abs(lin.sigmas[i] - expected) <= 1e-12 * 80.0,
                  "rho=1 interior point " + std::to_string(i));
    }
    return c;
}

// captures the state the solver hands to the model; used to observe the
// churned input of a stochastic step
class RecordingDenoiser final : public Denoiser {
public:
    explicit RecordingDenoiser(int dim) : Denoiser(dim) {}
    Vec last_input;

protected:
    Vec denoise_impl(const Vec& x, double) override {
        last_input = x;
        return Vec(x.size(), 0.0);
    }
};

// ---- 7: stochastic sampler ----
Check stochastic_sampler() {
    Check c;
    GaussianMixture m = default_toy_mixture();

    Schedule schedule = edm_schedule(0.01, 10.0, 17, 7.0);
    SolveOptions opts;
    opts.seed = 31;
    SolveRun det = solve(schedule, mixture_denoiser(m), opts);
    opts.eta = {0.0};
    SolveRun zero_eta = solve(schedule, mixture_denoiser(m), opts);
    for (size_t j = 0; j < det.final_state.size(); ++j) {
        c.require(det.final_state[j] == zero_eta.final_state[j], "eta=0 not bitwise identical");
    }

    opts.eta = {0.3};
    SolveRun sto1 = solve(schedule, mixture_denoiser(m), opts);
    SolveRun sto2 = solve(schedule, mixture_denoiser(m), opts);
    for (size_t j = 0; j < sto1.final_state.size(); ++j) {
        c.require(sto1.final_state[j] == sto2.final_state[j], "fixed seed not reproducible");
    }

    // injected-noise variance over 1e5 scalar draws
    const int dim = 10, trials = 10000;
    double sigma = 2.0, eta = 0.4, sigma_next = 1.0;
    double expected = std::pow((1.0 + eta) * sigma, 2) - sigma * sigma;
    auto recorder = std::make_shared<RecordingDenoiser>(dim);
    Vec x(dim, 0.5);
    std::mt19937_64 rng(7);
    TableauSpec euler = TableauSpec::with_defaults(SchemeId::ExpEuler);
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        stochastic_step(x, sigma, sigma_next, eta, rng, euler, *recorder,
                        Parametrization::LogSnr, 80.0);
        for (int j = 0; j < dim; ++j) {
            double d = recorder->last_input[j] - x[j];
            acc += d * d;
        }
    }
    double var = acc / (dim * trials);
    c.require(std::abs(var / expected - 1.0) <= 0.02,
              "injected variance off by " + std::to_string(100.0 * (var / expected - 1.0)) + "%");
    return c;
}

// ---- 8: parametrization equivalence ----
Check flavor_equivalence() {
    Check c;
    GaussianMixture m = default_toy_mixture();
    Schedule schedule = edm_schedule(0.3, 3.0, 513, 7.0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal(0.0, 3.0);
    Vec x0(8);
    for (double& v : x0) v = normal(rng);

    SolveOptions opts;
    opts.initial_state = x0;
    opts.param = Parametrization::LogSnr;
    SolveRun data = solve(schedule, mixture_denoiser(m), opts);
    opts.param = Parametrization::NegLogSnr;
    SolveRun noise = solve(schedule, mixture_denoiser(m), opts);

    Vec diff(x0.size());
    for (size_t j = 0; j < x0.size(); ++j) diff[j] = data.final_state[j] - noise.final_state[j];
    double rel = norm_l2(diff) / norm_l2(data.final_state);
    c.require(rel <= 1e-6, "flavor disagreement " + std::to_string(rel));
    return c;
}

// ---- 9: NFE accounting ----
Check nfe_accounting() {
    Check c;
    GaussianMixture m = default_toy_mixture();
    Schedule schedule = edm_schedule(0.01, 10.0, 13, 7.0);  // 12 steps
    SolveOptions opts;

    auto nfe_of = [&](SchemeId id, bool multistep, bool final_denoise) {
        SolveOptions o;
        o.tableau = TableauSpec::with_defaults(id);
        o.multistep = multistep;
        o.final_denoise = final_denoise;
        if (!scheme_is_exponential(id)) o.param = Parametrization::EdmSigma;
        return solve(schedule, mixture_denoiser(m), o).nfe;
    };

    c.require(nfe_of(SchemeId::ExpEuler, false, false) == 12, "expeuler nfe");
    c.require(nfe_of(SchemeId::Res2, false, false) == 24, "res2 nfe");
    c.require(nfe_of(SchemeId::DpmPp2, false, false) == 24, "dpmpp2 nfe");
    c.require(nfe_of(SchemeId::Res3, false, false) == 36, "res3 nfe");
    c.require(nfe_of(SchemeId::DpmPp3, false, false) == 36, "dpmpp3 nfe");
    c.require(nfe_of(SchemeId::Res2, true, false) == 12, "multistep nfe");
    c.require(nfe_of(SchemeId::Res2, false, true) == 25, "final denoise nfe");
    c.require(nfe_of(SchemeId::Res2, true, true) == 13, "multistep final denoise nfe");
    (void)opts;
    return c;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Check()> run;
        double budget_s;
    };
    std::vector<Criterion> criteria = {
        {"phi kernel identities", phi_kernel, 1.0},
        {"order-condition audit", order_audit, 1.0},
        {"convergence orders", convergence_orders, 5.0},
        {"error-constant dominance", error_dominance, 60.0},
        {"single-gaussian recovery", exact_recovery, 5.0},
        {"schedule correctness", schedule_correctness, 60.0},
        {"stochastic sampler", stochastic_sampler, 10.0},
        {"parametrization equivalence", flavor_equivalence, 60.0},
        {"nfe accounting", nfe_accounting, 60.0},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Check result = criteria[i].run();
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_budget = elapsed <= criteria[i].budget_s;
        bool pass = result.ok && in_budget;
        std::printf("%zu. %-28s %s (%.2fs)%s%s\n", i + 1, criteria[i].name,
                    pass ? "PASS" : "FAIL", elapsed,
                    result.detail.empty() ? "" : " - ", result.detail.c_str());
        if (!in_budget && result.ok) {
            std::printf("   exceeded the %.0fs runtime budget\n", criteria[i].budget_s);
        }
        if (!pass) ++failures;
    }
    return failures;
}
