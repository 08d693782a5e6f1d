#include "res/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace res {

long long MethodSpec::nfe_for_steps(int n_steps) const {
    if (multistep) return n_steps;
    return static_cast<long long>(scheme_stages(tableau.scheme)) * n_steps;
}

int MethodSpec::steps_for_nfe(long long nfe) const {
    int per_step = multistep ? 1 : scheme_stages(tableau.scheme);
    int n = static_cast<int>(nfe / per_step);
    if (n < 1) throw std::invalid_argument("NFE budget too small for method " + name);
    return n;
}

MethodSpec method_from_name(const std::string& name) {
    MethodSpec spec;
    spec.name = name;
    std::string base = name;
    if (base.size() > 2 && base.substr(base.size() - 2) == "-m") {
        spec.multistep = true;
        base = base.substr(0, base.size() - 2);
    }
    spec.tableau = TableauSpec::with_defaults(scheme_from_name(base));
    if (spec.multistep && !scheme_is_exponential(spec.tableau.scheme)) {
        throw std::invalid_argument("multistep variant requires an exponential scheme: " + name);
    }
    return spec;
}

GaussianMixture default_toy_mixture(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean_dist(-1.5, 1.5);
    std::uniform_real_distribution<double> scale_dist(0.6, 1.2);
    GaussianMixture m;
    m.dim = 8;
    const int components = 4;
    for (int i = 0; i < components; ++i) {
        m.weights.push_back(1.0 / components);
        Vec mu(static_cast<size_t>(m.dim));
        for (double& v : mu) v = mean_dist(rng);
        m.means.push_back(std::move(mu));
        m.scales.push_back(scale_dist(rng));
    }
    m.validate();
    return m;
}

Vec reference_solution(const DefectConfig& config, const Vec& x0) {
    DenoiserPtr denoiser = mixture_denoiser(config.mixture);
    SolveRun fine = rk4_solve(config.sigma_max, config.sigma_min, config.reference_steps, denoiser, x0);
    SolveRun coarse = rk4_solve(config.sigma_max, config.sigma_min, config.reference_steps / 2, denoiser, x0);
    Vec diff(fine.final_state.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = fine.final_state[i] - coarse.final_state[i];
    double rel = norm_l2(diff) / std::max(1.0, norm_l2(fine.final_state));
    if (rel > 1e-8) {
        throw std::runtime_error("reference solution failed its refinement self-check");
    }
    return fine.final_state;
}

namespace {

Vec initial_noise(int dim, double sigma0, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma0);
    Vec x(static_cast<size_t>(dim));
    for (double& v : x) v = normal(rng);
    return x;
}

SolveRun run_method(const MethodSpec& method, const Schedule& schedule, DenoiserPtr denoiser,
                    const Vec& x0, Parametrization param, const std::vector<double>& eta = {}) {
    SolveOptions opts;
    opts.tableau = method.tableau;
    opts.multistep = method.multistep;
    opts.param = scheme_is_exponential(method.tableau.scheme) ? param : Parametrization::EdmSigma;
    opts.initial_state = x0;
    opts.eta = eta;
    return solve(schedule, std::move(denoiser), opts);
}

}  // namespace

std::vector<DefectReport> measure_defects(const DefectConfig& config,
                                          const std::vector<std::string>& methods,
                                          const std::vector<long long>& nfe_budgets) {
    Vec x0 = initial_noise(config.mixture.dim, config.sigma_max, config.seed);
    Vec reference = reference_solution(config, x0);

    std::vector<DefectReport> reports;
    for (const std::string& name : methods) {
        MethodSpec method = method_from_name(name);
        for (long long budget : nfe_budgets) {
            int n_steps = method.steps_for_nfe(budget);
            Schedule schedule =
                make_schedule(config.schedule_kind, config.sigma_min, config.sigma_max,
                              n_steps + 1, config.rho);
            DenoiserPtr denoiser = mixture_denoiser(config.mixture);
            SolveRun run = run_method(method, schedule, denoiser, x0, config.param);

            Vec diff(reference.size());
            for (size_t i = 0; i < diff.size(); ++i) diff[i] = run.final_state[i] - reference[i];

            DefectReport rep;
            rep.method = name;
            rep.schedule_kind = config.schedule_kind;
            rep.rho = config.rho;
            rep.nfe = run.nfe;
            rep.defect_l1 = norm_l1(diff);
            rep.defect_l2 = norm_l2(diff);
            rep.reference_steps = config.reference_steps;
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

OrderEstimate estimate_order(const ManufacturedProblem& problem, const std::string& method_name,
                             const std::vector<int>& n_steps, double lambda0, double lambda1) {
    MethodSpec method = method_from_name(method_name);
    Vec x0 = problem.trajectory.value(lambda0);
    Vec exact = problem.trajectory.value(lambda1);

    SemilinearFn g = [&problem](const Vec& x, double lambda) { return problem.g(x, lambda); };

    OrderEstimate est;
    est.method = method_name;
    est.problem = "sin";
    double prev_error = std::numeric_limits<double>::infinity();
    for (int n : n_steps) {
        Vec xn = integrate_semilinear(g, x0, lambda0, lambda1, n, method.tableau, method.multistep);
        Vec diff(xn.size());
        for (size_t i = 0; i < xn.size(); ++i) diff[i] = xn[i] - exact[i];
        double err = norm_l1(diff);
        est.points.emplace_back(n, err);
        if (err >= prev_error) est.errors_decreasing = false;
        prev_error = err;
    }

    // least-squares fit of log(err) against log(1/n)
    const double floor = 100.0 * std::numeric_limits<double>::epsilon();
    std::vector<double> xs, ys;
    for (const auto& [n, err] : est.points) {
        if (err < floor) continue;
        xs.push_back(std::log(1.0 / n));
        ys.push_back(std::log(err));
    }
    if (xs.size() < 4) {
        throw std::runtime_error("estimate_order: fewer than 4 usable points after floor filtering");
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    est.slope = sxy / sxx;
    est.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return est;
}

std::vector<EtaSweepPoint> eta_sweep(const DefectConfig& config, const std::string& method_name,
                                     long long nfe_budget, const std::vector<double>& etas) {
    MethodSpec method = method_from_name(method_name);
    int n_steps = method.steps_for_nfe(nfe_budget);
    Schedule schedule = make_schedule(config.schedule_kind, config.sigma_min, config.sigma_max,
                                      n_steps + 1, config.rho);
    Vec x0 = initial_noise(config.mixture.dim, config.sigma_max, config.seed);
    Vec reference = reference_solution(config, x0);

    std::vector<EtaSweepPoint> points;
    for (double eta : etas) {
        DenoiserPtr denoiser = mixture_denoiser(config.mixture);
        SolveOptions opts;
        opts.tableau = method.tableau;
        opts.param = config.param;
        opts.initial_state = x0;
        opts.seed = config.seed;
        if (eta > 0.0) opts.eta = {eta};
        SolveRun run = solve(schedule, denoiser, opts);

        Vec diff(reference.size());
        for (size_t i = 0; i < diff.size(); ++i) diff[i] = run.final_state[i] - reference[i];
        points.push_back({eta, run.nfe, norm_l1(diff), norm_l2(diff)});
    }
    return points;
}

namespace {
std::ostringstream csv_stream() {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(12);
    return out;
}
}  // namespace

std::string defects_to_csv(const std::vector<DefectReport>& reports) {
    auto out = csv_stream();
    out << "method,schedule,rho,nfe,defect_l1,defect_l2\n";
    for (const auto& r : reports) {
        out << r.method << ',' << schedule_kind_name(r.schedule_kind) << ',' << r.rho << ','
            << r.nfe << ',' << r.defect_l1 << ',' << r.defect_l2 << '\n';
    }
    return out.str();
}

std::string order_to_csv(const OrderEstimate& estimate) {
    auto out = csv_stream();
    out << "method,problem,n_steps,error,slope,r2\n";
    for (const auto& [n, err] : estimate.points) {
        out << estimate.method << ',' << estimate.problem << ',' << n << ',' << err << ','
            << estimate.slope << ',' << estimate.r2 << '\n';
    }
    return out.str();
}

std::string psi_check_to_csv(const std::vector<AuditReport>& reports) {
    auto out = csv_stream();
    out << "scheme,condition,max_violation,result\n";
    for (const auto& rep : reports) {
        for (const auto& cond : rep.conditions) {
            out << scheme_name(rep.scheme) << ',' << cond.name << ',' << cond.max_violation << ','
                << (cond.pass ? "PASS" : "FAIL") << '\n';
        }
        out << scheme_name(rep.scheme) << ",overall," << (rep.pass ? 0.0 : 1.0) << ','
            << (rep.pass ? "PASS" : "FAIL") << '\n';
    }
    return out.str();
}

std::string eta_sweep_to_csv(const std::string& method, const std::vector<EtaSweepPoint>& points) {
    auto out = csv_stream();
    out << "method,eta,nfe,defect_l1,defect_l2\n";
    for (const auto& p : points) {
        out << method << ',' << p.eta << ',' << p.nfe << ',' << p.defect_l1 << ',' << p.defect_l2
            << '\n';
    }
    return out.str();
}

std::string run_to_csv(const SolveRun& run) {
    auto out = csv_stream();
    out << "index,sigma";
    size_t dim = run.final_state.size();
    for (size_t j = 0; j < dim; ++j) out << ",x" << j;
    out << '\n';
    for (size_t i = 0; i < run.trace.size(); ++i) {
        out << i << ',' << run.schedule.sigmas[i];
        for (size_t j = 0; j < dim; ++j) out << ',' << run.trace[i][j];
        out << '\n';
    }
    return out.str();
}

}  // namespace res
