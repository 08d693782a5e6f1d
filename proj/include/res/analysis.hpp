#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "res/denoiser.hpp"
#include "res/manufactured.hpp"
#include "res/stepper.hpp"
#include "res/tableau.hpp"

namespace res {

// A sampling method id as used in CSV output and on the CLI:
// expeuler, res2, res3, dpmpp2, dpmpp3, heun, rk4, plus a "-m" suffix
// for the multistep variant (e.g. res2-m).
struct MethodSpec {
    std::string name;
    TableauSpec tableau;
    bool multistep = false;

    // denoiser evaluations for a run of n steps
    long long nfe_for_steps(int n_steps) const;
    // largest step count whose cost fits the NFE budget
    int steps_for_nfe(long long nfe) const;
};

MethodSpec method_from_name(const std::string& name);

struct DefectReport {
    std::string method;
    ScheduleKind schedule_kind = ScheduleKind::EdmRho;
    double rho = 7.0;
    long long nfe = 0;
    double defect_l1 = 0.0;
    double defect_l2 = 0.0;
    int reference_steps = 0;
};

struct DefectConfig {
    GaussianMixture mixture;
    ScheduleKind schedule_kind = ScheduleKind::EdmRho;
    double rho = 7.0;
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    Parametrization param = Parametrization::LogSnr;
    uint64_t seed = 0;
    int reference_steps = 10000;
};

// Default toy problem: d = 8, four components at EDM-scale noise levels.
GaussianMixture default_toy_mixture(uint64_t seed = 1);

// Terminal state of the dense RK4 reference, with a Richardson-style
// self-check against half resolution (throws if they disagree > 1e-8).
Vec reference_solution(const DefectConfig& config, const Vec& x0);

// One report per (method, nfe); all methods start from the same seeded
// initial noise.
std::vector<DefectReport> measure_defects(const DefectConfig& config,
                                          const std::vector<std::string>& methods,
                                          const std::vector<long long>& nfe_budgets);

struct OrderEstimate {
    std::string method;
    std::string problem;
    std::vector<std::pair<int, double>> points;  // (n_steps, L1 error)
    double slope = 0.0;
    double r2 = 0.0;
    bool errors_decreasing = true;
};

// Least-squares slope of log(error) vs log(1/n_steps) on a manufactured
// problem over [lambda0, lambda1]. Errors within 100 ulp of zero are
// dropped as floor-contaminated; fewer than 4 surviving points is an error.
OrderEstimate estimate_order(const ManufacturedProblem& problem, const std::string& method,
                             const std::vector<int>& n_steps, double lambda0, double lambda1);

struct EtaSweepPoint {
    double eta = 0.0;
    long long nfe = 0;
    double defect_l1 = 0.0;
    double defect_l2 = 0.0;
};

std::vector<EtaSweepPoint> eta_sweep(const DefectConfig& config, const std::string& method,
                                     long long nfe_budget, const std::vector<double>& etas);

// CSV bodies (UTF-8, LF, '.'-decimal), schema-stable headers.
std::string defects_to_csv(const std::vector<DefectReport>& reports);
std::string order_to_csv(const OrderEstimate& estimate);
std::string psi_check_to_csv(const std::vector<AuditReport>& reports);
std::string eta_sweep_to_csv(const std::string& method, const std::vector<EtaSweepPoint>& points);
std::string run_to_csv(const SolveRun& run);

}  // namespace res
