#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "res/analysis.hpp"

using namespace res;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

DefectConfig small_config() {
    DefectConfig cfg;
    cfg.mixture = default_toy_mixture();
    cfg.reference_steps = 2000;
    return cfg;
}

}  // namespace

TEST_CASE("method parsing and budgets") {
    MethodSpec res2 = method_from_name("res2");
    CHECK(res2.tableau.scheme == SchemeId::Res2);
    CHECK_FALSE(res2.multistep);
    CHECK(res2.nfe_for_steps(10) == 20);
    CHECK(res2.steps_for_nfe(20) == 10);
    CHECK(res2.steps_for_nfe(21) == 10);  // floor, never exceed the budget

    MethodSpec multi = method_from_name("res2-m");
    CHECK(multi.multistep);
    CHECK(multi.nfe_for_steps(10) == 10);
    CHECK(multi.steps_for_nfe(10) == 10);

    CHECK(method_from_name("res3").nfe_for_steps(10) == 30);
    CHECK(method_from_name("rk4").nfe_for_steps(10) == 40);
    CHECK_THROWS_AS(method_from_name("heun-m"), std::invalid_argument);
    CHECK_THROWS_AS(method_from_name("nope"), std::invalid_argument);
    CHECK_THROWS_AS(res2.steps_for_nfe(1), std::invalid_argument);
}

TEST_CASE("toy mixture is a valid seeded problem") {
    GaussianMixture m = default_toy_mixture();
    CHECK(m.dim == 8);
    CHECK(m.components() == 4);
    CHECK_NOTHROW(m.validate());
    GaussianMixture again = default_toy_mixture();
    CHECK(m.means[0][0] == again.means[0][0]);
}

TEST_CASE("defect table structure") {
    DefectConfig cfg = small_config();
    auto reports = measure_defects(cfg, {"res2", "dpmpp2"}, {16, 32});
    REQUIRE(reports.size() == 4);
    CHECK(reports[0].method == "res2");
    CHECK(reports[0].nfe == 16);
    CHECK(reports[1].nfe == 32);
    // finer budgets must not increase the defect on this smooth problem
    CHECK(reports[1].defect_l2 < reports[0].defect_l2);
    for (const auto& r : reports) {
        CHECK(r.defect_l1 > 0.0);
        CHECK(r.defect_l2 > 0.0);
        CHECK(r.defect_l1 >= r.defect_l2);  // norm ordering in R^8
    }
}

TEST_CASE("order estimates on the manufactured problem") {
    ManufacturedProblem problem{AnalyticTrajectory::scalar_sin(), 0.0};
    std::vector<int> counts = {8, 16, 32, 64, 128};

    OrderEstimate e1 = estimate_order(problem, "expeuler", counts, 0.0, 4.0);
    CHECK(e1.slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(e1.r2 > 0.99);
    CHECK(e1.errors_decreasing);

    OrderEstimate e2 = estimate_order(problem, "res2", counts, 0.0, 4.0);
    CHECK(e2.slope == doctest::Approx(2.0).epsilon(0.1));

    OrderEstimate e3 = estimate_order(problem, "res3", counts, 0.0, 4.0);
    CHECK(e3.slope == doctest::Approx(3.0).epsilon(0.1));

    OrderEstimate em = estimate_order(problem, "res2-m", counts, 0.0, 4.0);
    CHECK(em.slope == doctest::Approx(2.0).epsilon(0.1));

    CHECK_THROWS_AS(estimate_order(problem, "res2", {8, 16}, 0.0, 4.0), std::runtime_error);
}

TEST_CASE("defect csv schema") {
    DefectConfig cfg = small_config();
    auto reports = measure_defects(cfg, {"res2"}, {16});
    std::string csv = defects_to_csv(reports);
    auto lines = lines_of(csv);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "method,schedule,rho,nfe,defect_l1,defect_l2");
    CHECK(lines[1].rfind("res2,edm,7,16,", 0) == 0);
}

TEST_CASE("order csv schema") {
    ManufacturedProblem problem{AnalyticTrajectory::scalar_sin(), 0.0};
    OrderEstimate est = estimate_order(problem, "res2", {8, 16, 32, 64}, 0.0, 4.0);
    auto lines = lines_of(order_to_csv(est));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "method,problem,n_steps,error,slope,r2");
    CHECK(lines[1].rfind("res2,sin,8,", 0) == 0);
}

TEST_CASE("psi check csv schema") {
    AuditReport report = audit_order(TableauSpec::with_defaults(SchemeId::Res2));
    auto lines = lines_of(psi_check_to_csv({report}));
    REQUIRE(lines.size() == 5);  // three conditions plus the overall row
    CHECK(lines[0] == "scheme,condition,max_violation,result");
    CHECK(lines[4] == "res2,overall,0,PASS");
}

TEST_CASE("eta sweep shapes and determinism") {
    DefectConfig cfg = small_config();
    auto points = eta_sweep(cfg, "res2", 32, {0.0, 0.2});
    REQUIRE(points.size() == 2);
    CHECK(points[0].eta == 0.0);
    CHECK(points[0].nfe == 32);
    CHECK(points[1].nfe == 32);
    auto again = eta_sweep(cfg, "res2", 32, {0.0, 0.2});
    CHECK(points[1].defect_l2 == again[1].defect_l2);

    auto lines = lines_of(eta_sweep_to_csv("res2", points));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "method,eta,nfe,defect_l1,defect_l2");
    CHECK(lines[1].rfind("res2,0,32,", 0) == 0);
}

TEST_CASE("csv output uses point decimals and LF endings") {
    DefectConfig cfg = small_config();
    std::string csv = defects_to_csv(measure_defects(cfg, {"res2"}, {16}));
    CHECK(csv.find(';') == std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
}
