#include "res/tableau.hpp"

#include <cmath>
#include <stdexcept>

#include "res/phi.hpp"

namespace res {

const char* scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::ExpEuler: return "expeuler";
        case SchemeId::Res2: return "res2";
        case SchemeId::Res3: return "res3";
        case SchemeId::DpmPp2: return "dpmpp2";
        case SchemeId::DpmPp3: return "dpmpp3";
        case SchemeId::Heun: return "heun";
        case SchemeId::Rk4: return "rk4";
    }
    return "unknown";
}

SchemeId scheme_from_name(const std::string& name) {
    if (name == "expeuler" || name == "ddim") return SchemeId::ExpEuler;
    if (name == "res2") return SchemeId::Res2;
    if (name == "res3") return SchemeId::Res3;
    if (name == "dpmpp2") return SchemeId::DpmPp2;
    if (name == "dpmpp3") return SchemeId::DpmPp3;
    if (name == "heun") return SchemeId::Heun;
    if (name == "rk4") return SchemeId::Rk4;
    throw std::invalid_argument("unknown scheme: " + name);
}

bool scheme_is_exponential(SchemeId id) {
    return id != SchemeId::Heun && id != SchemeId::Rk4;
}

int scheme_stages(SchemeId id) {
    switch (id) {
        case SchemeId::ExpEuler: return 1;
        case SchemeId::Res2:
        case SchemeId::DpmPp2:
        case SchemeId::Heun: return 2;
        case SchemeId::Res3:
        case SchemeId::DpmPp3: return 3;
        case SchemeId::Rk4: return 4;
    }
    return 0;
}

TableauSpec TableauSpec::with_defaults(SchemeId id) {
    TableauSpec spec;
    spec.scheme = id;
    if (id == SchemeId::Heun) spec.c2 = 1.0;
    return spec;
}

double gamma_for(double c2, double c3) {
    double den = 3.0 * c2 * c2 - 2.0 * c2;
    if (std::abs(den) < 1e-12) {
        throw std::domain_error("gamma_for: c2 = 2/3 makes the node constraint degenerate");
    }
    return (2.0 * c3 - 3.0 * c3 * c3) / den;
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_res3_nodes(const TableauSpec& spec) {
    if (std::abs(3.0 * spec.c2 * spec.c2 - 2.0 * spec.c2) < 1e-12) {
        throw std::domain_error("res3 tableau degenerate: c2 = 2/3");
    }
    if (std::abs(spec.gamma * spec.c2 + spec.c3) < 1e-12) {
        throw std::domain_error("res3 tableau degenerate: gamma*c2 + c3 = 0");
    }
}

// Coefficients at a signed step. Sampling in the data flavor always has
// h > 0; the noise flavor runs the same formulas with h < 0 (phi then
// sees positive arguments), so only the public concretize() insists on
// positivity.
ConcreteTableau concretize_signed(const TableauSpec& spec, double h) {
    ConcreteTableau tab;
    tab.h = h;
    tab.exponential = scheme_is_exponential(spec.scheme);
    tab.s = scheme_stages(spec.scheme);
    tab.c.assign(static_cast<size_t>(tab.s), 0.0);
    tab.a.assign(static_cast<size_t>(tab.s), std::vector<double>(static_cast<size_t>(tab.s), 0.0));
    tab.b.assign(static_cast<size_t>(tab.s), 0.0);

    const double c2 = spec.c2;
    const double c3 = spec.c3;
    switch (spec.scheme) {
        case SchemeId::ExpEuler:
            tab.b[0] = phi(1, -h);
            break;
        case SchemeId::Res2: {
            tab.c[1] = c2;
            tab.a[1][0] = c2 * phi(1, -c2 * h);
            tab.b[1] = phi(2, -h) / c2;
            tab.b[0] = phi(1, -h) - tab.b[1];
            break;
        }
        case SchemeId::DpmPp2: {
            tab.c[1] = c2;
            tab.a[1][0] = c2 * phi(1, -c2 * h);
            tab.b[1] = phi(1, -h) / (2.0 * c2);
            tab.b[0] = (1.0 - 1.0 / (2.0 * c2)) * phi(1, -h);
            break;
        }
        case SchemeId::Res3: {
            check_res3_nodes(spec);
            const double gamma = spec.gamma;
            tab.c[1] = c2;
            tab.c[2] = c3;
            tab.a[1][0] = c2 * phi(1, -c2 * h);
            tab.a[2][1] = gamma * c2 * phi(2, -c2 * h) + (c3 * c3 / c2) * phi(2, -c3 * h);
            tab.a[2][0] = c3 * phi(1, -c3 * h) - tab.a[2][1];
            tab.b[1] = gamma * phi(2, -h) / (gamma * c2 + c3);
            tab.b[2] = phi(2, -h) / (gamma * c2 + c3);
            tab.b[0] = phi(1, -h) - tab.b[1] - tab.b[2];
            break;
        }
        case SchemeId::DpmPp3: {
            tab.c[1] = c2;
            tab.c[2] = c3;
            tab.a[1][0] = c2 * phi(1, -c2 * h);
            tab.a[2][1] = (c3 * c3 / c2) * phi(2, -c3 * h);
            tab.a[2][0] = c3 * phi(1, -c3 * h) - tab.a[2][1];
            tab.b[1] = 0.0;
            tab.b[2] = phi(2, -h) / c3;
            tab.b[0] = phi(1, -h) - tab.b[2];
            break;
        }
        case SchemeId::Heun:
            tab.c[1] = 1.0;
            tab.a[1][0] = 1.0;
            tab.b[0] = 0.5;
            tab.b[1] = 0.5;
            break;
        case SchemeId::Rk4:
            tab.c[1] = 0.5;
            tab.c[2] = 0.5;
            tab.c[3] = 1.0;
            tab.a[1][0] = 0.5;
            tab.a[2][1] = 0.5;
            tab.a[3][2] = 1.0;
            tab.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
            break;
    }
    return tab;
}

}  // namespace

namespace detail {
ConcreteTableau concretize_at(const TableauSpec& spec, double h) {
    if (!std::isfinite(h) || h == 0.0) {
        throw std::domain_error("concretize: step length must be finite and nonzero");
    }
    return concretize_signed(spec, h);
}
}  // namespace detail

ConcreteTableau concretize(const TableauSpec& spec, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::domain_error("concretize: step length must be positive");
    }
    return concretize_signed(spec, h);
}

PsiReport psi_report(const ConcreteTableau& tab, int q) {
    if (!tab.exponential) {
        throw std::invalid_argument("psi_report: not applicable to classical tableaus");
    }
    if (q < 1 || q > 4) {
        throw std::out_of_range("psi_report: q must be in [1, 4]");
    }
    PsiReport rep;
    rep.h = tab.h;
    rep.psi.assign(static_cast<size_t>(q) + 1, 0.0);
    rep.psi_stage.assign(static_cast<size_t>(q) + 1,
                         std::vector<double>(static_cast<size_t>(tab.s) + 1, 0.0));

    auto c_pow = [&](int k, int e) {
        // c_k^0 = 1 by convention, including c_1 = 0
        return e == 0 ? 1.0 : std::pow(tab.c[static_cast<size_t>(k)], e);
    };

    for (int j = 1; j <= q; ++j) {
        double acc = 0.0;
        for (int k = 0; k < tab.s; ++k) {
            acc += tab.b[static_cast<size_t>(k)] * c_pow(k, j - 1) / factorial(j - 1);
        }
        rep.psi[static_cast<size_t>(j)] = phi(j, -tab.h) - acc;

        for (int i = 2; i <= tab.s; ++i) {
            double stage_acc = 0.0;
            for (int k = 0; k < i - 1; ++k) {
                stage_acc += tab.a[static_cast<size_t>(i - 1)][static_cast<size_t>(k)] *
                             c_pow(k, j - 1) / factorial(j - 1);
            }
            double ci = tab.c[static_cast<size_t>(i - 1)];
            rep.psi_stage[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                phi(j, -ci * tab.h) * std::pow(ci, j) - stage_acc;
        }
    }
    if (tab.s >= 3 && q >= 2) {
        rep.weighted_second = tab.b[1] * rep.psi_stage[2][2] + tab.b[2] * rep.psi_stage[2][3];
    }
    return rep;
}

AuditReport audit_order(const TableauSpec& spec) {
    if (!scheme_is_exponential(spec.scheme)) {
        throw std::invalid_argument("audit_order: classical schemes have no psi conditions");
    }
    const int s = scheme_stages(spec.scheme);
    const double tol = 1e-10;

    AuditReport report;
    report.scheme = spec.scheme;

    std::vector<ConditionResult> conditions;
    conditions.push_back({"psi_1", 0.0, true});
    if (s >= 2) {
        conditions.push_back({"psi_2", 0.0, true});
        conditions.push_back({"psi_{1,2}", 0.0, true});
    }
    if (s >= 3) {
        conditions.push_back({"psi_{1,3}", 0.0, true});
        conditions.push_back({"b2*psi_{2,2}+b3*psi_{2,3}", 0.0, true});
    }

    constexpr int kSweepPoints = 40;
    const double h_lo = std::log(1e-3);
    const double h_hi = std::log(5.0);
    for (int p = 0; p < kSweepPoints; ++p) {
        double h = std::exp(h_lo + (h_hi - h_lo) * p / (kSweepPoints - 1));
        PsiReport rep = psi_report(concretize(spec, h), s >= 3 ? 3 : 2);
        size_t idx = 0;
        auto record = [&](double value) {
            double v = std::abs(value);
            if (v > conditions[idx].max_violation) conditions[idx].max_violation = v;
            ++idx;
        };
        record(rep.psi[1]);
        if (s >= 2) {
            record(rep.psi[2]);
            record(rep.psi_stage[1][2]);
        }
        if (s >= 3) {
            record(rep.psi_stage[1][3]);
            record(rep.weighted_second);
        }
    }
    for (auto& cond : conditions) cond.pass = cond.max_violation <= tol;

    if (s >= 3) {
        // psi_3 vanishes only in the h -> 0 limit; probe near zero.
        PsiReport rep = psi_report(concretize(spec, 1e-8), 3);
        ConditionResult psi3{"psi_3(h->0)", std::abs(rep.psi[3]), std::abs(rep.psi[3]) <= 1e-6};
        conditions.push_back(psi3);
    }

    report.conditions = std::move(conditions);
    report.pass = true;
    for (const auto& cond : report.conditions) report.pass = report.pass && cond.pass;
    return report;
}

}  // namespace res
