#pragma once

#include <array>
#include <string>
#include <vector>

namespace res {

enum class SchemeId {
    ExpEuler,
    Res2,
    Res3,
    DpmPp2,
    DpmPp3,
    Heun,
    Rk4,
};

const char* scheme_name(SchemeId id);
SchemeId scheme_from_name(const std::string& name);
bool scheme_is_exponential(SchemeId id);
int scheme_stages(SchemeId id);

// Node parameters of a scheme; concrete numeric coefficients depend on
// the step length and are produced by concretize().
struct TableauSpec {
    SchemeId scheme = SchemeId::Res2;
    double c2 = 0.5;
    double c3 = 0.75;
    double gamma = 0.75;  // Res3 only

    static TableauSpec with_defaults(SchemeId id);
};

struct ConcreteTableau {
    int s = 0;
    std::vector<double> c;               // nodes, c[0] = 0
    std::vector<std::vector<double>> a;  // strictly lower triangular
    std::vector<double> b;
    double h = 0.0;
    bool exponential = true;
};

// Solves 2(gamma c2 + c3) = 3(gamma c2^2 + c3^2) for gamma, the node
// constraint that zeroes psi_3 at h = 0 for the 3-stage scheme.
double gamma_for(double c2, double c3);

// Numeric coefficients for the given step. For exponential schemes the
// entries are phi-function combinations of h; Heun/RK4 are h-independent.
ConcreteTableau concretize(const TableauSpec& spec, double h);

namespace detail {
// Same formulas with a signed step; the noise-flavor solver integrates
// toward decreasing log-sigma and needs h < 0.
ConcreteTableau concretize_at(const TableauSpec& spec, double h);
}  // namespace detail

// Defect coefficients of Lemma-style order analysis:
//   psi[j]       = phi_j(-h)     - sum_k b_k c_k^{j-1}/(j-1)!
//   psi_stage[j][i] = phi_j(-c_i h) c_i^j - sum_{k<i} a_ik c_k^{j-1}/(j-1)!
// Convention: c_k^0 = 1 including c_1 = 0. Indexing is 1-based on j and i;
// row/column 0 is unused padding.
struct PsiReport {
    double h = 0.0;
    std::vector<double> psi;                      // psi[1..q]
    std::vector<std::vector<double>> psi_stage;   // psi_stage[1..q][2..s]
    double weighted_second = 0.0;                 // b2*psi_{2,2} + b3*psi_{2,3}
};

PsiReport psi_report(const ConcreteTableau& tab, int q);

struct ConditionResult {
    std::string name;
    double max_violation = 0.0;
    bool pass = false;
};

struct AuditReport {
    SchemeId scheme;
    bool pass = false;
    std::vector<ConditionResult> conditions;
};

// Sweeps h over a log-spaced grid in [1e-3, 5] and checks every order
// condition the scheme's stage count claims. Third-order schemes get an
// extra psi_3 check at h = 1e-8 (the condition only holds in the h -> 0
// limit).
AuditReport audit_order(const TableauSpec& spec);

}  // namespace res
