#pragma once

#include <vector>

namespace res {

// Highest phi order the evaluator supports. Solvers in this library need
// q <= 3; the ceiling leaves headroom without promising arbitrary-order
// stability of the forward recursion.
inline constexpr int kMaxPhiOrder = 12;

// phi_0(z) = e^z, phi_1(z) = (e^z - 1)/z, and in general
// phi_{k+1}(z) = (phi_k(z) - 1/k!)/z with phi_k(0) = 1/k!.
// For |z| below the branch threshold the evaluation switches to the
// Taylor series sum_j z^j/(j+k)! so the subtraction in the recursion
// cannot cancel catastrophically.
double phi(int k, double z);

struct PhiTable {
    double z = 0.0;
    std::vector<double> values;  // values[k] = phi_k(z), k = 0..max_order

    int max_order() const { return static_cast<int>(values.size()) - 1; }
    double operator[](int k) const { return values[static_cast<size_t>(k)]; }
};

// Evaluates phi_0..phi_q at z in one pass; the branch decision (Taylor
// vs forward recursion) is made once for the whole table.
PhiTable phi_table(int q, double z);

}  // namespace res
