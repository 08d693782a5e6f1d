#include "res/phi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace res {

namespace {

// Forward recursion divides by z at every order, so each step loses
// roughly -log10|z| digits for |z| < 1. Below this threshold the Taylor
// series converges in a handful of monotone terms instead.
constexpr double kTaylorThreshold = 0.5;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double phi_taylor(int k, double z) {
    // sum_{j>=0} z^j / (j+k)!; with |z| < 0.5 the terms decay faster
    // than 2^-j, so 30 terms put the truncation error far below 1e-16.
    double term = 1.0 / factorial(k);
    double sum = term;
    for (int j = 1; j <= 30; ++j) {
        term *= z / static_cast<double>(j + k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

void check_args(int k, double z) {
    if (!std::isfinite(z)) {
        throw std::domain_error("phi: argument must be finite");
    }
    if (k < 0 || k > kMaxPhiOrder) {
        throw std::out_of_range("phi: order " + std::to_string(k) +
                                " outside supported range [0, " +
                                std::to_string(kMaxPhiOrder) + "]");
    }
}

}  // namespace

double phi(int k, double z) {
    check_args(k, z);
    if (std::abs(z) < kTaylorThreshold) {
        return phi_taylor(k, z);
    }
    double value = std::exp(z);  // phi_0
    for (int j = 0; j < k; ++j) {
        value = (value - 1.0 / factorial(j)) / z;
    }
    return value;
}

PhiTable phi_table(int q, double z) {
    check_args(q, z);
    PhiTable table;
    table.z = z;
    table.values.resize(static_cast<size_t>(q) + 1);
    if (std::abs(z) < kTaylorThreshold) {
        for (int k = 0; k <= q; ++k) table.values[static_cast<size_t>(k)] = phi_taylor(k, z);
    } else {
        double value = std::exp(z);
        table.values[0] = value;
        for (int k = 1; k <= q; ++k) {
            value = (value - 1.0 / factorial(k - 1)) / z;
            table.values[static_cast<size_t>(k)] = value;
        }
    }
    return table;
}

}  // namespace res
