#pragma once

#include <cstdint>

#include "res/parametrization.hpp"

namespace res {

// Chosen exact trajectory x_hat(lambda): componentwise
// amp*sin(freq*lambda + phase) + offset, smooth with bounded derivatives.
struct AnalyticTrajectory {
    std::vector<double> amp;
    std::vector<double> freq;
    std::vector<double> phase;
    std::vector<double> offset;

    int dim() const { return static_cast<int>(amp.size()); }
    Vec value(double lambda) const;
    Vec derivative(double lambda) const;

    // the scalar x_hat(lambda) = sin(lambda) reference case
    static AnalyticTrajectory scalar_sin();
    // d components with randomized amplitudes/frequencies/phases
    static AnalyticTrajectory random_sin(int dim, uint64_t seed);
};

// Forcing for dx/dlambda = -x + g with g(x, lambda) =
// x_hat'(lambda) + x_hat(lambda) + L (x - x_hat(lambda)); x_hat solves
// the ODE exactly and g has Lipschitz constant |L|.
struct ManufacturedProblem {
    AnalyticTrajectory trajectory;
    double stiffness = 0.0;

    Vec g(const Vec& x, double lambda) const;
    // velocity -x + g(x, lambda) for classical baselines
    Vec velocity(const Vec& x, double lambda) const;
};

}  // namespace res
