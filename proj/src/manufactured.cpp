#include "res/manufactured.hpp"

#include <cmath>
#include <random>

namespace res {

Vec AnalyticTrajectory::value(double lambda) const {
    Vec v(amp.size());
    for (size_t i = 0; i < amp.size(); ++i) {
        v[i] = amp[i] * std::sin(freq[i] * lambda + phase[i]) + offset[i];
    }
    return v;
}

Vec AnalyticTrajectory::derivative(double lambda) const {
    Vec v(amp.size());
    for (size_t i = 0; i < amp.size(); ++i) {
        v[i] = amp[i] * freq[i] * std::cos(freq[i] * lambda + phase[i]);
    }
    return v;
}

AnalyticTrajectory AnalyticTrajectory::scalar_sin() {
    AnalyticTrajectory t;
    t.amp = {1.0};
    t.freq = {1.0};
    t.phase = {0.0};
    t.offset = {0.0};
    return t;
}

AnalyticTrajectory AnalyticTrajectory::random_sin(int dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp_dist(0.5, 2.0);
    std::uniform_real_distribution<double> freq_dist(0.5, 1.5);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> offset_dist(-1.0, 1.0);
    AnalyticTrajectory t;
    for (int i = 0; i < dim; ++i) {
        t.amp.push_back(amp_dist(rng));
        t.freq.push_back(freq_dist(rng));
        t.phase.push_back(phase_dist(rng));
        t.offset.push_back(offset_dist(rng));
    }
    return t;
}

Vec ManufacturedProblem::g(const Vec& x, double lambda) const {
    Vec xh = trajectory.value(lambda);
    Vec dxh = trajectory.derivative(lambda);
    Vec out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        out[i] = dxh[i] + xh[i] + stiffness * (x[i] - xh[i]);
    }
    return out;
}

Vec ManufacturedProblem::velocity(const Vec& x, double lambda) const {
    Vec out = g(x, lambda);
    for (size_t i = 0; i < x.size(); ++i) out[i] -= x[i];
    return out;
}

}  // namespace res
