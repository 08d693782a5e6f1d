#include "res/parametrization.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace res {

const char* parametrization_name(Parametrization p) {
    switch (p) {
        case Parametrization::EdmSigma: return "edm";
        case Parametrization::LogSnr: return "logsnr";
        case Parametrization::NegLogSnr: return "neglogsnr";
    }
    return "unknown";
}

Parametrization parametrization_from_name(const std::string& name) {
    if (name == "edm") return Parametrization::EdmSigma;
    if (name == "logsnr") return Parametrization::LogSnr;
    if (name == "neglogsnr") return Parametrization::NegLogSnr;
    throw std::invalid_argument("unknown parametrization: " + name);
}

namespace {
void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::domain_error("noise level must be positive and finite");
    }
}
}  // namespace

double sigma_to_lambda_data(double sigma) {
    check_sigma(sigma);
    return -std::log(sigma);
}

double sigma_to_lambda_noise(double sigma) {
    check_sigma(sigma);
    return std::log(sigma);
}

double lambda_data_to_sigma(double lambda) { return std::exp(-lambda); }
double lambda_noise_to_sigma(double lambda) { return std::exp(lambda); }

Vec to_y_space(const Vec& x, double sigma) {
    check_sigma(sigma);
    Vec y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] / sigma;
    return y;
}

Vec from_y_space(const Vec& y, double sigma) {
    check_sigma(sigma);
    Vec x(y.size());
    for (size_t i = 0; i < y.size(); ++i) x[i] = y[i] * sigma;
    return x;
}

const char* schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::EdmRho: return "edm";
        case ScheduleKind::UniformSigma: return "uniform-sigma";
        case ScheduleKind::UniformLambda: return "uniform-lambda";
    }
    return "unknown";
}

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "edm") return ScheduleKind::EdmRho;
    if (name == "uniform-sigma") return ScheduleKind::UniformSigma;
    if (name == "uniform-lambda") return ScheduleKind::UniformLambda;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

namespace {
void check_schedule_args(double sigma_min, double sigma_max, int n) {
    check_sigma(sigma_min);
    check_sigma(sigma_max);
    if (!(sigma_min < sigma_max)) {
        throw std::domain_error("schedule: sigma_min must be less than sigma_max");
    }
    if (n < 2) {
        throw std::domain_error("schedule: need at least two grid points");
    }
}
}  // namespace

Schedule edm_schedule(double sigma_min, double sigma_max, int n, double rho) {
    check_schedule_args(sigma_min, sigma_max, n);
    if (!(rho > 0.0)) {
        throw std::domain_error("schedule: rho must be positive");
    }
    Schedule s;
    s.kind = ScheduleKind::EdmRho;
    s.rho = rho;
    s.sigmas.resize(static_cast<size_t>(n));
    const double lo = std::pow(sigma_max, 1.0 / rho);
    const double hi = std::pow(sigma_min, 1.0 / rho);
    for (int i = 0; i < n; ++i) {
        double u = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        s.sigmas[static_cast<size_t>(i)] = std::pow(u, rho);
    }
    // endpoints exact regardless of pow round-off
    s.sigmas.front() = sigma_max;
    s.sigmas.back() = sigma_min;
    return s;
}

Schedule uniform_sigma_schedule(double sigma_min, double sigma_max, int n) {
    Schedule s = edm_schedule(sigma_min, sigma_max, n, 1.0);
    s.kind = ScheduleKind::UniformSigma;
    return s;
}

Schedule uniform_lambda_schedule(double sigma_min, double sigma_max, int n) {
    check_schedule_args(sigma_min, sigma_max, n);
    Schedule s;
    s.kind = ScheduleKind::UniformLambda;
    s.sigmas.resize(static_cast<size_t>(n));
    const double l0 = std::log(sigma_max);
    const double l1 = std::log(sigma_min);
    for (int i = 0; i < n; ++i) {
        s.sigmas[static_cast<size_t>(i)] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / (n - 1));
    }
    s.sigmas.front() = sigma_max;
    s.sigmas.back() = sigma_min;
    return s;
}

Schedule make_schedule(ScheduleKind kind, double sigma_min, double sigma_max, int n, double rho) {
    switch (kind) {
        case ScheduleKind::EdmRho: return edm_schedule(sigma_min, sigma_max, n, rho);
        case ScheduleKind::UniformSigma: return uniform_sigma_schedule(sigma_min, sigma_max, n);
        case ScheduleKind::UniformLambda: return uniform_lambda_schedule(sigma_min, sigma_max, n);
    }
    throw std::invalid_argument("make_schedule: bad kind");
}

std::string schedule_to_csv(const Schedule& schedule) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "sigma\n";
    out.precision(17);
    for (double sigma : schedule.sigmas) out << sigma << "\n";
    return out.str();
}

}  // namespace res
