#pragma once

#include <string>
#include <vector>

namespace res {

using Vec = std::vector<double>;

enum class Parametrization {
    EdmSigma,   // x-space, time = sigma, velocity (x - D)/sigma
    LogSnr,     // x-space, lambda_D = -log sigma, semilinear -x + D
    NegLogSnr,  // y = x/sigma, lambda_eps = log sigma, semilinear -y + eps
};

const char* parametrization_name(Parametrization p);
Parametrization parametrization_from_name(const std::string& name);

// data flavor: lambda_D = -log sigma; noise flavor: lambda_eps = log sigma
double sigma_to_lambda_data(double sigma);
double sigma_to_lambda_noise(double sigma);
double lambda_data_to_sigma(double lambda);
double lambda_noise_to_sigma(double lambda);

Vec to_y_space(const Vec& x, double sigma);
Vec from_y_space(const Vec& y, double sigma);

enum class ScheduleKind { EdmRho, UniformSigma, UniformLambda };

const char* schedule_kind_name(ScheduleKind kind);
ScheduleKind schedule_kind_from_name(const std::string& name);

// Strictly decreasing noise levels sigma_0 = sigma_max .. sigma_{N-1} = sigma_min.
// The sigma list is the canonical representation for every kind; lambda
// values are derived on demand.
struct Schedule {
    std::vector<double> sigmas;
    ScheduleKind kind = ScheduleKind::EdmRho;
    double rho = 7.0;

    int size() const { return static_cast<int>(sigmas.size()); }
    int steps() const { return size() - 1; }
};

// t_i = (smax^{1/rho} + i/(N-1) (smin^{1/rho} - smax^{1/rho}))^rho,
// with exact endpoints.
Schedule edm_schedule(double sigma_min, double sigma_max, int n, double rho);
Schedule uniform_sigma_schedule(double sigma_min, double sigma_max, int n);
Schedule uniform_lambda_schedule(double sigma_min, double sigma_max, int n);
Schedule make_schedule(ScheduleKind kind, double sigma_min, double sigma_max, int n, double rho);

// One sigma value per line, '.'-decimal, LF terminated.
std::string schedule_to_csv(const Schedule& schedule);

}  // namespace res
