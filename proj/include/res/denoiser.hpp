#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>

#include "res/parametrization.hpp"

namespace res {

// Evaluable D(x, sigma). Every call to denoise() or predict_noise()
// counts as one function evaluation; NFE accounting lives here, not in
// the solvers, so guidance combinators and eps views stay honest.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    Vec denoise(const Vec& x, double sigma);

    // eps(x, sigma) = (x - D(x, sigma))/sigma; one NFE, same counter.
    Vec predict_noise(const Vec& x, double sigma);

    int dim() const { return dim_; }
    virtual long long nfe() const { return count_.load(std::memory_order_relaxed); }
    virtual void reset_nfe() { count_.store(0, std::memory_order_relaxed); }

protected:
    explicit Denoiser(int dim, bool self_counting = true)
        : dim_(dim), self_counting_(self_counting) {}
    virtual Vec denoise_impl(const Vec& x, double sigma) = 0;

private:
    int dim_;
    bool self_counting_;
    std::atomic<long long> count_{0};
};

using DenoiserPtr = std::shared_ptr<Denoiser>;

// Isotropic Gaussian mixture: p(x; sigma) = sum_i w_i N(x; mu_i, (s_i^2 + sigma^2) I).
// Its posterior-mean denoiser is available in closed form, which makes it
// the analytic ground truth for every sampler test.
struct GaussianMixture {
    int dim = 0;
    std::vector<double> weights;
    std::vector<Vec> means;
    std::vector<double> scales;

    int components() const { return static_cast<int>(weights.size()); }
    void validate() const;

    double log_density(const Vec& x, double sigma) const;
    // posterior component probabilities, log-sum-exp stabilized
    std::vector<double> responsibilities(const Vec& x, double sigma) const;
    // grad_x log r_i(x, sigma) for the analytic mixture classifier
    Vec log_responsibility_grad(int component, const Vec& x, double sigma) const;
};

// Exact Tweedie denoiser of the mixture:
// D(x, sigma) = sum_i r_i (s_i^2 x + sigma^2 mu_i)/(s_i^2 + sigma^2).
DenoiserPtr mixture_denoiser(GaussianMixture mixture);

// g_hat = uncond + omega (cond - uncond); evaluates both branches, 2 NFE.
DenoiserPtr cfg_combine(DenoiserPtr cond, DenoiserPtr uncond, double omega);

// D_hat = D + omega sigma^2 grad; grad is an analytic classifier score
// and does not cost an NFE.
using ClassGrad = std::function<Vec(const Vec&, double)>;
DenoiserPtr classifier_guided(DenoiserPtr base, ClassGrad grad, double omega);

// plain-text key=value mixture description (dim, components, weight.i,
// mean.i, scale.i)
GaussianMixture parse_mixture_config(const std::string& text);
GaussianMixture load_mixture_config(const std::string& path);

}  // namespace res
