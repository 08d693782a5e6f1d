#include "res/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace res {

namespace {
void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::domain_error("denoiser: sigma must be positive and finite");
    }
}
}  // namespace

Vec Denoiser::denoise(const Vec& x, double sigma) {
    check_sigma(sigma);
    if (static_cast<int>(x.size()) != dim_) {
        throw std::invalid_argument("denoiser: input dimension mismatch");
    }
    if (self_counting_) count_.fetch_add(1, std::memory_order_relaxed);
    return denoise_impl(x, sigma);
}

Vec Denoiser::predict_noise(const Vec& x, double sigma) {
    Vec d = denoise(x, sigma);
    for (size_t i = 0; i < d.size(); ++i) d[i] = (x[i] - d[i]) / sigma;
    return d;
}

void GaussianMixture::validate() const {
    if (dim <= 0) throw std::invalid_argument("mixture: dimension must be positive");
    const size_t n = weights.size();
    if (n == 0 || means.size() != n || scales.size() != n) {
        throw std::invalid_argument("mixture: weights/means/scales size mismatch");
    }
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
        if (!(scales[i] > 0.0)) throw std::invalid_argument("mixture: scales must be positive");
        if (static_cast<int>(means[i].size()) != dim) {
            throw std::invalid_argument("mixture: mean dimension mismatch");
        }
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("mixture: weights must sum to 1");
    }
}

namespace {

// per-component log w_i + log N(x; mu_i, (s_i^2 + sigma^2) I)
std::vector<double> component_log_terms(const GaussianMixture& m, const Vec& x, double sigma) {
    std::vector<double> logs(static_cast<size_t>(m.components()));
    for (int i = 0; i < m.components(); ++i) {
        double var = m.scales[static_cast<size_t>(i)] * m.scales[static_cast<size_t>(i)] + sigma * sigma;
        double sq = 0.0;
        const Vec& mu = m.means[static_cast<size_t>(i)];
        for (int j = 0; j < m.dim; ++j) {
            double d = x[static_cast<size_t>(j)] - mu[static_cast<size_t>(j)];
            sq += d * d;
        }
        logs[static_cast<size_t>(i)] = std::log(m.weights[static_cast<size_t>(i)]) -
                                       0.5 * m.dim * std::log(2.0 * M_PI * var) -
                                       0.5 * sq / var;
    }
    return logs;
}

double log_sum_exp(const std::vector<double>& logs) {
    double mx = *std::max_element(logs.begin(), logs.end());
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

}  // namespace

double GaussianMixture::log_density(const Vec& x, double sigma) const {
    check_sigma(sigma);
    return log_sum_exp(component_log_terms(*this, x, sigma));
}

std::vector<double> GaussianMixture::responsibilities(const Vec& x, double sigma) const {
    check_sigma(sigma);
    std::vector<double> logs = component_log_terms(*this, x, sigma);
    double lse = log_sum_exp(logs);
    for (double& v : logs) v = std::exp(v - lse);
    return logs;
}

Vec GaussianMixture::log_responsibility_grad(int component, const Vec& x, double sigma) const {
    if (component < 0 || component >= components()) {
        throw std::out_of_range("mixture: component index out of range");
    }
    std::vector<double> r = responsibilities(x, sigma);
    // grad log r_i = -(x - mu_i)/v_i + sum_j r_j (x - mu_j)/v_j
    Vec grad(static_cast<size_t>(dim), 0.0);
    for (int j = 0; j < components(); ++j) {
        double var = scales[static_cast<size_t>(j)] * scales[static_cast<size_t>(j)] + sigma * sigma;
        double coeff = r[static_cast<size_t>(j)];
        if (j == component) coeff -= 1.0;
        for (int k = 0; k < dim; ++k) {
            grad[static_cast<size_t>(k)] +=
                coeff * (x[static_cast<size_t>(k)] - means[static_cast<size_t>(j)][static_cast<size_t>(k)]) / var;
        }
    }
    return grad;
}

namespace {

class MixtureDenoiser final : public Denoiser {
public:
    explicit MixtureDenoiser(GaussianMixture m) : Denoiser(m.dim), mixture_(std::move(m)) {}

protected:
    Vec denoise_impl(const Vec& x, double sigma) override {
        std::vector<double> r = mixture_.responsibilities(x, sigma);
        Vec out(x.size(), 0.0);
        for (int i = 0; i < mixture_.components(); ++i) {
            double s2 = mixture_.scales[static_cast<size_t>(i)] * mixture_.scales[static_cast<size_t>(i)];
            double var = s2 + sigma * sigma;
            const Vec& mu = mixture_.means[static_cast<size_t>(i)];
            for (size_t j = 0; j < x.size(); ++j) {
                out[j] += r[static_cast<size_t>(i)] * (s2 * x[j] + sigma * sigma * mu[j]) / var;
            }
        }
        return out;
    }

private:
    GaussianMixture mixture_;
};

class CfgDenoiser final : public Denoiser {
public:
    CfgDenoiser(DenoiserPtr cond, DenoiserPtr uncond, double omega)
        : Denoiser(cond->dim(), /*self_counting=*/false),
          cond_(std::move(cond)), uncond_(std::move(uncond)), omega_(omega) {}

    long long nfe() const override { return cond_->nfe() + uncond_->nfe(); }
    void reset_nfe() override {
        cond_->reset_nfe();
        uncond_->reset_nfe();
    }

protected:
    Vec denoise_impl(const Vec& x, double sigma) override {
        Vec c = cond_->denoise(x, sigma);
        Vec u = uncond_->denoise(x, sigma);
        for (size_t i = 0; i < c.size(); ++i) c[i] = u[i] + omega_ * (c[i] - u[i]);
        return c;
    }

private:
    DenoiserPtr cond_;
    DenoiserPtr uncond_;
    double omega_;
};

class ClassifierGuidedDenoiser final : public Denoiser {
public:
    ClassifierGuidedDenoiser(DenoiserPtr base, ClassGrad grad, double omega)
        : Denoiser(base->dim(), /*self_counting=*/false),
          base_(std::move(base)), grad_(std::move(grad)), omega_(omega) {}

    long long nfe() const override { return base_->nfe(); }
    void reset_nfe() override { base_->reset_nfe(); }

protected:
    Vec denoise_impl(const Vec& x, double sigma) override {
        Vec d = base_->denoise(x, sigma);
        Vec g = grad_(x, sigma);
        if (g.size() != d.size()) {
            throw std::invalid_argument("classifier_guided: gradient dimension mismatch");
        }
        for (double v : g) {
            if (!std::isfinite(v)) throw std::domain_error("classifier_guided: non-finite gradient");
        }
        for (size_t i = 0; i < d.size(); ++i) d[i] += omega_ * sigma * sigma * g[i];
        return d;
    }

private:
    DenoiserPtr base_;
    ClassGrad grad_;
    double omega_;
};

}  // namespace

DenoiserPtr mixture_denoiser(GaussianMixture mixture) {
    mixture.validate();
    return std::make_shared<MixtureDenoiser>(std::move(mixture));
}

DenoiserPtr cfg_combine(DenoiserPtr cond, DenoiserPtr uncond, double omega) {
    if (cond->dim() != uncond->dim()) {
        throw std::invalid_argument("cfg_combine: dimension mismatch");
    }
    return std::make_shared<CfgDenoiser>(std::move(cond), std::move(uncond), omega);
}

DenoiserPtr classifier_guided(DenoiserPtr base, ClassGrad grad, double omega) {
    return std::make_shared<ClassifierGuidedDenoiser>(std::move(base), std::move(grad), omega);
}

namespace {

std::vector<double> parse_double_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(std::stod(item));
    }
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

GaussianMixture parse_mixture_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("mixture config: expected key=value, got '" + line + "'");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("mixture config: missing key '" + key + "'");
        return it->second;
    };

    GaussianMixture m;
    m.dim = std::stoi(require("dim"));
    int n = std::stoi(require("components"));
    for (int i = 1; i <= n; ++i) {
        std::string suffix = "." + std::to_string(i);
        m.weights.push_back(std::stod(require("weight" + suffix)));
        m.means.push_back(parse_double_list(require("mean" + suffix)));
        m.scales.push_back(std::stod(require("scale" + suffix)));
    }
    m.validate();
    return m;
}

GaussianMixture load_mixture_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("mixture config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_mixture_config(buffer.str());
}

}  // namespace res
