// Command-line front end. Talks to the solver library exclusively
// through the C interface in res.h.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "res.h"

namespace {

struct StringOut {
    char* value = nullptr;
    ~StringOut() { res_string_free(value); }
};

int fail(res_status status, const std::string& where) {
    std::cerr << "error: " << where << ": " << res_status_message(status) << "\n";
    return 1;
}

int emit(const char* text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open " << out_path << " for writing\n";
        return 1;
    }
    out << text;
    return 0;
}

struct MixtureHandle {
    res_mixture* value = nullptr;
    ~MixtureHandle() { res_mixture_free(value); }
};

// empty path = library's built-in toy mixture (handle stays null)
int load_mixture(const std::string& path, MixtureHandle& handle) {
    if (path.empty()) return 0;
    res_status status = res_mixture_load(path.c_str(), &handle.value);
    if (status != RES_OK) return fail(status, "loading mixture " + path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exponential integrator toolkit for diffusion sampling"};
    app.require_subcommand(1);

    std::string out_path;
    app.add_option("-o,--out", out_path, "write output to a file instead of stdout")
        ->capture_default_str();

    // ---- psi-check ----
    auto* psi = app.add_subcommand("psi-check", "audit order conditions of a tableau");
    std::string psi_scheme = "res2";
    double psi_c2 = NAN, psi_c3 = NAN, psi_gamma = NAN;
    psi->add_option("-s,--scheme", psi_scheme, "expeuler|res2|res3|dpmpp2|dpmpp3")
        ->capture_default_str();
    psi->add_option("--c2", psi_c2, "second node (default: scheme default)");
    psi->add_option("--c3", psi_c3, "third node, 3-stage schemes only");
    psi->add_option("--gamma", psi_gamma, "res3 weight (default: from node constraint)");

    // ---- convergence ----
    auto* conv = app.add_subcommand("convergence", "empirical order on a manufactured problem");
    std::string conv_method = "res2";
    std::string conv_problem = "sin";
    unsigned long long conv_seed = 0;
    std::vector<int> conv_steps = {8, 16, 32, 64, 128, 256};
    conv->add_option("-m,--method", conv_method, "scheme name, -m suffix for multistep")
        ->capture_default_str();
    conv->add_option("-p,--problem", conv_problem, "sin|sin8")->capture_default_str();
    conv->add_option("--seed", conv_seed, "seed for the sin8 trajectory")->capture_default_str();
    conv->add_option("-n,--steps", conv_steps, "step counts for the refinement sweep")
        ->capture_default_str();

    // shared experiment flags for defects / sample / eta-sweep
    std::string mixture_path;
    std::string schedule_kind = "edm";
    double rho = 7.0;
    double sigma_min = 0.002, sigma_max = 80.0;
    std::string param = "logsnr";
    unsigned long long seed = 0;
    int reference_steps = 10000;

    auto add_experiment_flags = [&](CLI::App* cmd, bool with_reference) {
        cmd->add_option("--mixture", mixture_path, "mixture config file (default: built-in toy)");
        cmd->add_option("--schedule", schedule_kind, "edm|uniform-sigma|uniform-lambda")
            ->capture_default_str();
        cmd->add_option("--rho", rho, "EDM schedule exponent")->capture_default_str();
        cmd->add_option("--sigma-min", sigma_min)->capture_default_str();
        cmd->add_option("--sigma-max", sigma_max)->capture_default_str();
        cmd->add_option("--param", param, "edm|logsnr|neglogsnr")->capture_default_str();
        cmd->add_option("--seed", seed)->capture_default_str();
        if (with_reference) {
            cmd->add_option("--reference-steps", reference_steps, "RK4 reference resolution")
                ->capture_default_str();
        }
    };

    // ---- defects ----
    auto* def = app.add_subcommand("defects", "terminal defect vs a dense RK4 reference");
    std::vector<std::string> def_methods = {"expeuler", "res2", "dpmpp2", "res3"};
    std::vector<long long> def_budgets = {8, 16, 32, 64, 128};
    def->add_option("-m,--methods", def_methods, "methods to compare")->capture_default_str();
    def->add_option("--nfe", def_budgets, "denoiser-evaluation budgets")->capture_default_str();
    add_experiment_flags(def, true);

    // ---- sample ----
    auto* smp = app.add_subcommand("sample", "run one sampling trajectory");
    std::string smp_scheme = "res2";
    double smp_c2 = NAN, smp_c3 = NAN, smp_gamma = NAN;
    int smp_steps = 32;
    bool smp_multistep = false;
    bool smp_final_denoise = false;
    double smp_eta = 0.0;
    smp->add_option("-s,--scheme", smp_scheme, "expeuler|res2|res3|dpmpp2|dpmpp3|heun|rk4")
        ->capture_default_str();
    smp->add_option("--c2", smp_c2, "second node");
    smp->add_option("--c3", smp_c3, "third node");
    smp->add_option("--gamma", smp_gamma, "res3 weight");
    smp->add_option("-n,--steps", smp_steps, "number of solver steps")->capture_default_str();
    smp->add_flag("--multistep", smp_multistep, "reuse the previous evaluation (order 2)");
    smp->add_flag("--final-denoise", smp_final_denoise, "replace the last state with D(x, sigma_min)");
    smp->add_option("--eta", smp_eta, "churn level, 0 = deterministic")->capture_default_str();
    add_experiment_flags(smp, false);

    // ---- eta-sweep ----
    auto* eta_cmd = app.add_subcommand("eta-sweep", "defect as a function of the churn level");
    std::string eta_method = "res2";
    long long eta_budget = 64;
    std::vector<double> eta_values = {0.0, 0.1, 0.2, 0.4, 0.8};
    eta_cmd->add_option("-m,--method", eta_method)->capture_default_str();
    eta_cmd->add_option("--nfe", eta_budget, "denoiser-evaluation budget")->capture_default_str();
    eta_cmd->add_option("--eta", eta_values, "churn levels to sweep")->capture_default_str();
    add_experiment_flags(eta_cmd, true);

    CLI11_PARSE(app, argc, argv);

    res_experiment_config config;
    res_experiment_config_init(&config);
    config.schedule_kind = schedule_kind.c_str();
    config.rho = rho;
    config.sigma_min = sigma_min;
    config.sigma_max = sigma_max;
    config.param = param.c_str();
    config.seed = seed;
    config.reference_steps = reference_steps;

    if (psi->parsed()) {
        StringOut csv;
        int pass = 0;
        res_status status =
            res_psi_check_csv(psi_scheme.c_str(), psi_c2, psi_c3, psi_gamma, &csv.value, &pass);
        if (status != RES_OK) return fail(status, "psi-check");
        int rc = emit(csv.value, out_path);
        return rc != 0 ? rc : (pass ? 0 : 2);
    }

    if (conv->parsed()) {
        StringOut csv;
        res_status status =
            res_convergence_csv(conv_method.c_str(), conv_problem.c_str(), conv_seed,
                                conv_steps.data(), static_cast<int>(conv_steps.size()), &csv.value);
        if (status != RES_OK) return fail(status, "convergence");
        return emit(csv.value, out_path);
    }

    if (def->parsed()) {
        MixtureHandle mixture;
        if (int rc = load_mixture(mixture_path, mixture); rc != 0) return rc;
        std::vector<const char*> method_ptrs;
        for (const std::string& m : def_methods) method_ptrs.push_back(m.c_str());
        StringOut csv;
        res_status status = res_defects_csv(mixture.value, &config, method_ptrs.data(),
                                            static_cast<int>(method_ptrs.size()),
                                            def_budgets.data(),
                                            static_cast<int>(def_budgets.size()), &csv.value);
        if (status != RES_OK) return fail(status, "defects");
        return emit(csv.value, out_path);
    }

    if (smp->parsed()) {
        MixtureHandle mixture;
        if (int rc = load_mixture(mixture_path, mixture); rc != 0) return rc;

        res_status status = RES_OK;
        if (mixture.value == nullptr) status = res_mixture_default(&mixture.value);
        res_denoiser* denoiser = nullptr;
        if (status == RES_OK) status = res_denoiser_create(mixture.value, &denoiser);
        if (status != RES_OK) return fail(status, "sample: denoiser");

        res_schedule* schedule = nullptr;
        status = res_schedule_create(schedule_kind.c_str(), sigma_min, sigma_max, smp_steps + 1,
                                     rho, &schedule);
        if (status != RES_OK) {
            res_denoiser_free(denoiser);
            return fail(status, "sample: schedule");
        }

        res_solve_options options;
        res_solve_options_init(&options);
        options.scheme = smp_scheme.c_str();
        options.param = param.c_str();
        options.c2 = smp_c2;
        options.c3 = smp_c3;
        options.gamma = smp_gamma;
        options.multistep = smp_multistep ? 1 : 0;
        options.final_denoise = smp_final_denoise ? 1 : 0;
        options.eta = smp_eta;
        options.seed = seed;

        res_run* run = nullptr;
        status = res_solve(schedule, denoiser, &options, &run);
        int rc;
        if (status != RES_OK) {
            rc = fail(status, "sample");
        } else {
            StringOut csv;
            status = res_run_csv(run, &csv.value);
            rc = status != RES_OK ? fail(status, "sample: csv") : emit(csv.value, out_path);
            if (rc == 0) {
                std::cerr << "nfe=" << res_run_nfe(run) << "\n";
            }
        }
        res_run_free(run);
        res_schedule_free(schedule);
        res_denoiser_free(denoiser);
        return rc;
    }

    if (eta_cmd->parsed()) {
        MixtureHandle mixture;
        if (int rc = load_mixture(mixture_path, mixture); rc != 0) return rc;
        StringOut csv;
        res_status status =
            res_eta_sweep_csv(mixture.value, &config, eta_method.c_str(), eta_budget,
                              eta_values.data(), static_cast<int>(eta_values.size()), &csv.value);
        if (status != RES_OK) return fail(status, "eta-sweep");
        return emit(csv.value, out_path);
    }

    return 0;
}
