#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "foldmix/cli.hpp"
#include "foldmix/io.hpp"

namespace {

// Parses "i/n" into (index, count).
bool parse_shard(const std::string& text, int& index, int& count) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return false;
    try {
        index = std::stoi(text.substr(0, slash));
        count = std::stoi(text.substr(slash + 1));
    } catch (...) {
        return false;
    }
    return count >= 1 && index >= 0 && index < count;
}

bool parse_temporal_flag(const std::string& text, foldmix::TemporalStructure& ts) {
    if (text == "linear") {
        ts.kind = foldmix::TemporalKind::Linear;
    } else if (text == "flexible") {
        ts.kind = foldmix::TemporalKind::Flexible;
    } else if (text.rfind("grouped:", 0) == 0) {
        ts.kind = foldmix::TemporalKind::FlexibleGrouped;
        try {
            ts.group_size = std::stoi(text.substr(8));
        } catch (...) {
            return false;
        }
        if (ts.group_size < 1) return false;
    } else {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian folded-normal mixed-effects models for longitudinal magnitude data"};
    app.require_subcommand(1);

    // ---- fit ----------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "Fit a model (A|B|C|D) to a dataset CSV");
    std::string fit_data, fit_config, fit_model, fit_temporal, fit_out;
    std::optional<std::uint64_t> fit_seed;
    std::optional<int> fit_chains, fit_burnin, fit_samples, fit_workers, fit_K;
    bool fit_drop_baseline = false;
    fit->add_option("data", fit_data, "input dataset CSV")->required();
    fit->add_option("--config", fit_config, "JSON config file");
    fit->add_option("--model", fit_model, "model variant: A|B|C|D");
    fit->add_option("--temporal", fit_temporal, "linear|flexible|grouped:N (joint models)");
    fit->add_option("--seed", fit_seed, "RNG seed");
    fit->add_option("--chains", fit_chains, "number of chains");
    fit->add_option("--burnin", fit_burnin, "burn-in iterations per chain");
    fit->add_option("--samples", fit_samples, "retained iterations per chain");
    fit->add_option("--workers", fit_workers, "parallel chain workers");
    fit->add_option("--K", fit_K, "number of measurement times (default: infer)");
    fit->add_flag("--drop-baseline", fit_drop_baseline, "drop the t=0 row of every subject");
    fit->add_option("--out", fit_out, "output directory");

    // ---- simulate -------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Generate a cohort from the study DGP");
    std::string sim_config, sim_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> sim_n;
    std::optional<double> sim_sigma, sim_omega, sim_tad;
    bool sim_dropout = false;
    sim->add_option("--config", sim_config, "JSON scenario file");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--n", sim_n, "number of subjects");
    sim->add_option("--sigma", sim_sigma, "measurement error SD");
    sim->add_option("--omega", sim_omega, "random-effect SD fraction");
    sim->add_option("--tad", sim_tad, "true average distance (sets d0)");
    sim->add_flag("--dropout", sim_dropout, "apply the competing-risk dropout mechanism");
    sim->add_option("--out", sim_out, "output directory");

    // ---- study ----------------------------------------------------------
    auto* study = app.add_subcommand("study", "Run a Monte Carlo simulation study");
    std::string study_config, study_shard, study_out;
    std::optional<std::uint64_t> study_seed;
    std::optional<int> study_workers, study_runs;
    study->add_option("--config", study_config, "JSON study file")->required();
    study->add_option("--shard", study_shard, "run shard i/n of the grid");
    study->add_option("--seed", study_seed, "master seed");
    study->add_option("--workers", study_workers, "parallel run workers");
    study->add_option("--runs", study_runs, "simulation runs per scenario");
    study->add_option("--out", study_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(fit)) {
            foldmix::FitOptions opt = foldmix::parse_fit_config(fit_config);
            if (!fit_model.empty()) {
                const auto mv = foldmix::variant_from_name(fit_model);
                if (!mv) {
                    std::cerr << "error: unknown model '" << fit_model << "'\n";
                    return foldmix::kExitSchema;
                }
                opt.spec.variant = *mv;
            }
            if (!fit_temporal.empty() && !parse_temporal_flag(fit_temporal, opt.spec.temporal)) {
                std::cerr << "error: bad --temporal '" << fit_temporal
                          << "' (linear|flexible|grouped:N)\n";
                return foldmix::kExitSchema;
            }
            if (fit_seed) opt.mcmc.seed = *fit_seed;
            if (fit_chains) opt.mcmc.n_chains = *fit_chains;
            if (fit_burnin) opt.mcmc.burn_in = *fit_burnin;
            if (fit_samples) opt.mcmc.n_samples = *fit_samples;
            if (fit_workers) opt.mcmc.workers = *fit_workers;
            if (fit_K) opt.K = *fit_K;
            if (fit_drop_baseline) opt.drop_baseline = true;
            if (!fit_out.empty()) opt.out_dir = fit_out;
            return foldmix::cmd_fit(fit_data, opt, std::cout);
        }

        if (app.got_subcommand(sim)) {
            foldmix::SimulateOptions opt = foldmix::parse_simulate_config(sim_config);
            if (sim_seed) opt.seed = *sim_seed;
            if (sim_n) opt.scenario.n_subjects = *sim_n;
            if (sim_sigma) opt.scenario.sigma = *sim_sigma;
            if (sim_omega) opt.scenario.omega = *sim_omega;
            if (sim_tad)
                opt.scenario.d0 = opt.scenario.c0 +
                                  (opt.scenario.c1 - opt.scenario.d1) * 0.5 *
                                      (opt.scenario.K - 1) -
                                  *sim_tad;
            if (sim_dropout) opt.scenario.dropout_enabled = true;
            if (!sim_out.empty()) opt.out_dir = sim_out;
            return foldmix::cmd_simulate(opt, std::cout);
        }

        if (app.got_subcommand(study)) {
            foldmix::StudyOptions opt = foldmix::parse_study_config(study_config);
            if (study_seed) opt.study.master_seed = *study_seed;
            if (study_workers) opt.study.workers = *study_workers;
            if (study_runs) opt.study.n_runs = *study_runs;
            if (!study_shard.empty() &&
                !parse_shard(study_shard, opt.study.shard_index, opt.study.shard_count)) {
                std::cerr << "error: bad --shard '" << study_shard << "' (expected i/n)\n";
                return foldmix::kExitSchema;
            }
            if (!study_out.empty()) opt.out_dir = study_out;
            return foldmix::cmd_study(opt, std::cout);
        }
    } catch (const foldmix::SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return foldmix::kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
