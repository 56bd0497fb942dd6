#pragma once

#include <iosfwd>
#include <string>

#include "foldmix/mcmc.hpp"
#include "foldmix/model.hpp"
#include "foldmix/simulation.hpp"

namespace foldmix {

// Exit codes shared by the commands and the binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;       // unreadable/invalid input or config
inline constexpr int kExitInit = 3;         // sampler initialization failure
inline constexpr int kExitStudyFailed = 1;  // too many failed study runs

struct FitOptions {
    ModelSpec spec;
    McmcConfig mcmc;
    int K = 0;  // 0 = infer from data
    bool drop_baseline = false;
    bool save_draws = true;
    std::string out_dir = ".";
};

struct SimulateOptions {
    ScenarioConfig scenario;
    std::uint64_t seed = 1;
    bool write_truth = true;
    std::string out_dir = ".";
};

struct StudyOptions {
    StudyConfig study;
    std::string out_dir = ".";
};

// Parse a JSON config file into options (missing keys keep defaults).
// Throws SchemaError on unreadable/invalid config.
FitOptions parse_fit_config(const std::string& path);
SimulateOptions parse_simulate_config(const std::string& path);
StudyOptions parse_study_config(const std::string& path);

// Fit one model to a dataset; writes summary.csv, acceptance.csv and
// (optionally) draws.csv under out_dir.
int cmd_fit(const std::string& data_path, const FitOptions& opt, std::ostream& log);

// Simulate one cohort; writes data.csv (+ truth.json) under out_dir.
int cmd_simulate(const SimulateOptions& opt, std::ostream& log);

// Run (this shard of) a simulation study; writes per-run records and the
// aggregated table under out_dir, reusing records from earlier shards or
// interrupted sessions found there.
int cmd_study(const StudyOptions& opt, std::ostream& log);

}  // namespace foldmix
