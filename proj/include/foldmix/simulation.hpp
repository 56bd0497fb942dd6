#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "foldmix/data.hpp"
#include "foldmix/diagnostics.hpp"
#include "foldmix/mcmc.hpp"
#include "foldmix/model.hpp"
#include "foldmix/rng.hpp"

namespace foldmix {

// One data-generating setting. Subjects are assigned to groups with
// assign_prob; signed outcomes Y ~ N(gamma * mu, sigma^2) flip sign with
// sign_neg_prob; Z = |Y|. Dropout times (when enabled) come from two
// competing Gamma submodels driven by R = mean expected trajectory:
//   recovery: delay + Gamma(1 + rs*R,  rc*R)   (shape-scale)
//   death:            Gamma(1 + ds/R,  dc/R)
struct ScenarioConfig {
    int n_subjects = 100;
    int K = 7;
    double assign_prob = 0.5;
    double sign_neg_prob = 0.6;
    double c0 = 0.15;
    double c1 = 0.015;
    double d0 = 0.08;
    double d1 = 0.005;
    double sigma = 0.06;
    double omega = 0.5;
    bool dropout_enabled = false;
    double recovery_delay = 0.75;
    double recovery_shape_coef = 10.0;
    double recovery_scale_coef = 50.0;
    double death_shape_coef = 0.5;
    double death_scale_coef = 0.3;

    double tad() const { return c0 - d0 + (c1 - d1) * 0.5 * (K - 1); }
};

struct SubjectTruth {
    std::string id;
    ExposureGroup group = ExposureGroup::unexposed;
    int sign = 1;  // gamma_i
    RandomEffects re;
    double trajectory_mean = 0.0;  // R_i
};

struct SimTruth {
    double tad = 0.0;
    std::vector<SubjectTruth> subjects;
};

// Cohort accounting: completers + recovered + died == n always. excluded
// counts event subjects removed for having no observed response (event in
// the first interval); they still appear in their cause's count.
struct DropoutTally {
    long completers = 0;
    long recovered = 0;
    long died = 0;
    long excluded = 0;
    long clamped_R = 0;  // subjects whose trajectory mean had to be clamped
};

// Complete-data mechanism; every subject observed at all K times.
LongitudinalDataset simulate_complete(const ScenarioConfig& sc, RngStream& rng,
                                      SimTruth* truth = nullptr);

// Applies the competing-risk dropout mechanism in place: draws the two
// latent times, truncates observations, writes DropoutRecords, and removes
// subjects left without any observation. After the call, data.subjects may
// be shorter than truth.subjects; match by id when both are needed.
DropoutTally simulate_dropout(LongitudinalDataset& data, const SimTruth& truth,
                              const ScenarioConfig& sc, RngStream& rng);

// ---- Monte Carlo study runner ---------------------------------------

struct StudyConfig {
    std::vector<ScenarioConfig> scenarios;
    std::vector<ModelVariant> models;
    int n_runs = 1000;
    std::uint64_t master_seed = 1;
    McmcConfig mcmc;      // chains / burn-in / samples per fit
    ModelSpec base_spec;  // priors and temporal structure shared by fits
    int workers = 1;
    int shard_index = 0;
    int shard_count = 1;
    double max_failure_fraction = 0.01;
    double rhat_warn = 1.05;
};

struct RunRecord {
    int scenario_index = 0;
    ModelVariant model = ModelVariant::FoldedMixed;
    int run_index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    PosteriorSummary ad;
    double rhat_ad = 1.0;
    long violations = 0;
    long nonfinite = 0;
};

// Aggregated performance measures for one (scenario, model) cell.
struct StudyCell {
    int scenario_index = 0;
    ModelVariant model = ModelVariant::FoldedMixed;
    double sigma = 0.0;
    double omega = 0.0;
    double tad = 0.0;
    int n_runs = 0;
    int n_failed = 0;
    double bias = 0.0;      // avg posterior mean - TAD
    double avg_mean = 0.0;
    double avg_median = 0.0;
    double avg_sd = 0.0;
    double emp_se = 0.0;    // SD of posterior means across runs
    double avg_q025 = 0.0;
    double avg_q975 = 0.0;
    double mse = 0.0;       // avg posterior expected squared error
    long violations = 0;
    long nonfinite = 0;
    int n_rhat_warn = 0;
    bool valid = false;     // failure fraction below the threshold
};

struct StudyResult {
    std::vector<RunRecord> records;
    std::vector<StudyCell> cells;
};

// Seed of one simulation run; sharding and resume rely on this being a
// pure function of (master, scenario, run).
std::uint64_t study_run_seed(std::uint64_t master, int scenario_index, int run_index);

// Executes this shard's share of the (scenario x run) grid, fitting every
// model to the same simulated dataset, and aggregates whatever records are
// complete. `done` records (from previous shards/sessions) are reused.
StudyResult run_study(const StudyConfig& cfg, const std::vector<RunRecord>& done = {});

// Aggregation is deterministic in (scenario, model, run) order so that
// merged shards reproduce an unsharded run exactly.
std::vector<StudyCell> aggregate_study(const StudyConfig& cfg,
                                       const std::vector<RunRecord>& records);

}  // namespace foldmix
