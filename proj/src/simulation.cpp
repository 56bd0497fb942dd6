#include "foldmix/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "foldmix/distributions.hpp"

namespace foldmix {

namespace {
constexpr std::uint64_t kRunStreamTag = 0x73696d72756eULL;  // "simrun"
constexpr std::uint64_t kFitStreamTag = 0x666974ULL;        // "fit"
}

LongitudinalDataset simulate_complete(const ScenarioConfig& sc, RngStream& rng, SimTruth* truth) {
    if (sc.K < 1 || sc.n_subjects < 0) throw std::invalid_argument("invalid scenario");
    LongitudinalDataset ds;
    ds.n_times = sc.K;
    ds.subjects.reserve(sc.n_subjects);
    if (truth) {
        truth->tad = sc.tad();
        truth->subjects.clear();
        truth->subjects.reserve(sc.n_subjects);
    }
    for (int i = 0; i < sc.n_subjects; ++i) {
        SubjectTruth st;
        st.group = rng.bernoulli(sc.assign_prob) ? ExposureGroup::exposed
                                                 : ExposureGroup::unexposed;
        st.sign = rng.bernoulli(sc.sign_neg_prob) ? -1 : 1;
        const bool exposed = st.group == ExposureGroup::exposed;
        const double fe0 = exposed ? sc.d0 : sc.c0;
        const double fe1 = exposed ? sc.d1 : sc.c1;
        st.re.intercept = rng.normal(0.0, fe0 * sc.omega);
        st.re.slope = rng.normal(0.0, fe1 * sc.omega);

        SubjectData subj;
        subj.id = "s" + std::to_string(i);
        st.id = subj.id;
        subj.group = st.group;
        subj.observations.reserve(sc.K);
        double mu_sum = 0.0;
        for (int t = 0; t < sc.K; ++t) {
            const double mu = fe0 + st.re.intercept + (fe1 + st.re.slope) * t;
            mu_sum += mu;
            const double y = rng.normal(st.sign * mu, sc.sigma);
            subj.observations.push_back({t, std::fabs(y)});
        }
        st.trajectory_mean = mu_sum / sc.K;
        subj.dropout = {sc.K - 1, 0};
        ds.subjects.push_back(std::move(subj));
        if (truth) truth->subjects.push_back(st);
    }
    return ds;
}

DropoutTally simulate_dropout(LongitudinalDataset& data, const SimTruth& truth,
                              const ScenarioConfig& sc, RngStream& rng) {
    if (truth.subjects.size() != data.subjects.size())
        throw std::invalid_argument("simulate_dropout: truth/subject mismatch");
    DropoutTally tally;
    // The dropout clock runs over the K measurement occasions (1-based), so
    // an event counts whenever T <= K; measurement values live on the
    // t_k = k-1 grid, which puts the last observed value time at
    // ceil(T) - 2. Subjects whose event lands in (0, 1] have no observed
    // response at all and leave the cohort, as does any real study subject
    // without measurements.
    const double horizon = sc.K;
    std::vector<bool> keep(data.subjects.size(), true);
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        double r = truth.subjects[i].trajectory_mean;
        if (!(r > 0.0)) {
            r = 1e-6;  // Gamma parameters need R > 0; rare random-effect tail
            ++tally.clamped_R;
        }
        const double t_rec =
            sc.recovery_delay +
            gamma_sample({1.0 + sc.recovery_shape_coef * r, sc.recovery_scale_coef * r}, rng);
        const double t_death =
            gamma_sample({1.0 + sc.death_shape_coef / r, sc.death_scale_coef / r}, rng);
        const double t_drop = std::min(t_rec, t_death);
        const bool is_recovery = t_drop == t_rec;  // ties break to recovery

        SubjectData& subj = data.subjects[i];
        if (t_drop <= horizon) {
            if (is_recovery)
                ++tally.recovered;
            else
                ++tally.died;
            const int d = static_cast<int>(std::ceil(t_drop)) - 2;
            if (d < 0) {
                keep[i] = false;
                ++tally.excluded;
            } else {
                subj.dropout.last_time = d;
                subj.dropout.cause = is_recovery ? 1 : 2;
                subj.observations.resize(d + 1);
            }
        } else {
            subj.dropout = {sc.K - 1, 0};
            ++tally.completers;
        }
    }
    if (tally.excluded > 0) {
        std::vector<SubjectData> kept;
        kept.reserve(data.subjects.size() - tally.excluded);
        for (std::size_t i = 0; i < data.subjects.size(); ++i)
            if (keep[i]) kept.push_back(std::move(data.subjects[i]));
        data.subjects = std::move(kept);
    }
    return tally;
}

std::uint64_t study_run_seed(std::uint64_t master, int scenario_index, int run_index) {
    return derive_seed(master, {kRunStreamTag, static_cast<std::uint64_t>(scenario_index),
                                static_cast<std::uint64_t>(run_index)});
}

namespace {

RunRecord execute_run(const StudyConfig& cfg, int scenario_index, ModelVariant model,
                      int run_index, const LongitudinalDataset& data) {
    RunRecord rec;
    rec.scenario_index = scenario_index;
    rec.model = model;
    rec.run_index = run_index;
    rec.seed = study_run_seed(cfg.master_seed, scenario_index, run_index);
    try {
        ModelSpec spec = cfg.base_spec;
        spec.variant = model;
        spec.K = cfg.scenarios[scenario_index].K;
        // the constraint prior's omega tracks the scenario being fitted
        spec.prior.omega = cfg.scenarios[scenario_index].omega;
        McmcConfig mc = cfg.mcmc;
        mc.workers = 0;  // run-level parallelism only
        mc.seed = derive_seed(rec.seed, {kFitStreamTag, static_cast<std::uint64_t>(model)});
        const std::vector<ChainOutput> chains = run_chains(data, spec, mc);
        rec.ad = summarize(chains, "AD");
        rec.rhat_ad = chains.size() >= 2 ? split_rhat(chains, "AD").value : 1.0;
        for (const auto& c : chains) {
            rec.violations += c.violations;
            rec.nonfinite += c.nonfinite;
        }
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

std::vector<StudyCell> aggregate_study(const StudyConfig& cfg,
                                       const std::vector<RunRecord>& records) {
    std::map<std::pair<int, int>, std::vector<const RunRecord*>> cells;
    for (const auto& r : records)
        cells[{r.scenario_index, static_cast<int>(r.model)}].push_back(&r);

    std::vector<StudyCell> out;
    for (auto& [key, recs] : cells) {
        std::sort(recs.begin(), recs.end(), [](const RunRecord* a, const RunRecord* b) {
            return a->run_index < b->run_index;
        });
        StudyCell cell;
        cell.scenario_index = key.first;
        cell.model = static_cast<ModelVariant>(key.second);
        const ScenarioConfig& sc = cfg.scenarios.at(key.first);
        cell.sigma = sc.sigma;
        cell.omega = sc.omega;
        cell.tad = sc.tad();

        std::vector<double> means;
        for (const RunRecord* r : recs) {
            if (!r->ok) {
                ++cell.n_failed;
                continue;
            }
            ++cell.n_runs;
            means.push_back(r->ad.mean);
            cell.avg_mean += r->ad.mean;
            cell.avg_median += r->ad.median;
            cell.avg_sd += r->ad.sd;
            cell.avg_q025 += r->ad.q025;
            cell.avg_q975 += r->ad.q975;
            // posterior expected squared error, averaged across runs
            cell.mse += (r->ad.mean - cell.tad) * (r->ad.mean - cell.tad) + r->ad.sd * r->ad.sd;
            cell.violations += r->violations;
            cell.nonfinite += r->nonfinite;
            if (r->rhat_ad > cfg.rhat_warn) ++cell.n_rhat_warn;
        }
        if (cell.n_runs > 0) {
            const double n = cell.n_runs;
            cell.avg_mean /= n;
            cell.avg_median /= n;
            cell.avg_sd /= n;
            cell.avg_q025 /= n;
            cell.avg_q975 /= n;
            cell.mse /= n;
            cell.bias = cell.avg_mean - cell.tad;
            if (cell.n_runs > 1) {
                double ss = 0.0;
                for (double mv : means) ss += (mv - cell.avg_mean) * (mv - cell.avg_mean);
                cell.emp_se = std::sqrt(ss / (n - 1.0));
            }
        }
        const int total = cell.n_runs + cell.n_failed;
        cell.valid = total > 0 &&
                     static_cast<double>(cell.n_failed) / total <= cfg.max_failure_fraction;
        out.push_back(std::move(cell));
    }
    return out;
}

StudyResult run_study(const StudyConfig& cfg, const std::vector<RunRecord>& done) {
    if (cfg.scenarios.empty() || cfg.models.empty())
        throw std::invalid_argument("run_study: scenarios and models must be nonempty");
    if (cfg.shard_count < 1 || cfg.shard_index < 0 || cfg.shard_index >= cfg.shard_count)
        throw std::invalid_argument("run_study: bad shard spec");

    // (scenario, run) tasks assigned to this shard and not already done;
    // a task with records for only some models is re-run in full and its
    // stale partial records dropped
    std::map<std::pair<int, int>, std::vector<RunRecord>> have;
    for (const auto& r : done) have[{r.scenario_index, r.run_index}].push_back(r);

    struct Task {
        int scenario;
        int run;
    };
    std::vector<Task> tasks;
    const int n_scen = static_cast<int>(cfg.scenarios.size());
    for (int s = 0; s < n_scen; ++s) {
        for (int r = 0; r < cfg.n_runs; ++r) {
            const long global = static_cast<long>(s) * cfg.n_runs + r;
            if (global % cfg.shard_count != cfg.shard_index) continue;
            const auto it = have.find({s, r});
            if (it != have.end()) {
                if (it->second.size() >= cfg.models.size()) continue;
                have.erase(it);
            }
            tasks.push_back({s, r});
        }
    }

    std::vector<std::vector<RunRecord>> results(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= tasks.size()) return;
            const Task task = tasks[k];
            const ScenarioConfig& sc = cfg.scenarios[task.scenario];
            RngStream rng(study_run_seed(cfg.master_seed, task.scenario, task.run));
            SimTruth truth;
            LongitudinalDataset data = simulate_complete(sc, rng, &truth);
            if (sc.dropout_enabled) simulate_dropout(data, truth, sc, rng);
            for (ModelVariant m : cfg.models)
                results[k].push_back(execute_run(cfg, task.scenario, m, task.run, data));
        }
    };
    if (cfg.workers > 1) {
        std::vector<std::thread> pool;
        for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        worker();
    }

    StudyResult out;
    for (const auto& [key, recs] : have)
        for (const auto& r : recs) out.records.push_back(r);
    for (auto& rr : results)
        for (auto& r : rr) out.records.push_back(std::move(r));
    std::sort(out.records.begin(), out.records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.scenario_index != b.scenario_index) return a.scenario_index < b.scenario_index;
        if (a.model != b.model) return a.model < b.model;
        return a.run_index < b.run_index;
    });
    out.cells = aggregate_study(cfg, out.records);
    return out;
}

}  // namespace foldmix
