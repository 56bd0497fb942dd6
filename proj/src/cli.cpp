#include "foldmix/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "foldmix/io.hpp"

namespace foldmix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open config: " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw SchemaError("config " + path + ": " + e.what());
    }
}

TemporalStructure parse_temporal(const std::string& text) {
    TemporalStructure ts;
    if (text == "linear") {
        ts.kind = TemporalKind::Linear;
    } else if (text == "flexible") {
        ts.kind = TemporalKind::Flexible;
    } else if (text.rfind("grouped:", 0) == 0) {
        ts.kind = TemporalKind::FlexibleGrouped;
        try {
            ts.group_size = std::stoi(text.substr(8));
        } catch (...) {
            throw SchemaError("bad temporal spec: " + text);
        }
        if (ts.group_size < 1) throw SchemaError("temporal group size must be >= 1");
    } else {
        throw SchemaError("bad temporal spec: " + text + " (linear|flexible|grouped:N)");
    }
    return ts;
}

void read_outcome_prior(const json& j, OutcomePriorConfig& p) {
    p.zeta = j.value("zeta", p.zeta);
    p.rho2 = j.value("rho2", p.rho2);
    p.omega = j.value("omega", p.omega);
    p.sigma2_ig_shape = j.value("sigma2_ig_shape", p.sigma2_ig_shape);
    p.sigma2_ig_scale = j.value("sigma2_ig_scale", p.sigma2_ig_scale);
}

void read_reference_prior(const json& j, ReferencePriorConfig& p) {
    p.fe_mean = j.value("fe_mean", p.fe_mean);
    p.fe_var = j.value("fe_var", p.fe_var);
    p.tau_upper = j.value("tau_upper", p.tau_upper);
    p.sigma2_ig_shape = j.value("sigma2_ig_shape", p.sigma2_ig_shape);
    p.sigma2_ig_scale = j.value("sigma2_ig_scale", p.sigma2_ig_scale);
}

void read_mcmc(const json& j, McmcConfig& m) {
    m.n_chains = j.value("chains", m.n_chains);
    m.burn_in = j.value("burnin", m.burn_in);
    m.n_samples = j.value("samples", m.n_samples);
    m.seed = j.value("seed", m.seed);
    m.target_acceptance = j.value("target_acceptance", m.target_acceptance);
    m.adaptation_window = j.value("adaptation_window", m.adaptation_window);
    m.workers = j.value("workers", m.workers);
    m.save_random_effects = j.value("save_random_effects", m.save_random_effects);
}

void read_scenario(const json& j, ScenarioConfig& sc) {
    sc.n_subjects = j.value("n_subjects", sc.n_subjects);
    sc.K = j.value("K", sc.K);
    sc.assign_prob = j.value("assign_prob", sc.assign_prob);
    sc.sign_neg_prob = j.value("sign_neg_prob", sc.sign_neg_prob);
    sc.c0 = j.value("c0", sc.c0);
    sc.c1 = j.value("c1", sc.c1);
    sc.d0 = j.value("d0", sc.d0);
    sc.d1 = j.value("d1", sc.d1);
    sc.sigma = j.value("sigma", sc.sigma);
    sc.omega = j.value("omega", sc.omega);
    sc.dropout_enabled = j.value("dropout", sc.dropout_enabled);
    sc.recovery_delay = j.value("recovery_delay", sc.recovery_delay);
    sc.recovery_shape_coef = j.value("recovery_shape_coef", sc.recovery_shape_coef);
    sc.recovery_scale_coef = j.value("recovery_scale_coef", sc.recovery_scale_coef);
    sc.death_shape_coef = j.value("death_shape_coef", sc.death_shape_coef);
    sc.death_scale_coef = j.value("death_scale_coef", sc.death_scale_coef);
    if (j.contains("tad")) {
        // derive d0 from the requested true average distance
        const double tad = j["tad"].get<double>();
        sc.d0 = sc.c0 + (sc.c1 - sc.d1) * 0.5 * (sc.K - 1) - tad;
    }
}

std::string shard_file_name(int index, int count) {
    return "runs_shard_" + std::to_string(index) + "_of_" + std::to_string(count) + ".csv";
}

void check_mcmc_config(const McmcConfig& m) {
    if (m.n_chains < 1) throw SchemaError("config: chains must be >= 1");
    if (m.burn_in < 0) throw SchemaError("config: burnin must be >= 0");
    if (m.n_samples < 1) throw SchemaError("config: samples must be >= 1");
    if (m.adaptation_window < 1) throw SchemaError("config: adaptation_window must be >= 1");
}

}  // namespace

FitOptions parse_fit_config(const std::string& path) {
    FitOptions opt;
    if (path.empty()) return opt;
    const json j = load_json(path);
    const std::string model = j.value("model", std::string("B"));
    const auto mv = variant_from_name(model);
    if (!mv) throw SchemaError("unknown model '" + model + "' (A|B|C|D)");
    opt.spec.variant = *mv;
    opt.K = j.value("K", opt.K);
    if (j.contains("prior")) read_outcome_prior(j["prior"], opt.spec.prior);
    if (j.contains("reference_prior")) read_reference_prior(j["reference_prior"], opt.spec.reference_prior);
    if (j.contains("temporal")) opt.spec.temporal = parse_temporal(j["temporal"].get<std::string>());
    opt.spec.dropout_prior_sd = j.value("dropout_prior_sd", opt.spec.dropout_prior_sd);
    read_mcmc(j, opt.mcmc);
    opt.drop_baseline = j.value("drop_baseline", opt.drop_baseline);
    opt.save_draws = j.value("save_draws", opt.save_draws);
    opt.out_dir = j.value("out", opt.out_dir);
    return opt;
}

SimulateOptions parse_simulate_config(const std::string& path) {
    SimulateOptions opt;
    if (path.empty()) return opt;
    const json j = load_json(path);
    read_scenario(j, opt.scenario);
    opt.seed = j.value("seed", opt.seed);
    opt.write_truth = j.value("write_truth", opt.write_truth);
    opt.out_dir = j.value("out", opt.out_dir);
    return opt;
}

StudyOptions parse_study_config(const std::string& path) {
    StudyOptions opt;
    StudyConfig& st = opt.study;
    st.mcmc.n_chains = 4;
    st.mcmc.burn_in = 2000;
    st.mcmc.n_samples = 2000;
    if (path.empty()) {
        st.scenarios.push_back(ScenarioConfig{});
        st.models = {ModelVariant::FoldedMixed};
        return opt;
    }
    const json j = load_json(path);

    ScenarioConfig base;
    if (j.contains("scenario")) read_scenario(j["scenario"], base);

    std::vector<double> sigmas = j.value("sigma", std::vector<double>{base.sigma});
    std::vector<double> omegas = j.value("omega", std::vector<double>{base.omega});
    std::vector<double> d0s;
    if (j.contains("tad")) {
        for (double tad : j["tad"].get<std::vector<double>>())
            d0s.push_back(base.c0 + (base.c1 - base.d1) * 0.5 * (base.K - 1) - tad);
    } else {
        d0s = j.value("d0", std::vector<double>{base.d0});
    }
    const bool dropout = j.value("dropout", base.dropout_enabled);
    for (double sg : sigmas)
        for (double om : omegas)
            for (double d0 : d0s) {
                ScenarioConfig sc = base;
                sc.sigma = sg;
                sc.omega = om;
                sc.d0 = d0;
                sc.dropout_enabled = dropout;
                st.scenarios.push_back(sc);
            }

    for (const auto& name : j.value("models", std::vector<std::string>{"B"})) {
        const auto mv = variant_from_name(name);
        if (!mv) throw SchemaError("unknown model '" + name + "' (A|B|C|D)");
        st.models.push_back(*mv);
    }
    st.n_runs = j.value("runs", st.n_runs);
    st.master_seed = j.value("seed", st.master_seed);
    read_mcmc(j, st.mcmc);
    st.workers = j.value("workers", st.workers);
    st.max_failure_fraction = j.value("max_failure_fraction", st.max_failure_fraction);
    st.rhat_warn = j.value("rhat_warn", st.rhat_warn);

    if (j.contains("prior")) read_outcome_prior(j["prior"], st.base_spec.prior);
    if (j.contains("reference_prior"))
        read_reference_prior(j["reference_prior"], st.base_spec.reference_prior);
    if (j.contains("temporal"))
        st.base_spec.temporal = parse_temporal(j["temporal"].get<std::string>());
    st.base_spec.dropout_prior_sd = j.value("dropout_prior_sd", st.base_spec.dropout_prior_sd);
    opt.out_dir = j.value("out", opt.out_dir);
    return opt;
}

int cmd_fit(const std::string& data_path, const FitOptions& opt, std::ostream& log) {
    try {
        check_mcmc_config(opt.mcmc);
        LongitudinalDataset data = read_dataset_csv(data_path, opt.K);
        if (opt.drop_baseline) {
            const int removed = drop_baseline_rows(data);
            if (removed > 0)
                log << "note: removed " << removed << " subject(s) with only a baseline row\n";
        }
        ModelSpec spec = opt.spec;
        spec.K = data.n_times;

        std::vector<ChainOutput> chains;
        try {
            chains = run_chains(data, spec, opt.mcmc);
        } catch (const SamplerInitError& e) {
            log << "error: sampler initialization failed: " << e.what() << "\n";
            return kExitInit;
        }

        fs::create_directories(opt.out_dir);
        const auto rows = report_quantities(chains);
        write_summary_csv((fs::path(opt.out_dir) / "summary.csv").string(), rows);
        write_acceptance_csv((fs::path(opt.out_dir) / "acceptance.csv").string(), chains);
        if (opt.save_draws)
            write_draws_csv((fs::path(opt.out_dir) / "draws.csv").string(), chains);

        log << "model " << variant_name(spec.variant) << ", K=" << spec.K << ", "
            << data.subjects.size() << " subjects, " << chains.size() << " chain(s) x "
            << opt.mcmc.n_samples << " samples (burn-in " << opt.mcmc.burn_in << ")\n";
        log << "quantity        mean      median    sd        2.5%      97.5%     rhat   ess\n";
        int warned = 0;
        for (const auto& r : rows) {
            if (r.name.rfind("re_", 0) == 0) continue;
            log << std::left << std::setw(14) << r.name << "  " << format_double(r.summary.mean)
                << "  " << format_double(r.summary.median) << "  " << format_double(r.summary.sd)
                << "  " << format_double(r.summary.q025) << "  " << format_double(r.summary.q975)
                << "  " << format_double(r.rhat.value) << "  " << format_double(r.ess) << "\n";
            if (r.rhat.defined && r.rhat.value > 1.05) ++warned;
        }
        if (warned > 0)
            log << "warning: " << warned
                << " quantity(ies) with split R-hat > 1.05; inspect the draws\n";
        log << "wrote " << (fs::path(opt.out_dir) / "summary.csv").string() << "\n";
        return kExitOk;
    } catch (const SchemaError& e) {
        log << "error: " << e.what() << "\n";
        return kExitSchema;
    }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
    try {
        if (opt.scenario.n_subjects < 1 || opt.scenario.K < 1 ||
            opt.scenario.assign_prob < 0.0 || opt.scenario.assign_prob > 1.0 ||
            opt.scenario.sign_neg_prob < 0.0 || opt.scenario.sign_neg_prob > 1.0 ||
            opt.scenario.sigma < 0.0 || opt.scenario.omega < 0.0)
            throw SchemaError("invalid scenario configuration");

        RngStream rng(opt.seed);
        SimTruth truth;
        LongitudinalDataset data = simulate_complete(opt.scenario, rng, &truth);
        DropoutTally tally;
        if (opt.scenario.dropout_enabled) {
            tally = simulate_dropout(data, truth, opt.scenario, rng);
            log << "dropout: " << tally.recovered << " recovered, " << tally.died << " died, "
                << tally.completers << " completers";
            if (tally.excluded > 0)
                log << "; " << tally.excluded << " subject(s) without observations removed";
            if (tally.clamped_R > 0) log << " (" << tally.clamped_R << " clamped R)";
            log << "\n";
        }

        fs::create_directories(opt.out_dir);
        const std::string data_path = (fs::path(opt.out_dir) / "data.csv").string();
        write_dataset_csv(data_path, data);
        log << "wrote " << data_path << " (" << data.subjects.size() << " subjects, TAD="
            << format_double(truth.tad) << ")\n";

        if (opt.write_truth) {
            json jt;
            jt["tad"] = truth.tad;
            jt["seed"] = opt.seed;
            jt["scenario"] = {{"n_subjects", opt.scenario.n_subjects},
                              {"K", opt.scenario.K},
                              {"c0", opt.scenario.c0},
                              {"c1", opt.scenario.c1},
                              {"d0", opt.scenario.d0},
                              {"d1", opt.scenario.d1},
                              {"sigma", opt.scenario.sigma},
                              {"omega", opt.scenario.omega},
                              {"dropout", opt.scenario.dropout_enabled}};
            json subjects = json::array();
            for (const auto& s : truth.subjects) {
                subjects.push_back({{"id", s.id},
                                    {"group", group_index(s.group)},
                                    {"sign", s.sign},
                                    {"re_intercept", s.re.intercept},
                                    {"re_slope", s.re.slope},
                                    {"trajectory_mean", s.trajectory_mean}});
            }
            jt["subjects"] = std::move(subjects);
            std::ofstream tf((fs::path(opt.out_dir) / "truth.json").string());
            tf << jt.dump(2) << "\n";
        }
        return kExitOk;
    } catch (const SchemaError& e) {
        log << "error: " << e.what() << "\n";
        return kExitSchema;
    }
}

int cmd_study(const StudyOptions& opt, std::ostream& log) {
    try {
        const StudyConfig& cfg = opt.study;
        check_mcmc_config(cfg.mcmc);
        if (cfg.n_runs < 1) throw SchemaError("config: runs must be >= 1");
        fs::create_directories(opt.out_dir);

        // Collect records from any shard files already present (resume/merge).
        std::vector<RunRecord> done;
        std::set<std::tuple<int, int, int>> seen;
        for (const auto& entry : fs::directory_iterator(opt.out_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("runs_shard_", 0) != 0 || entry.path().extension() != ".csv") continue;
            for (auto& r : read_run_records_csv(entry.path().string())) {
                const auto key = std::make_tuple(r.scenario_index, static_cast<int>(r.model),
                                                 r.run_index);
                if (seen.insert(key).second) done.push_back(std::move(r));
            }
        }
        if (!done.empty()) log << "resuming with " << done.size() << " existing run record(s)\n";

        const StudyResult result = run_study(cfg, done);

        // This shard's file holds exactly the records this shard is
        // responsible for; other shards' records stay in their own files.
        std::vector<RunRecord> mine;
        for (const auto& r : result.records) {
            const long global = static_cast<long>(r.scenario_index) * cfg.n_runs + r.run_index;
            if (global % cfg.shard_count == cfg.shard_index) mine.push_back(r);
        }
        const std::string shard_path =
            (fs::path(opt.out_dir) / shard_file_name(cfg.shard_index, cfg.shard_count)).string();
        write_run_records_csv(shard_path, mine);

        // Aggregate from the files, not from memory, so merged shards and
        // resumed sessions reproduce an unsharded run byte for byte.
        std::vector<RunRecord> on_disk;
        std::set<std::tuple<int, int, int>> seen_disk;
        for (const auto& entry : fs::directory_iterator(opt.out_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("runs_shard_", 0) != 0 || entry.path().extension() != ".csv") continue;
            for (auto& r : read_run_records_csv(entry.path().string())) {
                const auto key = std::make_tuple(r.scenario_index, static_cast<int>(r.model),
                                                 r.run_index);
                if (seen_disk.insert(key).second) on_disk.push_back(std::move(r));
            }
        }
        std::sort(on_disk.begin(), on_disk.end(), [](const RunRecord& a, const RunRecord& b) {
            if (a.scenario_index != b.scenario_index) return a.scenario_index < b.scenario_index;
            if (a.model != b.model) return a.model < b.model;
            return a.run_index < b.run_index;
        });
        const std::vector<StudyCell> cells = aggregate_study(cfg, on_disk);

        const std::string table_path = (fs::path(opt.out_dir) / "study_results.csv").string();
        write_study_table_csv(table_path, cells);

        const long expected =
            static_cast<long>(cfg.scenarios.size()) * cfg.models.size() * cfg.n_runs;
        const long have = static_cast<long>(on_disk.size());
        log << "study: " << have << "/" << expected << " run records";
        if (cfg.shard_count > 1)
            log << " (shard " << cfg.shard_index << "/" << cfg.shard_count << ")";
        log << "\n";
        log << "wrote " << shard_path << "\n";
        log << "wrote " << table_path << "\n";

        bool too_many_failures = false;
        for (const auto& c : cells) {
            if (!c.valid) too_many_failures = true;
            if (c.n_rhat_warn > 0)
                log << "warning: model " << variant_name(c.model) << " TAD "
                    << format_double(c.tad) << ": " << c.n_rhat_warn << " run(s) with R-hat > "
                    << format_double(cfg.rhat_warn) << "\n";
        }
        if (too_many_failures) {
            log << "error: failed-run fraction exceeded " << format_double(cfg.max_failure_fraction)
                << " in at least one cell; partial results preserved\n";
            return kExitStudyFailed;
        }
        return kExitOk;
    } catch (const SchemaError& e) {
        log << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const SamplerInitError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInit;
    }
}

}  // namespace foldmix
