#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "foldmix/diagnostics.hpp"
#include "foldmix/mcmc.hpp"
#include "foldmix/model.hpp"
#include "foldmix/simulation.hpp"
#include "test_support.hpp"

using namespace foldmix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LongitudinalDataset three_subject_data() {
    LongitudinalDataset ds;
    ds.n_times = 4;
    auto add = [&](const char* id, ExposureGroup g, std::vector<double> zs, int cause) {
        SubjectData s;
        s.id = id;
        s.group = g;
        for (std::size_t t = 0; t < zs.size(); ++t)
            s.observations.push_back({static_cast<int>(t), zs[t]});
        s.dropout = {static_cast<int>(zs.size()) - 1, cause};
        ds.subjects.push_back(std::move(s));
    };
    add("a", ExposureGroup::unexposed, {0.12, 0.18, 0.21, 0.25}, 0);
    add("b", ExposureGroup::exposed, {0.07, 0.11}, 1);
    add("c", ExposureGroup::exposed, {0.09, 0.08, 0.13}, 2);
    return ds;
}

ParameterState plausible_state(bool joint, const ModelSpec& spec) {
    ParameterState st;
    st.fe = {0.15, 0.015, 0.08, 0.005, 0.06 * 0.06};
    st.vc = {0.05, 0.005, 0.03, 0.002};
    st.re = {{0.01, -0.001}, {-0.02, 0.0005}, {0.005, 0.0}};
    if (joint) {
        DropoutParams dp = DropoutParams::zeros(spec.temporal_for_K());
        dp.q[0][0] = -1.5;
        dp.q[1][0] = -1.0;
        dp.v[0][0] = -2.0;
        dp.v[1][0] = -2.2;
        dp.p[0][0] = 1.0;
        dp.u[1][1] = -3.0;
        st.dropout = dp;
    }
    return st;
}

McmcConfig quick_cfg(int chains, int burn, int samples, std::uint64_t seed) {
    McmcConfig cfg;
    cfg.n_chains = chains;
    cfg.burn_in = burn;
    cfg.n_samples = samples;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("log posterior equals the term-by-term oracle") {
    const LongitudinalDataset ds = three_subject_data();
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = 4;
    ParameterState st = plausible_state(false, spec);

    double oracle = fixed_effects_log_prior(st.fe, spec.prior) +
                    tau_log_prior(st.vc, st.fe, spec.prior);
    for (int i = 0; i < 3; ++i) {
        oracle += random_effects_log_prior(st.re[i], st.vc, ds.subjects[i].group);
        oracle += outcome_loglik(ds.subjects[i], st.fe, st.re[i]);
    }
    CHECK(log_posterior(st, ds, spec) == doctest::Approx(oracle).epsilon(1e-12));

    SUBCASE("joint variant adds exactly the dropout terms") {
        ModelSpec jspec = spec;
        jspec.variant = ModelVariant::JointLinear;
        ParameterState jst = plausible_state(true, jspec);
        jst.fe = st.fe;
        jst.vc = st.vc;
        jst.re = st.re;
        double extra = dropout_log_prior(*jst.dropout, jspec.dropout_prior_sd);
        for (int i = 0; i < 3; ++i)
            extra += dropout_loglik(ds.subjects[i].dropout, jspec.temporal_for_K(), *jst.dropout,
                                    jst.re[i], ds.subjects[i].group, jspec.K);
        CHECK(log_posterior(jst, ds, jspec) ==
              doctest::Approx(log_posterior(st, ds, spec) + extra).epsilon(1e-12));
    }
    SUBCASE("constraint violations give minus infinity") {
        ParameterState bad = st;
        bad.fe.c0 = -0.001;
        CHECK(log_posterior(bad, ds, spec) == -kInf);
        bad = st;
        bad.vc.tau_a0 = st.fe.c0 * spec.prior.omega + 0.001;
        CHECK(log_posterior(bad, ds, spec) == -kInf);
        bad = st;
        bad.fe.sigma2 = 0.0;
        CHECK(log_posterior(bad, ds, spec) == -kInf);
    }
    SUBCASE("dimension mismatch is a structural error") {
        ParameterState bad = st;
        bad.re.pop_back();
        CHECK_THROWS_AS(log_posterior(bad, ds, spec), std::invalid_argument);
        ModelSpec jspec = spec;
        jspec.variant = ModelVariant::JointLinear;
        CHECK_THROWS_AS(log_posterior(st, ds, jspec), std::invalid_argument);
    }
    SUBCASE("reference variant uses the unconstrained priors") {
        ModelSpec ref = spec;
        ref.variant = ModelVariant::LinearReference;
        ParameterState rst = st;
        rst.fe.c0 = -0.2;  // negative is fine in the reference model
        CHECK(std::isfinite(log_posterior(rst, ds, ref)));
        rst.vc.tau_a0 = 11.0;  // above the uniform bound
        CHECK(log_posterior(rst, ds, ref) == -kInf);
    }
}

TEST_CASE("chains are deterministic given seed and chain index") {
    ScenarioConfig sc;
    sc.n_subjects = 30;
    RngStream rng(101);
    const LongitudinalDataset ds = simulate_complete(sc, rng);

    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;
    const McmcConfig cfg = quick_cfg(1, 200, 200, 99);

    const ChainOutput a = run_chain(ds, spec, cfg, 0);
    const ChainOutput b = run_chain(ds, spec, cfg, 0);
    REQUIRE(a.draws.size() == b.draws.size());
    for (std::size_t q = 0; q < a.draws.size(); ++q)
        for (std::size_t i = 0; i < a.draws[q].size(); ++i) CHECK(a.draws[q][i] == b.draws[q][i]);

    const ChainOutput c = run_chain(ds, spec, cfg, 1);
    bool identical = true;
    for (std::size_t i = 0; i < a.draws[0].size() && identical; ++i)
        identical = a.draws[0][i] == c.draws[0][i];
    CHECK_FALSE(identical);
}

TEST_CASE("cached sweep stays consistent with the full log posterior") {
    ScenarioConfig sc;
    sc.n_subjects = 25;
    sc.dropout_enabled = true;
    RngStream rng(202);
    SimTruth truth;
    LongitudinalDataset ds = simulate_complete(sc, rng, &truth);
    simulate_dropout(ds, truth, sc, rng);

    for (ModelVariant v : {ModelVariant::LinearReference, ModelVariant::FoldedMixed,
                           ModelVariant::JointLinear, ModelVariant::JointFlexible}) {
        ModelSpec spec;
        spec.variant = v;
        spec.K = sc.K;
        const ChainOutput out = run_chain(ds, spec, quick_cfg(1, 150, 150, 7), 0);
        CHECK(out.final_log_posterior ==
              doctest::Approx(log_posterior(out.final_state, ds, spec)).epsilon(1e-8));
        CHECK(out.violations == 0);
        CHECK(out.nonfinite == 0);
        CHECK(out.draws[0].size() == 150);
    }
}

TEST_CASE("retained draws respect the constraint support") {
    ScenarioConfig sc;
    sc.n_subjects = 40;
    RngStream rng(303);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;
    const std::vector<ChainOutput> chains = run_chains(ds, spec, quick_cfg(2, 400, 400, 11));

    for (const auto& ch : chains) {
        const auto& c0 = ch.draws[ch.quantity("c0")];
        const auto& c1 = ch.draws[ch.quantity("c1")];
        const auto& d0 = ch.draws[ch.quantity("d0")];
        const auto& d1 = ch.draws[ch.quantity("d1")];
        const auto& ta0 = ch.draws[ch.quantity("tau_a0")];
        const auto& tb1 = ch.draws[ch.quantity("tau_b1")];
        for (std::size_t i = 0; i < c0.size(); ++i) {
            CHECK(c0[i] >= 0.0);
            CHECK(c1[i] >= 0.0);
            CHECK(d0[i] >= 0.0);
            CHECK(d1[i] >= 0.0);
            CHECK(ta0[i] > 0.0);
            CHECK(ta0[i] < c0[i] * spec.prior.omega);
            CHECK(tb1[i] > 0.0);
            CHECK(tb1[i] < d1[i] * spec.prior.omega);
        }
        CHECK(ch.violations == 0);
    }
}

TEST_CASE("acceptance rates land in a healthy band on the study DGP") {
    ScenarioConfig sc;  // the default 100-subject scenario
    RngStream rng(404);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;
    const ChainOutput out = run_chain(ds, spec, quick_cfg(1, 1500, 800, 5), 0);
    for (const auto& b : out.acceptance) {
        INFO(b.name, " rate ", b.rate);
        CHECK(b.rate >= 0.15);
        CHECK(b.rate <= 0.7);
    }
}

TEST_CASE("multiple chains pool consistently") {
    ScenarioConfig sc;
    sc.n_subjects = 20;
    RngStream rng(505);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;

    const std::vector<ChainOutput> four = run_chains(ds, spec, quick_cfg(4, 400, 1000, 21));
    CHECK(four.size() == 4);
    CHECK(pool_draws(four, "AD").size() == 4000);

    bool distinct = false;
    for (int c = 1; c < 4 && !distinct; ++c)
        distinct = four[0].draws[0][0] != four[c].draws[0][0];
    CHECK(distinct);

    const std::vector<ChainOutput> one = run_chains(ds, spec, quick_cfg(1, 400, 4000, 22));
    const double m4 = summarize(four, "AD").mean;
    const double m1 = summarize(one, "AD").mean;
    const double se4 = summarize(four, "AD").sd / std::sqrt(effective_sample_size(four, "AD"));
    const double se1 = summarize(one, "AD").sd / std::sqrt(effective_sample_size(one, "AD"));
    CHECK(std::fabs(m4 - m1) < 5.0 * std::sqrt(se4 * se4 + se1 * se1));

    SUBCASE("worker threads reproduce the sequential chains exactly") {
        McmcConfig par = quick_cfg(4, 400, 1000, 21);
        par.workers = 2;
        const std::vector<ChainOutput> threaded = run_chains(ds, spec, par);
        for (int c = 0; c < 4; ++c)
            for (std::size_t i = 0; i < 1000; ++i)
                CHECK(threaded[c].draws[9][i] == four[c].draws[9][i]);
    }
}

TEST_CASE("update mask freezes parameters and init_state is honored") {
    ScenarioConfig sc;
    sc.n_subjects = 10;
    RngStream rng(606);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;

    McmcConfig cfg = quick_cfg(1, 100, 100, 3);
    cfg.mask.d0 = false;
    cfg.mask.sigma2 = false;
    ParameterState init;
    init.fe = {0.2, 0.02, 0.09, 0.004, 0.0025};
    init.vc = {0.04, 0.004, 0.02, 0.0009};
    init.re.assign(10, RandomEffects{});
    cfg.init_state = init;

    const ChainOutput out = run_chain(ds, spec, cfg, 0);
    for (double v : out.draws[out.quantity("d0")]) CHECK(v == 0.09);
    for (double v : out.draws[out.quantity("sigma2")]) CHECK(v == 0.0025);
    bool c0_moved = false;
    for (double v : out.draws[out.quantity("c0")]) c0_moved = c0_moved || v != 0.2;
    CHECK(c0_moved);
}

TEST_CASE("unusable initial state raises SamplerInitError") {
    ScenarioConfig sc;
    sc.n_subjects = 5;
    RngStream rng(707);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;
    McmcConfig cfg = quick_cfg(1, 10, 10, 1);
    ParameterState bad;
    bad.fe = {0.1, 0.01, 0.1, 0.01, 0.01};
    bad.vc = {0.2, 0.004, 0.02, 0.004};  // tau_a0 above c0 * omega
    bad.re.assign(5, RandomEffects{});
    cfg.init_state = bad;
    CHECK_THROWS_AS(run_chain(ds, spec, cfg, 0), SamplerInitError);
}

// ---- diagnostics ---------------------------------------------------------

TEST_CASE("split R-hat on iid and shifted chains") {
    RngStream rng(818);
    std::vector<std::vector<double>> chains(4, std::vector<double>(2000));
    for (auto& c : chains)
        for (auto& v : c) v = rng.normal();

    const RhatResult iid = split_rhat(chains);
    CHECK(iid.defined);
    CHECK(iid.value >= 0.99);
    CHECK(iid.value <= 1.02);

    // rank normalization bounds the statistic, so a fully separated chain
    // shows up around 1.5-1.9 rather than the classical blow-up
    for (auto& v : chains[0]) v += 10.0;
    const RhatResult shifted = split_rhat(chains);
    CHECK(shifted.value > 1.4);

    std::vector<std::vector<double>> flat(2, std::vector<double>(100, 3.14));
    const RhatResult constant = split_rhat(flat);
    CHECK_FALSE(constant.defined);
    CHECK(constant.value == 1.0);
}

TEST_CASE("effective sample size near n for iid draws, small for sticky draws") {
    RngStream rng(929);
    std::vector<std::vector<double>> chains(2, std::vector<double>(3000));
    for (auto& c : chains)
        for (auto& v : c) v = rng.normal();
    const double ess = effective_sample_size(chains);
    CHECK(ess > 0.8 * 6000);
    CHECK(ess <= 6000);

    // AR(1) with strong autocorrelation
    std::vector<std::vector<double>> ar(2, std::vector<double>(3000));
    for (auto& c : ar) {
        double x = 0.0;
        for (auto& v : c) {
            x = 0.95 * x + rng.normal() * std::sqrt(1 - 0.95 * 0.95);
            v = x;
        }
    }
    CHECK(effective_sample_size(ar) < 0.25 * 6000);
}

TEST_CASE("posterior summaries use type-7 quantile interpolation") {
    SUBCASE("constant draws") {
        const PosteriorSummary s = summarize(std::vector<double>(50, 2.5));
        CHECK(s.mean == doctest::Approx(2.5));
        CHECK(s.median == doctest::Approx(2.5));
        CHECK(s.sd == doctest::Approx(0.0));
        CHECK(s.q025 == doctest::Approx(2.5));
        CHECK(s.q975 == doctest::Approx(2.5));
    }
    SUBCASE("1..100 quantiles under linear interpolation") {
        std::vector<double> draws;
        for (int i = 1; i <= 100; ++i) draws.push_back(i);
        const PosteriorSummary s = summarize(draws);
        CHECK(s.q025 == doctest::Approx(3.475).epsilon(1e-12));
        CHECK(s.q975 == doctest::Approx(97.525).epsilon(1e-12));
        CHECK(s.median == doctest::Approx(50.5));
    }
    SUBCASE("symmetric draws have mean near median") {
        RngStream rng(31);
        std::vector<double> draws(20000);
        for (auto& v : draws) v = rng.normal(1.0, 2.0);
        const PosteriorSummary s = summarize(draws);
        CHECK(std::fabs(s.mean - s.median) < 0.05);
        CHECK(s.q025 <= s.median);
        CHECK(s.median <= s.q975);
    }
}
