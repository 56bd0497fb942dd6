#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "foldmix/diagnostics.hpp"
#include "foldmix/mcmc.hpp"
#include "foldmix/simulation.hpp"
#include "test_support.hpp"

using namespace foldmix;

namespace {

// Small all-unexposed cohort with everything except (c0, c1) pinned.
struct ReducedProblem {
    LongitudinalDataset data;
    ParameterState truth_state;
    ModelSpec spec;
};

ReducedProblem make_reduced(std::uint64_t seed) {
    ReducedProblem p;
    p.spec.variant = ModelVariant::FoldedMixed;
    p.spec.K = 3;

    RngStream rng(seed);
    p.truth_state.fe = {0.15, 0.015, 0.1, 0.01, 0.0036};
    // strictly inside the U(0, fe*omega) supports so the pinned state is legal
    p.truth_state.vc = {0.06, 0.006, 0.04, 0.004};
    p.data.n_times = 3;
    for (int i = 0; i < 4; ++i) {
        RandomEffects re{rng.normal(0.0, 0.06), rng.normal(0.0, 0.006)};
        p.truth_state.re.push_back(re);
        SubjectData s;
        s.id = "r" + std::to_string(i);
        s.group = ExposureGroup::unexposed;
        for (int t = 0; t < 3; ++t) {
            const double mu = 0.15 + re.intercept + (0.015 + re.slope) * t;
            s.observations.push_back({t, std::fabs(rng.normal(mu, 0.06))});
        }
        s.dropout = {2, 0};
        p.data.subjects.push_back(std::move(s));
    }
    return p;
}

}  // namespace

TEST_CASE("posterior means of (c0, c1) match dense grid quadrature within 0.02") {
    ReducedProblem p = make_reduced(2718);

    // dense 2-D grid over the free coordinates; everything else fixed at truth
    const int n0 = 220, n1 = 220;
    const double c0_hi = 0.6, c1_hi = 0.35;
    std::vector<double> logpost(n0 * n1);
    double lmax = -1e300;
    ParameterState st = p.truth_state;
    for (int i = 0; i < n0; ++i) {
        st.fe.c0 = (i + 0.5) * c0_hi / n0;
        for (int j = 0; j < n1; ++j) {
            st.fe.c1 = (j + 0.5) * c1_hi / n1;
            const double lp = log_posterior(st, p.data, p.spec);
            logpost[i * n1 + j] = lp;
            lmax = std::max(lmax, lp);
        }
    }
    double mass = 0.0, m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < n0; ++i) {
        const double c0 = (i + 0.5) * c0_hi / n0;
        for (int j = 0; j < n1; ++j) {
            const double c1 = (j + 0.5) * c1_hi / n1;
            const double w = std::exp(logpost[i * n1 + j] - lmax);
            mass += w;
            m0 += w * c0;
            m1 += w * c1;
        }
    }
    const double grid_c0 = m0 / mass;
    const double grid_c1 = m1 / mass;

    McmcConfig cfg;
    cfg.n_chains = 2;
    cfg.burn_in = 2000;
    cfg.n_samples = 8000;
    cfg.seed = 314;
    cfg.mask = UpdateMask{true, true, false, false, false, false, false, false};
    cfg.init_state = p.truth_state;
    const std::vector<ChainOutput> chains = run_chains(p.data, p.spec, cfg);

    const double mc_c0 = summarize(chains, "c0").mean;
    const double mc_c1 = summarize(chains, "c1").mean;
    INFO("grid (", grid_c0, ", ", grid_c1, ") vs mcmc (", mc_c0, ", ", mc_c1, ")");
    CHECK(std::fabs(mc_c0 - grid_c0) < 0.02);
    CHECK(std::fabs(mc_c1 - grid_c1) < 0.02);
    CHECK(split_rhat(chains, "c0").value < 1.05);
}

TEST_CASE("prior-only sampling recovers the constraint prior") {
    ScenarioConfig sc;
    sc.n_subjects = 8;
    RngStream rng(55);
    const LongitudinalDataset ds = simulate_complete(sc, rng);

    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;

    McmcConfig cfg;
    cfg.n_chains = 2;
    cfg.burn_in = 3000;
    cfg.n_samples = 20000;
    cfg.seed = 77;
    cfg.sample_prior_only = true;
    cfg.mask.sigma2 = false;  // heavy-tailed IG prior is irrelevant to the check
    const std::vector<ChainOutput> chains = run_chains(ds, spec, cfg);

    // c0 prior is half-normal with scale rho = 10
    const double half_mean = 10.0 * std::sqrt(2.0 / 3.14159265358979324);
    const double half_sd = 10.0 * std::sqrt(1.0 - 2.0 / 3.14159265358979324);
    const PosteriorSummary c0 = summarize(chains, "c0");
    const double ess_c0 = effective_sample_size(chains, "c0");
    INFO("c0 mean ", c0.mean, " sd ", c0.sd, " ess ", ess_c0);
    CHECK(std::fabs(c0.mean - half_mean) < 3.0 * half_sd / std::sqrt(ess_c0));
    CHECK(std::fabs(c0.sd - half_sd) < 3.0 * half_sd / std::sqrt(2.0 * ess_c0) + 0.05);

    // tau_a0 | c0 is uniform on (0, c0 omega): the pivot tau/(c0 omega) is U(0,1)
    std::vector<std::vector<double>> pivots;
    for (const auto& ch : chains) {
        const auto& taus = ch.draws[ch.quantity("tau_a0")];
        const auto& c0s = ch.draws[ch.quantity("c0")];
        std::vector<double> u(taus.size());
        for (std::size_t i = 0; i < taus.size(); ++i)
            u[i] = taus[i] / (c0s[i] * spec.prior.omega);
        pivots.push_back(std::move(u));
    }
    std::vector<double> pooled;
    for (const auto& pv : pivots) pooled.insert(pooled.end(), pv.begin(), pv.end());
    const PosteriorSummary u = summarize(pooled);
    const double ess_u = effective_sample_size(pivots);
    const double usd = 1.0 / std::sqrt(12.0);
    INFO("pivot mean ", u.mean, " sd ", u.sd, " ess ", ess_u);
    CHECK(std::fabs(u.mean - 0.5) < 3.0 * usd / std::sqrt(ess_u));
    CHECK(std::fabs(u.sd - usd) < 3.0 * usd / std::sqrt(2.0 * ess_u) + 0.02);
    for (double v : pooled) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("simulation-based calibration: rank of the true c0 is uniform") {
    // prior-predictive replicates of a reduced model: 5 unexposed subjects,
    // K = 3, sigma2 fixed, rho2 = 1; (c0, c1, taus, random effects) drawn
    // from the prior. The tighter rho2 keeps the c0 <-> mean-random-intercept
    // ridge narrow enough that thinned scalar-Metropolis draws decorrelate.
    const int n_reps = 100;
    const int thin = 60;
    const int kept = 99;
    std::vector<int> bin_counts(10, 0);

    for (int rep = 0; rep < n_reps; ++rep) {
        RngStream rng(derive_seed(424242, {static_cast<std::uint64_t>(rep)}));
        ModelSpec spec;
        spec.variant = ModelVariant::FoldedMixed;
        spec.K = 3;
        spec.prior.rho2 = 1.0;
        const double sigma = 0.06;

        // draw parameters from the prior
        const double c0 = tn_sample({spec.prior.zeta, spec.prior.rho2, 0.0}, rng);
        const double c1 = tn_sample({spec.prior.zeta, spec.prior.rho2, 0.0}, rng);
        const double tau0 = rng.uniform(0.0, c0 * spec.prior.omega);
        const double tau1 = rng.uniform(0.0, c1 * spec.prior.omega);

        LongitudinalDataset ds;
        ds.n_times = 3;
        for (int i = 0; i < 5; ++i) {
            const double re0 = rng.normal(0.0, tau0);
            const double re1 = rng.normal(0.0, tau1);
            SubjectData s;
            s.id = "s" + std::to_string(i);
            s.group = ExposureGroup::unexposed;
            for (int t = 0; t < 3; ++t)
                s.observations.push_back(
                    {t, std::fabs(rng.normal(c0 + re0 + (c1 + re1) * t, sigma))});
            s.dropout = {2, 0};
            ds.subjects.push_back(std::move(s));
        }

        McmcConfig cfg;
        cfg.n_chains = 1;
        cfg.burn_in = 1500;
        cfg.n_samples = thin * kept - thin + 1;
        cfg.seed = derive_seed(979797, {static_cast<std::uint64_t>(rep)});
        cfg.mask.d0 = false;
        cfg.mask.d1 = false;
        cfg.mask.sigma2 = false;
        ParameterState init;
        init.fe = {c0, c1, 0.1, 0.01, sigma * sigma};
        init.vc = {tau0, tau1, 0.025, 0.0025};
        init.re.assign(5, RandomEffects{});
        cfg.init_state = init;

        const ChainOutput out = run_chain(ds, spec, cfg, 0);
        const auto& draws = out.draws[out.quantity("c0")];
        int rank = 0;
        for (int k = 0; k < kept; ++k) rank += draws[k * thin] < c0 ? 1 : 0;
        ++bin_counts[rank / 10];
    }

    double chi2 = 0.0;
    for (int b = 0; b < 10; ++b) {
        const double diff = bin_counts[b] - 10.0;
        chi2 += diff * diff / 10.0;
    }
    INFO("bin counts: ", bin_counts[0], " ", bin_counts[1], " ", bin_counts[2], " ",
         bin_counts[3], " ", bin_counts[4], " ", bin_counts[5], " ", bin_counts[6], " ",
         bin_counts[7], " ", bin_counts[8], " ", bin_counts[9]);
    // chi-square(9) upper 1% critical value
    CHECK(chi2 < 21.666);
}

TEST_CASE("fitting the model to its own truth at large n drives the bias to zero") {
    StudyConfig cfg;
    ScenarioConfig sc;
    sc.n_subjects = 2000;
    cfg.scenarios = {sc};
    cfg.models = {ModelVariant::FoldedMixed};
    cfg.n_runs = 3;
    cfg.master_seed = 1234;
    cfg.mcmc.n_chains = 1;
    cfg.mcmc.burn_in = 400;
    cfg.mcmc.n_samples = 400;
    const StudyResult res = run_study(cfg);
    REQUIRE(res.cells.size() == 1);
    const StudyCell& cell = res.cells.front();
    INFO("bias at n=2000: ", cell.bias, " (avg sd ", cell.avg_sd, ")");
    CHECK(cell.n_failed == 0);
    CHECK(std::fabs(cell.bias) < 0.004);
    CHECK(cell.violations == 0);
}

TEST_CASE("posterior mass sits on the positive mode only") {
    ScenarioConfig sc;  // default study DGP
    RngStream rng(31415);
    const LongitudinalDataset ds = simulate_complete(sc, rng);
    ModelSpec spec;
    spec.variant = ModelVariant::FoldedMixed;
    spec.K = sc.K;
    McmcConfig cfg;
    cfg.n_chains = 2;
    cfg.burn_in = 800;
    cfg.n_samples = 800;
    cfg.seed = 11;
    const std::vector<ChainOutput> chains = run_chains(ds, spec, cfg);
    double min_c0 = 1e300;
    for (const auto& ch : chains)
        for (double v : ch.draws[ch.quantity("c0")]) min_c0 = std::min(min_c0, v);
    CHECK(min_c0 >= 0.0);
    const double mean_c0 = summarize(chains, "c0").mean;
    CHECK(std::fabs(mean_c0 - 0.15) < 0.04);
}
