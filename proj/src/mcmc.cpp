#include "foldmix/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "foldmix/distributions.hpp"

namespace foldmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChainStreamTag = 0x636861696eULL;  // "chain"

// Robbins-Monro style step-size tuner; frozen once burn-in ends.
struct AdaptiveScale {
    double log_step = 0.0;
    int attempts = 0;
    int accepted = 0;
    int batch = 0;

    double step() const { return std::exp(log_step); }

    void record(bool accept, int window, double target) {
        ++attempts;
        accepted += accept ? 1 : 0;
        if (attempts < window) return;
        ++batch;
        const double rate = static_cast<double>(accepted) / attempts;
        const double delta = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(batch)));
        log_step += rate > target ? delta : -delta;
        log_step = std::clamp(log_step, -14.0, 7.0);
        attempts = 0;
        accepted = 0;
    }
};

struct MoveCounter {
    long attempts = 0;
    long accepted = 0;
    double rate() const { return attempts > 0 ? static_cast<double>(accepted) / attempts : 0.0; }
};

// Address of one dropout coefficient plus the subject group it touches.
struct DropCoeffRef {
    double* value;
    int group;
    std::string name;
};

class Sampler {
public:
    Sampler(const LongitudinalDataset& data, const ModelSpec& spec, const McmcConfig& cfg,
            int chain_index)
        : data_(data),
          spec_(spec),
          cfg_(cfg),
          ts_(spec.temporal_for_K()),
          joint_(is_joint(spec.variant)),
          folded_(is_folded(spec.variant)),
          n_(static_cast<int>(data.subjects.size())),
          chain_index_(chain_index),
          rng_(derive_seed(cfg.seed, {kChainStreamTag, static_cast<std::uint64_t>(chain_index)})) {
        for (int i = 0; i < n_; ++i)
            by_group_[group_index(data_.subjects[i].group)].push_back(i);
        out_ll_.assign(n_, 0.0);
        re_lp_.assign(n_, 0.0);
        drop_ll_.assign(n_, 0.0);
        scratch_.assign(n_, 0.0);
    }

    ChainOutput run();

private:
    // ---- cached pieces -----------------------------------------------
    void set_sigma_cache() {
        const double sigma = std::sqrt(st_.fe.sigma2);
        inv_sigma_ = 1.0 / sigma;
        per_obs_const_ = -std::log(sigma) - kLogSqrt2Pi;
    }

    double subject_out_ll(int i, double group_icpt, double group_slope, double inv_sigma,
                          double per_obs_const) const {
        if (cfg_.sample_prior_only) return 0.0;
        const SubjectData& s = data_.subjects[i];
        const RandomEffects& re = st_.re[i];
        double mu = group_icpt + re.intercept;
        const double slope = group_slope + re.slope;
        double ll = 0.0;
        if (folded_) {
            for (const auto& o : s.observations) {
                const double a = (o.z - mu) * inv_sigma;
                const double b = (o.z + mu) * inv_sigma;
                const double la = -0.5 * a * a;
                const double lb = -0.5 * b * b;
                const double hi = la > lb ? la : lb;
                const double lo = la > lb ? lb : la;
                ll += hi + std::log1p(std::exp(lo - hi));
                mu += slope;
            }
        } else {
            for (const auto& o : s.observations) {
                const double a = (o.z - mu) * inv_sigma;
                ll += -0.5 * a * a;
                mu += slope;
            }
        }
        return ll + static_cast<double>(s.observations.size()) * per_obs_const;
    }

    double subject_out_ll(int i) const {
        const ExposureGroup g = data_.subjects[i].group;
        return subject_out_ll(i, st_.fe.intercept(g), st_.fe.slope(g), inv_sigma_,
                              per_obs_const_);
    }

    double subject_re_lp(int i, const VarianceComponents& vc) const {
        return random_effects_log_prior(st_.re[i], vc, data_.subjects[i].group);
    }

    double subject_drop_ll(int i) const {
        if (!joint_ || cfg_.sample_prior_only) return 0.0;
        const SubjectData& s = data_.subjects[i];
        return dropout_loglik(s.dropout, ts_, *st_.dropout, st_.re[i], s.group, spec_.K);
    }

    double fe_prior() const {
        return folded_ ? fixed_effects_log_prior(st_.fe, spec_.prior)
                       : reference_fixed_effects_log_prior(st_.fe, spec_.reference_prior);
    }

    double tau_prior(const FixedEffects& fe) const {
        return folded_ ? tau_log_prior(st_.vc, fe, spec_.prior)
                       : reference_tau_log_prior(st_.vc, spec_.reference_prior);
    }

    double total_log_posterior() const {
        double lp = fe_lp_ + tau_lp_ + drop_lp_;
        for (int i = 0; i < n_; ++i) lp += out_ll_[i] + re_lp_[i] + drop_ll_[i];
        return lp;
    }

    void refresh_caches() {
        set_sigma_cache();
        fe_lp_ = fe_prior();
        tau_lp_ = tau_prior(st_.fe);
        drop_lp_ = joint_ ? dropout_log_prior(*st_.dropout, spec_.dropout_prior_sd) : 0.0;
        for (int i = 0; i < n_; ++i) {
            out_ll_[i] = subject_out_ll(i);
            re_lp_[i] = subject_re_lp(i, st_.vc);
            drop_ll_[i] = subject_drop_ll(i);
        }
    }

    // ---- initialization ----------------------------------------------
    ParameterState least_squares_init() const {
        ParameterState st;
        double icpt[2] = {0.1, 0.1};
        double slope[2] = {0.1, 0.1};
        double ss_resid = 0.0;
        long n_resid = 0;
        for (int g = 0; g < 2; ++g) {
            double st_sum = 0, sz_sum = 0, stt = 0, stz = 0;
            long m = 0;
            for (int i : by_group_[g]) {
                for (const auto& o : data_.subjects[i].observations) {
                    st_sum += o.time;
                    sz_sum += o.z;
                    stt += static_cast<double>(o.time) * o.time;
                    stz += o.time * o.z;
                    ++m;
                }
            }
            if (m > 0) {
                const double var_t = stt - st_sum * st_sum / m;
                const double b = var_t > 0.0 ? (stz - st_sum * sz_sum / m) / var_t : 0.0;
                const double a = (sz_sum - b * st_sum) / m;
                icpt[g] = std::max(a, 0.01);
                slope[g] = std::max(b, 0.01);
                for (int i : by_group_[g]) {
                    for (const auto& o : data_.subjects[i].observations) {
                        const double r = o.z - (a + b * o.time);
                        ss_resid += r * r;
                        ++n_resid;
                    }
                }
            }
        }
        st.fe.c0 = icpt[0];
        st.fe.c1 = slope[0];
        st.fe.d0 = icpt[1];
        st.fe.d1 = slope[1];
        st.fe.sigma2 = n_resid > 0 ? std::max(ss_resid / n_resid, 1e-6) : 1.0;
        if (folded_) {
            const double w = spec_.prior.omega * 0.5;
            st.vc = {st.fe.c0 * w, st.fe.c1 * w, st.fe.d0 * w, st.fe.d1 * w};
        } else {
            const double h = spec_.reference_prior.tau_upper * 0.5;
            st.vc = {h, h, h, h};
        }
        st.re.assign(n_, RandomEffects{});
        if (joint_) st.dropout = DropoutParams::zeros(ts_);
        return st;
    }

    void initialize() {
        if (cfg_.init_state) {
            st_ = *cfg_.init_state;
            if (static_cast<int>(st_.re.size()) != n_)
                throw SamplerInitError("initial state has wrong random-effect count");
            if (joint_ && !st_.dropout) st_.dropout = DropoutParams::zeros(ts_);
            refresh_caches();
            if (std::isfinite(total_log_posterior())) return;
            throw SamplerInitError("supplied initial state has non-finite log posterior");
        }
        st_ = least_squares_init();
        for (int attempt = 0; attempt < cfg_.max_init_attempts; ++attempt) {
            refresh_caches();
            if (std::isfinite(total_log_posterior())) return;
            // jitter the fixed effects and re-center tau inside the bounds
            for (double* f : {&st_.fe.c0, &st_.fe.c1, &st_.fe.d0, &st_.fe.d1})
                *f = std::max(*f * std::exp(0.2 * rng_.normal()), 0.01);
            if (folded_) {
                const double w = spec_.prior.omega * 0.5;
                st_.vc = {st_.fe.c0 * w, st_.fe.c1 * w, st_.fe.d0 * w, st_.fe.d1 * w};
            }
        }
        throw SamplerInitError("no finite log posterior after " +
                               std::to_string(cfg_.max_init_attempts) + " init attempts");
    }

    // ---- scalar moves --------------------------------------------------
    bool accept(double log_ratio) {
        if (log_ratio >= 0.0) return true;
        return std::log(rng_.uniform()) < log_ratio;
    }

    // which: 0..3 -> c0,c1,d0,d1
    bool move_fixed_effect(int which, double step) {
        double FixedEffects::*member[4] = {&FixedEffects::c0, &FixedEffects::c1,
                                           &FixedEffects::d0, &FixedEffects::d1};
        const int g = which < 2 ? 0 : 1;
        const double old = st_.fe.*member[which];
        const double cand = old + step * rng_.normal();
        if (folded_ && cand < 0.0) return false;

        st_.fe.*member[which] = cand;
        const double fe_lp_new = fe_prior();
        const double tau_lp_new = tau_prior(st_.fe);
        double delta = fe_lp_new - fe_lp_ + tau_lp_new - tau_lp_;
        if (std::isfinite(delta)) {
            const ExposureGroup grp = static_cast<ExposureGroup>(g);
            const double gi = st_.fe.intercept(grp);
            const double gs = st_.fe.slope(grp);
            for (int i : by_group_[g]) {
                scratch_[i] = subject_out_ll(i, gi, gs, inv_sigma_, per_obs_const_);
                delta += scratch_[i] - out_ll_[i];
            }
        }
        if (std::isfinite(delta) && accept(delta)) {
            fe_lp_ = fe_lp_new;
            tau_lp_ = tau_lp_new;
            for (int i : by_group_[g]) out_ll_[i] = scratch_[i];
            return true;
        }
        st_.fe.*member[which] = old;
        return false;
    }

    bool move_sigma2(double step) {
        const double w_old = std::log(st_.fe.sigma2);
        const double w_new = w_old + step * rng_.normal();
        const double old = st_.fe.sigma2;
        st_.fe.sigma2 = std::exp(w_new);
        const double fe_lp_new = fe_prior();
        double delta = fe_lp_new - fe_lp_ + (w_new - w_old);  // log-scale Jacobian
        if (std::isfinite(delta)) {
            const double sigma = std::sqrt(st_.fe.sigma2);
            const double inv = 1.0 / sigma;
            const double per_obs = -std::log(sigma) - kLogSqrt2Pi;
            for (int i = 0; i < n_; ++i) {
                const ExposureGroup g = data_.subjects[i].group;
                scratch_[i] = subject_out_ll(i, st_.fe.intercept(g), st_.fe.slope(g), inv, per_obs);
                delta += scratch_[i] - out_ll_[i];
            }
        }
        if (std::isfinite(delta) && accept(delta)) {
            fe_lp_ = fe_lp_new;
            out_ll_ = scratch_;
            set_sigma_cache();
            return true;
        }
        st_.fe.sigma2 = old;
        return false;
    }

    // which: 0..3 -> tau_a0, tau_a1, tau_b0, tau_b1
    bool move_tau(int which, double step) {
        double VarianceComponents::*member[4] = {
            &VarianceComponents::tau_a0, &VarianceComponents::tau_a1,
            &VarianceComponents::tau_b0, &VarianceComponents::tau_b1};
        const int g = which < 2 ? 0 : 1;
        const double paired[4] = {st_.fe.c0, st_.fe.c1, st_.fe.d0, st_.fe.d1};
        const double bound =
            folded_ ? paired[which] * spec_.prior.omega : spec_.reference_prior.tau_upper;
        const double old = st_.vc.*member[which];
        // random walk on logit(tau / bound); the bound moves with the paired
        // fixed effect, so the transform always covers the current support
        const double s_old = old / bound;
        const double eta = logit(s_old) + step * rng_.normal();
        const double s_new = inv_logit(eta);
        const double cand = bound * s_new;
        if (!(cand > 0.0) || !(cand < bound)) return false;

        st_.vc.*member[which] = cand;
        double delta = std::log(s_new * (1.0 - s_new)) - std::log(s_old * (1.0 - s_old));
        for (int i : by_group_[g]) {
            scratch_[i] = subject_re_lp(i, st_.vc);
            delta += scratch_[i] - re_lp_[i];
        }
        if (std::isfinite(delta) && accept(delta)) {
            for (int i : by_group_[g]) re_lp_[i] = scratch_[i];
            return true;
        }
        st_.vc.*member[which] = old;
        return false;
    }

    // comp: 0 intercept, 1 slope
    bool move_random_effect(int i, int comp, double step) {
        RandomEffects& re = st_.re[i];
        double& value = comp == 0 ? re.intercept : re.slope;
        const double old = value;
        value = old + step * rng_.normal();

        const double out_new = subject_out_ll(i);
        const double re_new = subject_re_lp(i, st_.vc);
        const double drop_new = subject_drop_ll(i);
        const double delta =
            out_new - out_ll_[i] + re_new - re_lp_[i] + drop_new - drop_ll_[i];
        if (std::isfinite(delta) && accept(delta)) {
            out_ll_[i] = out_new;
            re_lp_[i] = re_new;
            drop_ll_[i] = drop_new;
            return true;
        }
        value = old;
        return false;
    }

    bool move_dropout_coeff(const DropCoeffRef& c, double step) {
        const double old = *c.value;
        const double cand = old + step * rng_.normal();
        *c.value = cand;
        double delta = norm_log_pdf(cand, 0.0, spec_.dropout_prior_sd) -
                       norm_log_pdf(old, 0.0, spec_.dropout_prior_sd);
        for (int i : by_group_[c.group]) {
            scratch_[i] = subject_drop_ll(i);
            delta += scratch_[i] - drop_ll_[i];
        }
        if (std::isfinite(delta) && accept(delta)) {
            drop_lp_ += norm_log_pdf(cand, 0.0, spec_.dropout_prior_sd) -
                        norm_log_pdf(old, 0.0, spec_.dropout_prior_sd);
            for (int i : by_group_[c.group]) drop_ll_[i] = scratch_[i];
            return true;
        }
        *c.value = old;
        return false;
    }

    // ---- run -----------------------------------------------------------
    std::vector<DropCoeffRef> dropout_coefficients() {
        std::vector<DropCoeffRef> refs;
        if (!joint_) return refs;
        DropoutParams& dp = *st_.dropout;
        for (int g = 0; g < 2; ++g)
            for (std::size_t j = 0; j < dp.q[g].size(); ++j)
                refs.push_back({&dp.q[g][j], g, "q" + std::to_string(g) + "_" + std::to_string(j)});
        for (int g = 0; g < 2; ++g)
            for (std::size_t j = 0; j < dp.v[g].size(); ++j)
                refs.push_back({&dp.v[g][j], g, "v" + std::to_string(g) + "_" + std::to_string(j)});
        for (int g = 0; g < 2; ++g)
            for (int j = 0; j < 2; ++j) {
                refs.push_back({&dp.p[g][j], g, "p" + std::to_string(g) + std::to_string(j)});
                refs.push_back({&dp.u[g][j], g, "u" + std::to_string(g) + std::to_string(j)});
            }
        return refs;
    }

    bool state_violates_constraints() const {
        if (folded_) {
            if (st_.fe.c0 < 0 || st_.fe.c1 < 0 || st_.fe.d0 < 0 || st_.fe.d1 < 0) return true;
            const double w = spec_.prior.omega;
            const double bounds[4] = {st_.fe.c0 * w, st_.fe.c1 * w, st_.fe.d0 * w, st_.fe.d1 * w};
            const double tau[4] = {st_.vc.tau_a0, st_.vc.tau_a1, st_.vc.tau_b0, st_.vc.tau_b1};
            for (int j = 0; j < 4; ++j)
                if (!(tau[j] > 0.0) || !(tau[j] < bounds[j])) return true;
        } else {
            for (double t : {st_.vc.tau_a0, st_.vc.tau_a1, st_.vc.tau_b0, st_.vc.tau_b1})
                if (!(t > 0.0) || !(t < spec_.reference_prior.tau_upper)) return true;
        }
        return !(st_.fe.sigma2 > 0.0);
    }

    const LongitudinalDataset& data_;
    ModelSpec spec_;
    McmcConfig cfg_;
    TemporalStructure ts_;
    bool joint_;
    bool folded_;
    int n_;
    int chain_index_;
    RngStream rng_;
    std::array<std::vector<int>, 2> by_group_;

    ParameterState st_;
    std::vector<double> out_ll_, re_lp_, drop_ll_, scratch_;
    double fe_lp_ = 0.0, tau_lp_ = 0.0, drop_lp_ = 0.0;
    double inv_sigma_ = 1.0, per_obs_const_ = 0.0;
};

ChainOutput Sampler::run() {
    initialize();

    const std::vector<DropCoeffRef> drop_refs = dropout_coefficients();
    const char* fe_names[4] = {"c0", "c1", "d0", "d1"};
    const char* tau_names[4] = {"tau_a0", "tau_a1", "tau_b0", "tau_b1"};
    const bool fe_on[4] = {cfg_.mask.c0, cfg_.mask.c1, cfg_.mask.d0, cfg_.mask.d1};

    // independent step size per scalar block
    AdaptiveScale fe_scale[4];
    for (auto& a : fe_scale) a.log_step = std::log(0.02);
    AdaptiveScale sigma_scale{std::log(0.3)};
    AdaptiveScale tau_scale[4];
    for (auto& a : tau_scale) a.log_step = std::log(0.6);
    std::vector<AdaptiveScale> re_scale(2 * n_);
    for (int i = 0; i < n_; ++i) {
        re_scale[2 * i].log_step = std::log(0.02);
        re_scale[2 * i + 1].log_step = std::log(0.01);
    }
    std::vector<AdaptiveScale> drop_scale(drop_refs.size(), AdaptiveScale{std::log(0.5)});

    MoveCounter fe_count[4], sigma_count, tau_count[4], re_count;
    std::vector<MoveCounter> drop_count(drop_refs.size());

    ChainOutput out;
    out.chain_index = chain_index_;
    out.master_seed = cfg_.seed;
    out.chain_seed = derive_seed(cfg_.seed, {kChainStreamTag, static_cast<std::uint64_t>(chain_index_)});

    out.quantity_names = {"c0", "c1", "d0", "d1", "sigma2", "tau_a0", "tau_a1",
                          "tau_b0", "tau_b1", "AD"};
    for (const auto& c : drop_refs) out.quantity_names.push_back(c.name);
    if (cfg_.save_random_effects) {
        for (int i = 0; i < n_; ++i) {
            out.quantity_names.push_back("re_icpt_" + std::to_string(i));
            out.quantity_names.push_back("re_slope_" + std::to_string(i));
        }
    }
    out.draws.assign(out.quantity_names.size(), {});
    for (auto& d : out.draws) d.reserve(cfg_.n_samples);

    const int total_iters = cfg_.burn_in + cfg_.n_samples;
    for (int iter = 0; iter < total_iters; ++iter) {
        const bool adapting = iter < cfg_.burn_in;
        const bool retaining = !adapting;

        for (int j = 0; j < 4; ++j) {
            if (!fe_on[j]) continue;
            const bool acc = move_fixed_effect(j, fe_scale[j].step());
            if (adapting) fe_scale[j].record(acc, cfg_.adaptation_window, cfg_.target_acceptance);
            if (retaining) { ++fe_count[j].attempts; fe_count[j].accepted += acc; }
        }
        if (cfg_.mask.sigma2) {
            const bool acc = move_sigma2(sigma_scale.step());
            if (adapting) sigma_scale.record(acc, cfg_.adaptation_window, cfg_.target_acceptance);
            if (retaining) { ++sigma_count.attempts; sigma_count.accepted += acc; }
        }
        if (cfg_.mask.tau) {
            for (int j = 0; j < 4; ++j) {
                const bool acc = move_tau(j, tau_scale[j].step());
                if (adapting) tau_scale[j].record(acc, cfg_.adaptation_window, cfg_.target_acceptance);
                if (retaining) { ++tau_count[j].attempts; tau_count[j].accepted += acc; }
            }
        }
        if (cfg_.mask.random_effects) {
            for (int i = 0; i < n_; ++i) {
                for (int comp = 0; comp < 2; ++comp) {
                    AdaptiveScale& sc = re_scale[2 * i + comp];
                    const bool acc = move_random_effect(i, comp, sc.step());
                    if (adapting) sc.record(acc, cfg_.adaptation_window, cfg_.target_acceptance);
                    if (retaining) { ++re_count.attempts; re_count.accepted += acc; }
                }
            }
        }
        if (joint_ && cfg_.mask.dropout) {
            for (std::size_t j = 0; j < drop_refs.size(); ++j) {
                const bool acc = move_dropout_coeff(drop_refs[j], drop_scale[j].step());
                if (adapting) drop_scale[j].record(acc, cfg_.adaptation_window, cfg_.target_acceptance);
                if (retaining) { ++drop_count[j].attempts; drop_count[j].accepted += acc; }
            }
        }

        if (retaining) {
            std::size_t q = 0;
            out.draws[q++].push_back(st_.fe.c0);
            out.draws[q++].push_back(st_.fe.c1);
            out.draws[q++].push_back(st_.fe.d0);
            out.draws[q++].push_back(st_.fe.d1);
            out.draws[q++].push_back(st_.fe.sigma2);
            out.draws[q++].push_back(st_.vc.tau_a0);
            out.draws[q++].push_back(st_.vc.tau_a1);
            out.draws[q++].push_back(st_.vc.tau_b0);
            out.draws[q++].push_back(st_.vc.tau_b1);
            out.draws[q++].push_back(average_distance(st_.fe, spec_.K));
            for (const auto& c : drop_refs) out.draws[q++].push_back(*c.value);
            if (cfg_.save_random_effects) {
                for (int i = 0; i < n_; ++i) {
                    out.draws[q++].push_back(st_.re[i].intercept);
                    out.draws[q++].push_back(st_.re[i].slope);
                }
            }
            if (state_violates_constraints()) ++out.violations;
            if (!std::isfinite(total_log_posterior())) ++out.nonfinite;
        }
    }

    for (int j = 0; j < 4; ++j)
        if (fe_on[j]) out.acceptance.push_back({fe_names[j], fe_count[j].rate()});
    if (cfg_.mask.sigma2) out.acceptance.push_back({"sigma2", sigma_count.rate()});
    if (cfg_.mask.tau)
        for (int j = 0; j < 4; ++j) out.acceptance.push_back({tau_names[j], tau_count[j].rate()});
    if (cfg_.mask.random_effects && n_ > 0)
        out.acceptance.push_back({"random_effects", re_count.rate()});
    for (std::size_t j = 0; j < drop_refs.size(); ++j)
        out.acceptance.push_back({drop_refs[j].name, drop_count[j].rate()});

    out.final_state = st_;
    out.final_log_posterior = total_log_posterior();
    return out;
}

}  // namespace

namespace {
void validate_config(const McmcConfig& cfg) {
    if (cfg.n_chains < 1 || cfg.burn_in < 0 || cfg.n_samples < 1 || cfg.adaptation_window < 1)
        throw std::invalid_argument(
            "mcmc config: need n_chains >= 1, burn_in >= 0, n_samples >= 1, window >= 1");
}
}  // namespace

ChainOutput run_chain(const LongitudinalDataset& data, const ModelSpec& spec,
                      const McmcConfig& cfg, int chain_index) {
    validate_config(cfg);
    validate_dataset(data);
    Sampler sampler(data, spec, cfg, chain_index);
    return sampler.run();
}

std::vector<ChainOutput> run_chains(const LongitudinalDataset& data, const ModelSpec& spec,
                                    const McmcConfig& cfg) {
    validate_config(cfg);
    validate_dataset(data);
    std::vector<ChainOutput> outs(cfg.n_chains);
    if (cfg.workers > 1 && cfg.n_chains > 1) {
        std::vector<std::thread> pool;
        const int width = std::min(cfg.workers, cfg.n_chains);
        // static striping keeps assignment deterministic
        for (int w = 0; w < width; ++w) {
            pool.emplace_back([&, w]() {
                for (int c = w; c < cfg.n_chains; c += width) {
                    Sampler sampler(data, spec, cfg, c);
                    outs[c] = sampler.run();
                }
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (int c = 0; c < cfg.n_chains; ++c) {
            Sampler sampler(data, spec, cfg, c);
            outs[c] = sampler.run();
        }
    }
    return outs;
}

}  // namespace foldmix
