#include "foldmix/outcome_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace foldmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double expected_trajectory(const FixedEffects& fe, const RandomEffects& re, ExposureGroup g,
                           int t) {
    return fe.intercept(g) + re.intercept + (fe.slope(g) + re.slope) * t;
}

double outcome_loglik(const SubjectData& s, const FixedEffects& fe, const RandomEffects& re) {
    if (!(fe.sigma2 > 0.0)) throw std::invalid_argument("outcome_loglik: sigma2 must be > 0");
    if (s.observations.empty())
        throw std::invalid_argument("outcome_loglik: subject has no observations");
    const double sigma = std::sqrt(fe.sigma2);
    double ll = 0.0;
    for (const auto& o : s.observations) {
        ll += fn_log_pdf(o.z, {expected_trajectory(fe, re, s.group, o.time), sigma});
    }
    return ll;
}

double linear_reference_loglik(const SubjectData& s, const FixedEffects& fe,
                               const RandomEffects& re) {
    if (!(fe.sigma2 > 0.0))
        throw std::invalid_argument("linear_reference_loglik: sigma2 must be > 0");
    if (s.observations.empty())
        throw std::invalid_argument("linear_reference_loglik: subject has no observations");
    const double sigma = std::sqrt(fe.sigma2);
    double ll = 0.0;
    for (const auto& o : s.observations) {
        ll += norm_log_pdf(o.z, expected_trajectory(fe, re, s.group, o.time), sigma);
    }
    return ll;
}

double random_effects_log_prior(const RandomEffects& re, const VarianceComponents& vc,
                                ExposureGroup g) {
    const double sd0 = vc.intercept_sd(g);
    const double sd1 = vc.slope_sd(g);
    if (!(sd0 > 0.0) || !(sd1 > 0.0))
        throw std::invalid_argument("random_effects_log_prior: tau must be > 0");
    return norm_log_pdf(re.intercept, 0.0, sd0) + norm_log_pdf(re.slope, 0.0, sd1);
}

double fixed_effects_log_prior(const FixedEffects& fe, const OutcomePriorConfig& cfg) {
    if (!(fe.sigma2 > 0.0)) return kNegInf;
    const TruncatedNormalParams tn{cfg.zeta, cfg.rho2, 0.0};
    double lp = inv_gamma_log_pdf(fe.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale);
    for (double f : {fe.c0, fe.c1, fe.d0, fe.d1}) {
        if (f < 0.0) return kNegInf;
        lp += tn_log_pdf(f, tn);
    }
    return lp;
}

double tau_log_prior(const VarianceComponents& vc, const FixedEffects& fe,
                     const OutcomePriorConfig& cfg) {
    const double tau[4] = {vc.tau_a0, vc.tau_a1, vc.tau_b0, vc.tau_b1};
    const double paired[4] = {fe.c0, fe.c1, fe.d0, fe.d1};
    double lp = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double bound = paired[j] * cfg.omega;
        if (!(bound > 0.0) || !(tau[j] > 0.0) || !(tau[j] < bound)) return kNegInf;
        lp -= std::log(bound);
    }
    return lp;
}

double reference_fixed_effects_log_prior(const FixedEffects& fe, const ReferencePriorConfig& cfg) {
    if (!(fe.sigma2 > 0.0)) return kNegInf;
    const double sd = std::sqrt(cfg.fe_var);
    double lp = inv_gamma_log_pdf(fe.sigma2, cfg.sigma2_ig_shape, cfg.sigma2_ig_scale);
    for (double f : {fe.c0, fe.c1, fe.d0, fe.d1}) lp += norm_log_pdf(f, cfg.fe_mean, sd);
    return lp;
}

double reference_tau_log_prior(const VarianceComponents& vc, const ReferencePriorConfig& cfg) {
    double lp = 0.0;
    for (double t : {vc.tau_a0, vc.tau_a1, vc.tau_b0, vc.tau_b1}) {
        if (!(t > 0.0) || !(t < cfg.tau_upper)) return kNegInf;
        lp -= std::log(cfg.tau_upper);
    }
    return lp;
}

double average_distance(const FixedEffects& fe, int K) {
    if (K < 1) throw std::invalid_argument("average_distance: K must be >= 1");
    return fe.c0 - fe.d0 + (fe.c1 - fe.d1) * 0.5 * (K - 1);
}

}  // namespace foldmix
