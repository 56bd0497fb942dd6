#include "foldmix/dropout_model.hpp"

#include <cmath>
#include <stdexcept>

#include "foldmix/distributions.hpp"

namespace foldmix {

namespace {

// log(1 + exp(x)) without overflow; log lambda = eta - softplus(eta),
// log(1 - lambda) = -softplus(eta), exact even for hazards near 0 or 1.
double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct LinearPredictors {
    double eta1;
    double eta2;
};

LinearPredictors linear_predictors(const TemporalStructure& ts, const DropoutParams& dp,
                                   const RandomEffects& re, ExposureGroup g, int t) {
    const int m = group_index(g);
    return {temporal_value(ts, dp.q[m], t) + dp.p[m][0] * re.intercept + dp.p[m][1] * re.slope,
            temporal_value(ts, dp.v[m], t) + dp.u[m][0] * re.intercept + dp.u[m][1] * re.slope};
}

}  // namespace

double temporal_value(const TemporalStructure& ts, const std::vector<double>& coeffs, int t) {
    if (t < 0 || t > ts.K - 2) throw std::domain_error("temporal_value: t outside hazard range");
    switch (ts.kind) {
        case TemporalKind::Linear: return coeffs[0] + coeffs[1] * t;
        case TemporalKind::Flexible: return coeffs[t];
        case TemporalKind::FlexibleGrouped: return coeffs[ts.bucket(t)];
    }
    return 0.0;
}

Hazards hazards(const TemporalStructure& ts, const DropoutParams& dp, const RandomEffects& re,
                ExposureGroup g, int t) {
    const LinearPredictors lp = linear_predictors(ts, dp, re, g, t);
    return {inv_logit(lp.eta1), inv_logit(lp.eta2)};
}

double dropout_loglik(const DropoutRecord& rec, const TemporalStructure& ts,
                      const DropoutParams& dp, const RandomEffects& re, ExposureGroup g, int K) {
    if (rec.cause == 0 && rec.last_time != K - 1)
        throw std::invalid_argument("dropout_loglik: completer must have D = K-1");
    if (rec.cause != 0 && (rec.last_time < 0 || rec.last_time > K - 2))
        throw std::invalid_argument("dropout_loglik: dropout time outside 0..K-2");

    // Each step runs independent per-cause trials: survive with
    // (1-lambda)(1-kappa); the simultaneous-event mass lambda*kappa splits
    // evenly between the causes, so the event terms are lambda(1 - kappa/2)
    // and kappa(1 - lambda/2) and the outcome space sums to one exactly.
    const int survive_until = rec.cause == 0 ? K - 1 : rec.last_time;
    double ll = 0.0;
    for (int t = 0; t < survive_until; ++t) {
        const LinearPredictors lp = linear_predictors(ts, dp, re, g, t);
        ll -= softplus(lp.eta1) + softplus(lp.eta2);
    }
    if (rec.cause != 0) {
        const LinearPredictors lp = linear_predictors(ts, dp, re, g, rec.last_time);
        const double eta = rec.cause == 1 ? lp.eta1 : lp.eta2;
        const double other = rec.cause == 1 ? lp.eta2 : lp.eta1;
        ll += eta - softplus(eta) + std::log1p(-0.5 * inv_logit(other));
    }
    return ll;
}

double dropout_log_prior(const DropoutParams& dp, double prior_sd) {
    double lp = 0.0;
    for (int g = 0; g < 2; ++g) {
        for (double c : dp.q[g]) lp += norm_log_pdf(c, 0.0, prior_sd);
        for (double c : dp.v[g]) lp += norm_log_pdf(c, 0.0, prior_sd);
        for (int j = 0; j < 2; ++j) {
            lp += norm_log_pdf(dp.p[g][j], 0.0, prior_sd);
            lp += norm_log_pdf(dp.u[g][j], 0.0, prior_sd);
        }
    }
    return lp;
}

}  // namespace foldmix
