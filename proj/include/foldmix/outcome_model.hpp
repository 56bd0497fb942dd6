#pragma once

#include "foldmix/data.hpp"
#include "foldmix/distributions.hpp"

namespace foldmix {

// Group-specific intercepts/slopes plus residual variance of the
// (pre-folding) normal outcome.
struct FixedEffects {
    double c0 = 0.0;  // unexposed intercept
    double c1 = 0.0;  // unexposed slope
    double d0 = 0.0;  // exposed intercept
    double d1 = 0.0;  // exposed slope
    double sigma2 = 1.0;

    double intercept(ExposureGroup g) const { return g == ExposureGroup::unexposed ? c0 : d0; }
    double slope(ExposureGroup g) const { return g == ExposureGroup::unexposed ? c1 : d1; }
};

// Per-subject deviation pair; interpretation (alpha vs beta) follows the
// subject's group, so each subject stores exactly the two values its
// trajectory uses.
struct RandomEffects {
    double intercept = 0.0;
    double slope = 0.0;
};

// Standard deviations of the four random-effect distributions.
struct VarianceComponents {
    double tau_a0 = 0.0;
    double tau_a1 = 0.0;
    double tau_b0 = 0.0;
    double tau_b1 = 0.0;

    double intercept_sd(ExposureGroup g) const {
        return g == ExposureGroup::unexposed ? tau_a0 : tau_b0;
    }
    double slope_sd(ExposureGroup g) const {
        return g == ExposureGroup::unexposed ? tau_a1 : tau_b1;
    }
};

// Hyperparameters of the constraint priors: truncated-normal (zeta, rho2)
// on the fixed effects, U(0, fe*omega) on each tau, inverse gamma on sigma2.
struct OutcomePriorConfig {
    double zeta = 0.0;
    double rho2 = 100.0;
    double omega = 0.5;
    double sigma2_ig_shape = 0.01;
    double sigma2_ig_scale = 0.01;
};

// Priors of the unconstrained normal reference model (the paper-silent
// choice: vague normals on fixed effects, uniform on random-effect SDs).
struct ReferencePriorConfig {
    double fe_mean = 0.0;
    double fe_var = 100.0;
    double tau_upper = 10.0;
    double sigma2_ig_shape = 0.01;
    double sigma2_ig_scale = 0.01;
};

// mu_it = intercept + (slope) * t with the group-matching effects.
double expected_trajectory(const FixedEffects& fe, const RandomEffects& re, ExposureGroup g,
                           int t);

// Folded-normal log-likelihood of one subject's observed magnitudes.
double outcome_loglik(const SubjectData& s, const FixedEffects& fe, const RandomEffects& re);

// Normal reference-model log-likelihood (same linear predictor).
double linear_reference_loglik(const SubjectData& s, const FixedEffects& fe,
                               const RandomEffects& re);

// Two centered normal terms with the group-matching SDs.
double random_effects_log_prior(const RandomEffects& re, const VarianceComponents& vc,
                                ExposureGroup g);

// Truncated-normal terms on c0,c1,d0,d1 plus inverse gamma on sigma2;
// -inf encodes out-of-support.
double fixed_effects_log_prior(const FixedEffects& fe, const OutcomePriorConfig& cfg);

// Uniform(0, fe*omega) terms on the four tau; -inf outside support
// (including when a paired fixed effect is <= 0, which collapses the bound).
double tau_log_prior(const VarianceComponents& vc, const FixedEffects& fe,
                     const OutcomePriorConfig& cfg);

// Reference-model counterparts.
double reference_fixed_effects_log_prior(const FixedEffects& fe, const ReferencePriorConfig& cfg);
double reference_tau_log_prior(const VarianceComponents& vc, const ReferencePriorConfig& cfg);

// The estimand: mean vertical gap between the two regression lines over
// t = 0..K-1, i.e. c0 - d0 + (c1 - d1)(K-1)/2.
double average_distance(const FixedEffects& fe, int K);

}  // namespace foldmix
