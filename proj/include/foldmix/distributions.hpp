#pragma once

#include "foldmix/rng.hpp"

namespace foldmix {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// ---- Normal kernels ------------------------------------------------------

double norm_log_pdf(double x, double mean, double sd);
double norm_pdf(double x, double mean, double sd);
double norm_cdf(double x);                       // standard normal Phi
double norm_cdf(double x, double mean, double sd);
double log_norm_sf(double x);                    // log(1 - Phi(x)), stable in the far tail
double norm_quantile(double p);                  // Phi^{-1}, Wichura's PPND16

inline double inv_logit(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// ---- Folded normal -------------------------------------------------------

// Location/scale of the normal being folded; |N(mu, sigma^2)|.
// The density is symmetric in the sign of mu.
struct FoldedNormalParams {
    double mu;
    double sigma;
};

double fn_log_pdf(double z, const FoldedNormalParams& p);
double fn_pdf(double z, const FoldedNormalParams& p);
double fn_cdf(double z, const FoldedNormalParams& p);
double fn_sample(const FoldedNormalParams& p, RngStream& rng);
double fn_mean(const FoldedNormalParams& p);

// ---- Truncated normal ----------------------------------------------------

// N(zeta, rho2) truncated below at `lower` (0 for the constraint priors).
struct TruncatedNormalParams {
    double zeta;
    double rho2;
    double lower = 0.0;
};

double tn_log_pdf(double x, const TruncatedNormalParams& p);
double tn_sample(const TruncatedNormalParams& p, RngStream& rng);

// ---- Gamma (shape-scale) -------------------------------------------------

struct GammaShapeScale {
    double shape;  // k
    double scale;  // theta; mean = k * theta
};

double gamma_sample(const GammaShapeScale& p, RngStream& rng);

// ---- Inverse gamma -------------------------------------------------------

// shape a, scale b: density b^a / Gamma(a) x^{-(a+1)} exp(-b/x).
// Returns -inf for x <= 0 (out of support, not an error).
double inv_gamma_log_pdf(double x, double shape, double scale);

}  // namespace foldmix
