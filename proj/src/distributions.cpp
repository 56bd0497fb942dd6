#include "foldmix/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace foldmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sigma(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("folded normal: sigma must be > 0");
}

}  // namespace

double norm_log_pdf(double x, double mean, double sd) {
    const double u = (x - mean) / sd;
    return -0.5 * u * u - std::log(sd) - kLogSqrt2Pi;
}

double norm_pdf(double x, double mean, double sd) {
    return std::exp(norm_log_pdf(x, mean, sd));
}

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double norm_cdf(double x, double mean, double sd) {
    return norm_cdf((x - mean) / sd);
}

double log_norm_sf(double x) {
    if (x < 25.0) {
        return std::log(0.5 * std::erfc(x * 0.70710678118654752440));
    }
    // Asymptotic tail: 1-Phi(x) ~ phi(x)/x * (1 - 1/x^2 + 3/x^4)
    const double x2 = x * x;
    return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Wichura (1988) algorithm AS 241, PPND16.
double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -kInf;
        if (p == 1.0) return kInf;
        throw std::domain_error("norm_quantile: p must be in [0,1]");
    }
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double fn_log_pdf(double z, const FoldedNormalParams& p) {
    check_sigma(p.sigma);
    if (!(z >= 0.0)) throw std::domain_error("folded normal: z must be >= 0");
    const double a = (z - p.mu) / p.sigma;
    const double b = (z + p.mu) / p.sigma;
    const double la = -0.5 * a * a;
    const double lb = -0.5 * b * b;
    // log-sum-exp; naive exp underflows once |z -+ mu|/sigma > 38
    const double hi = la > lb ? la : lb;
    const double lo = la > lb ? lb : la;
    return hi + std::log1p(std::exp(lo - hi)) - std::log(p.sigma) - kLogSqrt2Pi;
}

double fn_pdf(double z, const FoldedNormalParams& p) {
    return std::exp(fn_log_pdf(z, p));
}

double fn_cdf(double z, const FoldedNormalParams& p) {
    check_sigma(p.sigma);
    if (!(z >= 0.0)) throw std::domain_error("folded normal: z must be >= 0");
    return norm_cdf((z - p.mu) / p.sigma) - norm_cdf((-z - p.mu) / p.sigma);
}

double fn_sample(const FoldedNormalParams& p, RngStream& rng) {
    check_sigma(p.sigma);
    return std::fabs(rng.normal(p.mu, p.sigma));
}

double fn_mean(const FoldedNormalParams& p) {
    check_sigma(p.sigma);
    const double r = p.mu / p.sigma;
    return p.sigma * 0.79788456080286535588 * std::exp(-0.5 * r * r) +
           p.mu * (1.0 - 2.0 * norm_cdf(-r));
}

double tn_log_pdf(double x, const TruncatedNormalParams& p) {
    if (!(p.rho2 > 0.0)) throw std::invalid_argument("truncated normal: rho2 must be > 0");
    if (x < p.lower) return -kInf;
    const double rho = std::sqrt(p.rho2);
    return norm_log_pdf(x, p.zeta, rho) - log_norm_sf((p.lower - p.zeta) / rho);
}

double tn_sample(const TruncatedNormalParams& p, RngStream& rng) {
    if (!(p.rho2 > 0.0)) throw std::invalid_argument("truncated normal: rho2 must be > 0");
    const double rho = std::sqrt(p.rho2);
    const double alpha = (p.lower - p.zeta) / rho;
    if (alpha <= 5.0) {
        // Inverse CDF on the surviving mass.
        const double plo = norm_cdf(alpha);
        const double u = plo + rng.uniform() * (1.0 - plo);
        return p.zeta + rho * norm_quantile(u);
    }
    // Deep-tail exponential rejection (Robert 1995).
    const double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
    for (;;) {
        const double z = alpha + rng.exponential() / lambda;
        const double d = z - lambda;
        if (std::log(rng.uniform()) <= -0.5 * d * d) return p.zeta + rho * z;
    }
}

double gamma_sample(const GammaShapeScale& p, RngStream& rng) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0))
        throw std::invalid_argument("gamma: shape and scale must be > 0");
    // Marsaglia-Tsang squeeze; shape < 1 boosted via Gamma(shape+1) * U^{1/shape}.
    double boost = 1.0;
    double k = p.shape;
    if (k < 1.0) {
        boost = std::pow(rng.uniform(), 1.0 / k);
        k += 1.0;
    }
    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return boost * d * v * p.scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return boost * d * v * p.scale;
    }
}

double inv_gamma_log_pdf(double x, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("inverse gamma: shape and scale must be > 0");
    if (!(x > 0.0)) return -kInf;
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace foldmix
