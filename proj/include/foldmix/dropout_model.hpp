#pragma once

#include <array>
#include <vector>

#include "foldmix/data.hpp"
#include "foldmix/outcome_model.hpp"

namespace foldmix {

// Time component of the hazard linear predictor. Hazard times run over
// t = 0..K-2. Flexible uses one coefficient per time; Grouped buckets
// `group_size` consecutive times together (remainder times join the last
// bucket); Linear is intercept + slope * t.
enum class TemporalKind { Linear, Flexible, FlexibleGrouped };

struct TemporalStructure {
    TemporalKind kind = TemporalKind::Linear;
    int K = 7;
    int group_size = 2;  // FlexibleGrouped only

    int n_hazard_times() const { return K - 1; }

    int n_coefficients() const {
        switch (kind) {
            case TemporalKind::Linear: return 2;
            case TemporalKind::Flexible: return K - 1;
            case TemporalKind::FlexibleGrouped: {
                const int buckets = (K - 1) / group_size;
                return buckets > 0 ? buckets : 1;
            }
        }
        return 0;
    }

    int bucket(int t) const {
        const int b = t / group_size;
        const int last = n_coefficients() - 1;
        return b < last ? b : last;
    }
};

// Logit-scale coefficients of the two cause-specific hazards.
// q/v hold the temporal coefficients per exposure group for the recovery-
// and death-type hazards; p/u are the random-effect association
// coefficients indexed [group][intercept=0, slope=1].
struct DropoutParams {
    std::array<std::vector<double>, 2> q;
    std::array<std::vector<double>, 2> v;
    std::array<std::array<double, 2>, 2> p{{{0.0, 0.0}, {0.0, 0.0}}};
    std::array<std::array<double, 2>, 2> u{{{0.0, 0.0}, {0.0, 0.0}}};

    static DropoutParams zeros(const TemporalStructure& ts) {
        DropoutParams dp;
        for (int g = 0; g < 2; ++g) {
            dp.q[g].assign(ts.n_coefficients(), 0.0);
            dp.v[g].assign(ts.n_coefficients(), 0.0);
        }
        return dp;
    }

    int n_parameters() const {
        return static_cast<int>(q[0].size() + q[1].size() + v[0].size() + v[1].size()) + 8;
    }
};

struct Hazards {
    double lambda;  // cause 1 (recovery-type)
    double kappa;   // cause 2 (death-type)
};

// Value of the temporal function for one cause/group at hazard time t.
double temporal_value(const TemporalStructure& ts, const std::vector<double>& coeffs, int t);

Hazards hazards(const TemporalStructure& ts, const DropoutParams& dp, const RandomEffects& re,
                ExposureGroup g, int t);

// Discrete-time competing-risk log-likelihood of one (D, delta) record.
// Within a step the two causes run as independent trials with no ordering:
// survival factorizes as (1-lambda)(1-kappa) and the simultaneous-event
// mass splits evenly, which makes the (D, delta) outcome space a proper
// distribution for any hazard values.
double dropout_loglik(const DropoutRecord& rec, const TemporalStructure& ts,
                      const DropoutParams& dp, const RandomEffects& re, ExposureGroup g, int K);

// Independent normal priors over every coefficient.
double dropout_log_prior(const DropoutParams& dp, double prior_sd);

}  // namespace foldmix
