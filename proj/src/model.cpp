#include "foldmix/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace foldmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

bool is_joint(ModelVariant v) {
    return v == ModelVariant::JointLinear || v == ModelVariant::JointFlexible;
}

bool is_folded(ModelVariant v) { return v != ModelVariant::LinearReference; }

std::string variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::LinearReference: return "A";
        case ModelVariant::FoldedMixed: return "B";
        case ModelVariant::JointLinear: return "C";
        case ModelVariant::JointFlexible: return "D";
    }
    return "?";
}

std::optional<ModelVariant> variant_from_name(const std::string& name) {
    if (name == "A" || name == "a") return ModelVariant::LinearReference;
    if (name == "B" || name == "b") return ModelVariant::FoldedMixed;
    if (name == "C" || name == "c") return ModelVariant::JointLinear;
    if (name == "D" || name == "d") return ModelVariant::JointFlexible;
    return std::nullopt;
}

double log_posterior(const ParameterState& state, const LongitudinalDataset& data,
                     const ModelSpec& spec) {
    if (state.re.size() != data.subjects.size())
        throw std::invalid_argument("log_posterior: one random-effect pair per subject required");
    const bool joint = is_joint(spec.variant);
    const TemporalStructure ts = spec.temporal_for_K();
    if (joint) {
        if (!state.dropout) throw std::invalid_argument("log_posterior: joint variant needs dropout params");
        for (int g = 0; g < 2; ++g) {
            if (static_cast<int>(state.dropout->q[g].size()) != ts.n_coefficients() ||
                static_cast<int>(state.dropout->v[g].size()) != ts.n_coefficients())
                throw std::invalid_argument("log_posterior: temporal coefficient count mismatch");
        }
    }

    double lp;
    if (is_folded(spec.variant)) {
        lp = fixed_effects_log_prior(state.fe, spec.prior) +
             tau_log_prior(state.vc, state.fe, spec.prior);
    } else {
        lp = reference_fixed_effects_log_prior(state.fe, spec.reference_prior) +
             reference_tau_log_prior(state.vc, spec.reference_prior);
    }
    if (joint) lp += dropout_log_prior(*state.dropout, spec.dropout_prior_sd);
    if (!std::isfinite(lp)) return kNegInf;

    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const SubjectData& s = data.subjects[i];
        const RandomEffects& re = state.re[i];
        lp += random_effects_log_prior(re, state.vc, s.group);
        lp += is_folded(spec.variant) ? outcome_loglik(s, state.fe, re)
                                      : linear_reference_loglik(s, state.fe, re);
        if (joint) lp += dropout_loglik(s.dropout, ts, *state.dropout, re, s.group, spec.K);
        if (!std::isfinite(lp)) return kNegInf;
    }
    return lp;
}

}  // namespace foldmix
