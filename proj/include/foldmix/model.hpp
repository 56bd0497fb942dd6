#pragma once

#include <optional>
#include <string>

#include "foldmix/data.hpp"
#include "foldmix/dropout_model.hpp"
#include "foldmix/outcome_model.hpp"

namespace foldmix {

// The four analysis models: A = normal reference, B = folded mixed
// effects, C = joint with linear temporal functions, D = joint with
// flexible temporal functions.
enum class ModelVariant { LinearReference, FoldedMixed, JointLinear, JointFlexible };

bool is_joint(ModelVariant v);
bool is_folded(ModelVariant v);
std::string variant_name(ModelVariant v);                   // "A".."D"
std::optional<ModelVariant> variant_from_name(const std::string& name);

struct ModelSpec {
    ModelVariant variant = ModelVariant::FoldedMixed;
    int K = 7;
    OutcomePriorConfig prior;
    ReferencePriorConfig reference_prior;
    TemporalStructure temporal;      // joint variants only
    double dropout_prior_sd = 10.0;  // joint variants only

    TemporalStructure temporal_for_K() const {
        TemporalStructure ts = temporal;
        ts.K = K;
        if (variant == ModelVariant::JointLinear) ts.kind = TemporalKind::Linear;
        return ts;
    }
};

// One full point in parameter space.
struct ParameterState {
    FixedEffects fe;
    VarianceComponents vc;
    std::vector<RandomEffects> re;  // one per subject, dataset order
    std::optional<DropoutParams> dropout;
};

// Joint log density of data and parameters: per-subject random-effect
// priors + outcome likelihood (+ dropout likelihood for joint variants),
// plus the fixed-effect, tau, sigma2 (and dropout-coefficient) priors.
// Returns -inf on any constraint violation; throws on dimension mismatch.
double log_posterior(const ParameterState& state, const LongitudinalDataset& data,
                     const ModelSpec& spec);

}  // namespace foldmix
