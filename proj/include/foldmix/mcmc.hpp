#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldmix/model.hpp"

namespace foldmix {

// Which blocks the sweep updates. Masking blocks off holds those
// parameters at their initial values (used by the quadrature-equivalence
// and calibration checks, and by prior-predictive tooling).
struct UpdateMask {
    bool c0 = true, c1 = true, d0 = true, d1 = true;
    bool sigma2 = true;
    bool tau = true;
    bool random_effects = true;
    bool dropout = true;
};

struct McmcConfig {
    int n_chains = 4;
    int burn_in = 2000;
    int n_samples = 2000;
    std::uint64_t seed = 1;
    double target_acceptance = 0.44;  // optimal scalar random-walk rate
    int adaptation_window = 50;
    int workers = 0;                  // 0 = run chains sequentially
    bool save_random_effects = false;
    bool sample_prior_only = false;   // drop the likelihood terms
    UpdateMask mask;
    std::optional<ParameterState> init_state;
    int max_init_attempts = 20;
};

struct BlockAcceptance {
    std::string name;
    double rate;  // post burn-in
};

struct ChainOutput {
    int chain_index = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t chain_seed = 0;
    std::vector<std::string> quantity_names;
    std::vector<std::vector<double>> draws;  // [quantity][iteration]
    std::vector<BlockAcceptance> acceptance;
    ParameterState final_state;
    double final_log_posterior = 0.0;
    long violations = 0;   // retained draws breaking a support constraint
    long nonfinite = 0;    // retained draws with non-finite log posterior

    int quantity(const std::string& name) const {
        for (std::size_t q = 0; q < quantity_names.size(); ++q)
            if (quantity_names[q] == name) return static_cast<int>(q);
        throw std::out_of_range("unknown monitored quantity: " + name);
    }
};

struct SamplerInitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive scalar Metropolis-within-Gibbs. One sweep updates, in fixed
// order: each fixed effect, sigma2, each tau, each subject's random-effect
// pair, then (joint variants) each dropout coefficient. sigma2 moves on the
// log scale, tau on a logit scale over its current support, everything else
// by plain random walk with rejection at constraint boundaries. Proposal
// scales adapt toward the target acceptance during burn-in only.
// Deterministic given (seed, chain_index).
ChainOutput run_chain(const LongitudinalDataset& data, const ModelSpec& spec,
                      const McmcConfig& cfg, int chain_index);

std::vector<ChainOutput> run_chains(const LongitudinalDataset& data, const ModelSpec& spec,
                                    const McmcConfig& cfg);

}  // namespace foldmix
