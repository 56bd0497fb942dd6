#pragma once

#include <string>
#include <vector>

#include "foldmix/mcmc.hpp"

namespace foldmix {

struct PosteriorSummary {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
    long n = 0;
};

struct RhatResult {
    double value = 1.0;
    bool defined = true;  // false when draws are constant
};

// Linear-interpolation quantile of a sorted sample (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double p);

// Empirical mean/median/SD and 2.5%/97.5% quantiles of pooled draws.
PosteriorSummary summarize(const std::vector<double>& pooled);
PosteriorSummary summarize(const std::vector<ChainOutput>& chains, const std::string& quantity);

// Split R-hat on rank-normalized draws; needs >= 2 chains (each chain is
// split in half, so a single chain also works through the low-level call).
RhatResult split_rhat(const std::vector<std::vector<double>>& chains);
RhatResult split_rhat(const std::vector<ChainOutput>& chains, const std::string& quantity);

// Autocorrelation-based effective sample size (Geyer initial monotone
// positive sequence, pooled across chains).
double effective_sample_size(const std::vector<std::vector<double>>& chains);
double effective_sample_size(const std::vector<ChainOutput>& chains, const std::string& quantity);

std::vector<double> pool_draws(const std::vector<ChainOutput>& chains,
                               const std::string& quantity);

}  // namespace foldmix
