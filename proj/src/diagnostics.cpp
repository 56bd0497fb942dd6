#include "foldmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "foldmix/distributions.hpp"

namespace foldmix {

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_var(const std::vector<double>& x, double mean) {
    if (x.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size() - 1);
}

// Split every chain in half (dropping a middle element when odd).
std::vector<std::vector<double>> split_halves(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> halves;
    for (const auto& c : chains) {
        const std::size_t half = c.size() / 2;
        if (half == 0) continue;
        halves.emplace_back(c.begin(), c.begin() + half);
        halves.emplace_back(c.end() - half, c.end());
    }
    return halves;
}

// Rank-normalize in place across all sequences (average ranks for ties,
// mapped through the normal quantile with the (r - 3/8)/(S + 1/4) offset).
void rank_normalize(std::vector<std::vector<double>>& seqs) {
    struct Entry {
        double value;
        std::size_t seq, pos;
    };
    std::vector<Entry> all;
    for (std::size_t s = 0; s < seqs.size(); ++s)
        for (std::size_t i = 0; i < seqs[s].size(); ++i) all.push_back({seqs[s][i], s, i});
    std::sort(all.begin(), all.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value; });
    const double total = static_cast<double>(all.size());
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j + 1 < all.size() && all[j + 1].value == all[i].value) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        const double z = norm_quantile((avg_rank - 0.375) / (total + 0.25));
        for (std::size_t k = i; k <= j; ++k) seqs[all[k].seq][all[k].pos] = z;
        i = j + 1;
    }
}

bool all_equal(const std::vector<std::vector<double>>& chains) {
    double first = 0.0;
    bool have = false;
    for (const auto& c : chains)
        for (double v : c) {
            if (!have) {
                first = v;
                have = true;
            } else if (v != first) {
                return false;
            }
        }
    return true;
}

}  // namespace

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

PosteriorSummary summarize(const std::vector<double>& pooled) {
    if (pooled.empty()) throw std::invalid_argument("summarize: no draws");
    PosteriorSummary s;
    s.n = static_cast<long>(pooled.size());
    s.mean = mean_of(pooled);
    s.sd = std::sqrt(sample_var(pooled, s.mean));
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    s.median = quantile_sorted(sorted, 0.5);
    s.q025 = quantile_sorted(sorted, 0.025);
    s.q975 = quantile_sorted(sorted, 0.975);
    return s;
}

std::vector<double> pool_draws(const std::vector<ChainOutput>& chains,
                               const std::string& quantity) {
    std::vector<double> pooled;
    for (const auto& c : chains) {
        const auto& d = c.draws[c.quantity(quantity)];
        pooled.insert(pooled.end(), d.begin(), d.end());
    }
    return pooled;
}

PosteriorSummary summarize(const std::vector<ChainOutput>& chains, const std::string& quantity) {
    return summarize(pool_draws(chains, quantity));
}

RhatResult split_rhat(const std::vector<std::vector<double>>& chains) {
    if (all_equal(chains)) return {1.0, false};
    auto halves = split_halves(chains);
    if (halves.size() < 2) throw std::invalid_argument("split_rhat: need at least 2 half-chains");
    // equalize lengths (ragged inputs are not expected, but be safe)
    std::size_t n = halves.front().size();
    for (const auto& h : halves) n = std::min(n, h.size());
    if (n < 2) throw std::invalid_argument("split_rhat: chains too short");
    for (auto& h : halves) h.resize(n);

    rank_normalize(halves);

    const std::size_t m = halves.size();
    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = mean_of(halves[j]);
        w += sample_var(halves[j], means[j]);
    }
    w /= static_cast<double>(m);
    const double grand = mean_of(means);
    double b_over_n = sample_var(means, grand);  // B/n
    const double dn = static_cast<double>(n);
    const double var_plus = (dn - 1.0) / dn * w + b_over_n;
    if (!(w > 0.0)) return {1.0, false};
    return {std::sqrt(var_plus / w), true};
}

RhatResult split_rhat(const std::vector<ChainOutput>& chains, const std::string& quantity) {
    if (chains.size() < 2) throw std::invalid_argument("split_rhat: need >= 2 chains");
    std::vector<std::vector<double>> seqs;
    for (const auto& c : chains) seqs.push_back(c.draws[c.quantity(quantity)]);
    return split_rhat(seqs);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
    const std::size_t m = chains.size();
    if (m == 0) throw std::invalid_argument("ess: no chains");
    std::size_t n = chains.front().size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (n < 4) throw std::invalid_argument("ess: chains too short");
    if (all_equal(chains)) return static_cast<double>(m * n);

    std::vector<double> means(m);
    std::vector<double> vars(m);
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = std::accumulate(chains[j].begin(), chains[j].begin() + n, 0.0) / n;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = chains[j][i] - means[j];
            ss += d * d;
        }
        vars[j] = ss / static_cast<double>(n - 1);
    }
    const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    double b_over_n = 0.0;
    if (m > 1) {
        const double grand = mean_of(means);
        b_over_n = sample_var(means, grand);
    }
    const double var_plus = (static_cast<double>(n) - 1.0) / n * w + b_over_n;
    if (!(var_plus > 0.0)) return static_cast<double>(m * n);

    const std::size_t max_lag = std::min(n - 1, static_cast<std::size_t>(1000));
    auto acov = [&](std::size_t j, std::size_t t) {
        double s = 0.0;
        for (std::size_t i = 0; i + t < n; ++i)
            s += (chains[j][i] - means[j]) * (chains[j][i + t] - means[j]);
        return s / static_cast<double>(n);
    };

    // Geyer initial monotone positive sequence over paired lags.
    double rho_sum = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t + 1 <= max_lag; t += 2) {
        double ac_t = 0.0, ac_t1 = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            ac_t += acov(j, t);
            ac_t1 += acov(j, t + 1);
        }
        ac_t /= m;
        ac_t1 /= m;
        const double rho_t = 1.0 - (w - ac_t) / var_plus;
        const double rho_t1 = 1.0 - (w - ac_t1) / var_plus;
        double pair = rho_t + rho_t1;
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        rho_sum += pair;
    }
    const double tau = 1.0 + 2.0 * rho_sum;
    const double ess = static_cast<double>(m * n) / std::max(tau, 1e-12);
    return std::min(ess, static_cast<double>(m * n));
}

double effective_sample_size(const std::vector<ChainOutput>& chains, const std::string& quantity) {
    std::vector<std::vector<double>> seqs;
    for (const auto& c : chains) seqs.push_back(c.draws[c.quantity(quantity)]);
    return effective_sample_size(seqs);
}

}  // namespace foldmix
