// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "turingkit/error.hpp"

namespace turingkit::stats {

namespace {

// Number of size-k subsets of `doubled_ranks` for each achievable sum.
std::vector<double> subset_sum_counts(std::span<const long> doubled_ranks, std::size_t k, long max_sum) {
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    dp[0][0] = 1.0;
    for (long r : doubled_ranks) {
        for (std::size_t j = k; j >= 1; --j) {
            auto& dst = dp[j];
            const auto& src = dp[j - 1];
            for (long s = max_sum; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
        }
    }
    return dp[k];
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("wilcoxon_rank_sum requires two non-empty samples");
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    const std::size_t n = na + nb;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) rank_sum_a += ranks[i];

    RankSumResult result;
    result.u = rank_sum_a - static_cast<double>(na * (na + 1)) / 2.0;

    const bool all_equal = std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); });
    if (all_equal) {
        result.p = 1.0;
        result.degenerate = true;
        result.exact = n <= kExactRankSumLimit;
        return result;
    }

    if (n <= kExactRankSumLimit) {
        // Midranks are multiples of 1/2, so doubled ranks are exact integers.
        std::vector<long> doubled(n);
        long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = std::lround(2.0 * ranks[i]);
            total += doubled[i];
        }
        long observed = 0;
        for (std::size_t i = 0; i < na; ++i) observed += doubled[i];
        const auto counts = subset_sum_counts(doubled, na, total);
        const long expected = static_cast<long>(na) * static_cast<long>(n + 1);  // 2 * n_a (N + 1) / 2
        const long distance = std::labs(observed - expected);
        double hits = 0.0;
        double all = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] == 0.0) continue;
            all += counts[s];
            if (std::labs(static_cast<long>(s) - expected) >= distance) hits += counts[s];
        }
        result.p = std::min(1.0, hits / all);
        result.exact = true;
        return result;
    }

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    const double dn = static_cast<double>(n);
    const double variance = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    const double centered = std::max(0.0, std::fabs(result.u - dna * dnb / 2.0) - 0.5);
    result.p = std::min(1.0, 2.0 * normal_sf(centered / std::sqrt(variance)));
    return result;
}

std::vector<Adjusted> bh_fdr(std::span<const double> p_values, double alpha) {
    const std::size_t m = p_values.size();
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("bh_fdr: p-values must lie in [0, 1]");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("bh_fdr: alpha must lie in [0, 1)");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });

    std::vector<Adjusted> out(m);
    double running = 1.0;
    for (std::size_t k = m; k >= 1; --k) {
        const std::size_t idx = order[k - 1];
        running = std::min(running, static_cast<double>(m) / static_cast<double>(k) * p_values[idx]);
        out[idx].p_adjusted = std::min(1.0, running);
        out[idx].significant = out[idx].p_adjusted < alpha;
    }
    return out;
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("mean of an empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace turingkit::stats
