// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace turingkit::stats {

/// Combined sample size at or below which the exact permutation
/// distribution is used; above it, the tie-corrected normal approximation.
inline constexpr std::size_t kExactRankSumLimit = 20;

struct RankSumResult {
    double u = 0.0;          // Mann-Whitney U of the first sample: R_a - n_a(n_a+1)/2
    double p = 1.0;          // two-sided
    bool exact = false;      // exact permutation distribution used
    bool degenerate = false; // every pooled value identical; p forced to 1
};

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test with midranks for ties.
///
/// Exact regime: p is the fraction of all C(N, n_a) relabelings whose rank
/// sum lies at least as far from its mean as the observed one.
/// Approximate regime: z = (|U - n_a n_b / 2| - 0.5) / sigma with
/// sigma^2 = n_a n_b / 12 * ((N + 1) - sum(t^3 - t) / (N (N - 1))).
/// Throws InvalidArgument if either sample is empty.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

/// Midranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

struct Adjusted {
    double p_adjusted = 1.0;
    bool significant = false;
};

/// Benjamini-Hochberg step-up adjustment; output order matches input order.
/// p_(k) -> min_{j >= k} (m / j) p_(j), capped at 1; significant iff adjusted < alpha.
std::vector<Adjusted> bh_fdr(std::span<const double> p_values, double alpha);

/// Linear interpolation between closest ranks: h = (n - 1) q.
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);
double mean(std::span<const double> values);

/// Upper tail of the standard normal.
double normal_sf(double z);

}  // namespace turingkit::stats
