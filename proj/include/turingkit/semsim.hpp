// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turingkit/encoder.hpp"

namespace turingkit::semsim {

/// a.b / (|a| |b|), clamped to [-1, 1]; 0 when either norm is 0.
/// Throws InvalidArgument on a dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

struct SimilarityDistribution {
    std::vector<double> scores;
    std::vector<std::size_t> zero_vector_pairs;  // pairs scored 0 because an embedding was all-zero
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    std::size_t n = 0;
};

/// Five-number style summary with linear-interpolation quantiles.
SimilarityDistribution summarize(std::vector<double> scores);

struct TextPair {
    std::string generated;
    std::string reference;
};

/// One cosine score per (generated, reference) pair. Encoder failures are
/// rethrown as EncoderError naming the offending pair index.
SimilarityDistribution pairwise_similarity(std::span<const TextPair> pairs, const Encoder& encoder,
                                           std::size_t jobs = 1);

/// CSV: pair_id,score
void write_scores_csv(std::ostream& out, std::span<const std::string> pair_ids, std::span<const double> scores);

}  // namespace turingkit::semsim
