// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/semsim.hpp"

#include <algorithm>
#include <cmath>

#include "turingkit/error.hpp"
#include "turingkit/parallel.hpp"
#include "turingkit/stats.hpp"
#include "turingkit/text_util.hpp"

namespace turingkit::semsim {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidArgument("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    // One sqrt keeps cosine(v, v) exactly 1.
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

SimilarityDistribution summarize(std::vector<double> scores) {
    if (scores.empty()) throw InvalidArgument("summarize: no scores");
    SimilarityDistribution d;
    d.n = scores.size();
    d.q1 = stats::quantile(scores, 0.25);
    d.median = stats::quantile(scores, 0.5);
    d.q3 = stats::quantile(scores, 0.75);
    d.scores = std::move(scores);
    return d;
}

SimilarityDistribution pairwise_similarity(std::span<const TextPair> pairs, const Encoder& encoder, std::size_t jobs) {
    if (pairs.empty()) throw InvalidArgument("pairwise_similarity: no pairs");
    std::vector<double> scores(pairs.size());
    std::vector<char> zero(pairs.size(), 0);
    auto is_zero = [](const Embedding& e) { return std::all_of(e.begin(), e.end(), [](double x) { return x == 0.0; }); };
    parallel_for(pairs.size(), encoder.supports_concurrency() ? jobs : 1, [&](std::size_t i) {
        Embedding g;
        Embedding r;
        try {
            g = encoder.embed(pairs[i].generated);
            r = encoder.embed(pairs[i].reference);
        } catch (const Error& e) {
            throw EncoderError("pair " + std::to_string(i) + ": " + e.what());
        }
        zero[i] = is_zero(g) || is_zero(r);
        scores[i] = cosine(g, r);
    });
    auto d = summarize(std::move(scores));
    for (std::size_t i = 0; i < zero.size(); ++i)
        if (zero[i]) d.zero_vector_pairs.push_back(i);
    return d;
}

void write_scores_csv(std::ostream& out, std::span<const std::string> pair_ids, std::span<const double> scores) {
    if (pair_ids.size() != scores.size()) throw InvalidArgument("write_scores_csv: ids and scores differ in length");
    out << "pair_id,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) out << pair_ids[i] << ',' << format_sig6(scores[i]) << '\n';
}

}  // namespace turingkit::semsim
