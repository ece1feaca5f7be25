// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <array>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turingkit/lexicon.hpp"

namespace turingkit::textfeat {

/// Social-media token stream.
///
/// Scanning rules, applied left to right:
///   - url:     "http://" or "https://" (case-insensitive) up to the next
///              whitespace, minus trailing  . , ! ? ; : ) " '
///   - mention: '@' followed by one or more word characters (@\w+)
///   - hashtag: '#' followed by one or more word characters (#\w+)
///   - emoji:   each Extended_Pictographic codepoint; emoji components
///              (ZWJ, variation selectors, skin tones) are skipped
///   - word:    run of word characters with internal apostrophes, lowercased
///              (' and U+2019 are normalized to ')
/// Sentences end after a run of . ! ? followed by whitespace or end of text;
/// terminators inside urls do not count.
struct TokenStream {
    std::vector<std::string> words;
    std::vector<std::string> sentences;  // trimmed sentence text
    std::vector<std::string> emojis;
    std::vector<std::string> mentions;
    std::vector<std::string> hashtags;
    std::vector<std::string> urls;
    std::string raw;

    std::vector<std::size_t> sentence_word_counts;   // parallel to sentences
    std::vector<std::size_t> sentence_comma_counts;  // parallel to sentences
    /// Punctuation and uppercase letters outside url/mention/hashtag spans.
    std::size_t punctuation_count = 0;
    std::size_t uppercase_count = 0;
    /// Codepoints after stripping surrounding whitespace.
    std::size_t char_count = 0;
};

TokenStream tokenize(std::string_view text);

/// The 19 interpretable features, in export order.
struct FeatureVector {
    double word_count = 0;
    double char_count = 0;
    double avg_word_length = 0;
    double sentence_length_variance = 0;
    double punctuation_count = 0;
    double uppercase_count = 0;
    double mention_count = 0;
    double hashtag_count = 0;
    double link_count = 0;
    double emoji_count = 0;
    double transition_word_count = 0;
    double superlative_count = 0;
    double hedge_word_count = 0;
    double type_token_ratio = 0;
    double trigram_repetition_count = 0;
    double perplexity_proxy = 0;
    double sentiment_compound = 0;
    double toxicity = 0;
    double clauses_per_sentence = 0;

    static constexpr std::size_t kSize = 19;
    static const std::array<std::string_view, kSize>& names();

    std::array<double, kSize> to_array() const;
    static FeatureVector from_array(std::span<const double> values);
    bool operator==(const FeatureVector&) const = default;
};

/// Toxicity in [0, 1]. Implementations must be safe to call concurrently.
class ToxicityScorer {
public:
    virtual ~ToxicityScorer() = default;
    virtual double score(std::string_view text) const = 0;
    virtual std::string name() const = 0;
};

/// min(1, sum of weights of the words found in the lexicon).
double lexicon_toxicity(std::span<const std::string> words, const WeightedLexicon& lexicon);

/// Lower-fidelity fallback: min(1, sum of toxic-term weights over word tokens).
class LexiconToxicityScorer final : public ToxicityScorer {
public:
    explicit LexiconToxicityScorer(WeightedLexicon lexicon) : lexicon_(std::move(lexicon)) {}
    double score(std::string_view text) const override;
    double score_words(std::span<const std::string> words) const;
    std::string name() const override { return "lexicon-fallback:" + lexicon_.version(); }

private:
    WeightedLexicon lexicon_;
};

/// Adapter for an external classifier: POST <url> with {"texts": [str]}
/// returning {"scores": [real]}. Throws ScorerError when unreachable or
/// when the reply is malformed or out of range.
class HttpToxicityScorer final : public ToxicityScorer {
public:
    explicit HttpToxicityScorer(std::string url, double timeout_seconds = 30.0);
    double score(std::string_view text) const override;
    std::vector<double> score_batch(std::span<const std::string> texts) const;
    std::string name() const override { return "http:" + url_; }

private:
    std::string url_;
    double timeout_seconds_;
};

/// Shannon entropy (bits) of the within-text word distribution.
double self_entropy(std::span<const std::string> words);

/// Number of repeated word trigrams: sum over distinct trigrams of (occurrences - 1).
std::size_t trigram_repetitions(std::span<const std::string> words);

/// Lexicon compound score in [-1, 1].
///
/// For each word with valence v: every booster among the three preceding
/// tokens adds its scalar (sign-matched to v) scaled by 1.0, 0.95, 0.9 for
/// distance 1, 2, 3; a negator among the three preceding tokens then flips
/// the sign. With s the sum, compound = s / sqrt(s^2 + 15).
double sentiment_compound(std::span<const std::string> words, const SentimentLexicon& lexicon);
double sentiment_compound(std::string_view text, const LexiconSet& lexica);

/// Uses the lexicon fallback scorer.
FeatureVector extract_features(std::string_view text, const LexiconSet& lexica);
/// Scorer failures propagate as ScorerError.
FeatureVector extract_features(std::string_view text, const LexiconSet& lexica, const ToxicityScorer& scorer);

/// CSV with the fixed 19-column header of FeatureVector::names().
void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows);

}  // namespace turingkit::textfeat
