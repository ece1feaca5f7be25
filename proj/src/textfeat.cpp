// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

#include "http.hpp"
#include "turingkit/error.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/unicode.hpp"

namespace turingkit::textfeat {

namespace {

using unicode::is_word_char;

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

bool is_terminator(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

bool is_url_trailer(char32_t cp) {
    switch (cp) {
        case U'.': case U',': case U'!': case U'?': case U';': case U':': case U')': case U'"': case U'\'':
            return true;
        default:
            return false;
    }
}

class Scanner {
public:
    explicit Scanner(std::string_view text) : cps_(unicode::decode_utf8(text)) { out_.raw = std::string(text); }

    TokenStream run() {
        const std::size_t n = cps_.size();
        while (i_ < n) {
            const char32_t c = cps_[i_];
            if (unicode::is_whitespace(c)) {
                ++i_;
            } else if (at_url()) {
                scan_url();
            } else if ((c == U'@' || c == U'#') && i_ + 1 < n && is_word_char(cps_[i_ + 1])) {
                scan_tag(c == U'@' ? out_.mentions : out_.hashtags);
            } else if (unicode::is_extended_pictographic(c)) {
                out_.emojis.push_back(unicode::encode_utf8(std::u32string_view(&cps_[i_], 1)));
                ++i_;
            } else if (unicode::is_emoji_component(c)) {
                ++i_;
            } else if (is_word_char(c)) {
                scan_word();
            } else if (is_terminator(c)) {
                scan_terminators();
            } else {
                if (unicode::is_punctuation(c)) ++out_.punctuation_count;
                if (c == U',') ++sentence_commas_;
                ++i_;
            }
        }
        close_sentence(n);

        std::u32string_view all(cps_);
        std::size_t lo = 0;
        std::size_t hi = all.size();
        while (lo < hi && unicode::is_whitespace(all[lo])) ++lo;
        while (hi > lo && unicode::is_whitespace(all[hi - 1])) --hi;
        out_.char_count = hi - lo;
        return std::move(out_);
    }

private:
    bool at_url() const {
        std::u32string_view rest(cps_.data() + i_, cps_.size() - i_);
        if (i_ > 0 && is_word_char(cps_[i_ - 1])) return false;
        return starts_with_icase(rest, U"http://") || starts_with_icase(rest, U"https://");
    }

    void scan_url() {
        std::size_t end = i_;
        while (end < cps_.size() && !unicode::is_whitespace(cps_[end])) ++end;
        while (end > i_ && is_url_trailer(cps_[end - 1])) --end;
        out_.urls.push_back(unicode::encode_utf8(std::u32string_view(&cps_[i_], end - i_)));
        i_ = end;
    }

    void scan_tag(std::vector<std::string>& sink) {
        std::size_t end = i_ + 1;
        while (end < cps_.size() && is_word_char(cps_[end])) ++end;
        sink.push_back(unicode::encode_utf8(std::u32string_view(&cps_[i_], end - i_)));
        i_ = end;
    }

    void scan_word() {
        std::u32string word;
        while (i_ < cps_.size()) {
            const char32_t c = cps_[i_];
            if (is_word_char(c)) {
                if (unicode::is_uppercase(c)) ++out_.uppercase_count;
                word.push_back(unicode::to_lower(c));
                ++i_;
            } else if (is_apostrophe(c) && i_ + 1 < cps_.size() && is_word_char(cps_[i_ + 1])) {
                ++out_.punctuation_count;
                word.push_back(U'\'');
                ++i_;
            } else {
                break;
            }
        }
        out_.words.push_back(unicode::encode_utf8(word));
        ++sentence_words_;
    }

    void scan_terminators() {
        while (i_ < cps_.size() && is_terminator(cps_[i_])) {
            ++out_.punctuation_count;
            ++i_;
        }
        if (i_ == cps_.size() || unicode::is_whitespace(cps_[i_])) close_sentence(i_);
    }

    void close_sentence(std::size_t end) {
        std::u32string_view span(cps_.data() + sentence_start_, end - sentence_start_);
        std::string text(trim(unicode::encode_utf8(span)));
        if (!text.empty()) {
            out_.sentences.push_back(std::move(text));
            out_.sentence_word_counts.push_back(sentence_words_);
            out_.sentence_comma_counts.push_back(sentence_commas_);
        }
        sentence_start_ = end;
        sentence_words_ = 0;
        sentence_commas_ = 0;
    }

    std::u32string cps_;
    TokenStream out_;
    std::size_t i_ = 0;
    std::size_t sentence_start_ = 0;
    std::size_t sentence_words_ = 0;
    std::size_t sentence_commas_ = 0;
};

double population_variance(std::span<const std::size_t> values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (auto v : values) mean += static_cast<double>(v);
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (auto v : values) acc += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
    return acc / static_cast<double>(values.size());
}

FeatureVector features_from_tokens(const TokenStream& ts, const LexiconSet& lexica, double toxicity) {
    FeatureVector f;
    const auto n_words = ts.words.size();
    f.word_count = static_cast<double>(n_words);
    f.char_count = static_cast<double>(ts.char_count);
    if (n_words > 0) {
        std::size_t total_len = 0;
        for (const auto& w : ts.words) total_len += unicode::decode_utf8(w).size();
        f.avg_word_length = static_cast<double>(total_len) / static_cast<double>(n_words);
    }
    f.sentence_length_variance = population_variance(ts.sentence_word_counts);
    f.punctuation_count = static_cast<double>(ts.punctuation_count);
    f.uppercase_count = static_cast<double>(ts.uppercase_count);
    f.mention_count = static_cast<double>(ts.mentions.size());
    f.hashtag_count = static_cast<double>(ts.hashtags.size());
    f.link_count = static_cast<double>(ts.urls.size());
    f.emoji_count = static_cast<double>(ts.emojis.size());
    f.transition_word_count = static_cast<double>(lexica.transitions.count_matches(ts.words));
    f.superlative_count = static_cast<double>(lexica.superlatives.count_matches(ts.words));
    f.hedge_word_count = static_cast<double>(lexica.hedges.count_matches(ts.words));
    if (n_words > 0) {
        std::unordered_map<std::string_view, int> types;
        for (const auto& w : ts.words) types[w]++;
        f.type_token_ratio = static_cast<double>(types.size()) / static_cast<double>(n_words);
    }
    f.trigram_repetition_count = static_cast<double>(trigram_repetitions(ts.words));
    f.perplexity_proxy = self_entropy(ts.words);
    f.sentiment_compound = sentiment_compound(ts.words, lexica.sentiment);
    f.toxicity = toxicity;
    if (!ts.sentences.empty()) {
        std::size_t commas = 0;
        for (auto c : ts.sentence_comma_counts) commas += c;
        f.clauses_per_sentence =
            static_cast<double>(commas + ts.sentences.size()) / static_cast<double>(ts.sentences.size());
    }
    return f;
}

}  // namespace

TokenStream tokenize(std::string_view text) { return Scanner(text).run(); }

const std::array<std::string_view, FeatureVector::kSize>& FeatureVector::names() {
    static const std::array<std::string_view, kSize> kNames = {
        "word_count",         "char_count",          "avg_word_length",        "sentence_length_variance",
        "punctuation_count",  "uppercase_count",     "mention_count",          "hashtag_count",
        "link_count",         "emoji_count",         "transition_word_count",  "superlative_count",
        "hedge_word_count",   "type_token_ratio",    "trigram_repetition_count", "perplexity_proxy",
        "sentiment_compound", "toxicity",            "clauses_per_sentence",
    };
    return kNames;
}

std::array<double, FeatureVector::kSize> FeatureVector::to_array() const {
    return {word_count,        char_count,          avg_word_length,       sentence_length_variance,
            punctuation_count, uppercase_count,     mention_count,         hashtag_count,
            link_count,        emoji_count,         transition_word_count, superlative_count,
            hedge_word_count,  type_token_ratio,    trigram_repetition_count, perplexity_proxy,
            sentiment_compound, toxicity,           clauses_per_sentence};
}

FeatureVector FeatureVector::from_array(std::span<const double> v) {
    if (v.size() != kSize) throw InvalidArgument("feature array must have 19 values");
    FeatureVector f;
    std::tie(f.word_count, f.char_count, f.avg_word_length, f.sentence_length_variance, f.punctuation_count,
             f.uppercase_count, f.mention_count, f.hashtag_count, f.link_count, f.emoji_count) =
        std::tuple(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]);
    std::tie(f.transition_word_count, f.superlative_count, f.hedge_word_count, f.type_token_ratio,
             f.trigram_repetition_count, f.perplexity_proxy, f.sentiment_compound, f.toxicity,
             f.clauses_per_sentence) = std::tuple(v[10], v[11], v[12], v[13], v[14], v[15], v[16], v[17], v[18]);
    return f;
}

double self_entropy(std::span<const std::string> words) {
    if (words.empty()) return 0.0;
    std::map<std::string_view, std::size_t> counts;
    for (const auto& w : words) counts[w]++;
    if (counts.size() <= 1) return 0.0;
    const double n = static_cast<double>(words.size());
    double h = 0.0;
    for (const auto& [_, c] : counts) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

std::size_t trigram_repetitions(std::span<const std::string> words) {
    if (words.size() < 3) return 0;
    std::map<std::tuple<std::string_view, std::string_view, std::string_view>, std::size_t> counts;
    for (std::size_t i = 0; i + 2 < words.size(); ++i) counts[{words[i], words[i + 1], words[i + 2]}]++;
    std::size_t repeats = 0;
    for (const auto& [_, c] : counts) repeats += c - 1;
    return repeats;
}

double sentiment_compound(std::span<const std::string> words, const SentimentLexicon& lexicon) {
    static constexpr double kDecay[] = {1.0, 0.95, 0.9};
    double sum = 0.0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const double* valence = lexicon.valence.find(words[i]);
        if (valence == nullptr) continue;
        const double base = *valence;
        double v = base;
        bool negated = false;
        for (std::size_t d = 1; d <= 3 && d <= i; ++d) {
            const auto& prev = words[i - d];
            // Sign follows the word's own valence, even if a dampener pushes v across zero.
            if (const double* scalar = lexicon.boosters.find(prev)) v += (base < 0 ? -*scalar : *scalar) * kDecay[d - 1];
            if (lexicon.is_negator(prev)) negated = true;
        }
        sum += negated ? -v : v;
    }
    if (sum == 0.0) return 0.0;
    return sum / std::sqrt(sum * sum + 15.0);
}

double sentiment_compound(std::string_view text, const LexiconSet& lexica) {
    return sentiment_compound(tokenize(text).words, lexica.sentiment);
}

double lexicon_toxicity(std::span<const std::string> words, const WeightedLexicon& lexicon) {
    double total = 0.0;
    for (const auto& w : words)
        if (const double* weight = lexicon.find(w)) total += *weight;
    return std::clamp(total, 0.0, 1.0);
}

double LexiconToxicityScorer::score_words(std::span<const std::string> words) const {
    return lexicon_toxicity(words, lexicon_);
}

double LexiconToxicityScorer::score(std::string_view text) const { return score_words(tokenize(text).words); }

HttpToxicityScorer::HttpToxicityScorer(std::string url, double timeout_seconds)
    : url_(std::move(url)), timeout_seconds_(timeout_seconds) {}

std::vector<double> HttpToxicityScorer::score_batch(std::span<const std::string> texts) const {
    nlohmann::json body{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    nlohmann::json reply;
    try {
        reply = http::post_json(url_, body, timeout_seconds_);
    } catch (const Error& e) {
        throw ScorerError(std::string("toxicity endpoint unreachable: ") + e.what());
    }
    auto it = reply.find("scores");
    if (it == reply.end() || !it->is_array() || it->size() != texts.size())
        throw ScorerError("toxicity endpoint returned a malformed reply from " + url_);
    std::vector<double> scores;
    for (const auto& s : *it) {
        if (!s.is_number()) throw ScorerError("toxicity endpoint returned a non-numeric score");
        const double v = s.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) throw ScorerError("toxicity endpoint returned a score outside [0, 1]");
        scores.push_back(v);
    }
    return scores;
}

double HttpToxicityScorer::score(std::string_view text) const {
    const std::string one(text);
    return score_batch(std::span<const std::string>(&one, 1)).front();
}

FeatureVector extract_features(std::string_view text, const LexiconSet& lexica) {
    const TokenStream ts = tokenize(text);
    return features_from_tokens(ts, lexica, lexicon_toxicity(ts.words, lexica.toxicity));
}

FeatureVector extract_features(std::string_view text, const LexiconSet& lexica, const ToxicityScorer& scorer) {
    const TokenStream ts = tokenize(text);
    return features_from_tokens(ts, lexica, scorer.score(text));
}

void write_feature_csv(std::ostream& out, std::span<const FeatureVector> rows) {
    const auto& names = FeatureVector::names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << '\n';
    for (const auto& row : rows) {
        const auto values = row.to_array();
        for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_sig6(values[i]);
        out << '\n';
    }
}

}  // namespace turingkit::textfeat
