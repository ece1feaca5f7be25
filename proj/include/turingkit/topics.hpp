// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turingkit/stats.hpp"

namespace turingkit::topics {

/// Category lexicon. Terms ending in '*' match any token with that prefix.
class TopicLexicon {
public:
    struct Category {
        std::string name;
        std::vector<std::string> exact;
        std::vector<std::string> prefixes;
    };

    TopicLexicon() = default;

    /// Parses "category: term1, term2, term3*" lines; '#' comments;
    /// "# version: X" sets the version. Throws ParseError.
    static TopicLexicon parse(std::string_view content, std::string_view source_name = "<memory>");
    static TopicLexicon load(const std::filesystem::path& path);
    /// 20-category demonstration lexicon shipped with the library.
    static TopicLexicon builtin_demo();

    TopicLexicon& add_category(std::string name, const std::vector<std::string>& terms);

    const std::vector<Category>& categories() const noexcept { return categories_; }
    std::size_t size() const noexcept { return categories_.size(); }
    const std::string& version() const noexcept { return version_; }
    void set_version(std::string v) { version_ = std::move(v); }

    bool matches(const Category& category, std::string_view token) const;

private:
    std::vector<Category> categories_;
    std::string version_;
};

/// Per-category share of word tokens, aligned with TopicLexicon::categories().
struct TopicSignal {
    std::vector<double> scores;
};

/// score(c) = (# word tokens matching any term of c) / max(1, word_count).
TopicSignal topic_signals(std::string_view text, const TopicLexicon& lexicon);

enum class Direction { ai_higher, human_higher, none };
std::string_view to_string(Direction d);

struct DivergenceRow {
    std::string category;
    double u_statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
    Direction direction = Direction::none;
    std::size_t n_ai = 0;
    std::size_t n_human = 0;
    bool degenerate = false;
};

struct DivergenceReport {
    std::vector<DivergenceRow> rows;
    double alpha = 0.05;

    std::size_t significant_count() const;
};

/// Rank-sum test per category (AI sample first), BH-corrected jointly over
/// all categories. Direction compares medians, then means on a median tie.
DivergenceReport divergence_report(std::span<const std::string> ai_texts, std::span<const std::string> human_texts,
                                   const TopicLexicon& lexicon, double alpha = 0.05);

/// Same, from precomputed signals.
DivergenceReport divergence_report(std::span<const TopicSignal> ai, std::span<const TopicSignal> human,
                                   const TopicLexicon& lexicon, double alpha = 0.05);

struct CommonDivergence {
    std::string category;
    std::vector<std::string> models;  // sorted
};

/// Categories ranked by the number of reports flagging them significant,
/// ties alphabetical, truncated to k. Categories flagged nowhere are omitted.
std::vector<CommonDivergence> top_k_common_divergent(const std::map<std::string, DivergenceReport>& reports,
                                                     std::size_t k);

/// CSV: category,u,p_raw,p_adjusted,significant,direction
void write_divergence_csv(std::ostream& out, const DivergenceReport& report);

}  // namespace turingkit::topics
