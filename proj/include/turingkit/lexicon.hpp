// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace turingkit {

/// One parsed line of a "word<TAB>weight" lexicon file.
struct LexiconEntry {
    std::string term;  // lowercase; may contain spaces (multi-word phrase)
    double weight = 1.0;
};

/// Parses "word<TAB>weight" lines (weight optional, default 1.0). Lines
/// starting with '#' are comments; "# version: X" sets the version.
/// Throws ParseError on malformed weights or non-lowercase terms.
std::vector<LexiconEntry> parse_lexicon(std::string_view content, std::string_view source_name,
                                        std::string* version = nullptr);

/// Text of a lexicon compiled into the library ("hedges", "transitions",
/// "superlatives", "sentiment", "negators", "boosters", "toxicity",
/// "topics_demo"). Throws InvalidArgument for unknown names.
std::string_view builtin_lexicon_text(std::string_view name);
std::vector<std::string> builtin_lexicon_names();

std::string read_text_file(const std::filesystem::path& path);

/// Word and phrase list matched greedily (longest entry first) over a token sequence.
class PhraseLexicon {
public:
    PhraseLexicon() = default;
    explicit PhraseLexicon(std::span<const LexiconEntry> entries, std::string version = {});

    /// Non-overlapping matches, scanning left to right.
    std::size_t count_matches(std::span<const std::string> words) const;
    bool contains(std::string_view phrase) const;
    std::size_t size() const noexcept { return size_; }
    const std::string& version() const noexcept { return version_; }

private:
    std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_first_word_;
    std::size_t size_ = 0;
    std::string version_;
};

class WeightedLexicon {
public:
    WeightedLexicon() = default;
    explicit WeightedLexicon(std::span<const LexiconEntry> entries, std::string version = {});

    /// nullptr when the word is absent.
    const double* find(std::string_view word) const;
    std::size_t size() const noexcept { return weights_.size(); }
    const std::string& version() const noexcept { return version_; }

private:
    std::unordered_map<std::string, double> weights_;
    std::string version_;
};

/// Valence lexicon plus the modifier rules used by the compound score.
struct SentimentLexicon {
    WeightedLexicon valence;
    std::unordered_set<std::string> negators;  // any token ending in "n't" also negates
    WeightedLexicon boosters;                  // signed scalar added in the valence direction

    bool is_negator(std::string_view word) const;
};

struct LexiconSet {
    PhraseLexicon hedges;
    PhraseLexicon transitions;
    PhraseLexicon superlatives;
    SentimentLexicon sentiment;
    WeightedLexicon toxicity;

    /// Lexicons shipped with the library.
    static LexiconSet builtin();
    /// Loads hedges.txt, transitions.txt, superlatives.txt, sentiment.txt,
    /// negators.txt, boosters.txt and toxicity.txt from a directory.
    static LexiconSet load(const std::filesystem::path& dir);

    /// Throws InvalidArgument if any component is empty.
    void validate() const;
    /// "hedges=<v>;transitions=<v>;..." for run manifests.
    std::string versions() const;
};

}  // namespace turingkit
