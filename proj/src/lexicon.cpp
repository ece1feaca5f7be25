// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <fstream>
#include <sstream>

#include "turingkit/error.hpp"
#include "turingkit/text_util.hpp"
#include "turingkit/unicode.hpp"

namespace turingkit {

namespace {

std::vector<std::string> words_of(std::string_view phrase) {
    std::vector<std::string> out;
    for (auto& part : split(phrase, ' '))
        if (!part.empty()) out.push_back(part);
    return out;
}

}  // namespace

std::vector<LexiconEntry> parse_lexicon(std::string_view content, std::string_view source_name, std::string* version) {
    std::vector<LexiconEntry> entries;
    std::vector<LineIssue> issues;
    std::size_t line_no = 0;
    for (const auto& raw : split(content, '\n')) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view kTag = "# version:";
            if (version != nullptr && line.substr(0, kTag.size()) == kTag) *version = std::string(trim(line.substr(kTag.size())));
            continue;
        }
        LexiconEntry entry;
        const auto tab = line.find('\t');
        entry.term = std::string(trim(line.substr(0, tab)));
        if (tab != std::string_view::npos) {
            std::string_view w = trim(line.substr(tab + 1));
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
            if (ec != std::errc() || ptr != w.data() + w.size()) {
                issues.push_back({line_no, "invalid weight '" + std::string(w) + "'"});
                continue;
            }
            entry.weight = value;
        }
        if (unicode::encode_utf8(unicode::to_lower(unicode::decode_utf8(entry.term))) != entry.term) {
            issues.push_back({line_no, "entry '" + entry.term + "' is not lowercase"});
            continue;
        }
        entries.push_back(std::move(entry));
    }
    if (!issues.empty()) throw ParseError(std::string(source_name), std::move(issues));
    return entries;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

PhraseLexicon::PhraseLexicon(std::span<const LexiconEntry> entries, std::string version) : version_(std::move(version)) {
    for (const auto& e : entries) {
        auto words = words_of(e.term);
        if (words.empty()) continue;
        auto& bucket = by_first_word_[words.front()];
        bucket.push_back(std::move(words));
        ++size_;
    }
    // Longest phrases first so the greedy scan prefers them.
    for (auto& [_, bucket] : by_first_word_)
        std::stable_sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::size_t PhraseLexicon::count_matches(std::span<const std::string> words) const {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t advance = 1;
        if (auto it = by_first_word_.find(words[i]); it != by_first_word_.end()) {
            for (const auto& phrase : it->second) {
                if (i + phrase.size() > words.size()) continue;
                if (std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
                    ++count;
                    advance = phrase.size();
                    break;
                }
            }
        }
        i += advance;
    }
    return count;
}

bool PhraseLexicon::contains(std::string_view phrase) const {
    auto words = words_of(phrase);
    if (words.empty()) return false;
    auto it = by_first_word_.find(words.front());
    if (it == by_first_word_.end()) return false;
    for (const auto& p : it->second)
        if (p == words) return true;
    return false;
}

WeightedLexicon::WeightedLexicon(std::span<const LexiconEntry> entries, std::string version)
    : version_(std::move(version)) {
    for (const auto& e : entries) weights_[e.term] = e.weight;
}

const double* WeightedLexicon::find(std::string_view word) const {
    auto it = weights_.find(std::string(word));
    return it == weights_.end() ? nullptr : &it->second;
}

bool SentimentLexicon::is_negator(std::string_view word) const {
    if (negators.count(std::string(word))) return true;
    return word.size() > 3 && word.substr(word.size() - 3) == "n't";
}

namespace {

template <typename Lexicon>
Lexicon make(std::string_view text, std::string_view name) {
    std::string version;
    auto entries = parse_lexicon(text, name, &version);
    return Lexicon(entries, version);
}

LexiconSet assemble(const std::function<std::string(std::string_view)>& source) {
    LexiconSet set;
    set.hedges = make<PhraseLexicon>(source("hedges"), "hedges");
    set.transitions = make<PhraseLexicon>(source("transitions"), "transitions");
    set.superlatives = make<PhraseLexicon>(source("superlatives"), "superlatives");
    set.sentiment.valence = make<WeightedLexicon>(source("sentiment"), "sentiment");
    set.sentiment.boosters = make<WeightedLexicon>(source("boosters"), "boosters");
    for (auto& e : parse_lexicon(source("negators"), "negators")) set.sentiment.negators.insert(e.term);
    set.toxicity = make<WeightedLexicon>(source("toxicity"), "toxicity");
    set.validate();
    return set;
}

}  // namespace

LexiconSet LexiconSet::builtin() {
    static const LexiconSet cached = assemble([](std::string_view name) { return std::string(builtin_lexicon_text(name)); });
    return cached;
}

LexiconSet LexiconSet::load(const std::filesystem::path& dir) {
    return assemble([&](std::string_view name) { return read_text_file(dir / (std::string(name) + ".txt")); });
}

void LexiconSet::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgument(std::string("lexicon '") + what + "' is empty");
    };
    need(hedges.size() > 0, "hedges");
    need(transitions.size() > 0, "transitions");
    need(superlatives.size() > 0, "superlatives");
    need(sentiment.valence.size() > 0, "sentiment");
    need(!sentiment.negators.empty(), "negators");
    need(toxicity.size() > 0, "toxicity");
}

std::string LexiconSet::versions() const {
    return "hedges=" + hedges.version() + ";transitions=" + transitions.version() +
           ";superlatives=" + superlatives.version() + ";sentiment=" + sentiment.valence.version() +
           ";toxicity=" + toxicity.version();
}

}  // namespace turingkit
