// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "fixtures.hpp"

#include <array>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace tk_test {
namespace {

constexpr std::array kOpeners = {"honestly", "lol", "yeah", "nah", "ok", "wait", "well", "hmm", "same", "ugh"};
constexpr std::array kSubjects = {"i",    "we",   "you",    "they",  "my cat", "this city", "the team",
                                  "mom",  "that", "people", "nobody"};
constexpr std::array kVerbs = {"love",  "hate",  "miss",   "need", "want", "saw",   "tried",
                               "think", "found", "bought", "made", "got",  "watched"};
constexpr std::array kNouns = {"coffee", "rain",    "game",  "movie", "bus",    "pizza",  "music",  "weekend",
                               "news",   "traffic", "album", "book",  "garden", "market", "phone",  "dog",
                               "season", "show",    "match", "trip",  "party",  "beach",  "coach",  "budget"};
constexpr std::array kAdjectives = {"good",  "bad",   "weird",  "great", "tiny", "huge",  "funny",
                                    "loud",  "quiet", "strange", "nice", "late", "early", "cold"};
constexpr std::array kFillers = {"again", "today", "tbh", "right now", "for real", "at all", "too", "anyway",
                                 "already", "somehow"};
constexpr std::array kEmojis = {"\U0001F602", "\U0001F60D", "\U0001F525", "\U0001F44D", "❤️", "\U0001F62D"};
constexpr std::array kTopics = {"election", "weather", "football", "concert", "festival", "recipe",
                                "vaccine",  "housing", "podcast",  "startup", "museum",   "marathon"};

template <typename Array>
std::string_view draw(turingkit::Rng& rng, const Array& values) {
    return values[rng.uniform_below(values.size())];
}

std::string clause(turingkit::Rng& rng) {
    std::string out;
    out += draw(rng, kSubjects);
    out += ' ';
    out += draw(rng, kVerbs);
    out += rng.bernoulli(0.5) ? " the " : " a ";
    if (rng.bernoulli(0.4)) {
        out += draw(rng, kAdjectives);
        out += ' ';
    }
    out += draw(rng, kNouns);
    if (rng.bernoulli(0.3)) {
        out += ' ';
        out += draw(rng, kFillers);
    }
    return out;
}

std::string sentence(turingkit::Rng& rng) {
    std::string out;
    if (rng.bernoulli(0.3)) {
        out += draw(rng, kOpeners);
        out += rng.bernoulli(0.5) ? ", " : " ";
    }
    out += clause(rng);
    const auto extra = rng.uniform_below(3);
    for (std::uint64_t i = 0; i < extra; ++i) {
        out += rng.bernoulli(0.5) ? ", " : " and ";
        out += clause(rng);
    }
    if (rng.bernoulli(0.6) && !out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    if (rng.bernoulli(0.08)) {
        for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    static constexpr std::array kEnds = {".", "!", "?", "", "...", "!!"};
    out += draw(rng, kEnds);
    return out;
}

}  // namespace

std::string human_like_text(turingkit::Rng& rng) {
    std::string out;
    if (rng.bernoulli(0.12)) {
        out += "@";
        out += draw(rng, kNouns);
        out += std::to_string(rng.uniform_below(100));
        out += ' ';
    }
    const auto n_sentences = 1 + rng.uniform_below(3);
    for (std::uint64_t i = 0; i < n_sentences; ++i) {
        if (i > 0) out += ' ';
        out += sentence(rng);
    }
    if (rng.bernoulli(0.1)) {
        out += " #";
        out += draw(rng, kTopics);
    }
    if (rng.bernoulli(0.05)) {
        out += " https://example.org/";
        out += draw(rng, kNouns);
    }
    if (rng.bernoulli(0.15)) {
        out += ' ';
        out += draw(rng, kEmojis);
    }
    return out;
}

std::vector<std::string> human_like_texts(std::size_t n, std::uint64_t seed) {
    turingkit::Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(human_like_text(rng));
    return out;
}

std::string parent_post(turingkit::Rng& rng) {
    std::string out = "What do you think about the ";
    out += draw(rng, kTopics);
    out += ' ';
    out += draw(rng, kNouns);
    out += rng.bernoulli(0.5) ? " this week?" : " situation?";
    return out;
}

std::vector<turingkit::corpus::Reply> synthetic_replies(const CorpusOptions& options) {
    using namespace turingkit::corpus;
    turingkit::Rng rng(options.seed);
    std::vector<Reply> replies;
    const auto platform = Platform::parse(options.platform);
    for (std::size_t u = 0; u < options.users; ++u) {
        const std::string user = "u" + std::to_string(u);
        const std::size_t total = options.train_per_user + options.test_per_user;
        for (std::size_t k = 0; k < total; ++k) {
            Reply r;
            r.id = "r" + std::to_string(u) + "_" + std::to_string(k);
            r.user_id = user;
            r.platform = platform;
            r.parent_text = parent_post(rng);
            r.text = human_like_text(rng);
            r.split = k < options.train_per_user ? Split::train : Split::test;
            replies.push_back(std::move(r));
        }
    }
    return replies;
}

turingkit::corpus::Corpus synthetic_corpus(const CorpusOptions& options) {
    return turingkit::corpus::Corpus::from_replies(synthetic_replies(options), "synthetic fixture");
}

std::vector<turingkit::corpus::Reply> as_pool(const std::vector<std::string>& texts) {
    std::vector<turingkit::corpus::Reply> pool;
    pool.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        turingkit::corpus::Reply r;
        r.id = "h" + std::to_string(i);
        r.user_id = "pool";
        r.text = texts[i];
        pool.push_back(std::move(r));
    }
    return pool;
}

TempDir::TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("turingkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace tk_test
