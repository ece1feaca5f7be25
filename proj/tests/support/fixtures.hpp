// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "turingkit/corpus.hpp"
#include "turingkit/rng.hpp"

namespace tk_test {

/// One short reply in a loose social-media register: mixed casing, commas,
/// the odd mention, hashtag, link or emoji.
std::string human_like_text(turingkit::Rng& rng);
std::vector<std::string> human_like_texts(std::size_t n, std::uint64_t seed);

/// A post for users to reply to.
std::string parent_post(turingkit::Rng& rng);

struct CorpusOptions {
    std::size_t users = 20;
    std::size_t train_per_user = 30;
    std::size_t test_per_user = 22;
    std::string platform = "bluesky";
    std::uint64_t seed = 1;
};

/// Replies with ids "r<user>_<k>" and users "u<index>", train replies first.
std::vector<turingkit::corpus::Reply> synthetic_replies(const CorpusOptions& options);
turingkit::corpus::Corpus synthetic_corpus(const CorpusOptions& options);

/// Replies wrapped as a human pool.
std::vector<turingkit::corpus::Reply> as_pool(const std::vector<std::string>& texts);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, std::string_view content);

}  // namespace tk_test
