// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace turingkit::corpus {

enum class Split { train, test };

std::string_view to_string(Split split);

struct Platform {
    enum class Kind { twitter, bluesky, reddit, other };

    Kind kind = Kind::other;
    std::string name;  // canonical lowercase name; free text for Kind::other

    static Platform parse(std::string_view text);
    bool operator==(const Platform&) const = default;
};

/// Who wrote a reply: a human, or a model under a prompt configuration.
struct Source {
    bool human = true;
    std::string model_id;
    std::string config_id;

    static Source generated(std::string model, std::string config) {
        return Source{false, std::move(model), std::move(config)};
    }
    bool operator==(const Source&) const = default;
};

struct Reply {
    std::string id;
    std::string user_id;
    Platform platform;
    std::string parent_text;
    std::string text;
    Split split = Split::train;
    Source source;

    bool operator==(const Reply&) const = default;
};

struct UserProfile {
    std::string user_id;
    Platform platform;
    std::vector<std::string> train_reply_ids;
    std::vector<std::string> test_reply_ids;
    std::optional<std::string> persona;

    bool operator==(const UserProfile&) const = default;
};

/// Immutable reply collection with resolved user profiles.
///
/// Users appear in order of their first reply. Every reply's user resolves to
/// a profile and every profile id list resolves to replies.
class Corpus {
public:
    Corpus() = default;

    /// Validates and indexes the replies. Throws InvalidArgument on duplicate ids,
    /// empty user ids, or blank human reply text.
    static Corpus from_replies(std::vector<Reply> replies, std::string provenance = {});

    const Platform& platform() const noexcept { return platform_; }
    const std::vector<Reply>& replies() const noexcept { return replies_; }
    const std::vector<UserProfile>& users() const noexcept { return users_; }
    const std::string& provenance() const noexcept { return provenance_; }

    const Reply* find_reply(std::string_view id) const;
    const UserProfile* find_user(std::string_view user_id) const;

    /// Replies of one user in one split, in corpus order.
    std::vector<const Reply*> replies_of(std::string_view user_id, Split split) const;

    /// Human replies from the train split; the default pool for balanced sets.
    std::vector<Reply> human_train_pool() const;

    /// Copy with personas attached. Throws InvalidArgument for unknown user ids.
    Corpus with_personas(const std::map<std::string, std::string>& personas) const;

    bool operator==(const Corpus& other) const {
        return platform_ == other.platform_ && replies_ == other.replies_ && users_ == other.users_ &&
               provenance_ == other.provenance_;
    }

private:
    Platform platform_;
    std::vector<Reply> replies_;
    std::vector<UserProfile> users_;
    std::string provenance_;
    std::unordered_map<std::string, std::size_t> reply_index_;
    std::unordered_map<std::string, std::size_t> user_index_;
};

/// Reads a JSON-Lines corpus. Collects every malformed line and throws
/// ParseError listing them; an empty file yields an empty corpus and a warning.
Corpus ingest_corpus(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Same as ingest_corpus but reading from a string (source_name is used in messages).
Corpus parse_corpus(std::string_view jsonl, std::string_view source_name = "<memory>",
                    std::vector<std::string>* warnings = nullptr);

void write_corpus(const Corpus& corpus, std::ostream& out);
std::string reply_to_json_line(const Reply& reply);

/// Personas sidecar: JSONL {"user_id": str, "persona": str}.
std::map<std::string, std::string> read_personas(const std::filesystem::path& path);
void write_personas(const std::map<std::string, std::string>& personas, std::ostream& out);

struct EvalUserSample {
    std::string user_id;
    std::vector<std::string> reply_ids;
};

/// Users with at least min_test_replies test replies, each with per_user test
/// replies drawn uniformly without replacement. Each user draws from its own
/// stream derived from (seed, user_id), so the sample for one user does not
/// depend on which other users are present. If max_users is set and exceeded,
/// that many users are drawn uniformly; output keeps corpus order.
std::vector<EvalUserSample> sample_eval_users(const Corpus& corpus, std::size_t min_test_replies,
                                              std::size_t per_user, std::optional<std::size_t> max_users,
                                              std::uint64_t seed);

enum class Label { human, ai };

std::string_view to_string(Label label);

struct LabeledText {
    std::string text;
    Label label = Label::human;
    std::string source_id;

    bool operator==(const LabeledText&) const = default;
};

struct BalancedSet {
    std::vector<LabeledText> items;
    std::uint64_t seed = 0;

    std::size_t count(Label label) const;
    bool operator==(const BalancedSet&) const = default;
};

/// Pairs every AI text with a distinct human reply sampled from the pool, then
/// shuffles. AI items get source ids "ai:<index>".
BalancedSet build_balanced_set(std::span<const std::string> ai_texts, std::span<const Reply> human_pool,
                               std::uint64_t seed);

/// Stratified split: per label, round(n_label * val_fraction) items go to
/// validation. Both halves keep the input's relative order.
std::pair<BalancedSet, BalancedSet> split_train_val(const BalancedSet& set, double val_fraction,
                                                    std::uint64_t seed);

}  // namespace turingkit::corpus
