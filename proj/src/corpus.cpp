// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "turingkit/error.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/text_util.hpp"

namespace turingkit::corpus {

using nlohmann::json;

std::string_view to_string(Split split) { return split == Split::train ? "train" : "test"; }

std::string_view to_string(Label label) { return label == Label::human ? "human" : "ai"; }

Platform Platform::parse(std::string_view text) {
    std::string name = ascii_lower(text);
    if (name == "twitter" || name == "x") return {Kind::twitter, "twitter"};
    if (name == "bluesky") return {Kind::bluesky, "bluesky"};
    if (name == "reddit") return {Kind::reddit, "reddit"};
    return {Kind::other, std::string(text)};
}

Corpus Corpus::from_replies(std::vector<Reply> replies, std::string provenance) {
    Corpus c;
    c.provenance_ = std::move(provenance);
    c.replies_ = std::move(replies);
    for (std::size_t i = 0; i < c.replies_.size(); ++i) {
        const Reply& r = c.replies_[i];
        if (r.id.empty()) throw InvalidArgument("reply at position " + std::to_string(i) + " has an empty id");
        if (r.user_id.empty()) throw InvalidArgument("reply '" + r.id + "' has no user_id (dangling user reference)");
        if (r.source.human && trim(r.text).empty())
            throw InvalidArgument("human reply '" + r.id + "' has empty text");
        if (!c.reply_index_.emplace(r.id, i).second) throw InvalidArgument("duplicate reply id '" + r.id + "'");

        auto [it, inserted] = c.user_index_.try_emplace(r.user_id, c.users_.size());
        if (inserted) c.users_.push_back(UserProfile{r.user_id, r.platform, {}, {}, std::nullopt});
        UserProfile& u = c.users_[it->second];
        (r.split == Split::train ? u.train_reply_ids : u.test_reply_ids).push_back(r.id);
    }
    if (!c.replies_.empty()) {
        c.platform_ = c.replies_.front().platform;
        const bool mixed = std::any_of(c.replies_.begin(), c.replies_.end(),
                                       [&](const Reply& r) { return !(r.platform == c.platform_); });
        if (mixed) c.platform_ = Platform{Platform::Kind::other, "mixed"};
    }
    return c;
}

const Reply* Corpus::find_reply(std::string_view id) const {
    auto it = reply_index_.find(std::string(id));
    return it == reply_index_.end() ? nullptr : &replies_[it->second];
}

const UserProfile* Corpus::find_user(std::string_view user_id) const {
    auto it = user_index_.find(std::string(user_id));
    return it == user_index_.end() ? nullptr : &users_[it->second];
}

std::vector<const Reply*> Corpus::replies_of(std::string_view user_id, Split split) const {
    std::vector<const Reply*> out;
    const UserProfile* u = find_user(user_id);
    if (u == nullptr) return out;
    for (const auto& id : split == Split::train ? u->train_reply_ids : u->test_reply_ids) out.push_back(find_reply(id));
    return out;
}

std::vector<Reply> Corpus::human_train_pool() const {
    std::vector<Reply> pool;
    for (const auto& r : replies_)
        if (r.source.human && r.split == Split::train) pool.push_back(r);
    return pool;
}

Corpus Corpus::with_personas(const std::map<std::string, std::string>& personas) const {
    Corpus copy = *this;
    for (const auto& [user_id, persona] : personas) {
        auto it = copy.user_index_.find(user_id);
        if (it == copy.user_index_.end())
            throw InvalidArgument("persona for unknown user '" + user_id + "' (dangling user reference)");
        copy.users_[it->second].persona = persona;
    }
    return copy;
}

namespace {

std::string required_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

Reply reply_from_json(const json& obj) {
    if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
    Reply r;
    r.id = required_string(obj, "id");
    r.user_id = required_string(obj, "user_id");
    r.platform = Platform::parse(required_string(obj, "platform"));
    r.parent_text = required_string(obj, "parent_text");
    r.text = required_string(obj, "text");
    const std::string split = required_string(obj, "split");
    if (split == "train") {
        r.split = Split::train;
    } else if (split == "test") {
        r.split = Split::test;
    } else {
        throw std::invalid_argument("field \"split\" must be \"train\" or \"test\"");
    }
    auto src = obj.find("source");
    if (src == obj.end()) throw std::invalid_argument("missing field \"source\"");
    if (src->is_string()) {
        if (src->get<std::string>() != "human")
            throw std::invalid_argument("string \"source\" must be \"human\"");
        r.source = Source{};
    } else if (src->is_object()) {
        r.source = Source::generated(required_string(*src, "model"), required_string(*src, "config"));
    } else {
        throw std::invalid_argument("field \"source\" must be \"human\" or {\"model\", \"config\"}");
    }
    if (r.id.empty()) throw std::invalid_argument("field \"id\" is empty");
    if (r.user_id.empty()) throw std::invalid_argument("field \"user_id\" is empty (dangling user reference)");
    if (r.source.human && trim(r.text).empty()) throw std::invalid_argument("human reply has empty text");
    return r;
}

json reply_to_json(const Reply& r) {
    json obj;
    obj["id"] = r.id;
    obj["user_id"] = r.user_id;
    obj["platform"] = r.platform.name;
    obj["parent_text"] = r.parent_text;
    obj["text"] = r.text;
    obj["split"] = std::string(to_string(r.split));
    if (r.source.human) {
        obj["source"] = "human";
    } else {
        obj["source"] = json{{"model", r.source.model_id}, {"config", r.source.config_id}};
    }
    return obj;
}

void warn(std::vector<std::string>* sink, std::string message) {
    spdlog::warn("{}", message);
    if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl, std::string_view source_name, std::vector<std::string>* warnings) {
    std::vector<Reply> replies;
    std::vector<LineIssue> issues;
    std::unordered_map<std::string, std::size_t> seen_ids;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        std::string_view line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;
        try {
            Reply r = reply_from_json(json::parse(line));
            auto [it, inserted] = seen_ids.emplace(r.id, line_no);
            if (!inserted) {
                issues.push_back({line_no, "duplicate id \"" + r.id + "\" (first seen on line " +
                                               std::to_string(it->second) + ")"});
                continue;
            }
            replies.push_back(std::move(r));
        } catch (const json::exception& e) {
            issues.push_back({line_no, std::string("malformed JSON: ") + e.what()});
        } catch (const std::invalid_argument& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    if (!issues.empty()) throw ParseError(std::string(source_name), std::move(issues));
    if (replies.empty()) warn(warnings, std::string(source_name) + ": corpus is empty");
    return Corpus::from_replies(std::move(replies), std::string(source_name));
}

Corpus ingest_corpus(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_corpus(buffer.str(), path.string(), warnings);
}

std::string reply_to_json_line(const Reply& reply) { return reply_to_json(reply).dump(); }

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& r : corpus.replies()) out << reply_to_json_line(r) << '\n';
}

std::map<std::string, std::string> read_personas(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open personas file '" + path.string() + "'");
    std::map<std::string, std::string> out;
    std::vector<LineIssue> issues;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            json obj = json::parse(line);
            out[required_string(obj, "user_id")] = required_string(obj, "persona");
        } catch (const std::exception& e) {
            issues.push_back({line_no, e.what()});
        }
    }
    if (!issues.empty()) throw ParseError(path.string(), std::move(issues));
    return out;
}

void write_personas(const std::map<std::string, std::string>& personas, std::ostream& out) {
    for (const auto& [user, persona] : personas) out << json{{"user_id", user}, {"persona", persona}}.dump() << '\n';
}

std::vector<EvalUserSample> sample_eval_users(const Corpus& corpus, std::size_t min_test_replies,
                                              std::size_t per_user, std::optional<std::size_t> max_users,
                                              std::uint64_t seed) {
    if (per_user < 1 || min_test_replies < per_user)
        throw InvalidArgument("sample_eval_users requires min_test_replies >= per_user >= 1");

    std::vector<const UserProfile*> qualifying;
    for (const auto& u : corpus.users())
        if (u.test_reply_ids.size() >= min_test_replies) qualifying.push_back(&u);
    if (qualifying.empty())
        throw InvalidArgument("no user has at least " + std::to_string(min_test_replies) + " test replies");

    if (max_users && qualifying.size() > *max_users) {
        Rng rng(derive_seed(seed, 0));
        auto picked = rng.sample_indices(qualifying.size(), *max_users);
        std::sort(picked.begin(), picked.end());
        std::vector<const UserProfile*> kept;
        for (auto i : picked) kept.push_back(qualifying[i]);
        qualifying = std::move(kept);
    }

    std::vector<EvalUserSample> out;
    for (const UserProfile* u : qualifying) {
        Rng rng(derive_seed(seed, fnv1a64(u->user_id)));
        EvalUserSample sample{u->user_id, {}};
        for (auto i : rng.sample_indices(u->test_reply_ids.size(), per_user))
            sample.reply_ids.push_back(u->test_reply_ids[i]);
        out.push_back(std::move(sample));
    }
    return out;
}

std::size_t BalancedSet::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [&](const LabeledText& t) { return t.label == label; }));
}

BalancedSet build_balanced_set(std::span<const std::string> ai_texts, std::span<const Reply> human_pool,
                               std::uint64_t seed) {
    if (ai_texts.empty()) throw InvalidArgument("build_balanced_set: no AI texts");
    if (human_pool.size() < ai_texts.size())
        throw InvalidArgument("build_balanced_set: insufficient human pool (" + std::to_string(human_pool.size()) +
                              " < " + std::to_string(ai_texts.size()) + ")");

    Rng rng(seed);
    BalancedSet set;
    set.seed = seed;
    set.items.reserve(2 * ai_texts.size());
    for (std::size_t i = 0; i < ai_texts.size(); ++i)
        set.items.push_back({ai_texts[i], Label::ai, "ai:" + std::to_string(i)});
    for (auto i : rng.sample_indices(human_pool.size(), ai_texts.size()))
        set.items.push_back({human_pool[i].text, Label::human, human_pool[i].id});
    rng.shuffle(set.items);
    return set;
}

std::pair<BalancedSet, BalancedSet> split_train_val(const BalancedSet& set, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw InvalidArgument("split_train_val: val_fraction must lie in (0, 1)");

    Rng rng(seed);
    std::vector<bool> in_val(set.items.size(), false);
    for (Label label : {Label::ai, Label::human}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < set.items.size(); ++i)
            if (set.items[i].label == label) idx.push_back(i);
        const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * val_fraction));
        for (auto k : rng.sample_indices(idx.size(), n_val)) in_val[idx[k]] = true;
    }

    BalancedSet train{{}, set.seed};
    BalancedSet val{{}, set.seed};
    for (std::size_t i = 0; i < set.items.size(); ++i) (in_val[i] ? val : train).items.push_back(set.items[i]);
    if (train.items.empty() || val.items.empty())
        throw InvalidArgument("split_train_val: fraction " + std::to_string(val_fraction) + " leaves an empty " +
                              (train.items.empty() ? "train" : "validation") + " side");
    return {std::move(train), std::move(val)};
}

}  // namespace turingkit::corpus
