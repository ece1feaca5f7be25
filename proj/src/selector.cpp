// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/selector.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "jsonl.hpp"
#include "turingkit/error.hpp"
#include "turingkit/parallel.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/semsim.hpp"

namespace turingkit::selector {

using nlohmann::json;

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::cosine_optimal: return "cosine_optimal";
        case Strategy::ml_optimal: return "ml_optimal";
        case Strategy::random: return "random";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view text) {
    if (text == "cosine_optimal") return Strategy::cosine_optimal;
    if (text == "ml_optimal") return Strategy::ml_optimal;
    if (text == "random") return Strategy::random;
    throw InvalidArgument("unknown selection strategy '" + std::string(text) + "'");
}

std::size_t argmax_first(std::span<const double> scores) {
    if (scores.empty()) throw InvalidArgument("argmax of an empty score list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

SelectionOutcome select_cosine_optimal(const CandidateSet& set, std::string_view reference_text,
                                       const Encoder& encoder) {
    if (set.candidates.empty()) throw InvalidArgument("candidate set for '" + set.reply_id + "' is empty");
    if (trim(reference_text).empty())
        throw InvalidArgument("reference text for '" + set.reply_id + "' is empty");
    const Embedding reference = encoder.embed(reference_text);
    const auto vectors = encoder.embed_batch(set.candidates);
    SelectionOutcome out{set.reply_id, Strategy::cosine_optimal, 0, {}};
    out.per_candidate_scores.reserve(vectors.size());
    for (const auto& v : vectors) out.per_candidate_scores.push_back(semsim::cosine(v, reference));
    out.chosen_index = argmax_first(out.per_candidate_scores);
    return out;
}

SelectionOutcome select_random(const CandidateSet& set, std::uint64_t seed) {
    if (set.candidates.empty()) throw InvalidArgument("candidate set for '" + set.reply_id + "' is empty");
    Rng rng(derive_seed(seed, fnv1a64(set.reply_id)));
    return SelectionOutcome{set.reply_id, Strategy::random, static_cast<std::size_t>(rng.uniform_below(set.candidates.size())),
                            {}};
}

std::map<std::string, std::size_t> assign_folds(std::span<const std::string> user_ids, std::size_t n_folds,
                                                std::uint64_t seed) {
    if (n_folds < 2) throw InvalidArgument("n_folds must be at least 2");
    std::vector<std::string> users(user_ids.begin(), user_ids.end());
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    if (users.size() < n_folds)
        throw InvalidArgument("fold with zero users: " + std::to_string(users.size()) + " distinct users for " +
                              std::to_string(n_folds) + " folds");
    std::vector<std::pair<std::uint64_t, std::string>> keyed;
    keyed.reserve(users.size());
    for (auto& u : users) keyed.emplace_back(mix64(fnv1a64(u, derive_seed(seed, 0xF01D))), std::move(u));
    std::sort(keyed.begin(), keyed.end());
    std::map<std::string, std::size_t> folds;
    for (std::size_t i = 0; i < keyed.size(); ++i) folds[keyed[i].second] = i % n_folds;
    return folds;
}

MlSelection select_ml_optimal(std::span<const CandidateSet> sets, std::span<const corpus::Reply> human_train,
                              std::uint64_t seed, const LexiconSet& lexica, const MlSelectionOptions& options) {
    if (sets.empty()) throw InvalidArgument("select_ml_optimal: no candidate sets");
    for (const auto& s : sets)
        if (s.candidates.empty()) throw InvalidArgument("candidate set for '" + s.reply_id + "' is empty");
    if (human_train.size() < 2) throw InvalidArgument("select_ml_optimal: need at least two human training replies");

    std::vector<std::string> user_ids;
    for (const auto& s : sets) user_ids.push_back(s.user_id);
    MlSelection result;
    result.audit.fold_of_user = assign_folds(user_ids, options.n_folds, seed);
    for (auto name : textfeat::FeatureVector::names()) result.feature_schema.emplace_back(name);

    // Feature vectors of every distinct text, computed once.
    std::vector<std::string> texts;
    std::unordered_map<std::string, std::size_t> text_index;
    auto intern = [&](const std::string& t) {
        auto [it, inserted] = text_index.emplace(t, texts.size());
        if (inserted) texts.push_back(t);
        return it->second;
    };
    std::vector<std::vector<std::size_t>> candidate_ids(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (const auto& c : sets[s].candidates) candidate_ids[s].push_back(intern(c));
    std::vector<std::size_t> human_ids;
    for (const auto& r : human_train) human_ids.push_back(intern(r.text));

    std::vector<std::array<double, textfeat::FeatureVector::kSize>> features(texts.size());
    parallel_for(texts.size(), options.jobs, [&](std::size_t i) {
        const auto fv = options.toxicity ? textfeat::extract_features(texts[i], lexica, *options.toxicity)
                                         : textfeat::extract_features(texts[i], lexica);
        features[i] = fv.to_array();
    });

    std::vector<std::size_t> fold_of_set(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) fold_of_set[s] = result.audit.fold_of_user.at(sets[s].user_id);

    const std::size_t n_folds = options.n_folds;
    result.audit.training_users.assign(n_folds, {});
    result.audit.training_ai_examples.assign(n_folds, 0);
    result.audit.human_examples = human_ids.size();
    result.outcomes.resize(sets.size());

    parallel_for(n_folds, options.jobs, [&](std::size_t fold) {
        ml::Matrix x(0, textfeat::FeatureVector::kSize);
        std::vector<int> y;
        std::set<std::string> trained_on;
        for (std::size_t s = 0; s < sets.size(); ++s) {
            if (fold_of_set[s] == fold) continue;
            trained_on.insert(sets[s].user_id);
            for (std::size_t id : candidate_ids[s]) {
                x.push_row(features[id]);
                y.push_back(1);
            }
        }
        const std::size_t n_ai = y.size();
        for (std::size_t id : human_ids) {
            x.push_row(features[id]);
            y.push_back(0);
        }
        if (n_ai < 2)
            throw InvalidArgument("fold " + std::to_string(fold) + ": single-class training data (no AI candidates outside the fold)");
        const auto forest = ml::RandomForest::fit(x, y, options.forest, derive_seed(seed, fold));
        spdlog::debug("ml-optimal fold {}: trained on {} ai / {} human examples", fold, n_ai, human_ids.size());

        for (std::size_t s = 0; s < sets.size(); ++s) {
            if (fold_of_set[s] != fold) continue;
            SelectionOutcome out{sets[s].reply_id, Strategy::ml_optimal, 0, {}};
            for (std::size_t id : candidate_ids[s])
                out.per_candidate_scores.push_back(1.0 - forest.predict_vote_fraction(features[id]));
            out.chosen_index = argmax_first(out.per_candidate_scores);
            result.outcomes[s] = std::move(out);
        }
        result.audit.training_users[fold].assign(trained_on.begin(), trained_on.end());
        result.audit.training_ai_examples[fold] = n_ai;
    });

    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& trained = result.audit.training_users[fold_of_set[s]];
        if (std::binary_search(trained.begin(), trained.end(), sets[s].user_id)) ++result.audit.leaks;
    }
    return result;
}

double overlap_rate(std::span<const SelectionOutcome> a, std::span<const SelectionOutcome> b) {
    if (a.empty()) throw InvalidArgument("overlap_rate: no outcomes");
    if (a.size() != b.size()) throw InvalidArgument("overlap_rate: outcome lists differ in length");
    std::unordered_map<std::string, std::size_t> chosen_b;
    for (const auto& o : b)
        if (!chosen_b.emplace(o.reply_id, o.chosen_index).second)
            throw InvalidArgument("overlap_rate: duplicate reply id '" + o.reply_id + "'");
    std::set<std::string> seen;
    std::size_t same = 0;
    for (const auto& o : a) {
        if (!seen.insert(o.reply_id).second) throw InvalidArgument("overlap_rate: duplicate reply id '" + o.reply_id + "'");
        auto it = chosen_b.find(o.reply_id);
        if (it == chosen_b.end()) throw InvalidArgument("overlap_rate: reply id '" + o.reply_id + "' missing from the second list");
        if (it->second == o.chosen_index) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(a.size());
}

void validate_candidate_sets(std::span<const CandidateSet> sets, const corpus::Corpus& corpus) {
    for (const auto& s : sets) {
        if (s.candidates.empty()) throw InvalidArgument("candidate set for '" + s.reply_id + "' is empty");
        const auto* reply = corpus.find_reply(s.reply_id);
        if (reply == nullptr) throw InvalidArgument("candidate set references unknown reply '" + s.reply_id + "'");
        if (reply->user_id != s.user_id)
            throw InvalidArgument("candidate set '" + s.reply_id + "' names user '" + s.user_id + "' but the reply belongs to '" +
                                  reply->user_id + "'");
    }
}

std::string candidate_set_to_json_line(const CandidateSet& set) {
    return json{{"reply_id", set.reply_id},
                {"user_id", set.user_id},
                {"model", set.model_id},
                {"config", set.config_id},
                {"candidates", set.candidates}}
        .dump();
}

std::vector<CandidateSet> parse_candidate_sets(std::string_view text, std::string_view source_name) {
    std::vector<CandidateSet> sets;
    jsonl::for_each_object(text, source_name, [&](const json& obj) {
        CandidateSet s;
        s.reply_id = jsonl::required_string(obj, "reply_id");
        s.user_id = jsonl::required_string(obj, "user_id");
        s.model_id = jsonl::required_string(obj, "model");
        s.config_id = jsonl::required_string(obj, "config");
        auto it = obj.find("candidates");
        if (it == obj.end() || !it->is_array()) throw std::invalid_argument("field \"candidates\" must be an array");
        for (const auto& c : *it) {
            if (!c.is_string()) throw std::invalid_argument("candidates must be strings");
            s.candidates.push_back(c.get<std::string>());
        }
        if (s.candidates.empty()) throw std::invalid_argument("candidate set '" + s.reply_id + "' is empty");
        sets.push_back(std::move(s));
    });
    return sets;
}

std::vector<CandidateSet> read_candidate_sets(const std::filesystem::path& path) {
    return parse_candidate_sets(jsonl::read_file(path, "candidate file"), path.string());
}

void write_candidate_sets(std::ostream& out, std::span<const CandidateSet> sets) {
    for (const auto& s : sets) out << candidate_set_to_json_line(s) << '\n';
}

void write_outcomes(std::ostream& out, std::span<const SelectionOutcome> outcomes,
                    const std::vector<std::string>* feature_schema) {
    for (const auto& o : outcomes) {
        json obj{{"reply_id", o.reply_id},
                 {"strategy", std::string(to_string(o.strategy))},
                 {"chosen_index", o.chosen_index},
                 {"scores", o.per_candidate_scores}};
        if (feature_schema != nullptr) obj["feature_schema"] = *feature_schema;
        out << obj.dump() << '\n';
    }
}

std::vector<SelectionOutcome> parse_outcomes(std::string_view text, std::string_view source_name) {
    std::vector<SelectionOutcome> outcomes;
    jsonl::for_each_object(text, source_name, [&](const json& obj) {
        SelectionOutcome o;
        o.reply_id = jsonl::required_string(obj, "reply_id");
        o.strategy = parse_strategy(jsonl::required_string(obj, "strategy"));
        o.chosen_index = obj.at("chosen_index").get<std::size_t>();
        o.per_candidate_scores = obj.at("scores").get<std::vector<double>>();
        if (!o.per_candidate_scores.empty() && o.chosen_index >= o.per_candidate_scores.size())
            throw std::invalid_argument("chosen_index out of range");
        outcomes.push_back(std::move(o));
    });
    return outcomes;
}

std::vector<SelectionOutcome> read_outcomes(const std::filesystem::path& path) {
    return parse_outcomes(jsonl::read_file(path, "outcomes file"), path.string());
}

}  // namespace turingkit::selector
