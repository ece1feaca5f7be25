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
#include <vector>

#include "turingkit/corpus.hpp"
#include "turingkit/encoder.hpp"
#include "turingkit/lexicon.hpp"
#include "turingkit/ml.hpp"
#include "turingkit/textfeat.hpp"

namespace turingkit::selector {

/// N sampled replies to one test message.
struct CandidateSet {
    std::string reply_id;  // the human reference reply
    std::string user_id;
    std::string model_id;
    std::string config_id;
    std::vector<std::string> candidates;

    bool operator==(const CandidateSet&) const = default;
};

enum class Strategy { cosine_optimal, ml_optimal, random };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);

struct SelectionOutcome {
    std::string reply_id;
    Strategy strategy = Strategy::cosine_optimal;
    std::size_t chosen_index = 0;
    std::vector<double> per_candidate_scores;

    bool operator==(const SelectionOutcome&) const = default;
};

/// Index of the largest score; the lowest index wins ties.
std::size_t argmax_first(std::span<const double> scores);

/// Scores each candidate by cosine similarity to the reference reply.
SelectionOutcome select_cosine_optimal(const CandidateSet& set, std::string_view reference_text,
                                       const Encoder& encoder);

/// Uniform pick, for baselines. Scores are left empty.
SelectionOutcome select_random(const CandidateSet& set, std::uint64_t seed);

inline constexpr std::size_t kDefaultFolds = 5;

struct MlSelectionOptions {
    std::size_t n_folds = kDefaultFolds;
    ml::ForestOptions forest;  // 100 trees by default
    std::size_t jobs = 1;
    /// Toxicity scorer for the feature vectors; the lexicon fallback when null.
    const textfeat::ToxicityScorer* toxicity = nullptr;
};

/// Which users each fold's forest was scored on and trained on.
struct FoldAudit {
    std::map<std::string, std::size_t> fold_of_user;
    std::vector<std::vector<std::string>> training_users;  // per fold, sorted
    std::vector<std::size_t> training_ai_examples;         // per fold
    std::size_t human_examples = 0;
    /// Sets whose scoring forest saw a candidate of the same user. Zero by construction.
    std::size_t leaks = 0;
};

struct MlSelection {
    std::vector<SelectionOutcome> outcomes;  // aligned with the input sets
    FoldAudit audit;
    std::vector<std::string> feature_schema;
};

/// Users sorted by a seeded hash of their id, then dealt round-robin into
/// n_folds folds. Throws InvalidArgument when a fold would be empty.
std::map<std::string, std::size_t> assign_folds(std::span<const std::string> user_ids, std::size_t n_folds,
                                                std::uint64_t seed);

/// Leave-users-out scoring. For each fold a forest is fitted on the feature
/// vectors of every candidate from the other folds (label ai) and of every
/// human training reply (label human), then applied to the fold's sets.
/// A candidate's score is its probability of the human label; the highest
/// score is chosen.
MlSelection select_ml_optimal(std::span<const CandidateSet> sets, std::span<const corpus::Reply> human_train,
                              std::uint64_t seed, const LexiconSet& lexica,
                              const MlSelectionOptions& options = {});

/// Fraction of reply ids where both strategies chose the same index. Throws
/// InvalidArgument unless both lists cover the same reply ids exactly once.
double overlap_rate(std::span<const SelectionOutcome> a, std::span<const SelectionOutcome> b);

/// Checks that each set is non-empty and its reply_id and user_id match the corpus.
void validate_candidate_sets(std::span<const CandidateSet> sets, const corpus::Corpus& corpus);

/// JSONL {"reply_id", "user_id", "model", "config", "candidates": [str]}.
std::string candidate_set_to_json_line(const CandidateSet& set);
std::vector<CandidateSet> parse_candidate_sets(std::string_view jsonl, std::string_view source_name = "<memory>");
std::vector<CandidateSet> read_candidate_sets(const std::filesystem::path& path);
void write_candidate_sets(std::ostream& out, std::span<const CandidateSet> sets);

/// JSONL {"reply_id", "strategy", "chosen_index", "scores"[, "feature_schema"]}.
void write_outcomes(std::ostream& out, std::span<const SelectionOutcome> outcomes,
                    const std::vector<std::string>* feature_schema = nullptr);
std::vector<SelectionOutcome> parse_outcomes(std::string_view jsonl, std::string_view source_name = "<memory>");
std::vector<SelectionOutcome> read_outcomes(const std::filesystem::path& path);

}  // namespace turingkit::selector
