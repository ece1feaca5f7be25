// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "turingkit/corpus.hpp"
#include "turingkit/encoder.hpp"
#include "turingkit/ml.hpp"
#include "turingkit/textfeat.hpp"

namespace turingkit::detector {

using corpus::BalancedSet;
using corpus::Label;

inline const std::vector<std::uint64_t> kDefaultSeeds = {17, 42, 1337};
inline constexpr double kDefaultValFraction = 0.2;

/// Logistic head over frozen sentence embeddings.
struct EmbeddingHead {
    std::vector<double> weights;
    double bias = 0.0;
    std::string encoder_name;
    std::size_t epochs = 0;
};

/// Forest over interpretable feature vectors.
struct ForestHead {
    ml::RandomForest forest;
    std::vector<std::string> feature_schema;
    std::uint64_t seed = 0;
};

struct DetectorModel {
    std::variant<EmbeddingHead, ForestHead> kind;
};

struct DetectionResult {
    std::vector<double> per_seed_accuracy;
    double mean_accuracy = 0.0;
    std::vector<std::uint64_t> seeds;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::string detector;  // e.g. "embedding-head[hashed-fallback:dim=256,seed=0]"
};

struct FeatureImportanceReport {
    std::vector<std::pair<std::string, double>> importances;  // schema order; sums to 1
    std::vector<std::string> top_k;                           // descending importance
};

struct TuringTestOptions {
    std::vector<std::uint64_t> seeds = kDefaultSeeds;
    double val_fraction = kDefaultValFraction;
    ml::LogisticOptions head;
    std::size_t jobs = 1;
};

Embedding embed(std::string_view text, const Encoder& encoder);

/// Fits a logistic head on the frozen embeddings of a balanced set.
DetectorModel train_embedding_detector(const BalancedSet& train, const Encoder& encoder, std::uint64_t seed,
                                       const ml::LogisticOptions& options = {}, std::size_t jobs = 1);

/// Per seed: balanced set -> stratified split -> train head -> validation
/// accuracy. Accuracy near 0.5 means the AI texts pass as human.
DetectionResult run_turing_test(std::span<const std::string> ai_texts, std::span<const corpus::Reply> human_pool,
                                const Encoder& encoder, const TuringTestOptions& options = {});

/// Adapter for a separately trained classifier (e.g. a fine-tuned
/// transformer): POST <url>/train_eval with
///   {"seed": int, "val_fraction": real, "items": [{"text": str, "label": "human"|"ai"}]}
/// and expects {"accuracy": real}.
class ExternalDetector {
public:
    explicit ExternalDetector(std::string base_url, double timeout_seconds = 3600.0);
    double train_eval(const BalancedSet& set, double val_fraction, std::uint64_t seed) const;
    const std::string& url() const noexcept { return url_; }

private:
    std::string url_;
    double timeout_seconds_;
};

DetectionResult run_turing_test(std::span<const std::string> ai_texts, std::span<const corpus::Reply> human_pool,
                                const ExternalDetector& external, const TuringTestOptions& options = {});

/// Forest on interpretable features (label ai = positive class). Throws
/// InvalidArgument unless both classes have at least two examples.
std::pair<DetectorModel, FeatureImportanceReport> train_forest_detector(std::span<const textfeat::FeatureVector> features,
                                                                        std::span<const Label> labels,
                                                                        const ml::ForestOptions& options = {},
                                                                        std::uint64_t seed = 0, std::size_t top_k = 10);

/// Probability of label ai: sigmoid of the linear score for embedding heads
/// (the encoder must be the one the head was trained with).
double predict_proba(const DetectorModel& model, std::string_view text, const Encoder& encoder);
/// Probability of label ai for forest models: fraction of trees voting ai.
double predict_proba(const DetectorModel& model, const textfeat::FeatureVector& features);

/// Validation accuracy of a trained embedding head.
double accuracy(const DetectorModel& model, const BalancedSet& val, const Encoder& encoder);

/// CSV: feature,importance (schema order).
void write_importance_csv(std::ostream& out, const FeatureImportanceReport& report);

/// Importances built from a raw vector aligned with the feature schema.
FeatureImportanceReport make_importance_report(std::span<const double> importances, std::size_t top_k);

}  // namespace turingkit::detector
