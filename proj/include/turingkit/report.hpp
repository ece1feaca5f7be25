// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "turingkit/detector.hpp"
#include "turingkit/selector.hpp"
#include "turingkit/semsim.hpp"
#include "turingkit/topics.hpp"

namespace turingkit::report {

/// Flat "key = value" configuration. Keys are dotted paths
/// ("endpoint.temperature"); '#' starts a comment line; values may be
/// double-quoted. Duplicate keys and lines without '=' are errors.
class Config {
public:
    static Config parse(std::string_view text, std::string_view source_name = "<memory>");
    static Config load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    void set(std::string key, std::string value);

    std::string get_string(std::string_view key, std::string_view fallback) const;
    std::string require_string(std::string_view key) const;
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    double get_double(std::string_view key, double fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;
    /// Comma-separated list; empty items are dropped.
    std::vector<std::string> get_list(std::string_view key, const std::vector<std::string>& fallback) const;
    std::vector<std::uint64_t> get_u64_list(std::string_view key, const std::vector<std::uint64_t>& fallback) const;

    /// Keys never read by any getter, for typo warnings.
    std::vector<std::string> unused_keys() const;
    const std::string& source() const noexcept { return source_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
    mutable std::map<std::string, bool, std::less<>> used_;
    std::string source_;

    const std::string* find(std::string_view key) const;
    [[noreturn]] void type_error(std::string_view key, std::string_view expected, std::string_view value) const;
};

struct RunManifest {
    std::string run_id;
    std::string created_at;  // ISO-8601 UTC
    std::string corpus_hash;
    std::string dataset;
    std::map<std::string, std::string> lexicon_versions;
    std::string encoder;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> config_kinds;
    std::map<std::string, std::string> template_hashes;
    std::map<std::string, std::string> parameters;  // forest settings, fold count, toxicity scorer, ...

    bool operator==(const RunManifest&) const = default;
};

/// Cell of a report: one (model, prompt configuration, dataset) combination.
struct CellKey {
    std::string model;
    std::string config;
    std::string dataset;

    auto operator<=>(const CellKey&) const = default;
    bool operator==(const CellKey&) const = default;
    /// File-name stem: "<model>__<config>" with unsafe characters replaced.
    std::string stem() const;
};

struct Missing {
    std::string reason;
    bool operator==(const Missing&) const = default;
};

template <typename T>
using Slot = std::variant<Missing, T>;

struct SelectionSummary {
    std::size_t n_sets = 0;
    std::size_t n_candidates = 0;       // per set, when uniform; 0 otherwise
    double overlap = 0.0;               // cosine-optimal vs ML-optimal
    double chance_overlap = 0.0;        // 1 / n_candidates
    std::vector<std::size_t> cosine_chosen;
    std::vector<std::size_t> ml_chosen;
    /// Detection and similarity of the selected replies, keyed by strategy
    /// ("random", "cosine_optimal", "ml_optimal").
    std::map<std::string, detector::DetectionResult> detection_by_strategy;
    std::map<std::string, semsim::SimilarityDistribution> similarity_by_strategy;
};

/// Builds a summary from aligned cosine and ML outcomes.
SelectionSummary summarize_selection(std::span<const selector::SelectionOutcome> cosine,
                                     std::span<const selector::SelectionOutcome> ml);

struct StepDelta {
    std::string model;
    std::string dataset;
    std::string from;
    std::string to;
    double delta = 0.0;  // mean accuracy(to) - mean accuracy(from); negative = less detectable
};

struct ReportBundle {
    RunManifest manifest;
    std::vector<CellKey> cells;
    std::map<CellKey, Slot<detector::DetectionResult>> detection;
    std::map<CellKey, Slot<semsim::SimilarityDistribution>> similarity;
    std::map<CellKey, Slot<detector::FeatureImportanceReport>> importances;
    std::map<CellKey, Slot<topics::DivergenceReport>> divergence;
    std::map<CellKey, Slot<SelectionSummary>> selection;
    std::vector<StepDelta> deltas;

    std::size_t missing_count() const;
};

/// Accuracy change for every adjacent pair of the configuration ladder
/// BL -> PE -> PE+SE -> PE+SE+CR present for the same (model, dataset).
/// Throws InvalidArgument when no (model, dataset) has an adjacent pair.
std::vector<StepDelta> emit_stepwise_deltas(const std::map<CellKey, double>& mean_accuracy);

/// Recomputes every derived number from the raw values held in the bundle
/// (per-seed accuracies, similarity scores, raw p-values, importances,
/// chosen indices) and returns a description of each mismatch.
std::vector<std::string> verify_bundle(const ReportBundle& bundle, double tolerance = 1e-6);

/// Canonical JSON of the bundle: sorted keys, every real rounded to six
/// significant digits, missing cells as {"missing": reason}.
std::string bundle_to_json(const ReportBundle& bundle);

/// Writes bundle.json plus plot-ready CSVs (detection, stepwise deltas,
/// similarity box plots, importance heatmap, divergence counts, selection).
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

// Raw artifact JSON, full precision. Used between CLI stages.
std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);
std::string detection_to_json(const detector::DetectionResult& result);
detector::DetectionResult detection_from_json(std::string_view text);
std::string similarity_to_json(const semsim::SimilarityDistribution& dist, const std::vector<std::string>& pair_ids);
semsim::SimilarityDistribution similarity_from_json(std::string_view text);
std::string importances_to_json(const detector::FeatureImportanceReport& report);
detector::FeatureImportanceReport importances_from_json(std::string_view text);
std::string divergence_to_json(const topics::DivergenceReport& report);
topics::DivergenceReport divergence_from_json(std::string_view text);
std::string selection_to_json(const SelectionSummary& summary);
SelectionSummary selection_from_json(std::string_view text);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace turingkit::report
