// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include "turingkit/detector.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "http.hpp"
#include "turingkit/error.hpp"
#include "turingkit/rng.hpp"
#include "turingkit/stats.hpp"
#include "turingkit/text_util.hpp"

namespace turingkit::detector {

namespace {

int as_int(Label label) { return label == Label::ai ? 1 : 0; }

class EmbeddingCache {
public:
    EmbeddingCache(const Encoder& encoder, std::size_t jobs) : encoder_(encoder), jobs_(jobs) {}

    void prefetch(const std::vector<std::string>& texts) {
        std::vector<std::string> missing;
        for (const auto& t : texts)
            if (!cache_.count(t)) {
                cache_.emplace(t, Embedding{});
                missing.push_back(t);
            }
        auto vectors = encoder_.embed_batch(missing, jobs_);
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (vectors[i].size() != encoder_.dimension())
                throw EncoderError("encoder '" + encoder_.name() + "' returned a vector of dimension " +
                                   std::to_string(vectors[i].size()) + ", expected " +
                                   std::to_string(encoder_.dimension()));
            cache_[missing[i]] = std::move(vectors[i]);
        }
    }

    ml::Matrix matrix(const BalancedSet& set) {
        std::vector<std::string> texts;
        for (const auto& item : set.items) texts.push_back(item.text);
        prefetch(texts);
        ml::Matrix x(0, encoder_.dimension());
        x.data.reserve(set.items.size() * encoder_.dimension());
        for (const auto& item : set.items) x.push_row(cache_.at(item.text));
        return x;
    }

private:
    const Encoder& encoder_;
    std::size_t jobs_;
    std::unordered_map<std::string, Embedding> cache_;
};

std::vector<int> labels_of(const BalancedSet& set) {
    std::vector<int> y;
    y.reserve(set.items.size());
    for (const auto& item : set.items) y.push_back(as_int(item.label));
    return y;
}

double head_accuracy(const ml::LogisticModel& head, const ml::Matrix& x, std::span<const int> y) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const int predicted = head.predict_proba(x.row(i)) >= 0.5 ? 1 : 0;
        if (predicted == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(x.rows);
}

void check_trainable(const BalancedSet& train) {
    if (train.items.empty()) throw InvalidArgument("detector training set is empty");
    if (train.count(Label::ai) != train.count(Label::human))
        throw InvalidArgument("detector training set is not balanced");
}

DetectionResult finish(DetectionResult r) {
    r.mean_accuracy = stats::mean(r.per_seed_accuracy);
    return r;
}

}  // namespace

Embedding embed(std::string_view text, const Encoder& encoder) {
    Embedding e = encoder.embed(text);
    if (e.size() != encoder.dimension())
        throw EncoderError("dimension mismatch: got " + std::to_string(e.size()) + ", expected " +
                           std::to_string(encoder.dimension()));
    return e;
}

DetectorModel train_embedding_detector(const BalancedSet& train, const Encoder& encoder, std::uint64_t seed,
                                       const ml::LogisticOptions& options, std::size_t jobs) {
    check_trainable(train);
    EmbeddingCache cache(encoder, jobs);
    const auto x = cache.matrix(train);
    const auto y = labels_of(train);
    auto head = ml::train_logistic(x, y, seed, options);
    return DetectorModel{EmbeddingHead{std::move(head.weights), head.bias, encoder.name(), head.epochs}};
}

DetectionResult run_turing_test(std::span<const std::string> ai_texts, std::span<const corpus::Reply> human_pool,
                                const Encoder& encoder, const TuringTestOptions& options) {
    if (options.seeds.empty()) throw InvalidArgument("run_turing_test: no seeds");
    EmbeddingCache cache(encoder, options.jobs);
    DetectionResult result;
    result.detector = "embedding-head[" + encoder.name() + "]";
    result.seeds = options.seeds;
    for (std::uint64_t seed : options.seeds) {
        const auto set = corpus::build_balanced_set(ai_texts, human_pool, seed);
        const auto [train, val] = corpus::split_train_val(set, options.val_fraction, derive_seed(seed, 1));
        const auto x_train = cache.matrix(train);
        const auto y_train = labels_of(train);
        const auto head = ml::train_logistic(x_train, y_train, derive_seed(seed, 2), options.head);
        const auto x_val = cache.matrix(val);
        const auto y_val = labels_of(val);
        const double acc = head_accuracy(head, x_val, y_val);
        spdlog::debug("detector seed={} epochs={} loss={:.6f} val_accuracy={:.4f}", seed, head.epochs,
                      head.final_loss, acc);
        result.per_seed_accuracy.push_back(acc);
        result.n_train = train.items.size();
        result.n_val = val.items.size();
    }
    return finish(std::move(result));
}

ExternalDetector::ExternalDetector(std::string base_url, double timeout_seconds)
    : url_(http::join_url(base_url, "/train_eval")), timeout_seconds_(timeout_seconds) {}

double ExternalDetector::train_eval(const BalancedSet& set, double val_fraction, std::uint64_t seed) const {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : set.items)
        items.push_back({{"text", item.text}, {"label", std::string(corpus::to_string(item.label))}});
    nlohmann::json body{{"seed", seed}, {"val_fraction", val_fraction}, {"items", std::move(items)}};
    nlohmann::json reply;
    try {
        reply = http::post_json(url_, body, timeout_seconds_);
    } catch (const Error& e) {
        throw EndpointError(std::string("external detector failed: ") + e.what());
    }
    auto it = reply.find("accuracy");
    if (it == reply.end() || !it->is_number()) throw EndpointError("external detector reply lacks numeric 'accuracy'");
    const double acc = it->get<double>();
    if (!(acc >= 0.0 && acc <= 1.0)) throw EndpointError("external detector accuracy outside [0, 1]");
    return acc;
}

DetectionResult run_turing_test(std::span<const std::string> ai_texts, std::span<const corpus::Reply> human_pool,
                                const ExternalDetector& external, const TuringTestOptions& options) {
    if (options.seeds.empty()) throw InvalidArgument("run_turing_test: no seeds");
    DetectionResult result;
    result.detector = "external[" + external.url() + "]";
    result.seeds = options.seeds;
    for (std::uint64_t seed : options.seeds) {
        const auto set = corpus::build_balanced_set(ai_texts, human_pool, seed);
        result.per_seed_accuracy.push_back(external.train_eval(set, options.val_fraction, seed));
        const auto n_val = 2 * static_cast<std::size_t>(std::llround(static_cast<double>(ai_texts.size()) * options.val_fraction));
        result.n_val = n_val;
        result.n_train = set.items.size() - n_val;
    }
    return finish(std::move(result));
}

FeatureImportanceReport make_importance_report(std::span<const double> importances, std::size_t top_k) {
    const auto& names = textfeat::FeatureVector::names();
    if (importances.size() != names.size()) throw InvalidArgument("importance vector does not match feature schema");
    FeatureImportanceReport report;
    for (std::size_t i = 0; i < names.size(); ++i) report.importances.emplace_back(std::string(names[i]), importances[i]);
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return importances[a] > importances[b]; });
    for (std::size_t i = 0; i < std::min(top_k, order.size()); ++i) report.top_k.emplace_back(std::string(names[order[i]]));
    return report;
}

std::pair<DetectorModel, FeatureImportanceReport> train_forest_detector(std::span<const textfeat::FeatureVector> features,
                                                                        std::span<const Label> labels,
                                                                        const ml::ForestOptions& options,
                                                                        std::uint64_t seed, std::size_t top_k) {
    if (features.size() != labels.size()) throw InvalidArgument("train_forest_detector: features/labels mismatch");
    const auto n_ai = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::ai));
    const std::size_t n_human = labels.size() - n_ai;
    if (n_ai == 0 || n_human == 0) throw InvalidArgument("train_forest_detector: single-class input");
    if (n_ai < 2 || n_human < 2) throw InvalidArgument("train_forest_detector: need at least two examples per class");

    ml::Matrix x(0, textfeat::FeatureVector::kSize);
    std::vector<int> y;
    for (std::size_t i = 0; i < features.size(); ++i) {
        x.push_row(features[i].to_array());
        y.push_back(as_int(labels[i]));
    }
    auto forest = ml::RandomForest::fit(x, y, options, seed);
    auto report = make_importance_report(forest.feature_importances(), top_k);
    std::vector<std::string> schema;
    for (auto n : textfeat::FeatureVector::names()) schema.emplace_back(n);
    return {DetectorModel{ForestHead{std::move(forest), std::move(schema), seed}}, std::move(report)};
}

double predict_proba(const DetectorModel& model, std::string_view text, const Encoder& encoder) {
    const auto* head = std::get_if<EmbeddingHead>(&model.kind);
    if (head == nullptr) throw InvalidArgument("predict_proba: text input requires an embedding-head model");
    if (head->weights.size() != encoder.dimension())
        throw InvalidArgument("predict_proba: encoder dimension does not match the head");
    const auto e = embed(text, encoder);
    return ml::sigmoid(std::inner_product(e.begin(), e.end(), head->weights.begin(), head->bias));
}

double predict_proba(const DetectorModel& model, const textfeat::FeatureVector& features) {
    const auto* forest = std::get_if<ForestHead>(&model.kind);
    if (forest == nullptr) throw InvalidArgument("predict_proba: feature input requires a forest model");
    const auto row = features.to_array();
    return forest->forest.predict_vote_fraction(row);
}

double accuracy(const DetectorModel& model, const BalancedSet& val, const Encoder& encoder) {
    if (val.items.empty()) throw InvalidArgument("accuracy: empty validation set");
    std::size_t correct = 0;
    for (const auto& item : val.items) {
        const Label predicted = predict_proba(model, item.text, encoder) >= 0.5 ? Label::ai : Label::human;
        if (predicted == item.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(val.items.size());
}

void write_importance_csv(std::ostream& out, const FeatureImportanceReport& report) {
    out << "feature,importance\n";
    for (const auto& [name, value] : report.importances) out << name << ',' << format_sig6(value) << '\n';
}

}  // namespace turingkit::detector
