// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace turingkit::ml {

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    void push_row(std::span<const double> values);
};

struct ForestOptions {
    std::size_t n_trees = 100;
    /// Features examined per split; defaults to max(1, floor(sqrt(d))).
    std::optional<std::size_t> max_features;
    std::size_t min_samples_leaf = 1;
    std::optional<std::size_t> max_depth;  // unlimited when unset
    bool bootstrap = true;
};

/// Binary random forest: CART trees with the Gini criterion grown on
/// bootstrap samples.
///
/// Training rows are first put in a canonical order (lexicographic by
/// feature values, then label), so the fitted forest depends on the
/// multiset of examples and the seed, not on their input order. Tree t draws
/// from its own generator seeded with derive_seed(seed, t). At each node the
/// features are visited in a random order, constant ones are skipped, and the
/// search stops after max_features non-constant features; the split with the
/// lowest weighted child impurity wins (first one on ties).
class RandomForest {
public:
    struct Node {
        int feature = -1;  // -1 for leaves
        double threshold = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        double positive_fraction = 0.0;  // class-1 share of the node's (bootstrap) samples
    };
    using Tree = std::vector<Node>;

    static RandomForest fit(const Matrix& x, std::span<const int> labels, const ForestOptions& options,
                            std::uint64_t seed);

    /// Fraction of trees whose leaf majority is class 1 (an even leaf counts half).
    double predict_vote_fraction(std::span<const double> row) const;
    /// Mean-decrease-impurity importances, normalized per tree, averaged and
    /// normalized to sum to 1 (all zeros if no tree ever split).
    const std::vector<double>& feature_importances() const noexcept { return importances_; }

    std::size_t n_features() const noexcept { return n_features_; }
    std::size_t n_trees() const noexcept { return trees_.size(); }
    const std::vector<Tree>& trees() const noexcept { return trees_; }
    const ForestOptions& options() const noexcept { return options_; }

private:
    std::vector<Tree> trees_;
    std::vector<double> importances_;
    std::size_t n_features_ = 0;
    ForestOptions options_;
};

struct LogisticOptions {
    double learning_rate = 0.05;  // Adam step size
    double l2 = 1e-4;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 500;
    double tolerance = 1e-6;  // stop when |dL| / L falls below this between epochs
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t epochs = 0;
    double final_loss = 0.0;

    double predict_proba(std::span<const double> row) const;
};

/// Logistic regression by mini-batch Adam; batch order is shuffled per epoch
/// with a generator seeded by `seed`. Weights start at zero. Throws
/// TrainingError on a non-finite loss, naming the epoch and batch.
LogisticModel train_logistic(const Matrix& x, std::span<const int> labels, std::uint64_t seed,
                             const LogisticOptions& options = {});

double sigmoid(double z);

}  // namespace turingkit::ml
