// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "turingkit/error.hpp"
#include "turingkit/ml.hpp"
#include "turingkit/rng.hpp"

namespace turingkit::ml {

void Matrix::push_row(std::span<const double> values) {
    if (rows == 0 && cols == 0) cols = values.size();
    if (values.size() != cols) throw InvalidArgument("Matrix::push_row: width mismatch");
    data.insert(data.end(), values.begin(), values.end());
    ++rows;
}

namespace {

double gini(double n, double positives) {
    if (n <= 0.0) return 0.0;
    const double p = positives / n;
    return 2.0 * p * (1.0 - p);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double child_impurity = 0.0;  // n_left * gini_left + n_right * gini_right
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const int> y, const ForestOptions& opt, std::size_t mtry, Rng& rng,
                std::vector<double>& importance)
        : x_(x), y_(y), opt_(opt), mtry_(mtry), rng_(rng), importance_(importance) {}

    RandomForest::Tree build(std::vector<std::size_t> samples) {
        struct Task {
            std::int32_t node;
            std::vector<std::size_t> samples;
            std::size_t depth;
        };
        RandomForest::Tree tree;
        tree.emplace_back();
        std::vector<Task> stack;
        stack.push_back({0, std::move(samples), 0});
        while (!stack.empty()) {
            Task task = std::move(stack.back());
            stack.pop_back();
            const double n = static_cast<double>(task.samples.size());
            double pos = 0.0;
            for (auto i : task.samples) pos += y_[i];
            tree[task.node].positive_fraction = n > 0 ? pos / n : 0.0;

            const bool pure = pos == 0.0 || pos == n;
            const bool too_small = task.samples.size() < 2 * opt_.min_samples_leaf;
            const bool too_deep = opt_.max_depth && task.depth >= *opt_.max_depth;
            if (pure || too_small || too_deep) continue;

            const Split split = best_split(task.samples);
            if (split.feature < 0) continue;

            importance_[static_cast<std::size_t>(split.feature)] += n * gini(n, pos) - split.child_impurity;

            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (auto i : task.samples)
                (x_.row(i)[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);

            const auto left_id = static_cast<std::int32_t>(tree.size());
            tree.emplace_back();
            const auto right_id = static_cast<std::int32_t>(tree.size());
            tree.emplace_back();
            tree[task.node].feature = split.feature;
            tree[task.node].threshold = split.threshold;
            tree[task.node].left = left_id;
            tree[task.node].right = right_id;
            stack.push_back({right_id, std::move(right), task.depth + 1});
            stack.push_back({left_id, std::move(left), task.depth + 1});
        }
        return tree;
    }

private:
    Split best_split(const std::vector<std::size_t>& samples) {
        std::vector<std::size_t> features(x_.cols);
        std::iota(features.begin(), features.end(), std::size_t{0});
        rng_.shuffle(features);

        Split best;
        double best_impurity = std::numeric_limits<double>::infinity();
        std::size_t visited = 0;
        std::vector<std::pair<double, int>> column(samples.size());
        const double n = static_cast<double>(samples.size());
        const std::size_t min_leaf = opt_.min_samples_leaf;

        for (std::size_t f : features) {
            if (visited >= mtry_) break;
            for (std::size_t k = 0; k < samples.size(); ++k) column[k] = {x_.row(samples[k])[f], y_[samples[k]]};
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;
            ++visited;

            double total_pos = 0.0;
            for (const auto& c : column) total_pos += c.second;
            double left_pos = 0.0;
            for (std::size_t k = 0; k + 1 < column.size(); ++k) {
                left_pos += column[k].second;
                if (column[k].first == column[k + 1].first) continue;
                const std::size_t n_left = k + 1;
                const std::size_t n_right = column.size() - n_left;
                if (n_left < min_leaf || n_right < min_leaf) continue;
                const double nl = static_cast<double>(n_left);
                const double nr = n - nl;
                const double impurity = nl * gini(nl, left_pos) + nr * gini(nr, total_pos - left_pos);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best.feature = static_cast<int>(f);
                    best.threshold = column[k].first + (column[k + 1].first - column[k].first) / 2.0;
                    // Guard against midpoint rounding onto the upper value.
                    if (!(best.threshold < column[k + 1].first)) best.threshold = column[k].first;
                    best.child_impurity = impurity;
                }
            }
        }
        return best;
    }

    const Matrix& x_;
    std::span<const int> y_;
    const ForestOptions& opt_;
    std::size_t mtry_;
    Rng& rng_;
    std::vector<double>& importance_;
};

}  // namespace

RandomForest RandomForest::fit(const Matrix& x_in, std::span<const int> labels_in, const ForestOptions& options,
                               std::uint64_t seed) {
    if (x_in.rows != labels_in.size()) throw InvalidArgument("RandomForest::fit: row/label count mismatch");
    if (x_in.rows == 0 || x_in.cols == 0) throw InvalidArgument("RandomForest::fit: empty training data");
    if (options.n_trees == 0) throw InvalidArgument("RandomForest::fit: n_trees must be positive");
    for (int label : labels_in)
        if (label != 0 && label != 1) throw InvalidArgument("RandomForest::fit: labels must be 0 or 1");
    for (double v : x_in.data)
        if (!std::isfinite(v)) throw InvalidArgument("RandomForest::fit: non-finite feature value");

    // Canonical row order.
    std::vector<std::size_t> order(x_in.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = x_in.row(a);
        const auto rb = x_in.row(b);
        if (auto c = std::lexicographical_compare_three_way(ra.begin(), ra.end(), rb.begin(), rb.end()); c != 0)
            return c < 0;
        return labels_in[a] < labels_in[b];
    });
    Matrix x(x_in.rows, x_in.cols);
    std::vector<int> labels(x_in.rows);
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::copy_n(x_in.row(order[i]).begin(), x_in.cols, x.row(i).begin());
        labels[i] = labels_in[order[i]];
    }

    RandomForest forest;
    forest.n_features_ = x.cols;
    forest.options_ = options;
    const std::size_t mtry = std::clamp<std::size_t>(
        options.max_features.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols))))), 1,
        x.cols);

    std::vector<double> total(x.cols, 0.0);
    for (std::size_t t = 0; t < options.n_trees; ++t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> samples(x.rows);
        if (options.bootstrap) {
            for (auto& s : samples) s = rng.uniform_below(x.rows);
        } else {
            std::iota(samples.begin(), samples.end(), std::size_t{0});
        }
        std::vector<double> importance(x.cols, 0.0);
        TreeBuilder builder(x, labels, options, mtry, rng, importance);
        forest.trees_.push_back(builder.build(std::move(samples)));

        const double sum = std::accumulate(importance.begin(), importance.end(), 0.0);
        if (sum > 0.0)
            for (std::size_t f = 0; f < x.cols; ++f) total[f] += importance[f] / sum;
    }
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    if (sum > 0.0)
        for (auto& v : total) v /= sum;
    forest.importances_ = std::move(total);
    return forest;
}

double RandomForest::predict_vote_fraction(std::span<const double> row) const {
    if (row.size() != n_features_)
        throw InvalidArgument("RandomForest: expected " + std::to_string(n_features_) + " features, got " +
                              std::to_string(row.size()));
    double votes = 0.0;
    for (const auto& tree : trees_) {
        std::int32_t node = 0;
        while (tree[node].feature >= 0)
            node = row[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold ? tree[node].left
                                                                                            : tree[node].right;
        const double f = tree[node].positive_fraction;
        votes += f > 0.5 ? 1.0 : f < 0.5 ? 0.0 : 0.5;
    }
    return votes / static_cast<double>(trees_.size());
}

}  // namespace turingkit::ml
