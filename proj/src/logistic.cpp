// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 turingkit Contributors

#include <cmath>
#include <numeric>

#include "turingkit/error.hpp"
#include "turingkit/ml.hpp"
#include "turingkit/rng.hpp"

namespace turingkit::ml {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double LogisticModel::predict_proba(std::span<const double> row) const {
    if (row.size() != weights.size())
        throw InvalidArgument("LogisticModel: expected " + std::to_string(weights.size()) + " inputs, got " +
                              std::to_string(row.size()));
    return sigmoid(std::inner_product(row.begin(), row.end(), weights.begin(), bias));
}

namespace {

// Numerically stable binary cross-entropy from the logit.
double log_loss(double logit, int label) {
    const double z = label ? -logit : logit;  // loss = log(1 + exp(z))
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

LogisticModel train_logistic(const Matrix& x, std::span<const int> labels, std::uint64_t seed,
                             const LogisticOptions& opt) {
    if (x.rows != labels.size()) throw InvalidArgument("train_logistic: row/label count mismatch");
    if (x.rows == 0) throw InvalidArgument("train_logistic: empty training data");
    const std::size_t d = x.cols;
    const std::size_t batch = std::max<std::size_t>(1, opt.batch_size);

    LogisticModel model;
    model.weights.assign(d, 0.0);
    std::vector<double> m(d + 1, 0.0);
    std::vector<double> v(d + 1, 0.0);
    std::vector<double> grad(d + 1, 0.0);
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    double beta1_t = 1.0;
    double beta2_t = 1.0;

    auto full_loss = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const auto row = x.row(i);
            loss += log_loss(std::inner_product(row.begin(), row.end(), model.weights.begin(), model.bias), labels[i]);
        }
        double reg = 0.0;
        for (double w : model.weights) reg += w * w;
        return loss / static_cast<double>(x.rows) + 0.5 * opt.l2 * reg;
    };

    Rng rng(seed);
    std::vector<std::size_t> order(x.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    double previous = full_loss();

    for (std::size_t epoch = 1; epoch <= opt.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0, b = 0; start < x.rows; start += batch, ++b) {
            const std::size_t end = std::min(x.rows, start + batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const auto row = x.row(order[k]);
                const double logit = std::inner_product(row.begin(), row.end(), model.weights.begin(), model.bias);
                batch_loss += log_loss(logit, labels[order[k]]);
                const double err = sigmoid(logit) - labels[order[k]];
                for (std::size_t j = 0; j < d; ++j) grad[j] += err * row[j];
                grad[d] += err;
            }
            if (!std::isfinite(batch_loss))
                throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " + std::to_string(b));
            const double scale = 1.0 / static_cast<double>(end - start);
            beta1_t *= kBeta1;
            beta2_t *= kBeta2;
            for (std::size_t j = 0; j <= d; ++j) {
                double g = grad[j] * scale;
                if (j < d) g += opt.l2 * model.weights[j];
                m[j] = kBeta1 * m[j] + (1 - kBeta1) * g;
                v[j] = kBeta2 * v[j] + (1 - kBeta2) * g * g;
                const double step = opt.learning_rate * (m[j] / (1 - beta1_t)) / (std::sqrt(v[j] / (1 - beta2_t)) + kEps);
                (j < d ? model.weights[j] : model.bias) -= step;
            }
        }
        const double loss = full_loss();
        if (!std::isfinite(loss)) throw TrainingError("non-finite loss after epoch " + std::to_string(epoch));
        model.epochs = epoch;
        model.final_loss = loss;
        if (std::fabs(previous - loss) <= opt.tolerance * std::max(loss, 1e-12)) break;
        previous = loss;
    }
    return model;
}

}  // namespace turingkit::ml
