#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "spamdet/error.hpp"
#include "spamdet/numeric.hpp"

namespace spamdet {

// ---- logistic regression ----

struct LogRegConfig {
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
    std::uint64_t seed = 0;  // reserved; full-batch training needs no draws
};

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
};

/// Mean logistic loss plus (l2/2)||w||^2 (bias unregularized).
inline double logreg_loss(const Matrix& X, const std::vector<int>& y,
                          const std::vector<double>& w, double bias, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double z = dot(X.row(i), w) + bias;
        loss += y[i] == 1 ? log_sigmoid_neg(z) : log_sigmoid_neg(-z);
    }
    loss /= static_cast<double>(std::max<std::size_t>(X.rows, 1));
    double reg = 0.0;
    for (const double wi : w) reg += wi * wi;
    return loss + 0.5 * l2 * reg;
}

inline void logreg_gradient(const Matrix& X, const std::vector<int>& y,
                            const std::vector<double>& w, double bias, double l2,
                            std::vector<double>& grad_w, double& grad_b) {
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(X.rows, 1));
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double err = sigmoid(dot(X.row(i), w) + bias) - static_cast<double>(y[i]);
        const auto row = X.row(i);
        for (std::size_t f = 0; f < w.size(); ++f) grad_w[f] += err * row[f];
        grad_b += err;
    }
    for (std::size_t f = 0; f < w.size(); ++f) grad_w[f] = grad_w[f] * inv_n + l2 * w[f];
    grad_b *= inv_n;
}

/// Full-batch gradient descent from zero weights; deterministic.
inline LogRegModel train_logreg(const Matrix& X, const std::vector<int>& y,
                                const LogRegConfig& cfg = {}) {
    if (X.rows == 0) throw EmptyDataError();
    if (y.size() != X.rows) throw LengthMismatchError();
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*lo == *hi) throw SingleClassError();

    LogRegModel m;
    m.weights.assign(X.cols, 0.0);
    std::vector<double> grad_w;
    double grad_b = 0.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        logreg_gradient(X, y, m.weights, m.bias, cfg.l2, grad_w, grad_b);
        for (std::size_t f = 0; f < m.weights.size(); ++f)
            m.weights[f] -= cfg.learning_rate * grad_w[f];
        m.bias -= cfg.learning_rate * grad_b;
    }
    return m;
}

inline double predict_logreg(const LogRegModel& m, std::span<const double> x) {
    if (x.size() != m.weights.size()) throw DimensionMismatchError(m.weights.size(), x.size());
    return sigmoid(dot(x, m.weights) + m.bias);
}

// ---- Gaussian naive Bayes ----

struct GaussianNBModel {
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;  // floored at 1e-9
};

inline GaussianNBModel train_naive_bayes(const Matrix& X, const std::vector<int>& y) {
    if (X.rows == 0) throw EmptyDataError();
    if (y.size() != X.rows) throw LengthMismatchError();

    std::array<std::size_t, 2> counts{};
    for (const int label : y) ++counts[label];
    if (counts[0] == 0 || counts[1] == 0) throw SingleClassError();

    GaussianNBModel m;
    for (int cls = 0; cls < 2; ++cls) {
        m.log_prior[cls] = std::log(static_cast<double>(counts[cls]) /
                                    static_cast<double>(X.rows));
        m.mean[cls].assign(X.cols, 0.0);
        m.var[cls].assign(X.cols, 0.0);
    }
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto row = X.row(i);
        auto& mu = m.mean[y[i]];
        for (std::size_t f = 0; f < X.cols; ++f) mu[f] += row[f];
    }
    for (int cls = 0; cls < 2; ++cls)
        for (auto& v : m.mean[cls]) v /= static_cast<double>(counts[cls]);
    for (std::size_t i = 0; i < X.rows; ++i) {
        const auto row = X.row(i);
        const auto& mu = m.mean[y[i]];
        auto& var = m.var[y[i]];
        for (std::size_t f = 0; f < X.cols; ++f) {
            const double d = row[f] - mu[f];
            var[f] += d * d;
        }
    }
    for (int cls = 0; cls < 2; ++cls)
        for (auto& v : m.var[cls])
            v = std::max(v / static_cast<double>(counts[cls]), 1e-9);
    return m;
}

/// Normalized posterior; the two entries sum to 1.
inline std::array<double, 2> nb_posterior(const GaussianNBModel& m, std::span<const double> x) {
    if (x.size() != m.mean[0].size()) throw DimensionMismatchError(m.mean[0].size(), x.size());
    std::array<double, 2> log_joint{};
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    for (int cls = 0; cls < 2; ++cls) {
        double lj = m.log_prior[cls];
        for (std::size_t f = 0; f < x.size(); ++f) {
            const double d = x[f] - m.mean[cls][f];
            lj -= 0.5 * (kLog2Pi + std::log(m.var[cls][f]) + d * d / m.var[cls][f]);
        }
        log_joint[cls] = lj;
    }
    const double mx = std::max(log_joint[0], log_joint[1]);
    const double e0 = std::exp(log_joint[0] - mx);
    const double e1 = std::exp(log_joint[1] - mx);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

inline int nb_predict(const GaussianNBModel& m, std::span<const double> x) {
    const auto post = nb_posterior(m, x);
    return post[1] > post[0] ? 1 : 0;
}

}  // namespace spamdet
