#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spamdet/error.hpp"
#include "spamdet/numeric.hpp"

namespace spamdet {

struct TrainConfig {
    double learning_rate = 0.1;
    int max_depth = 6;  // paper mode uses 15
    int num_rounds = 200;
    double lambda_l2 = 1.0;
    double min_child_cover = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(learning_rate > 0.0) || learning_rate > 1.0)
            throw ConfigInvalidError("gbdt: learning_rate must be in (0, 1]");
        if (max_depth < 1) throw ConfigInvalidError("gbdt: max_depth must be >= 1");
        if (num_rounds < 0) throw ConfigInvalidError("gbdt: num_rounds must be >= 0");
        if (lambda_l2 < 0.0) throw ConfigInvalidError("gbdt: lambda_l2 must be >= 0");
    }
};

/// Regression-tree node. Internal nodes route x[feature] < threshold to the
/// left child; leaves carry the unshrunk Newton weight. Cover is the hessian
/// mass seen at training time (so parent cover equals the sum of its
/// children's).
struct TreeNode {
    int feature = -1;  // -1 => leaf
    double threshold = 0.0;
    double cover = 0.0;
    double weight = 0.0;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // root at index 0

    double value_at(std::span<const double> x) const {
        int idx = 0;
        while (!nodes[idx].is_leaf())
            idx = x[nodes[idx].feature] < nodes[idx].threshold ? nodes[idx].left
                                                               : nodes[idx].right;
        return nodes[idx].weight;
    }
};

struct GBDTModel {
    std::vector<RegressionTree> trees;
    double base_score = 0.0;  // log-odds
    double learning_rate = 0.1;
    double lambda_l2 = 1.0;
    std::size_t num_features = 0;

    double margin(std::span<const double> x) const {
        if (x.size() != num_features) throw DimensionMismatchError(num_features, x.size());
        double m = base_score;
        for (const auto& tree : trees) m += learning_rate * tree.value_at(x);
        return m;
    }
};

/// Gradient and hessian of the logistic loss w.r.t. the margin.
inline std::pair<double, double> logloss_grad_hess(double p, int y) {
    return {p - static_cast<double>(y), p * (1.0 - p)};
}

inline double predict_gbdt(const GBDTModel& m, std::span<const double> x) {
    return sigmoid(m.margin(x));
}

namespace detail {

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    double left_grad = 0.0;
    double left_hess = 0.0;
};

struct BuildNode {
    int node_index = -1;  // index into tree.nodes
    double sum_grad = 0.0;
    double sum_hess = 0.0;
    int depth = 0;
};

}  // namespace detail

/// Newton boosting on the logistic loss with exact greedy splits.
///
/// Each round fits one tree level by level: every feature's presorted order
/// is scanned once per level, accumulating prefix gradient/hessian sums per
/// frontier node, and the split maximizing
///   gain = 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)]
/// is kept. Splitting stops at max_depth, non-positive gain, or a child
/// hessian cover below min_child_cover. Leaves take -G/(H+l); the shrinkage
/// is applied at prediction time. Everything is index-ordered, so equal
/// gains resolve to the smallest feature then the smallest threshold, and
/// retraining on identical input reproduces the model byte for byte.
///
/// Single-class targets are allowed and simply saturate (the base score is
/// the clamped prevalence log-odds); only an empty matrix is an error.
inline GBDTModel train_gbdt(const Matrix& X, const std::vector<int>& y, const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t n = X.rows;
    const std::size_t n_features = X.cols;
    if (n == 0) throw EmptyDataError();
    if (y.size() != n) throw LengthMismatchError();

    GBDTModel model;
    model.learning_rate = cfg.learning_rate;
    model.lambda_l2 = cfg.lambda_l2;
    model.num_features = n_features;

    double positives = 0.0;
    for (const int label : y) positives += label;
    const double prevalence =
        std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    // Presort each feature once; ties fall back to row order.
    std::vector<std::vector<std::uint32_t>> sorted(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
        auto& order = sorted[f];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return X.at(a, f) < X.at(b, f);
        });
    }

    std::vector<double> margins(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    std::vector<std::int32_t> node_of(n);

    for (int round = 0; round < cfg.num_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(margins[i]);
            const auto [g, h] = logloss_grad_hess(p, y[i]);
            grad[i] = g;
            hess[i] = h;
        }

        RegressionTree tree;
        tree.nodes.emplace_back();
        std::fill(node_of.begin(), node_of.end(), 0);

        double root_grad = 0.0, root_hess = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            root_grad += grad[i];
            root_hess += hess[i];
        }
        tree.nodes[0].cover = root_hess;

        std::vector<detail::BuildNode> frontier{{0, root_grad, root_hess, 0}};

        while (!frontier.empty()) {
            // frontier nodes are dense: map node_index -> slot
            std::vector<std::int32_t> slot_of(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < frontier.size(); ++s)
                slot_of[frontier[s].node_index] = static_cast<std::int32_t>(s);

            std::vector<detail::SplitCandidate> best(frontier.size());
            std::vector<double> prefix_grad(frontier.size());
            std::vector<double> prefix_hess(frontier.size());
            std::vector<double> last_value(frontier.size());
            std::vector<char> started(frontier.size());

            for (std::size_t f = 0; f < n_features; ++f) {
                std::fill(prefix_grad.begin(), prefix_grad.end(), 0.0);
                std::fill(prefix_hess.begin(), prefix_hess.end(), 0.0);
                std::fill(started.begin(), started.end(), 0);
                for (const std::uint32_t i : sorted[f]) {
                    const std::int32_t slot =
                        node_of[i] >= 0 ? slot_of[node_of[i]] : -1;
                    if (slot < 0) continue;
                    const double v = X.at(i, f);
                    auto& node = frontier[slot];
                    if (started[slot] && v > last_value[slot]) {
                        const double thr = (last_value[slot] + v) / 2.0;
                        // midpoint must separate: guard against rounding onto
                        // the left value
                        if (thr > last_value[slot]) {
                            const double gl = prefix_grad[slot], hl = prefix_hess[slot];
                            const double gr = node.sum_grad - gl, hr = node.sum_hess - hl;
                            if (hl >= cfg.min_child_cover && hr >= cfg.min_child_cover) {
                                const double gain =
                                    0.5 * (gl * gl / (hl + cfg.lambda_l2) +
                                           gr * gr / (hr + cfg.lambda_l2) -
                                           node.sum_grad * node.sum_grad /
                                               (node.sum_hess + cfg.lambda_l2));
                                if (gain > best[slot].gain) {
                                    best[slot] = {gain, static_cast<int>(f), thr, gl, hl};
                                }
                            }
                        }
                    }
                    last_value[slot] = v;
                    started[slot] = 1;
                    prefix_grad[slot] += grad[i];
                    prefix_hess[slot] += hess[i];
                }
            }

            std::vector<detail::BuildNode> next;
            for (std::size_t s = 0; s < frontier.size(); ++s) {
                auto& node = frontier[s];
                TreeNode& tn = tree.nodes[node.node_index];
                const bool can_split =
                    best[s].feature >= 0 && best[s].gain > 0.0 && node.depth < cfg.max_depth;
                if (!can_split) {
                    tn.weight = -node.sum_grad / (node.sum_hess + cfg.lambda_l2);
                    continue;
                }
                tn.feature = best[s].feature;
                tn.threshold = best[s].threshold;
                tn.left = static_cast<int>(tree.nodes.size());
                tn.right = tn.left + 1;
                TreeNode left_child, right_child;
                left_child.cover = best[s].left_hess;
                right_child.cover = node.sum_hess - best[s].left_hess;
                tree.nodes.push_back(left_child);
                tree.nodes.push_back(right_child);
                next.push_back({tn.left, best[s].left_grad, best[s].left_hess, node.depth + 1});
                next.push_back({tn.right, node.sum_grad - best[s].left_grad,
                                node.sum_hess - best[s].left_hess, node.depth + 1});
            }

            if (!next.empty()) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (node_of[i] < 0) continue;
                    const TreeNode& tn = tree.nodes[node_of[i]];
                    if (tn.is_leaf()) {
                        node_of[i] = -1;  // finished
                    } else {
                        node_of[i] = X.at(i, tn.feature) < tn.threshold ? tn.left : tn.right;
                    }
                }
            }
            frontier = std::move(next);
        }

        for (std::size_t i = 0; i < n; ++i)
            margins[i] += cfg.learning_rate * tree.value_at(X.row(i));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

/// Mean logistic loss of the model on (X, y); the training loss is monotone
/// nonincreasing in the number of rounds.
inline double gbdt_mean_logloss(const GBDTModel& m, const Matrix& X, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        const double z = m.margin(X.row(i));
        total += y[i] == 1 ? log_sigmoid_neg(z) : log_sigmoid_neg(-z);
    }
    return X.rows == 0 ? 0.0 : total / static_cast<double>(X.rows);
}

// ---- JSON persistence ----

inline nlohmann::ordered_json gbdt_to_json(const GBDTModel& m) {
    nlohmann::ordered_json j;
    j["base_score"] = m.base_score;
    j["learning_rate"] = m.learning_rate;
    j["lambda_l2"] = m.lambda_l2;
    j["num_features"] = m.num_features;
    auto trees = nlohmann::ordered_json::array();
    for (const auto& tree : m.trees) {
        auto nodes = nlohmann::ordered_json::array();
        for (const auto& node : tree.nodes) {
            nlohmann::ordered_json nj;
            nj["feature"] = node.feature;
            nj["threshold"] = node.threshold;
            nj["cover"] = node.cover;
            nj["weight"] = node.weight;
            nj["left"] = node.left;
            nj["right"] = node.right;
            nodes.push_back(std::move(nj));
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j;
}

inline GBDTModel gbdt_from_json(const nlohmann::json& j) {
    GBDTModel m;
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.lambda_l2 = j.at("lambda_l2").get<double>();
    m.num_features = j.at("num_features").get<std::size_t>();
    for (const auto& tj : j.at("trees")) {
        RegressionTree tree;
        for (const auto& nj : tj.at("nodes")) {
            TreeNode node;
            node.feature = nj.at("feature").get<int>();
            node.threshold = nj.at("threshold").get<double>();
            node.cover = nj.at("cover").get<double>();
            node.weight = nj.at("weight").get<double>();
            node.left = nj.at("left").get<int>();
            node.right = nj.at("right").get<int>();
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

}  // namespace spamdet
