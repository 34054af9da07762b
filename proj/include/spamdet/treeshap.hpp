#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "spamdet/error.hpp"
#include "spamdet/gbdt.hpp"

namespace spamdet {

namespace detail {

// One entry of the feature path carried down the tree: d is the feature that
// split, z the fraction of cover-weighted paths flowing through when the
// feature is "absent", o whether x follows the split (0/1), and w the
// permutation weight of subsets of each size.
struct PathElement {
    int feature = -1;
    double zero_fraction = 1.0;
    double one_fraction = 1.0;
    double weight = 0.0;
};

// Grows the path by one feature and updates the subset-size weights in
// place. `path` must have room for len+1 elements.
inline void shap_extend(PathElement* path, int len, double pz, double po, int feature) {
    path[len] = {feature, pz, po, len == 0 ? 1.0 : 0.0};
    for (int i = len - 1; i >= 0; --i) {
        path[i + 1].weight +=
            po * path[i].weight * static_cast<double>(i + 1) / static_cast<double>(len + 1);
        path[i].weight =
            pz * path[i].weight * static_cast<double>(len - i) / static_cast<double>(len + 1);
    }
}

// Removes element `index`, inverting its shap_extend. len is the length
// including the element being removed.
inline void shap_unwind(PathElement* path, int len, int index) {
    const double po = path[index].one_fraction;
    const double pz = path[index].zero_fraction;
    double next_one = path[len - 1].weight;
    for (int i = len - 2; i >= 0; --i) {
        if (po != 0.0) {
            const double tmp = path[i].weight;
            path[i].weight = next_one * static_cast<double>(len) /
                             (static_cast<double>(i + 1) * po);
            next_one = tmp - path[i].weight * pz * static_cast<double>(len - 1 - i) /
                                 static_cast<double>(len);
        } else {
            path[i].weight = path[i].weight * static_cast<double>(len) /
                             (pz * static_cast<double>(len - 1 - i));
        }
    }
    for (int i = index; i < len - 1; ++i) {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
}

// Sum of the weights the path would have after unwinding element `index`,
// without mutating it.
inline double shap_unwound_sum(const PathElement* path, int len, int index) {
    const double po = path[index].one_fraction;
    const double pz = path[index].zero_fraction;
    double next_one = path[len - 1].weight;
    double total = 0.0;
    if (po != 0.0) {
        for (int i = len - 2; i >= 0; --i) {
            const double tmp = next_one * static_cast<double>(len) /
                               (static_cast<double>(i + 1) * po);
            total += tmp;
            next_one = path[i].weight -
                       tmp * pz * static_cast<double>(len - 1 - i) / static_cast<double>(len);
        }
    } else {
        for (int i = len - 2; i >= 0; --i) {
            total += path[i].weight * static_cast<double>(len) /
                     (pz * static_cast<double>(len - 1 - i));
        }
    }
    return total;
}

inline void shap_recurse(const RegressionTree& tree, std::span<const double> x, double scale,
                         std::vector<double>& phi, std::vector<PathElement>& scratch,
                         int node_index, int parent_offset, int parent_len, double pz, double po,
                         int feature) {
    // copy the parent path into this level's region, then extend
    const int offset = parent_offset + parent_len;
    for (int i = 0; i < parent_len; ++i) scratch[offset + i] = scratch[parent_offset + i];
    PathElement* path = scratch.data() + offset;
    shap_extend(path, parent_len, pz, po, feature);
    const int len = parent_len + 1;

    const TreeNode& node = tree.nodes[node_index];
    if (node.is_leaf()) {
        for (int i = 1; i < len; ++i) {
            const double w = shap_unwound_sum(path, len, i);
            phi[path[i].feature] +=
                w * (path[i].one_fraction - path[i].zero_fraction) * node.weight * scale;
        }
        return;
    }

    const bool goes_left = x[node.feature] < node.threshold;
    const int hot = goes_left ? node.left : node.right;
    const int cold = goes_left ? node.right : node.left;
    const double hot_fraction = tree.nodes[hot].cover / node.cover;
    const double cold_fraction = tree.nodes[cold].cover / node.cover;

    // if this feature already split above, fold its fractions in and remove
    // the old entry so the path holds each feature once
    double incoming_zero = 1.0, incoming_one = 1.0;
    int found = -1;
    for (int i = 1; i < len; ++i) {
        if (path[i].feature == node.feature) {
            found = i;
            break;
        }
    }
    int new_len = len;
    if (found >= 0) {
        incoming_zero = path[found].zero_fraction;
        incoming_one = path[found].one_fraction;
        shap_unwind(path, len, found);
        new_len = len - 1;
    }

    shap_recurse(tree, x, scale, phi, scratch, hot, offset, new_len,
                 incoming_zero * hot_fraction, incoming_one, node.feature);
    shap_recurse(tree, x, scale, phi, scratch, cold, offset, new_len,
                 incoming_zero * cold_fraction, 0.0, node.feature);
}

inline int tree_max_path(const RegressionTree& tree, int node_index = 0) {
    const TreeNode& node = tree.nodes[node_index];
    if (node.is_leaf()) return 1;
    return 1 + std::max(tree_max_path(tree, node.left), tree_max_path(tree, node.right));
}

}  // namespace detail

/// Cover-weighted expectation of a single tree (its output when every
/// feature is "absent").
inline double tree_expected_value(const RegressionTree& tree, int node_index = 0) {
    const TreeNode& node = tree.nodes[node_index];
    if (node.is_leaf()) return node.weight;
    const double wl = tree.nodes[node.left].cover / node.cover;
    const double wr = tree.nodes[node.right].cover / node.cover;
    return wl * tree_expected_value(tree, node.left) + wr * tree_expected_value(tree, node.right);
}

struct ShapValues {
    std::vector<double> phi;  // one contribution per feature
    double base_value = 0.0;  // expected margin with no features known

    double sum_with_base() const {
        double s = base_value;
        for (const double v : phi) s += v;
        return s;
    }
};

/// Path-dependent TreeSHAP over the whole ensemble, using training covers as
/// the background weighting. Contributions plus base value reproduce the raw
/// margin exactly (local accuracy); features a tree never touches get
/// exactly zero.
inline ShapValues tree_shap(const GBDTModel& model, std::span<const double> x) {
    if (x.size() != model.num_features) throw DimensionMismatchError(model.num_features, x.size());
    ShapValues out;
    out.phi.assign(model.num_features, 0.0);
    out.base_value = model.base_score;

    std::vector<detail::PathElement> scratch;
    for (const auto& tree : model.trees) {
        const int depth = detail::tree_max_path(tree);
        scratch.assign(static_cast<std::size_t>((depth + 2) * (depth + 3) / 2), {});
        detail::shap_recurse(tree, x, model.learning_rate, out.phi, scratch,
                             /*node_index=*/0, /*parent_offset=*/0, /*parent_len=*/0,
                             /*pz=*/1.0, /*po=*/1.0, /*feature=*/-1);
        out.base_value += model.learning_rate * tree_expected_value(tree);
    }
    return out;
}

}  // namespace spamdet
