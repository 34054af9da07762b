#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "spamdet/error.hpp"
#include "spamdet/gbdt.hpp"
#include "spamdet/metrics.hpp"
#include "spamdet/numeric.hpp"
#include "spamdet/rng.hpp"

namespace spamdet {

/// Stratified fold ids: within each class, rows are shuffled by seed and
/// dealt round-robin, so every fold sees both classes as long as each class
/// has at least k members.
inline std::vector<int> stratified_fold_assignment(const std::vector<int>& y, int k,
                                                   std::uint64_t seed) {
    if (k < 2) throw ConfigInvalidError("cv: k must be >= 2");
    std::vector<int> folds(y.size(), -1);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == cls) rows.push_back(i);
        if (rows.size() < static_cast<std::size_t>(k)) throw InsufficientClassCountError();
        Rng rng(derive_seed(seed, 0x666f6c64, static_cast<std::uint64_t>(cls)));
        for (std::size_t i = rows.size(); i > 1; --i)
            std::swap(rows[i - 1], rows[rng.next_index(i)]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            folds[rows[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return folds;
}

struct GridCell {
    double learning_rate = 0.0;
    int max_depth = 0;
    double mean_average_accuracy = 0.0;
    std::vector<double> fold_scores;
};

struct GridSearchResult {
    TrainConfig best;
    double best_score = 0.0;
    std::vector<GridCell> cells;
};

/// Grid search over (learning_rate, max_depth) with stratified k-fold CV,
/// scored by mean macro recall on the held-out folds. Ties break toward the
/// smaller depth, then the smaller learning rate.
inline GridSearchResult grid_search_cv(const Matrix& X, const std::vector<int>& y,
                                       const std::vector<double>& learning_rates,
                                       const std::vector<int>& max_depths,
                                       const TrainConfig& base_cfg, int k, std::uint64_t seed) {
    if (learning_rates.empty() || max_depths.empty())
        throw ConfigInvalidError("cv: empty parameter grid");
    const std::vector<int> folds = stratified_fold_assignment(y, k, seed);

    GridSearchResult result;
    bool have_best = false;

    for (const int depth : max_depths) {
        for (const double lr : learning_rates) {
            GridCell cell;
            cell.learning_rate = lr;
            cell.max_depth = depth;
            for (int fold = 0; fold < k; ++fold) {
                Matrix train_x(0, X.cols), test_x(0, X.cols);
                std::vector<int> train_y, test_y;
                std::size_t train_rows = 0, test_rows = 0;
                for (std::size_t i = 0; i < X.rows; ++i)
                    (folds[i] == fold ? test_rows : train_rows) += 1;
                train_x = Matrix(train_rows, X.cols);
                test_x = Matrix(test_rows, X.cols);
                std::size_t ti = 0, si = 0;
                for (std::size_t i = 0; i < X.rows; ++i) {
                    const auto src = X.row(i);
                    if (folds[i] == fold) {
                        std::copy(src.begin(), src.end(), test_x.row(si).begin());
                        test_y.push_back(y[i]);
                        ++si;
                    } else {
                        std::copy(src.begin(), src.end(), train_x.row(ti).begin());
                        train_y.push_back(y[i]);
                        ++ti;
                    }
                }

                TrainConfig cfg = base_cfg;
                cfg.learning_rate = lr;
                cfg.max_depth = depth;
                const GBDTModel model = train_gbdt(train_x, train_y, cfg);

                std::vector<int> pred(test_rows);
                for (std::size_t i = 0; i < test_rows; ++i)
                    pred[i] = predict_gbdt(model, test_x.row(i)) >= 0.5 ? 1 : 0;
                cell.fold_scores.push_back(evaluate(test_y, pred).average_accuracy);
            }
            cell.mean_average_accuracy = mean(cell.fold_scores);

            const bool better =
                !have_best || cell.mean_average_accuracy > result.best_score ||
                (cell.mean_average_accuracy == result.best_score &&
                 (depth < result.best.max_depth ||
                  (depth == result.best.max_depth && lr < result.best.learning_rate)));
            if (better) {
                result.best = base_cfg;
                result.best.learning_rate = lr;
                result.best.max_depth = depth;
                result.best_score = cell.mean_average_accuracy;
                have_best = true;
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

}  // namespace spamdet
