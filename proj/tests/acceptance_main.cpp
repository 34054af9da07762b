// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spamdet/pipeline.hpp"
#include "test_util.hpp"

using namespace spamdet;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " - ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- 1. metric arithmetic: recalls 0.9790/0.9608 -> average 0.9699 ----

void criterion_metric_arithmetic() {
    std::vector<int> y_true, y_pred;
    for (int i = 0; i < 10000; ++i) {
        y_true.push_back(0);
        y_pred.push_back(i < 9790 ? 0 : 1);
    }
    for (int i = 0; i < 10000; ++i) {
        y_true.push_back(1);
        y_pred.push_back(i < 9608 ? 1 : 0);
    }
    const auto r = evaluate(y_true, y_pred);
    const bool ok = std::abs(r.recall_class0 - 0.9790) <= 1e-12 &&
                    std::abs(r.recall_class1 - 0.9608) <= 1e-12 &&
                    std::abs(r.average_accuracy - 0.9699) <= 1e-12;
    report("metric-arithmetic (97.90/96.08 -> 96.99)", ok,
           "average_accuracy=" + fmt(r.average_accuracy));
}

// ---- 2. vector shape: default selection + 100-dim embeddings -> 116 ----

void criterion_vector_shape() {
    testutil::TempDir dir;
    PipelineConfig cfg;
    cfg.data_dir = (dir.path / "data").string();
    cfg.output_dir = (dir.path / "out").string();
    cfg.synth.n_genuine = 80;
    cfg.synth.n_spam = 40;
    cfg.synth.spam_community_count = 2;
    cfg.train.num_rounds = 30;
    cfg.pretrain_rounds = 10;
    cfg.cv_folds = 3;
    cfg.grid_max_depths = {4};
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.data_dir);

    run_synth(cfg);
    run_featurize(cfg);
    const auto res = run_select_train_eval(cfg);
    const bool ok = res.assembled.rows.cols == 116 && res.assembled.selected.size() == 16 &&
                    res.assembled.embedding_dim == 100;
    report("vector-shape (16 selected + 100 dims = 116)", ok,
           "length=" + std::to_string(res.assembled.rows.cols));
}

// ---- 3. centrality oracle suite ----

void criterion_centrality_oracles() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50 && ok; ++seed) {
        const std::size_t n = 5 + (seed * 7) % 46;  // 5..50
        const auto g = oracles::random_graph(n, 0.1, seed * 101);
        const auto dense = oracles::dense_adjacency(g);

        const auto deg = degree_centrality(g);
        const auto deg_oracle = oracles::dense_degree(dense);
        for (std::size_t v = 0; v < n; ++v)
            worst = std::max(worst, std::abs(deg[v] - deg_oracle[v]));

        const auto btw = betweenness_centrality(g);
        const auto btw_oracle = oracles::brute_betweenness(dense);
        for (std::size_t v = 0; v < n; ++v)
            worst = std::max(worst, std::abs(btw[v] - btw_oracle[v]));

        const auto pr = pagerank(g);
        const auto pr_oracle = oracles::dense_pagerank(dense);
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            worst = std::max(worst, std::abs(pr[v] - pr_oracle[v]));
            sum += pr[v];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            ok = false;
            detail = "pagerank sum " + fmt(sum) + " at seed " + std::to_string(seed);
            break;
        }

        if (g.edge_count() > 0) {
            for (const bool in_dir : {true, false}) {
                std::vector<double> eig;
                bool eig_ok = true;
                try {
                    eig = eigenvector_centrality(
                        g, in_dir ? EigenDirection::In : EigenDirection::Out);
                } catch (const Error&) {
                    eig_ok = false;
                }
                const auto eig_oracle = oracles::dense_eigenvector(dense, in_dir);
                if (eig_ok != eig_oracle.has_value()) {
                    ok = false;
                    detail = "eigenvector convergence disagreement at seed " +
                             std::to_string(seed);
                    break;
                }
                if (eig_ok) {
                    for (std::size_t v = 0; v < n; ++v)
                        worst = std::max(worst, std::abs(eig[v] - (*eig_oracle)[v]));
                }
            }
        }
        if (worst > 1e-6) {
            ok = false;
            detail = "max deviation " + fmt(worst) + " at seed " + std::to_string(seed);
        }
    }
    if (ok) detail = "50 graphs, max deviation " + fmt(worst);
    report("centrality-oracles (50 random digraphs, 1e-6)", ok, detail);
}

// ---- 4. TreeSHAP vs exhaustive-subset Shapley ----

void criterion_treeshap_oracle() {
    bool ok = true;
    double worst_phi = 0.0, worst_local = 0.0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
        const int n_trees = 1 + static_cast<int>(seed % 5);
        const int n_features = 2 + static_cast<int>((seed * 3) % 5);  // 2..6
        const int depth = 1 + static_cast<int>(seed % 3);             // 1..3
        const auto m = oracles::random_ensemble(n_trees, depth, n_features, seed * 977);
        Rng rng(seed * 31 + 5);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(m.num_features);
            for (auto& v : x) v = rng.next_double();
            const auto sv = tree_shap(m, x);
            const auto brute = oracles::brute_shapley(m, x);
            for (std::size_t f = 0; f < m.num_features; ++f)
                worst_phi = std::max(worst_phi, std::abs(sv.phi[f] - brute[f]));
            worst_local = std::max(worst_local, std::abs(sv.sum_with_base() - m.margin(x)));
        }
        if (worst_phi > 1e-9 || worst_local > 1e-9) {
            ok = false;
            detail = "seed " + std::to_string(seed) + ": phi dev " + fmt(worst_phi) +
                     ", local dev " + fmt(worst_local);
        }
    }
    if (ok)
        detail = "100 ensembles, phi dev " + fmt(worst_phi) + ", local dev " + fmt(worst_local);
    report("treeshap-oracle (exhaustive Shapley, 1e-9)", ok, detail);
}

// ---- 5. string/entropy/feature formulas ----

void criterion_formula_suite() {
    const bool ok = std::abs(name_similarity("abcd", "bcde") - 0.75) <= 1e-12 &&
                    std::abs(name_similarity("apple", "applet") - 10.0 / 11.0) <= 1e-12 &&
                    std::abs(entropy_per_length("ab") - 0.5) <= 1e-12 &&
                    std::abs(lexical_diversity({"buy cheap buy now"}) - 0.75) <= 1e-12;
    report("formula-suite (gestalt ratio, entropy, TTR)", ok, "");
}

// ---- 6. planted-signal recovery ----

PipelineConfig pipeline_config_for(const std::filesystem::path& root, std::uint64_t seed,
                                   bool planted, bool light) {
    PipelineConfig cfg;
    cfg.data_dir = (root / ("data_" + std::to_string(seed) + (planted ? "_p" : "_n"))).string();
    cfg.output_dir = (root / ("out_" + std::to_string(seed) + (planted ? "_p" : "_n"))).string();
    cfg.seed = seed;
    cfg.synth.planted_effects = planted;
    if (light) {
        // null runs: same pipeline, lighter search (one grid cell, fewer
        // rounds); chance level does not depend on the grid
        cfg.train.num_rounds = 100;
        cfg.grid_max_depths = {4};
        cfg.pretrain_rounds = 30;
    } else {
        cfg.train.num_rounds = 150;
        cfg.grid_max_depths = {4, 6};
        cfg.pretrain_rounds = 40;
    }
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.data_dir);
    return cfg;
}

double pipeline_cv_accuracy(const PipelineConfig& cfg) {
    run_synth(cfg);
    run_featurize(cfg);
    const auto res = run_select_train_eval(cfg);
    return res.grid.best_score;
}

void criterion_planted_signal() {
    testutil::TempDir dir;
    const auto planted_cfg = pipeline_config_for(dir.path, 42, true, false);
    const double planted_acc = pipeline_cv_accuracy(planted_cfg);

    double null_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto null_cfg = pipeline_config_for(dir.path, seed, false, true);
        null_sum += pipeline_cv_accuracy(null_cfg);
    }
    const double null_mean = null_sum / 5.0;

    const bool ok = planted_acc >= 0.90 && null_mean >= 0.40 && null_mean <= 0.60;
    report("planted-signal (1500/500 seed 42: cv >= 0.90; null mean in [0.4, 0.6])", ok,
           "planted=" + fmt(planted_acc) + ", null mean=" + fmt(null_mean));
}

// ---- 7. node2vec neighborhood property ----

void criterion_node2vec_neighborhoods() {
    std::vector<std::pair<std::string, std::string>> edges;
    auto id = [](int side, int i) { return (side == 0 ? "a" : "b") + std::to_string(i); };
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) edges.emplace_back(id(side, i), id(side, j));
    edges.emplace_back(id(0, 0), id(1, 0));
    const auto g = build_graph(edges);

    Node2VecConfig cfg;
    cfg.seed = 42;
    const auto emb = embed(g, cfg);

    double intra = 0.0, inter = 0.0;
    int intra_n = 0, inter_n = 0;
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
        for (NodeIndex v = u + 1; v < g.node_count(); ++v) {
            const double cos = cosine_similarity(emb.row(u), emb.row(v));
            if (g.ids[u][0] == g.ids[v][0]) {
                intra += cos;
                ++intra_n;
            } else {
                inter += cos;
                ++inter_n;
            }
        }
    }
    intra /= intra_n;
    inter /= inter_n;
    const bool ok = intra - inter >= 0.2;
    report("node2vec-neighborhoods (barbell gap >= 0.2)", ok,
           "intra=" + fmt(intra) + ", inter=" + fmt(inter) + ", gap=" + fmt(intra - inter));
}

// ---- 8. determinism of every command ----

void criterion_determinism() {
    testutil::TempDir dir;
    PipelineConfig cfg;
    cfg.data_dir = (dir.path / "data").string();
    cfg.output_dir = (dir.path / "out").string();
    cfg.synth.n_genuine = 60;
    cfg.synth.n_spam = 30;
    cfg.synth.spam_community_count = 2;
    cfg.node2vec.dimensions = 32;
    cfg.node2vec.epochs = 3;
    cfg.train.num_rounds = 40;
    cfg.pretrain_rounds = 15;
    cfg.cv_folds = 3;
    cfg.grid_max_depths = {3};
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.data_dir);

    auto snapshot = [&]() {
        run_synth(cfg);
        run_featurize(cfg);
        run_select_train_eval(cfg);
        const auto table = read_feature_table_csv(cfg.features_path);
        run_score(cfg, {table.ids.front(), table.ids.back()});
        std::vector<std::string> blobs;
        for (const auto& path :
             {cfg.users_path, cfg.tweets_path, cfg.edges_path, cfg.labels_path,
              cfg.features_path, cfg.centralities_path, cfg.embeddings_path, cfg.model_path,
              cfg.selection_path, cfg.metrics_path, cfg.assembled_path, cfg.scores_path}) {
            blobs.push_back(testutil::read_file(path));
        }
        return blobs;
    };

    const auto first = snapshot();
    const auto second = snapshot();
    bool ok = first.size() == second.size();
    std::string detail;
    for (std::size_t i = 0; ok && i < first.size(); ++i) {
        if (first[i] != second[i]) {
            ok = false;
            detail = "artifact " + std::to_string(i) + " differs between reruns";
        }
    }
    if (ok) detail = std::to_string(first.size()) + " artifacts byte-identical";
    report("determinism (rerun -> byte-identical artifacts)", ok, detail);
}

// ---- 9. gradient checks ----

void criterion_gradient_checks() {
    bool ok = true;
    double worst = 0.0;
    const double eps = 1e-5;
    const double hess_eps = 1e-4;  // second difference needs a wider step

    // GBDT g/h vs central differences of the logistic loss in the margin
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        const double z = (rng.next_double() - 0.5) * 10.0;
        const int y = rng.bernoulli(0.5) ? 1 : 0;
        auto loss = [&](double margin) {
            return y == 1 ? log_sigmoid_neg(margin) : log_sigmoid_neg(-margin);
        };
        const auto [g, h] = logloss_grad_hess(sigmoid(z), y);
        const double fd_g = (loss(z + eps) - loss(z - eps)) / (2.0 * eps);
        const double fd_h =
            (loss(z + hess_eps) - 2.0 * loss(z) + loss(z - hess_eps)) / (hess_eps * hess_eps);
        worst = std::max({worst, std::abs(g - fd_g), std::abs(h - fd_h)});
    }

    // logistic-regression gradient vs central differences
    Matrix x(30, 3);
    std::vector<int> y;
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t c = 0; c < 3; ++c) x.at(i, c) = rng.next_double() * 2.0 - 1.0;
        y.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    const double l2 = 1e-3;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w{rng.next_double() - 0.5, rng.next_double() - 0.5,
                              rng.next_double() - 0.5};
        const double b = rng.next_double() - 0.5;
        std::vector<double> grad_w;
        double grad_b = 0.0;
        logreg_gradient(x, y, w, b, l2, grad_w, grad_b);
        for (std::size_t f = 0; f < w.size(); ++f) {
            auto wp = w, wm = w;
            wp[f] += eps;
            wm[f] -= eps;
            const double fd =
                (logreg_loss(x, y, wp, b, l2) - logreg_loss(x, y, wm, b, l2)) / (2.0 * eps);
            worst = std::max(worst, std::abs(grad_w[f] - fd));
        }
        const double fd_b =
            (logreg_loss(x, y, w, b + eps, l2) - logreg_loss(x, y, w, b - eps, l2)) / (2.0 * eps);
        worst = std::max(worst, std::abs(grad_b - fd_b));
    }

    ok = worst <= 1e-5;
    report("gradient-checks (logreg + gbdt g/h vs finite differences, 1e-5)", ok,
           "max deviation " + fmt(worst));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_metric_arithmetic();
    criterion_formula_suite();
    criterion_gradient_checks();
    criterion_treeshap_oracle();
    criterion_centrality_oracles();
    criterion_node2vec_neighborhoods();
    criterion_vector_shape();
    criterion_determinism();
    criterion_planted_signal();
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start);
    std::printf("%d criterion(s) failed; total %llds\n", g_failures,
                static_cast<long long>(elapsed.count()));
    return g_failures == 0 ? 0 : 1;
}
