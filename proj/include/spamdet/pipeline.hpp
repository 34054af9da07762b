#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spamdet/centrality.hpp"
#include "spamdet/cv.hpp"
#include "spamdet/dataset.hpp"
#include "spamdet/error.hpp"
#include "spamdet/feature_table.hpp"
#include "spamdet/gbdt.hpp"
#include "spamdet/graph.hpp"
#include "spamdet/io.hpp"
#include "spamdet/linear.hpp"
#include "spamdet/metadata_features.hpp"
#include "spamdet/metrics.hpp"
#include "spamdet/node2vec.hpp"
#include "spamdet/rng.hpp"
#include "spamdet/synth.hpp"
#include "spamdet/text_features.hpp"

namespace spamdet {

namespace detail {
constexpr std::uint64_t kStageNode2Vec = 0x6e327600;
constexpr std::uint64_t kStagePretrain = 0x70726500;
constexpr std::uint64_t kStageCv = 0x63760000;
constexpr std::uint64_t kStageFinal = 0x66696e00;
}  // namespace detail

/// Every knob of the pipeline, layered defaults < config file < flags. One
/// seed feeds every stochastic stage through derived streams.
struct PipelineConfig {
    std::string data_dir = "data";
    std::string output_dir = "out";
    CivilDate snapshot_date{2020, 5, 1};
    std::uint64_t seed = 42;

    SynthConfig synth;
    Node2VecConfig node2vec;
    TrainConfig train;

    int pretrain_rounds = 60;
    int shap_top_k = 15;
    double correlation_threshold = 0.1;
    bool paper_faithful_features = true;
    int cv_folds = 5;
    std::vector<double> grid_learning_rates{0.1};
    std::vector<int> grid_max_depths{4, 6};
    bool reuse_artifacts = true;

    // input files
    std::string users_path, tweets_path, edges_path, lexicon_path, labels_path;
    // output artifacts
    std::string features_path, centralities_path, embeddings_path;
    std::string model_path, selection_path, metrics_path, assembled_path, scores_path;

    void resolve_paths() {
        auto in = [&](std::string& field, const char* name) {
            if (field.empty()) field = data_dir + "/" + name;
        };
        auto out = [&](std::string& field, const char* name) {
            if (field.empty()) field = output_dir + "/" + name;
        };
        in(users_path, "users.jsonl");
        in(tweets_path, "tweets.jsonl");
        in(edges_path, "edges.tsv");
        in(lexicon_path, "lexicon.txt");
        in(labels_path, "labels.csv");
        out(features_path, "features.csv");
        out(centralities_path, "centralities.csv");
        out(embeddings_path, "embeddings.txt");
        out(model_path, "model.json");
        out(selection_path, "selection.json");
        out(metrics_path, "metrics.json");
        out(assembled_path, "assembled.csv");
        out(scores_path, "scores.csv");
    }

    /// The paper-reported operating point: depth-15 trees, top-15 SHAP,
    /// correlation threshold 0.1.
    void apply_paper_mode() {
        train.max_depth = 15;
        shap_top_k = 15;
        correlation_threshold = 0.1;
    }
};

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalidError("cannot open config file " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigInvalidError("config file is not a JSON object: " + path);

    PipelineConfig cfg;
    auto get = [&](nlohmann::json& obj, const char* key, auto& field) {
        if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    get(j, "data_dir", cfg.data_dir);
    get(j, "output_dir", cfg.output_dir);
    get(j, "seed", cfg.seed);
    if (j.contains("snapshot_date")) {
        const auto d = parse_date(j.at("snapshot_date").get<std::string>());
        if (!d) throw ConfigInvalidError("bad snapshot_date");
        cfg.snapshot_date = *d;
    }
    if (j.contains("synth")) {
        auto& s = j.at("synth");
        get(s, "n_genuine", cfg.synth.n_genuine);
        get(s, "n_spam", cfg.synth.n_spam);
        get(s, "tweets_min", cfg.synth.tweets_min);
        get(s, "tweets_max", cfg.synth.tweets_max);
        get(s, "spam_community_count", cfg.synth.spam_community_count);
        get(s, "intra_spam_edge_prob", cfg.synth.intra_spam_edge_prob);
        get(s, "cross_edge_prob", cfg.synth.cross_edge_prob);
        get(s, "genuine_edge_prob", cfg.synth.genuine_edge_prob);
        get(s, "spam_template_count", cfg.synth.spam_template_count);
        get(s, "vocab_size", cfg.synth.vocab_size);
        get(s, "planted_effects", cfg.synth.planted_effects);
    }
    if (j.contains("node2vec")) {
        auto& n = j.at("node2vec");
        get(n, "dimensions", cfg.node2vec.dimensions);
        get(n, "walk_length", cfg.node2vec.walk_length);
        get(n, "walks_per_node", cfg.node2vec.walks_per_node);
        get(n, "return_p", cfg.node2vec.return_p);
        get(n, "in_out_q", cfg.node2vec.in_out_q);
        get(n, "window", cfg.node2vec.window);
        get(n, "negatives_per_positive", cfg.node2vec.negatives_per_positive);
        get(n, "epochs", cfg.node2vec.epochs);
        get(n, "initial_lr", cfg.node2vec.initial_lr);
    }
    if (j.contains("train")) {
        auto& t = j.at("train");
        get(t, "learning_rate", cfg.train.learning_rate);
        get(t, "max_depth", cfg.train.max_depth);
        get(t, "num_rounds", cfg.train.num_rounds);
        get(t, "lambda_l2", cfg.train.lambda_l2);
        get(t, "min_child_cover", cfg.train.min_child_cover);
    }
    if (j.contains("selection")) {
        auto& s = j.at("selection");
        get(s, "k", cfg.shap_top_k);
        get(s, "threshold", cfg.correlation_threshold);
        get(s, "paper_faithful_features", cfg.paper_faithful_features);
        get(s, "pretrain_rounds", cfg.pretrain_rounds);
    }
    if (j.contains("cv")) {
        auto& c = j.at("cv");
        get(c, "folds", cfg.cv_folds);
        get(c, "grid_learning_rates", cfg.grid_learning_rates);
        get(c, "grid_max_depths", cfg.grid_max_depths);
    }
    get(j, "reuse_artifacts", cfg.reuse_artifacts);
    if (j.contains("files")) {
        auto& f = j.at("files");
        get(f, "users", cfg.users_path);
        get(f, "tweets", cfg.tweets_path);
        get(f, "edges", cfg.edges_path);
        get(f, "lexicon", cfg.lexicon_path);
        get(f, "labels", cfg.labels_path);
        get(f, "features", cfg.features_path);
        get(f, "centralities", cfg.centralities_path);
        get(f, "embeddings", cfg.embeddings_path);
        get(f, "model", cfg.model_path);
        get(f, "selection", cfg.selection_path);
        get(f, "metrics", cfg.metrics_path);
        get(f, "assembled", cfg.assembled_path);
        get(f, "scores", cfg.scores_path);
    }
    cfg.resolve_paths();
    return cfg;
}

// ---- synth ----

inline void run_synth(PipelineConfig cfg) {
    cfg.resolve_paths();
    if (!std::filesystem::is_directory(cfg.data_dir))
        throw ConfigInvalidError("output directory does not exist: " + cfg.data_dir);
    SynthConfig sc = cfg.synth;
    sc.seed = cfg.seed;
    sc.snapshot_date = cfg.snapshot_date;
    DatasetPaths paths{cfg.users_path, cfg.tweets_path, cfg.edges_path, cfg.lexicon_path,
                       cfg.labels_path};
    write_synth_dataset(sc, paths);
}

// ---- featurize ----

struct FeaturizeResult {
    Dataset dataset;
    SocialGraph graph;
    CentralityTable centralities;
    NodeEmbeddings embeddings;
    FeatureTable table;
};

inline std::vector<std::string> all_user_ids(const Dataset& d) {
    std::vector<std::string> ids;
    ids.reserve(d.users.size());
    for (const auto& u : d.users) ids.push_back(u.id);
    return ids;
}

/// Loads the dataset, validates it, computes centralities + embeddings over
/// the full graph (labeled users joined in as nodes even when isolated), and
/// builds the per-user feature table.
inline FeaturizeResult featurize(const PipelineConfig& cfg) {
    FeaturizeResult res;
    DatasetPaths paths{cfg.users_path, cfg.tweets_path, cfg.edges_path, cfg.lexicon_path,
                       std::filesystem::exists(cfg.labels_path) ? cfg.labels_path : ""};
    res.dataset = load_dataset(paths, cfg.snapshot_date);

    const ValidationReport report = validate_dataset(res.dataset);
    if (!report.accepted()) {
        std::string ids;
        for (const auto& issue : report.issues)
            if (issue.kind == ValidationIssue::Kind::UnknownTweetUser) ids += " " + issue.id;
        throw ConfigInvalidError("tweets reference unknown users:" + ids);
    }

    res.graph = build_graph(res.dataset.edges, all_user_ids(res.dataset));
    res.centralities = compute_centralities(res.graph);

    Node2VecConfig n2v = cfg.node2vec;
    n2v.seed = derive_seed(cfg.seed, detail::kStageNode2Vec);
    EmbeddingMatrix emb = embed(res.graph, n2v);
    res.embeddings.ids = res.graph.ids;
    for (std::size_t i = 0; i < res.graph.ids.size(); ++i)
        res.embeddings.index_of.emplace(res.graph.ids[i], i);
    res.embeddings.matrix = std::move(emb);

    std::map<std::string, MetadataFeatures> meta;
    std::map<std::string, TextFeatures> text;
    static const std::vector<std::string> no_tweets;
    for (const auto& u : res.dataset.users) {
        if (!u.label) continue;
        meta.emplace(u.id, compute_metadata_features(u, cfg.snapshot_date));
        const auto it = res.dataset.tweets.find(u.id);
        text.emplace(u.id, compute_text_features(it == res.dataset.tweets.end() ? no_tweets
                                                                                : it->second,
                                                 res.dataset.lexicon));
    }
    res.table = build_feature_table(res.dataset, res.graph, res.centralities, meta, text);
    return res;
}

inline void run_featurize(PipelineConfig cfg) {
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.output_dir);
    const FeaturizeResult res = featurize(cfg);
    write_feature_table_csv(cfg.features_path, res.table);
    write_centralities_csv(cfg.centralities_path, res.graph, res.centralities);
    write_embeddings(cfg.embeddings_path, res.graph.ids, res.embeddings.matrix);
}

// ---- select / train / eval ----

struct TrainEvalResult {
    SelectionReport selection;
    AssembledVectors assembled;
    GridSearchResult grid;
    GBDTModel model;
    EvalReport train_report;
};

inline TrainEvalResult select_train_eval(const PipelineConfig& cfg, const FeatureTable& table,
                                         const NodeEmbeddings& embeddings) {
    if (!table.has_labels()) throw NoLabelsError();
    bool has0 = false, has1 = false;
    for (const int y : table.labels) (y == 0 ? has0 : has1) = true;
    if (!has0 || !has1) throw SingleClassError();

    TrainEvalResult res;

    TrainConfig pre_cfg = cfg.train;
    pre_cfg.num_rounds = cfg.pretrain_rounds;
    pre_cfg.seed = derive_seed(cfg.seed, detail::kStagePretrain);
    const GBDTModel pretrain = train_gbdt(table.values, table.labels, pre_cfg);

    res.selection = select_features(pretrain, table, cfg.shap_top_k, cfg.correlation_threshold,
                                    cfg.paper_faithful_features);
    res.assembled = assemble(table, res.selection.selected, embeddings);

    res.grid = grid_search_cv(res.assembled.rows, res.assembled.labels, cfg.grid_learning_rates,
                              cfg.grid_max_depths, cfg.train, cfg.cv_folds,
                              derive_seed(cfg.seed, detail::kStageCv));

    TrainConfig final_cfg = res.grid.best;
    final_cfg.seed = derive_seed(cfg.seed, detail::kStageFinal);
    res.model = train_gbdt(res.assembled.rows, res.assembled.labels, final_cfg);

    std::vector<int> pred(res.assembled.rows.rows);
    for (std::size_t i = 0; i < res.assembled.rows.rows; ++i)
        pred[i] = predict_gbdt(res.model, res.assembled.rows.row(i)) >= 0.5 ? 1 : 0;
    res.train_report = evaluate(res.assembled.labels, pred);
    return res;
}

inline nlohmann::ordered_json model_bundle_to_json(const PipelineConfig& cfg,
                                                   const TrainEvalResult& res) {
    nlohmann::ordered_json j;
    j["model"] = gbdt_to_json(res.model);
    j["selected_features"] = res.assembled.selected;
    j["standardization"] = {{"mean", res.assembled.standardization.mean},
                            {"stddev", res.assembled.standardization.stddev}};
    j["embedding_dim"] = res.assembled.embedding_dim;
    j["node2vec"] = {{"dimensions", cfg.node2vec.dimensions},
                     {"walk_length", cfg.node2vec.walk_length},
                     {"walks_per_node", cfg.node2vec.walks_per_node},
                     {"return_p", cfg.node2vec.return_p},
                     {"in_out_q", cfg.node2vec.in_out_q},
                     {"window", cfg.node2vec.window},
                     {"negatives_per_positive", cfg.node2vec.negatives_per_positive},
                     {"epochs", cfg.node2vec.epochs},
                     {"initial_lr", cfg.node2vec.initial_lr}};
    j["seed"] = cfg.seed;
    j["snapshot_date"] = format_date(cfg.snapshot_date);
    j["train"] = {{"learning_rate", res.grid.best.learning_rate},
                  {"max_depth", res.grid.best.max_depth},
                  {"num_rounds", res.grid.best.num_rounds},
                  {"lambda_l2", res.grid.best.lambda_l2},
                  {"min_child_cover", res.grid.best.min_child_cover}};
    return j;
}

inline nlohmann::ordered_json metrics_to_json(const TrainEvalResult& res) {
    nlohmann::ordered_json j = eval_report_to_json(res.train_report);
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& cell : res.grid.cells) {
        cells.push_back({{"learning_rate", cell.learning_rate},
                         {"max_depth", cell.max_depth},
                         {"mean_average_accuracy", cell.mean_average_accuracy},
                         {"fold_scores", cell.fold_scores}});
    }
    j["cv"] = {{"cells", std::move(cells)},
               {"best_learning_rate", res.grid.best.learning_rate},
               {"best_max_depth", res.grid.best.max_depth},
               {"best_mean_average_accuracy", res.grid.best_score}};
    j["vector_length"] = res.assembled.rows.cols;
    j["selected_count"] = res.assembled.selected.size();
    return j;
}

inline void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline TrainEvalResult run_select_train_eval(PipelineConfig cfg) {
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.output_dir);
    const FeatureTable table = read_feature_table_csv(cfg.features_path);
    const NodeEmbeddings embeddings = read_embeddings(cfg.embeddings_path);

    TrainEvalResult res = select_train_eval(cfg, table, embeddings);

    write_json_file(cfg.model_path, model_bundle_to_json(cfg, res));
    write_json_file(cfg.selection_path, selection_report_to_json(res.selection));
    write_json_file(cfg.metrics_path, metrics_to_json(res));
    write_assembled_csv(cfg.assembled_path, res.assembled);
    return res;
}

// ---- score ----

struct ScoreRow {
    std::string id;
    double probability_spam = 0.0;
    int predicted_label = 0;
};

/// Scores users through the stored model: recompute (or reuse) centralities
/// and embeddings, build each user's selected-feature row with the stored
/// standardization, append the embedding, predict.
inline std::vector<ScoreRow> score_users(PipelineConfig cfg,
                                         const std::vector<std::string>& user_ids) {
    cfg.resolve_paths();
    std::ifstream min(cfg.model_path);
    if (!min) throw ConfigInvalidError("cannot open model file " + cfg.model_path);
    nlohmann::json bundle = nlohmann::json::parse(min, nullptr, false);
    if (bundle.is_discarded()) throw ConfigInvalidError("model file is not valid JSON");

    const GBDTModel model = gbdt_from_json(bundle.at("model"));
    const std::vector<std::string> selected =
        bundle.at("selected_features").get<std::vector<std::string>>();
    Standardization stats;
    stats.mean = bundle.at("standardization").at("mean").get<std::vector<double>>();
    stats.stddev = bundle.at("standardization").at("stddev").get<std::vector<double>>();
    const std::uint64_t seed = bundle.at("seed").get<std::uint64_t>();

    DatasetPaths paths{cfg.users_path, cfg.tweets_path, cfg.edges_path, cfg.lexicon_path,
                       std::filesystem::exists(cfg.labels_path) ? cfg.labels_path : ""};
    const auto snapshot = parse_date(bundle.at("snapshot_date").get<std::string>());
    if (!snapshot) throw ConfigInvalidError("model file has a bad snapshot_date");
    const Dataset dataset = load_dataset(paths, *snapshot);
    const SocialGraph graph = build_graph(dataset.edges, all_user_ids(dataset));

    std::map<std::string, const UserRecord*> users_by_id;
    for (const auto& u : dataset.users) users_by_id.emplace(u.id, &u);
    for (const auto& id : user_ids) {
        if (!users_by_id.contains(id) || !graph.find(id)) throw ScoreReferenceError(id);
    }

    CentralityTable cent;
    if (cfg.reuse_artifacts && std::filesystem::exists(cfg.centralities_path)) {
        const auto rows = read_centralities_csv(cfg.centralities_path);
        const std::size_t n = graph.node_count();
        cent.degree.resize(n);
        cent.betweenness.resize(n);
        cent.in_eig.resize(n);
        cent.out_eig.resize(n);
        cent.pagerank.resize(n);
        bool complete = rows.size() == n;
        for (NodeIndex v = 0; complete && v < n; ++v) {
            const auto it = rows.find(graph.ids[v]);
            if (it == rows.end()) {
                complete = false;
                break;
            }
            cent.degree[v] = it->second[0];
            cent.betweenness[v] = it->second[1];
            cent.in_eig[v] = it->second[2];
            cent.out_eig[v] = it->second[3];
            cent.pagerank[v] = it->second[4];
        }
        if (!complete) cent = compute_centralities(graph);
    } else {
        cent = compute_centralities(graph);
    }

    NodeEmbeddings embeddings;
    if (cfg.reuse_artifacts && std::filesystem::exists(cfg.embeddings_path)) {
        embeddings = read_embeddings(cfg.embeddings_path);
    }
    if (embeddings.ids.size() != graph.node_count()) {
        Node2VecConfig n2v;
        const auto& nj = bundle.at("node2vec");
        n2v.dimensions = nj.at("dimensions").get<int>();
        n2v.walk_length = nj.at("walk_length").get<int>();
        n2v.walks_per_node = nj.at("walks_per_node").get<int>();
        n2v.return_p = nj.at("return_p").get<double>();
        n2v.in_out_q = nj.at("in_out_q").get<double>();
        n2v.window = nj.at("window").get<int>();
        n2v.negatives_per_positive = nj.at("negatives_per_positive").get<int>();
        n2v.epochs = nj.at("epochs").get<int>();
        n2v.initial_lr = nj.at("initial_lr").get<double>();
        n2v.seed = derive_seed(seed, detail::kStageNode2Vec);
        embeddings.ids = graph.ids;
        embeddings.index_of.clear();
        for (std::size_t i = 0; i < graph.ids.size(); ++i)
            embeddings.index_of.emplace(graph.ids[i], i);
        embeddings.matrix = embed(graph, n2v);
    }

    static const std::vector<std::string> no_tweets;
    const auto& columns = feature_columns();
    std::vector<ScoreRow> out;
    out.reserve(user_ids.size());
    for (const auto& id : user_ids) {
        const UserRecord& u = *users_by_id.at(id);
        const NodeIndex node = *graph.find(id);
        const auto tit = dataset.tweets.find(id);
        const MetadataFeatures mf = compute_metadata_features(u, *snapshot);
        const TextFeatures tf = compute_text_features(
            tit == dataset.tweets.end() ? no_tweets : tit->second, dataset.lexicon);

        std::map<std::string, double> by_name;
        const double vals[] = {
            mf.ff_ratio,
            mf.name_similarity,
            static_cast<double>(mf.account_age_days),
            mf.activity_ratio,
            mf.fav_status_ratio,
            mf.entropy_per_length,
            tf.tweet_similarity,
            tf.lexical_diversity,
            static_cast<double>(tf.hashtag_count),
            static_cast<double>(tf.user_mention_count),
            tf.unigram_spam_freq,
            tf.bigram_spam_freq,
            cent.degree[node],
            cent.betweenness[node],
            cent.in_eig[node],
            cent.out_eig[node],
            cent.pagerank[node],
            u.verified ? 1.0 : 0.0,
            u.geo_enabled ? 1.0 : 0.0,
            u.profile_use_background_image ? 1.0 : 0.0,
            u.profile_background_tile ? 1.0 : 0.0,
            u.default_profile ? 1.0 : 0.0,
            static_cast<double>(u.statuses_count),
            static_cast<double>(u.followers_count),
            static_cast<double>(u.friends_count),
            static_cast<double>(u.favourites_count),
        };
        for (std::size_t c = 0; c < columns.size(); ++c) by_name[columns[c]] = vals[c];

        const auto eit = embeddings.index_of.find(id);
        if (eit == embeddings.index_of.end()) throw ScoreReferenceError(id);
        const auto erow = embeddings.matrix.row(eit->second);

        std::vector<double> x;
        x.reserve(selected.size() + erow.size());
        for (std::size_t s = 0; s < selected.size(); ++s)
            x.push_back((by_name.at(selected[s]) - stats.mean[s]) / stats.stddev[s]);
        x.insert(x.end(), erow.begin(), erow.end());

        ScoreRow row;
        row.id = id;
        row.probability_spam = predict_gbdt(model, x);
        row.predicted_label = row.probability_spam >= 0.5 ? 1 : 0;
        out.push_back(std::move(row));
    }
    return out;
}

inline void run_score(PipelineConfig cfg, const std::vector<std::string>& user_ids) {
    cfg.resolve_paths();
    const auto rows = score_users(cfg, user_ids);
    std::ofstream out(cfg.scores_path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + cfg.scores_path);
    out << "id,probability_spam,predicted_label\n";
    for (const auto& row : rows)
        out << row.id << ',' << format_g17(row.probability_spam) << ',' << row.predicted_label
            << '\n';
}

}  // namespace spamdet
