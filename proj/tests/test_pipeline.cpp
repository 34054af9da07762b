#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spamdet/pipeline.hpp"
#include "test_util.hpp"

using namespace spamdet;

namespace {

// Small, fast pipeline configuration for tests.
PipelineConfig test_config(const testutil::TempDir& dir, std::uint64_t seed = 42) {
    PipelineConfig cfg;
    cfg.data_dir = (dir.path / "data").string();
    cfg.output_dir = (dir.path / "out").string();
    cfg.seed = seed;
    cfg.synth.n_genuine = 60;
    cfg.synth.n_spam = 30;
    cfg.synth.spam_community_count = 2;
    cfg.node2vec.dimensions = 16;
    cfg.node2vec.epochs = 2;
    cfg.node2vec.walk_length = 10;
    cfg.node2vec.walks_per_node = 4;
    cfg.train.num_rounds = 25;
    cfg.pretrain_rounds = 15;
    cfg.cv_folds = 3;
    cfg.grid_max_depths = {3};
    cfg.resolve_paths();
    std::filesystem::create_directories(cfg.data_dir);
    return cfg;
}

std::string config_json_for(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["data_dir"] = cfg.data_dir;
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["synth"] = {{"n_genuine", cfg.synth.n_genuine},
                  {"n_spam", cfg.synth.n_spam},
                  {"spam_community_count", cfg.synth.spam_community_count}};
    j["node2vec"] = {{"dimensions", cfg.node2vec.dimensions},
                     {"epochs", cfg.node2vec.epochs},
                     {"walk_length", cfg.node2vec.walk_length},
                     {"walks_per_node", cfg.node2vec.walks_per_node}};
    j["train"] = {{"num_rounds", cfg.train.num_rounds}};
    j["selection"] = {{"pretrain_rounds", cfg.pretrain_rounds}};
    j["cv"] = {{"folds", cfg.cv_folds}, {"grid_max_depths", cfg.grid_max_depths}};
    return j.dump(2);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPAMDET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

TEST(Pipeline, SynthFeaturizeProducesConsistentArtifacts) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    run_synth(cfg);
    EXPECT_TRUE(std::filesystem::exists(cfg.users_path));
    EXPECT_TRUE(std::filesystem::exists(cfg.labels_path));

    run_featurize(cfg);
    const auto table = read_feature_table_csv(cfg.features_path);
    EXPECT_EQ(table.values.rows, 90u);
    EXPECT_EQ(table.columns.size(), 26u);
    ASSERT_TRUE(table.has_labels());

    const auto emb = read_embeddings(cfg.embeddings_path);
    EXPECT_EQ(emb.matrix.cols, 16u);
    EXPECT_GE(emb.matrix.rows, 90u);
}

TEST(Pipeline, SelectTrainEvalWritesModelSelectionMetrics) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    run_synth(cfg);
    run_featurize(cfg);
    const auto res = run_select_train_eval(cfg);

    // default mode pins the 16-feature list: 16 + 16 embedding dims here
    EXPECT_EQ(res.assembled.selected.size(), 16u);
    EXPECT_EQ(res.assembled.rows.cols, 16u + 16u);

    ASSERT_TRUE(std::filesystem::exists(cfg.metrics_path));
    std::ifstream in(cfg.metrics_path);
    const auto metrics = nlohmann::json::parse(in);
    EXPECT_TRUE(metrics.contains("recall_class0"));
    EXPECT_TRUE(metrics.contains("recall_class1"));
    EXPECT_TRUE(metrics.contains("average_accuracy"));
    EXPECT_TRUE(metrics.contains("macro_f1"));
    EXPECT_TRUE(metrics.contains("cv"));

    std::ifstream sin(cfg.selection_path);
    const auto selection = nlohmann::json::parse(sin);
    EXPECT_EQ(selection.at("selected").size(), 16u);
    EXPECT_EQ(selection.at("column_census").get<int>(), 26);

    // planted signal at desk scale: the pipeline separates the classes well
    EXPECT_GE(res.grid.best_score, 0.9);
}

TEST(Pipeline, DataDrivenSelectionIntersects) {
    testutil::TempDir dir;
    auto cfg = test_config(dir);
    cfg.paper_faithful_features = false;
    run_synth(cfg);
    run_featurize(cfg);
    const auto res = run_select_train_eval(cfg);
    for (const auto& name : res.selection.selected) {
        EXPECT_NE(std::find(res.selection.shap_set.begin(), res.selection.shap_set.end(), name),
                  res.selection.shap_set.end());
        EXPECT_NE(std::find(res.selection.correlation_set.begin(),
                            res.selection.correlation_set.end(), name),
                  res.selection.correlation_set.end());
    }
    EXPECT_LE(res.selection.selected.size(), 15u);
}

TEST(Pipeline, ScoreReproducesTrainingConfusion) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    run_synth(cfg);
    run_featurize(cfg);
    const auto res = run_select_train_eval(cfg);

    const auto table = read_feature_table_csv(cfg.features_path);
    const auto rows = score_users(cfg, table.ids);
    ASSERT_EQ(rows.size(), table.ids.size());

    std::vector<int> pred;
    for (const auto& row : rows) {
        EXPECT_GT(row.probability_spam, 0.0);
        EXPECT_LT(row.probability_spam, 1.0);
        pred.push_back(row.predicted_label);
    }
    const auto report = evaluate(table.labels, pred);
    EXPECT_EQ(report.confusion, res.train_report.confusion);
}

TEST(Pipeline, ScoreUnknownUserThrows) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    run_synth(cfg);
    run_featurize(cfg);
    run_select_train_eval(cfg);
    EXPECT_THROW(score_users(cfg, {"nobody"}), ScoreReferenceError);
}

TEST(Pipeline, PaperModeSetsReportedOperatingPoint) {
    PipelineConfig cfg;
    cfg.apply_paper_mode();
    EXPECT_EQ(cfg.train.max_depth, 15);
    EXPECT_EQ(cfg.shap_top_k, 15);
    EXPECT_DOUBLE_EQ(cfg.correlation_threshold, 0.1);
}

TEST(Cli, SynthFeaturizeTrainScoreSucceed) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));

    EXPECT_EQ(run_cli("synth --config " + config_path), 0);
    EXPECT_EQ(run_cli("featurize --config " + config_path), 0);
    EXPECT_EQ(run_cli("select-train-eval --config " + config_path), 0);
    EXPECT_TRUE(std::filesystem::exists(cfg.model_path));

    EXPECT_EQ(run_cli("score --config " + config_path + " g00001 s00001"), 0);
    EXPECT_TRUE(std::filesystem::exists(cfg.scores_path));
    const auto scores = testutil::read_file(cfg.scores_path);
    EXPECT_NE(scores.find("id,probability_spam,predicted_label"), std::string::npos);
    EXPECT_NE(scores.find("g00001,"), std::string::npos);
}

TEST(Cli, MissingOutputDirectoryExitsTwo) {
    testutil::TempDir dir;
    auto cfg = test_config(dir);
    cfg.data_dir = (dir.path / "missing" / "nested").string();
    cfg.users_path.clear();
    cfg.tweets_path.clear();
    cfg.edges_path.clear();
    cfg.lexicon_path.clear();
    cfg.labels_path.clear();
    cfg.resolve_paths();
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));
    EXPECT_EQ(run_cli("synth --config " + config_path), 2);
}

TEST(Cli, CorruptEdgesExitsTwo) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));
    ASSERT_EQ(run_cli("synth --config " + config_path), 0);
    testutil::write_file(cfg.edges_path, "oops no tab\n");
    EXPECT_EQ(run_cli("featurize --config " + config_path), 2);
}

TEST(Cli, UnknownScoreUserExitsFive) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));
    ASSERT_EQ(run_cli("synth --config " + config_path), 0);
    ASSERT_EQ(run_cli("featurize --config " + config_path), 0);
    ASSERT_EQ(run_cli("select-train-eval --config " + config_path), 0);
    EXPECT_EQ(run_cli("score --config " + config_path + " ghost999"), 5);
}

TEST(Cli, RerunsAreByteIdentical) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));

    ASSERT_EQ(run_cli("synth --config " + config_path), 0);
    ASSERT_EQ(run_cli("featurize --config " + config_path), 0);
    const auto features_first = testutil::read_file(cfg.features_path);
    const auto embeddings_first = testutil::read_file(cfg.embeddings_path);

    ASSERT_EQ(run_cli("synth --config " + config_path), 0);
    ASSERT_EQ(run_cli("featurize --config " + config_path), 0);
    EXPECT_EQ(testutil::read_file(cfg.features_path), features_first);
    EXPECT_EQ(testutil::read_file(cfg.embeddings_path), embeddings_first);
}

TEST(Cli, DegenerateLabelsExitFour) {
    testutil::TempDir dir;
    const auto cfg = test_config(dir);
    const auto config_path = dir.file("config.json");
    testutil::write_file(config_path, config_json_for(cfg));
    ASSERT_EQ(run_cli("synth --config " + config_path), 0);
    ASSERT_EQ(run_cli("featurize --config " + config_path), 0);

    // strip one class out of features.csv
    std::ifstream in(cfg.features_path);
    std::string line, kept;
    bool first = true;
    while (std::getline(in, line)) {
        if (first || line.ends_with(",1")) kept += line + "\n";
        first = false;
    }
    in.close();
    testutil::write_file(cfg.features_path, kept);
    EXPECT_EQ(run_cli("select-train-eval --config " + config_path), 4);
}

}  // namespace
