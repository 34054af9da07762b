// spamdet: spam-account detection pipeline over user metadata, tweets, and
// the follower graph.
//
// Subcommands:
//   synth              generate a labeled synthetic dataset
//   featurize          dataset files -> features.csv, centralities.csv, embeddings.txt
//   select-train-eval  feature selection, CV grid search, final model + metrics
//   score              score users through a trained model
//
// Exit codes: 0 ok, 2 input/config error, 3 numeric non-convergence,
// 4 degenerate labels, 5 scoring reference error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spamdet/pipeline.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitDegenerateLabels = 4;
constexpr int kExitScoreReference = 5;

struct GlobalOptions {
    std::string config_path;
    bool paper_mode = false;
    bool seed_set = false;
    std::uint64_t seed = 0;
};

spamdet::PipelineConfig load_config(const GlobalOptions& opts) {
    spamdet::PipelineConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = spamdet::load_pipeline_config(opts.config_path);
    } else {
        cfg.resolve_paths();
    }
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.paper_mode) cfg.apply_paper_mode();
    return cfg;
}

int run_command(const GlobalOptions& opts, int (*body)(spamdet::PipelineConfig)) {
    try {
        return body(load_config(opts));
    } catch (const spamdet::NotConvergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const spamdet::NoLabelsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerateLabels;
    } catch (const spamdet::SingleClassError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerateLabels;
    } catch (const spamdet::DegenerateEvalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerateLabels;
    } catch (const spamdet::InsufficientClassCountError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerateLabels;
    } catch (const spamdet::ScoreReferenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitScoreReference;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spam-account detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "pipeline config file (JSON)");
    app.add_flag("--paper-mode", opts.paper_mode,
                 "use the reported operating point (max_depth 15, k 15, threshold 0.1)");
    auto* seed_opt = app.add_option("--seed", opts.seed, "override the pipeline seed");

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    auto* featurize = app.add_subcommand("featurize", "compute features, centralities, embeddings");
    auto* traineval =
        app.add_subcommand("select-train-eval", "select features, cross-validate, train, evaluate");
    auto* score = app.add_subcommand("score", "score users with a trained model");

    std::vector<std::string> score_ids;
    std::string ids_file;
    score->add_option("ids", score_ids, "user ids to score");
    score->add_option("--ids-file", ids_file, "file with one user id per line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }
    opts.seed_set = seed_opt->count() > 0;

    if (synth->parsed()) {
        return run_command(opts, [](spamdet::PipelineConfig cfg) {
            spamdet::run_synth(std::move(cfg));
            return 0;
        });
    }
    if (featurize->parsed()) {
        return run_command(opts, [](spamdet::PipelineConfig cfg) {
            spamdet::run_featurize(std::move(cfg));
            return 0;
        });
    }
    if (traineval->parsed()) {
        return run_command(opts, [](spamdet::PipelineConfig cfg) {
            const auto res = spamdet::run_select_train_eval(std::move(cfg));
            std::cout << "cv average_accuracy " << res.grid.best_score << " (lr "
                      << res.grid.best.learning_rate << ", depth " << res.grid.best.max_depth
                      << "); vector length " << res.assembled.rows.cols << '\n';
            return 0;
        });
    }
    if (score->parsed()) {
        if (!ids_file.empty()) {
            std::ifstream in(ids_file);
            if (!in) {
                std::cerr << "error: cannot open " << ids_file << '\n';
                return kExitInput;
            }
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (!line.empty()) score_ids.push_back(line);
            }
        }
        if (score_ids.empty()) {
            std::cerr << "error: no user ids to score\n";
            return kExitInput;
        }
        try {
            spamdet::run_score(load_config(opts), score_ids);
            return 0;
        } catch (const spamdet::ScoreReferenceError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitScoreReference;
        } catch (const spamdet::NotConvergedError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitNotConverged;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitInput;
        }
    }
    return kExitInput;
}
