#include <gtest/gtest.h>

#include <unistd.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "spamdet/node2vec.hpp"
#include "spamdet/numeric.hpp"
#include "spamdet/rng.hpp"

using namespace spamdet;

namespace {

// Two 10-cliques joined by a single edge.
SocialGraph barbell_graph() {
    std::vector<std::pair<std::string, std::string>> edges;
    auto id = [](int side, int i) { return (side == 0 ? "a" : "b") + std::to_string(i); };
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) edges.emplace_back(id(side, i), id(side, j));
    edges.emplace_back(id(0, 0), id(1, 0));
    return build_graph(edges);
}

TEST(TransitionWeight, ReturnStep) {
    const auto g = build_graph({{"a", "b"}, {"b", "c"}, {"a", "c"}});
    const WalkGraph wg(g);
    const auto a = *g.find("a"), b = *g.find("b");
    EXPECT_NEAR(transition_weight(a, b, a, wg, 0.3, 1.0), 10.0 / 3.0, 1e-12);
}

TEST(TransitionWeight, CommonNeighborStep) {
    const auto g = build_graph({{"a", "b"}, {"b", "c"}, {"a", "c"}});
    const WalkGraph wg(g);
    const auto a = *g.find("a"), b = *g.find("b"), c = *g.find("c");
    // c is adjacent to a (distance 1): weight 1 regardless of p/q
    EXPECT_DOUBLE_EQ(transition_weight(a, b, c, wg, 0.3, 2.0), 1.0);
}

TEST(TransitionWeight, OutwardStep) {
    const auto g = build_graph({{"a", "b"}, {"b", "c"}});
    const WalkGraph wg(g);
    const auto a = *g.find("a"), b = *g.find("b"), c = *g.find("c");
    EXPECT_DOUBLE_EQ(transition_weight(a, b, c, wg, 0.3, 1.0), 1.0);   // q = 1
    EXPECT_DOUBLE_EQ(transition_weight(a, b, c, wg, 0.3, 4.0), 0.25);  // q = 4
}

TEST(TransitionWeight, NonEdgeThrows) {
    const auto g = build_graph({{"a", "b"}, {"b", "c"}});
    const WalkGraph wg(g);
    EXPECT_THROW(transition_weight(*g.find("a"), *g.find("b"), *g.find("b"), wg, 1.0, 1.0),
                 NotAnEdgeError);
    EXPECT_THROW(transition_weight(*g.find("b"), *g.find("a"), *g.find("c"), wg, 1.0, 1.0),
                 NotAnEdgeError);
}

TEST(AliasTable, MatchesCategoricalProbabilities) {
    // chi-squared over 1e5 draws from a 4-outcome table; alpha = 0.001 with
    // 3 degrees of freedom rejects above 16.266
    const std::vector<double> weights{0.1, 0.2, 0.3, 0.4};
    const AliasTable table(weights);
    Rng rng(12345);
    constexpr int kDraws = 100000;
    std::array<int, 4> counts{};
    for (int i = 0; i < kDraws; ++i) ++counts[table.sample(rng)];
    double chi2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double expected = weights[k] * kDraws;
        const double diff = counts[k] - expected;
        chi2 += diff * diff / expected;
    }
    EXPECT_LT(chi2, 16.266);
}

TEST(GenerateWalks, TwoCycleAlternates) {
    const auto g = build_graph({{"a", "b"}, {"b", "a"}});
    Node2VecConfig cfg;
    cfg.seed = 1;
    const auto ws = generate_walks(g, cfg);
    ASSERT_EQ(ws.walks.size(), 2u * 10u);
    for (const auto& walk : ws.walks) {
        ASSERT_EQ(walk.size(), 25u);
        for (std::size_t i = 1; i < walk.size(); ++i) EXPECT_NE(walk[i], walk[i - 1]);
    }
}

TEST(GenerateWalks, IsolatedNodeYieldsLengthOneWalks) {
    const auto g = build_graph({{"a", "b"}, {"b", "a"}}, {"iso"});
    Node2VecConfig cfg;
    cfg.seed = 1;
    const auto ws = generate_walks(g, cfg);
    const auto iso = *g.find("iso");
    int iso_walks = 0;
    for (const auto& walk : ws.walks) {
        if (walk[0] == iso) {
            ++iso_walks;
            EXPECT_EQ(walk.size(), 1u);
        }
    }
    EXPECT_EQ(iso_walks, 10);
}

TEST(GenerateWalks, DeterministicAndValid) {
    const auto g = barbell_graph();
    Node2VecConfig cfg;
    cfg.seed = 42;
    const auto ws1 = generate_walks(g, cfg);
    const auto ws2 = generate_walks(g, cfg);
    EXPECT_EQ(ws1, ws2);

    const WalkGraph wg(g);
    for (const auto& walk : ws1.walks)
        for (std::size_t i = 1; i < walk.size(); ++i)
            EXPECT_TRUE(wg.adjacent(walk[i - 1], walk[i]));
}

TEST(TrainSkipgram, OutputShapeAndDeterminism) {
    const auto g = build_graph({{"a", "b"}});
    Node2VecConfig cfg;
    cfg.seed = 9;
    cfg.epochs = 2;
    const auto ws = generate_walks(g, cfg);
    const auto m1 = train_skipgram(ws, cfg, g.node_count());
    const auto m2 = train_skipgram(ws, cfg, g.node_count());
    EXPECT_EQ(m1.rows, 2u);
    EXPECT_EQ(m1.cols, 100u);
    EXPECT_EQ(m1, m2);
    for (const double v : m1.data) EXPECT_TRUE(std::isfinite(v));
}

TEST(TrainSkipgram, EmptyWalksThrows) {
    Node2VecConfig cfg;
    EXPECT_THROW(train_skipgram(WalkSet{}, cfg, 0), EmptyWalksError);
}

double mean_cosine(const EmbeddingMatrix& emb, const std::vector<std::size_t>& xs,
                   const std::vector<std::size_t>& ys, bool skip_equal) {
    double total = 0.0;
    int count = 0;
    for (const std::size_t x : xs) {
        for (const std::size_t y : ys) {
            if (skip_equal && x >= y) continue;
            total += cosine_similarity(emb.row(x), emb.row(y));
            ++count;
        }
    }
    return total / count;
}

TEST(TrainSkipgram, BarbellSeparatesCliquesAndLossFalls) {
    const auto g = barbell_graph();
    Node2VecConfig cfg;
    cfg.seed = 42;
    SkipgramStats stats;
    const auto emb = embed(g, cfg, &stats);

    std::vector<std::size_t> left, right;
    for (NodeIndex v = 0; v < g.node_count(); ++v)
        (g.ids[v][0] == 'a' ? left : right).push_back(v);

    const double intra =
        (mean_cosine(emb, left, left, true) + mean_cosine(emb, right, right, true)) / 2.0;
    const double inter = mean_cosine(emb, left, right, false);
    EXPECT_GE(intra - inter, 0.2);

    ASSERT_EQ(stats.epoch_loss.size(), static_cast<std::size_t>(cfg.epochs));
    EXPECT_LT(stats.epoch_loss.back(), stats.epoch_loss.front());
}

TEST(Embed, CliqueVersusFarPair) {
    // 3-clique {a,b,c} plus the far pair {x,y}: clique members end up
    // pairwise more similar to each other than to the pair.
    const auto g = build_graph(
        {{"a", "b"}, {"b", "c"}, {"c", "a"}, {"x", "y"}});
    Node2VecConfig cfg;
    cfg.seed = 4;
    const auto emb = embed(g, cfg);
    const auto a = *g.find("a"), b = *g.find("b"), c = *g.find("c");
    const auto x = *g.find("x");
    const double intra = (cosine_similarity(emb.row(a), emb.row(b)) +
                          cosine_similarity(emb.row(a), emb.row(c)) +
                          cosine_similarity(emb.row(b), emb.row(c))) /
                         3.0;
    const double cross = (cosine_similarity(emb.row(a), emb.row(x)) +
                          cosine_similarity(emb.row(b), emb.row(x)) +
                          cosine_similarity(emb.row(c), emb.row(x))) /
                         3.0;
    EXPECT_GT(intra, cross);
}

TEST(EmbeddingsFile, RoundTrip) {
    const auto g = build_graph({{"a", "b"}, {"b", "a"}});
    Node2VecConfig cfg;
    cfg.seed = 3;
    cfg.dimensions = 8;
    cfg.epochs = 1;
    const auto emb = embed(g, cfg);
    const std::string path =
        (std::filesystem::temp_directory_path() /
         ("spamdet_emb_" + std::to_string(::getpid()) + ".txt"))
            .string();
    write_embeddings(path, g.ids, emb);
    const auto loaded = read_embeddings(path);
    EXPECT_EQ(loaded.ids, g.ids);
    EXPECT_EQ(loaded.matrix, emb);  // 17 significant digits round-trip exactly
    std::filesystem::remove(path);
}

}  // namespace
