#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "spamdet/error.hpp"
#include "spamdet/graph.hpp"
#include "spamdet/numeric.hpp"
#include "spamdet/rng.hpp"

namespace spamdet {

struct Node2VecConfig {
    int dimensions = 100;
    int walk_length = 25;
    int walks_per_node = 10;
    double return_p = 0.3;
    double in_out_q = 1.0;
    int window = 10;
    int negatives_per_positive = 5;
    int epochs = 5;
    double initial_lr = 0.025;
    std::uint64_t seed = 0;

    void validate() const {
        if (dimensions < 1) throw ConfigInvalidError("node2vec: dimensions must be >= 1");
        if (walk_length < 2) throw ConfigInvalidError("node2vec: walk_length must be >= 2");
        if (walks_per_node < 1) throw ConfigInvalidError("node2vec: walks_per_node must be >= 1");
        if (!(return_p > 0.0)) throw ConfigInvalidError("node2vec: return_p must be > 0");
        if (!(in_out_q > 0.0)) throw ConfigInvalidError("node2vec: in_out_q must be > 0");
        if (window < 1) throw ConfigInvalidError("node2vec: window must be >= 1");
        if (negatives_per_positive < 1)
            throw ConfigInvalidError("node2vec: negatives_per_positive must be >= 1");
        if (epochs < 1) throw ConfigInvalidError("node2vec: epochs must be >= 1");
        if (!(initial_lr > 0.0)) throw ConfigInvalidError("node2vec: initial_lr must be > 0");
    }
};

struct WalkSet {
    std::vector<std::vector<NodeIndex>> walks;

    bool operator==(const WalkSet&) const = default;
};

struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

    bool operator==(const EmbeddingMatrix&) const = default;
};

/// Undirected view of the follower graph used for walking. Directed walks
/// die at accounts that follow nobody; the neighborhood structure is what
/// matters, so edges are walkable both ways.
struct WalkGraph {
    std::vector<std::vector<NodeIndex>> adj;  // sorted

    explicit WalkGraph(const SocialGraph& g) : adj(undirected_adjacency(g)) {}

    bool adjacent(NodeIndex a, NodeIndex b) const {
        return std::binary_search(adj[a].begin(), adj[a].end(), b);
    }
};

/// Second-order walk bias: 1/p to return to the previous node, 1 to move to
/// a common neighbor, 1/q to move outward. Unnormalized.
inline double transition_weight(NodeIndex prev, NodeIndex cur, NodeIndex next,
                                const WalkGraph& wg, double p, double q) {
    if (!wg.adjacent(cur, next)) throw NotAnEdgeError();
    if (next == prev) return 1.0 / p;
    if (wg.adjacent(prev, next)) return 1.0;
    return 1.0 / q;
}

inline double transition_weight(NodeIndex prev, NodeIndex cur, NodeIndex next,
                                const SocialGraph& g, double p, double q) {
    return transition_weight(prev, cur, next, WalkGraph(g), p, q);
}

namespace detail {

constexpr std::uint64_t kWalkStreamTag = 0x77616c6b;   // per-walk RNG streams
constexpr std::uint64_t kInitStreamTag = 0x696e6974;   // embedding init
constexpr std::uint64_t kTrainStreamTag = 0x74726169;  // per-epoch SGD streams
constexpr std::uint64_t kEvalStreamTag = 0x6576616c;   // fixed loss-eval stream

/// Alias tables over adj[cur] for every directed walk step (prev -> cur),
/// indexed by the CSR offset of prev's edge to cur.
struct WalkTables {
    std::vector<std::size_t> offsets;      // per node: start into edge_tables
    std::vector<AliasTable> edge_tables;   // one per (prev, cur) pair

    WalkTables(const WalkGraph& wg, double p, double q) {
        const std::size_t n = wg.adj.size();
        offsets.assign(n + 1, 0);
        for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + wg.adj[v].size();
        edge_tables.resize(offsets[n]);
        std::vector<double> weights;
        for (NodeIndex prev = 0; prev < n; ++prev) {
            for (std::size_t e = 0; e < wg.adj[prev].size(); ++e) {
                const NodeIndex cur = wg.adj[prev][e];
                weights.clear();
                weights.reserve(wg.adj[cur].size());
                for (const NodeIndex next : wg.adj[cur]) {
                    if (next == prev) {
                        weights.push_back(1.0 / p);
                    } else if (std::binary_search(wg.adj[prev].begin(), wg.adj[prev].end(),
                                                  next)) {
                        weights.push_back(1.0);
                    } else {
                        weights.push_back(1.0 / q);
                    }
                }
                edge_tables[offsets[prev] + e].build(weights);
            }
        }
    }

    const AliasTable& table(const WalkGraph& wg, NodeIndex prev, NodeIndex cur) const {
        const auto& nbrs = wg.adj[prev];
        const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), cur);
        return edge_tables[offsets[prev] + static_cast<std::size_t>(it - nbrs.begin())];
    }
};

}  // namespace detail

/// walks_per_node biased walks from every node. The first step is uniform
/// over neighbors; later steps sample the second-order bias via alias
/// tables. Each walk draws from its own (seed, node, walk_index) stream, so
/// the result is identical no matter how walks are scheduled.
inline WalkSet generate_walks(const SocialGraph& g, const Node2VecConfig& cfg) {
    cfg.validate();
    const WalkGraph wg(g);
    const detail::WalkTables tables(wg, cfg.return_p, cfg.in_out_q);

    WalkSet ws;
    ws.walks.reserve(g.node_count() * static_cast<std::size_t>(cfg.walks_per_node));
    for (NodeIndex start = 0; start < g.node_count(); ++start) {
        for (int w = 0; w < cfg.walks_per_node; ++w) {
            Rng rng(derive_seed(cfg.seed ^ detail::kWalkStreamTag, start,
                                static_cast<std::uint64_t>(w)));
            std::vector<NodeIndex> walk;
            walk.reserve(static_cast<std::size_t>(cfg.walk_length));
            walk.push_back(start);
            if (!wg.adj[start].empty()) {
                walk.push_back(wg.adj[start][rng.next_index(wg.adj[start].size())]);
                while (walk.size() < static_cast<std::size_t>(cfg.walk_length)) {
                    const NodeIndex prev = walk[walk.size() - 2];
                    const NodeIndex cur = walk.back();
                    const AliasTable& t = tables.table(wg, prev, cur);
                    walk.push_back(wg.adj[cur][t.sample(rng)]);
                }
            }
            ws.walks.push_back(std::move(walk));
        }
    }
    return ws;
}

struct SkipgramStats {
    std::vector<double> epoch_loss;  // mean negative-sampling objective after each epoch
};

/// Skip-gram with negative sampling over (center, context) pairs within the
/// window. Negatives follow the frequency^0.75 distribution; the learning
/// rate decays linearly from initial_lr to initial_lr/100 across all pairs x
/// epochs. Arithmetic is float32 internally; the returned center vectors are
/// widened to doubles.
inline EmbeddingMatrix train_skipgram(const WalkSet& walks, const Node2VecConfig& cfg,
                                      std::size_t node_count, SkipgramStats* stats = nullptr) {
    cfg.validate();
    if (walks.walks.empty()) throw EmptyWalksError();

    const std::size_t dim = static_cast<std::size_t>(cfg.dimensions);

    // Unigram table for negatives.
    std::vector<double> freq(node_count, 0.0);
    std::size_t total_pairs = 0;
    for (const auto& walk : walks.walks) {
        for (std::size_t i = 0; i < walk.size(); ++i) {
            freq[walk[i]] += 1.0;
            const std::size_t lo = i >= static_cast<std::size_t>(cfg.window)
                                       ? i - static_cast<std::size_t>(cfg.window)
                                       : 0;
            const std::size_t hi = std::min(walk.size() - 1, i + static_cast<std::size_t>(cfg.window));
            total_pairs += hi - lo;  // window minus the center itself
        }
    }
    if (total_pairs == 0) {
        // Walks exist but provide no context pairs (all isolated nodes):
        // return the deterministic initialization.
        total_pairs = 1;
    }
    std::vector<double> neg_weights(node_count);
    for (std::size_t v = 0; v < node_count; ++v) neg_weights[v] = std::pow(freq[v], 0.75);
    const AliasTable neg_table(neg_weights);

    // Center vectors start uniform in [-0.5/dim, 0.5/dim]; context vectors at 0.
    std::vector<float> in_vecs(node_count * dim);
    std::vector<float> out_vecs(node_count * dim, 0.0f);
    {
        Rng rng(derive_seed(cfg.seed ^ detail::kInitStreamTag, 0));
        const double scale = 1.0 / static_cast<double>(dim);
        for (auto& v : in_vecs)
            v = static_cast<float>((rng.next_double() - 0.5) * scale);
    }

    const double lr_start = cfg.initial_lr;
    const double lr_end = cfg.initial_lr / 100.0;
    const std::size_t total_updates =
        total_pairs * static_cast<std::size_t>(cfg.epochs);
    std::size_t seen_pairs = 0;

    std::vector<float> grad_acc(dim);

    auto process_pair = [&](NodeIndex center, NodeIndex context, Rng& rng, double lr,
                            bool update, double* loss_out) {
        float* v = in_vecs.data() + static_cast<std::size_t>(center) * dim;
        std::fill(grad_acc.begin(), grad_acc.end(), 0.0f);
        double loss = 0.0;
        for (int k = 0; k <= cfg.negatives_per_positive; ++k) {
            NodeIndex target;
            float label;
            if (k == 0) {
                target = context;
                label = 1.0f;
            } else {
                target = static_cast<NodeIndex>(neg_table.sample(rng));
                if (target == context) continue;
                label = 0.0f;
            }
            float* u = out_vecs.data() + static_cast<std::size_t>(target) * dim;
            float dot_vu = 0.0f;
            for (std::size_t d = 0; d < dim; ++d) dot_vu += v[d] * u[d];
            if (loss_out) {
                loss += label == 1.0f ? log_sigmoid_neg(dot_vu) : log_sigmoid_neg(-dot_vu);
            }
            if (update) {
                const float grad = (label - static_cast<float>(sigmoid(dot_vu))) *
                                   static_cast<float>(lr);
                for (std::size_t d = 0; d < dim; ++d) {
                    grad_acc[d] += grad * u[d];
                    u[d] += grad * v[d];
                }
            }
        }
        if (update)
            for (std::size_t d = 0; d < dim; ++d) v[d] += grad_acc[d];
        if (loss_out) *loss_out += loss;
    };

    auto for_each_pair = [&](auto&& fn) {
        for (const auto& walk : walks.walks) {
            for (std::size_t i = 0; i < walk.size(); ++i) {
                const std::size_t lo = i >= static_cast<std::size_t>(cfg.window)
                                           ? i - static_cast<std::size_t>(cfg.window)
                                           : 0;
                const std::size_t hi =
                    std::min(walk.size() - 1, i + static_cast<std::size_t>(cfg.window));
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    fn(walk[i], walk[j]);
                }
            }
        }
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed ^ detail::kTrainStreamTag,
                            static_cast<std::uint64_t>(epoch)));
        for_each_pair([&](NodeIndex center, NodeIndex context) {
            const double progress =
                static_cast<double>(seen_pairs) /
                static_cast<double>(std::max<std::size_t>(total_updates - 1, 1));
            const double lr = lr_start + (lr_end - lr_start) * progress;
            process_pair(center, context, rng, lr, /*update=*/true, nullptr);
            ++seen_pairs;
        });

        for (const float x : in_vecs)
            if (!std::isfinite(x)) throw Error("skip-gram produced a non-finite center vector");
        for (const float x : out_vecs)
            if (!std::isfinite(x)) throw Error("skip-gram produced a non-finite context vector");

        if (stats) {
            // Fixed evaluation stream: every epoch scores the same draws, so
            // per-epoch losses are comparable.
            Rng eval_rng(derive_seed(cfg.seed ^ detail::kEvalStreamTag, 0));
            double loss = 0.0;
            std::size_t pairs = 0;
            for_each_pair([&](NodeIndex center, NodeIndex context) {
                process_pair(center, context, eval_rng, 0.0, /*update=*/false, &loss);
                ++pairs;
            });
            stats->epoch_loss.push_back(pairs == 0 ? 0.0 : loss / static_cast<double>(pairs));
        }
    }

    EmbeddingMatrix emb;
    emb.rows = node_count;
    emb.cols = dim;
    emb.data.resize(node_count * dim);
    for (std::size_t i = 0; i < emb.data.size(); ++i)
        emb.data[i] = static_cast<double>(in_vecs[i]);
    return emb;
}

inline EmbeddingMatrix embed(const SocialGraph& g, const Node2VecConfig& cfg,
                             SkipgramStats* stats = nullptr) {
    const WalkSet walks = generate_walks(g, cfg);
    return train_skipgram(walks, cfg, g.node_count(), stats);
}

/// Text format: `<node_count> <dim>` then one `<id> <v1> ... <vdim>` line per
/// node, 17-significant-digit values.
inline void write_embeddings(const std::string& path, const std::vector<std::string>& ids,
                             const EmbeddingMatrix& emb) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    out << emb.rows << ' ' << emb.cols << '\n';
    for (std::size_t i = 0; i < emb.rows; ++i) {
        out << ids[i];
        for (const double v : emb.row(i)) out << ' ' << format_g17(v);
        out << '\n';
    }
}

struct NodeEmbeddings {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> index_of;
    EmbeddingMatrix matrix;
};

inline NodeEmbeddings read_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    NodeEmbeddings emb;
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw MalformedLineError(1, "expected `<node_count> <dim>`");
    emb.matrix.rows = rows;
    emb.matrix.cols = cols;
    emb.matrix.data.resize(rows * cols);
    emb.ids.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!(in >> emb.ids[i])) throw MalformedLineError(i + 2, "missing id");
        for (std::size_t d = 0; d < cols; ++d) {
            if (!(in >> emb.matrix.data[i * cols + d]))
                throw MalformedLineError(i + 2, "missing value");
        }
        emb.index_of.emplace(emb.ids[i], i);
    }
    return emb;
}

}  // namespace spamdet
