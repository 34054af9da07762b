#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "spamdet/error.hpp"
#include "spamdet/graph.hpp"
#include "spamdet/numeric.hpp"

namespace spamdet {

/// value(v) = (in_degree + out_degree) / (n - 1).
inline std::vector<double> degree_centrality(const SocialGraph& g) {
    const std::size_t n = g.node_count();
    if (n < 2) throw GraphTooSmallError(2, n);
    std::vector<double> out(n);
    for (NodeIndex v = 0; v < n; ++v)
        out[v] = static_cast<double>(g.degree(v)) / static_cast<double>(n - 1);
    return out;
}

/// Brandes' algorithm over unweighted directed shortest paths. Endpoints are
/// excluded; scores are normalized by (n-1)(n-2).
inline std::vector<double> betweenness_centrality(const SocialGraph& g) {
    const std::size_t n = g.node_count();
    if (n < 3) throw GraphTooSmallError(3, n);

    std::vector<double> centrality(n, 0.0);
    std::vector<std::int64_t> sigma(n);
    std::vector<int> dist(n);
    std::vector<std::vector<NodeIndex>> preds(n);
    std::vector<NodeIndex> order;
    std::vector<double> delta(n);
    std::deque<NodeIndex> queue;

    for (NodeIndex s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0);
        std::fill(dist.begin(), dist.end(), -1);
        for (auto& p : preds) p.clear();
        order.clear();

        sigma[s] = 1;
        dist[s] = 0;
        queue.push_back(s);
        while (!queue.empty()) {
            const NodeIndex v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (const NodeIndex w : g.out_adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }

        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeIndex w = *it;
            for (const NodeIndex v : preds[w]) {
                delta[v] += static_cast<double>(sigma[v]) / static_cast<double>(sigma[w]) *
                            (1.0 + delta[w]);
            }
            if (w != s) centrality[w] += delta[w];
        }
    }

    const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (double& c : centrality) c /= norm;
    return centrality;
}

enum class EigenDirection { In, Out };

struct EigenOptions {
    double tol = 1e-8;
    int max_iters = 1000;
};

/// Power iteration for eigenvector centrality. In: a node's score sums the
/// scores of its followers (x <- A^T x). Out is the same iteration on the
/// reversed orientation, so eigenvector_centrality(g, Out) ==
/// eigenvector_centrality(reverse(g), In) bit for bit. Stalling structures
/// (no recurrent component feeding the scores) raise NotConvergedError
/// rather than silently degrading the feature.
inline std::vector<double> eigenvector_centrality(const SocialGraph& g, EigenDirection dir,
                                                  const EigenOptions& opt = {}) {
    const std::size_t n = g.node_count();
    if (n == 0 || g.edge_count() == 0) throw GraphTooSmallError(1, 0);

    const auto& adj = dir == EigenDirection::In ? g.in_adj : g.out_adj;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        for (NodeIndex v = 0; v < n; ++v) {
            double s = 0.0;
            for (const NodeIndex u : adj[v]) s += x[u];
            y[v] = s;
        }
        const double norm = l2_norm(y);
        if (norm < 1e-300) throw NotConvergedError(opt.max_iters);
        double max_change = 0.0;
        for (NodeIndex v = 0; v < n; ++v) {
            y[v] /= norm;
            max_change = std::max(max_change, std::abs(y[v] - x[v]));
        }
        x = y;
        if (max_change < opt.tol) return x;
    }
    throw NotConvergedError(opt.max_iters);
}

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iters = 200;
};

/// PageRank with uniform teleport; dangling-node mass is spread uniformly.
/// Converged when the L1 change drops below tol. Scores sum to 1.
inline std::vector<double> pagerank(const SocialGraph& g, const PageRankOptions& opt = {}) {
    const std::size_t n = g.node_count();
    if (n == 0) throw GraphTooSmallError(1, 0);

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, inv_n);
    std::vector<double> y(n);

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        double dangling = 0.0;
        for (NodeIndex v = 0; v < n; ++v)
            if (g.out_adj[v].empty()) dangling += x[v];

        const double base = (1.0 - opt.damping) * inv_n + opt.damping * dangling * inv_n;
        for (NodeIndex v = 0; v < n; ++v) {
            double s = 0.0;
            for (const NodeIndex u : g.in_adj[v])
                s += x[u] / static_cast<double>(g.out_adj[u].size());
            y[v] = base + opt.damping * s;
        }

        double change = 0.0;
        for (NodeIndex v = 0; v < n; ++v) change += std::abs(y[v] - x[v]);
        x.swap(y);
        if (change < opt.tol) return x;
    }
    throw NotConvergedError(opt.max_iters);
}

struct CentralityTable {
    std::vector<double> degree;
    std::vector<double> betweenness;
    std::vector<double> in_eig;
    std::vector<double> out_eig;
    std::vector<double> pagerank;
};

inline CentralityTable compute_centralities(const SocialGraph& g, const EigenOptions& eig_opt = {},
                                            const PageRankOptions& pr_opt = {}) {
    CentralityTable t;
    t.degree = degree_centrality(g);
    t.betweenness = betweenness_centrality(g);
    t.in_eig = eigenvector_centrality(g, EigenDirection::In, eig_opt);
    t.out_eig = eigenvector_centrality(g, EigenDirection::Out, eig_opt);
    t.pagerank = pagerank(g, pr_opt);
    return t;
}

inline void write_centralities_csv(const std::string& path, const SocialGraph& g,
                                   const CentralityTable& t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + path);
    out << "id,degree,betweenness,in_eig,out_eig,pagerank\n";
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        out << g.ids[v] << ',' << format_g17(t.degree[v]) << ',' << format_g17(t.betweenness[v])
            << ',' << format_g17(t.in_eig[v]) << ',' << format_g17(t.out_eig[v]) << ','
            << format_g17(t.pagerank[v]) << '\n';
    }
}

/// Reads a centralities CSV back into per-id rows (for artifact reuse).
inline std::map<std::string, std::array<double, 5>> read_centralities_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::map<std::string, std::array<double, 5>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) continue;  // header
        std::array<double, 5> vals{};
        std::size_t pos = line.find(',');
        if (pos == std::string::npos) throw MalformedLineError(line_no, "expected 6 fields");
        const std::string id = line.substr(0, pos);
        std::size_t start = pos + 1;
        for (int k = 0; k < 5; ++k) {
            std::size_t end = k == 4 ? line.size() : line.find(',', start);
            if (end == std::string::npos) throw MalformedLineError(line_no, "expected 6 fields");
            bool ok = false;
            vals[k] = parse_double(line.substr(start, end - start), ok);
            if (!ok) throw MalformedLineError(line_no, "bad number");
            start = end + 1;
        }
        rows[id] = vals;
    }
    return rows;
}

}  // namespace spamdet
