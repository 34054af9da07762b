#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spamdet/error.hpp"

namespace spamdet {

using NodeIndex = std::uint32_t;

/// Directed follower graph. Edge a->b means "a follows b". Node indices are
/// assigned in lexicographic id order, and adjacency lists are kept sorted,
/// so every downstream computation is order-deterministic.
struct SocialGraph {
    std::vector<std::string> ids;  // index -> id, lexicographically sorted
    std::unordered_map<std::string, NodeIndex> index_of;
    std::vector<std::vector<NodeIndex>> out_adj;
    std::vector<std::vector<NodeIndex>> in_adj;

    std::size_t node_count() const { return ids.size(); }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& adj : out_adj) n += adj.size();
        return n;
    }

    std::optional<NodeIndex> find(const std::string& id) const {
        const auto it = index_of.find(id);
        if (it == index_of.end()) return std::nullopt;
        return it->second;
    }

    std::size_t degree(NodeIndex v) const { return out_adj[v].size() + in_adj[v].size(); }
};

/// Builds the graph from directed (follower, followed) pairs. `extra_nodes`
/// adds ids that must exist as (possibly isolated) nodes, e.g. labeled users
/// with no observed edges. Duplicate edges collapse; self-loops are dropped
/// (the parser has already rejected them in untrusted input).
inline SocialGraph build_graph(const std::vector<std::pair<std::string, std::string>>& edges,
                               const std::vector<std::string>& extra_nodes = {}) {
    SocialGraph g;
    g.ids.reserve(edges.size() * 2 + extra_nodes.size());
    for (const auto& [a, b] : edges) {
        g.ids.push_back(a);
        g.ids.push_back(b);
    }
    for (const auto& id : extra_nodes) g.ids.push_back(id);
    std::sort(g.ids.begin(), g.ids.end());
    g.ids.erase(std::unique(g.ids.begin(), g.ids.end()), g.ids.end());

    g.index_of.reserve(g.ids.size());
    for (NodeIndex i = 0; i < g.ids.size(); ++i) g.index_of.emplace(g.ids[i], i);

    g.out_adj.assign(g.ids.size(), {});
    g.in_adj.assign(g.ids.size(), {});
    for (const auto& [a, b] : edges) {
        if (a == b) continue;
        const NodeIndex u = g.index_of.at(a);
        const NodeIndex v = g.index_of.at(b);
        g.out_adj[u].push_back(v);
        g.in_adj[v].push_back(u);
    }
    for (auto& adj : g.out_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (auto& adj : g.in_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return g;
}

/// Same nodes, every edge flipped.
inline SocialGraph reverse(const SocialGraph& g) {
    SocialGraph r;
    r.ids = g.ids;
    r.index_of = g.index_of;
    r.out_adj = g.in_adj;
    r.in_adj = g.out_adj;
    return r;
}

/// Undirected neighbor lists (union of in- and out-neighbors), sorted.
inline std::vector<std::vector<NodeIndex>> undirected_adjacency(const SocialGraph& g) {
    std::vector<std::vector<NodeIndex>> adj(g.node_count());
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
        auto& nbrs = adj[v];
        nbrs.reserve(g.out_adj[v].size() + g.in_adj[v].size());
        std::merge(g.out_adj[v].begin(), g.out_adj[v].end(), g.in_adj[v].begin(),
                   g.in_adj[v].end(), std::back_inserter(nbrs));
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return adj;
}

}  // namespace spamdet
