#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace grace {

using NodeId = std::uint32_t;

// Undirected, unweighted graph over node ids 0..n-1, stored as sorted
// neighbor lists (CSR). Immutable after construction; self-loops and
// duplicate edges are dropped at build time.
class Graph {
public:
    Graph() = default;

    // Deduplicates, symmetrizes and drops self-loops. Ids >= num_nodes raise
    // InputError naming the offending edge index.
    static Graph build(std::span<const std::pair<NodeId, NodeId>> edges, std::size_t num_nodes);
    static Graph build(const std::vector<std::pair<NodeId, NodeId>>& edges, std::size_t num_nodes) {
        return build(std::span<const std::pair<NodeId, NodeId>>(edges), num_nodes);
    }

    std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const { return num_edges_; }

    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

    std::span<const NodeId> neighbors(NodeId v) const {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    bool has_edge(NodeId u, NodeId v) const;

    // Each undirected edge once, with u < v, in lexicographic order.
    std::vector<std::pair<NodeId, NodeId>> edge_list() const;

private:
    std::vector<std::size_t> offsets_;  // size num_nodes + 1
    std::vector<NodeId> adjacency_;     // sorted per node
    std::size_t num_edges_ = 0;
};

// Node-to-community assignment; labels are contiguous 0..num_communities-1.
struct Partition {
    std::vector<std::uint32_t> community_of;
    std::uint32_t num_communities = 0;
};

// 2 * |E| / |V|. Empty graph raises InputError.
double avg_degree(const Graph& g);

// Mean of per-node local clustering coefficients; nodes of degree < 2
// contribute 0.
double avg_clustering(const Graph& g);

// Pearson correlation of endpoint degrees over the edge list with both
// orientations. nullopt when the graph has no edges or endpoint-degree
// variance is zero (degree-regular graphs).
std::optional<double> assortativity(const Graph& g);

// Greedy modularity maximization: local moving from singletons, sweeps
// repeated until no node moves. Node processing order is shuffled by the
// seed; ties in gain are broken toward the lowest community id. Isolated
// nodes stay singletons; communities never span connected components.
Partition communities(const Graph& g, std::uint64_t seed);

// Modularity of a partition (test and diagnostics helper).
double modularity(const Graph& g, const Partition& p);

struct Subgraph {
    Graph graph;
    std::vector<NodeId> node_ids;  // new id -> old id, ascending

    // Old id -> new id; nullopt when the node is not in the subgraph.
    std::optional<NodeId> old_to_new(NodeId old_id) const;
};

// Induced subgraph on the given node set (deduplicated). Keeps exactly the
// edges with both endpoints in the set.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

}  // namespace grace
