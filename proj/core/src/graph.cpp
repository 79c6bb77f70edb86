#include "grace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grace/errors.hpp"
#include "grace/rng.hpp"

namespace grace {

Graph Graph::build(std::span<const std::pair<NodeId, NodeId>> edges, std::size_t num_nodes) {
    std::vector<std::pair<NodeId, NodeId>> cleaned;
    cleaned.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [u, v] = edges[i];
        if (u >= num_nodes || v >= num_nodes) {
            throw InputError("edge " + std::to_string(i) + " (" + std::to_string(u) + "," +
                             std::to_string(v) + ") references a node id >= " +
                             std::to_string(num_nodes));
        }
        if (u == v) continue;  // self-loop
        cleaned.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(cleaned.begin(), cleaned.end());
    cleaned.erase(std::unique(cleaned.begin(), cleaned.end()), cleaned.end());

    Graph g;
    g.num_edges_ = cleaned.size();
    std::vector<std::size_t> deg(num_nodes, 0);
    for (const auto& [u, v] : cleaned) {
        ++deg[u];
        ++deg[v];
    }
    g.offsets_.assign(num_nodes + 1, 0);
    for (std::size_t v = 0; v < num_nodes; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
    g.adjacency_.resize(2 * cleaned.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : cleaned) {
        g.adjacency_[cursor[u]++] = v;
        g.adjacency_[cursor[v]++] = u;
    }
    for (std::size_t v = 0; v < num_nodes; ++v) {
        std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                  g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]));
    }
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    const auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edge_list() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(num_edges_);
    for (NodeId u = 0; u < num_nodes(); ++u) {
        for (NodeId v : neighbors(u)) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

double avg_degree(const Graph& g) {
    if (g.num_nodes() == 0) throw InputError("average degree of an empty graph is undefined");
    return 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
}

double avg_clustering(const Graph& g) {
    const std::size_t n = g.num_nodes();
    if (n == 0) throw InputError("average clustering of an empty graph is undefined");
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const auto nbrs = g.neighbors(v);
        const std::size_t d = nbrs.size();
        if (d < 2) continue;  // contributes 0
        // Links among neighbors, counted once per unordered pair.
        std::size_t links = 0;
        for (std::size_t i = 0; i + 1 < d; ++i) {
            const auto wi = g.neighbors(nbrs[i]);
            for (std::size_t j = i + 1; j < d; ++j) {
                if (std::binary_search(wi.begin(), wi.end(), nbrs[j])) ++links;
            }
        }
        total += 2.0 * static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1));
    }
    return total / static_cast<double>(n);
}

std::optional<double> assortativity(const Graph& g) {
    if (g.num_edges() == 0) return std::nullopt;
    // Both orientations of every edge; x and y then share the same marginal.
    double sx = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = 2.0 * static_cast<double>(g.num_edges());
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        const double du = static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u)) {
            const double dv = static_cast<double>(g.degree(v));
            sx += du;
            sxx += du * du;
            sxy += du * dv;
        }
    }
    const double mean = sx / m;
    const double var = sxx / m - mean * mean;
    if (var <= 0.0) return std::nullopt;  // degree-regular
    const double cov = sxy / m - mean * mean;
    return cov / var;
}

namespace {

// Local-moving state for greedy modularity maximization.
struct MovingState {
    std::vector<std::uint32_t> community;  // node -> community id
    std::vector<double> tot_degree;        // community -> sum of degrees
};

}  // namespace

Partition communities(const Graph& g, std::uint64_t seed) {
    const std::size_t n = g.num_nodes();
    Partition out;
    out.community_of.resize(n);
    if (n == 0) return out;
    const double m = static_cast<double>(g.num_edges());
    if (m == 0.0) {
        // Every node a singleton.
        for (std::size_t v = 0; v < n; ++v) out.community_of[v] = static_cast<std::uint32_t>(v);
        out.num_communities = static_cast<std::uint32_t>(n);
        return out;
    }

    MovingState st;
    st.community.resize(n);
    st.tot_degree.assign(n, 0.0);
    for (NodeId v = 0; v < n; ++v) {
        st.community[v] = v;
        st.tot_degree[v] = static_cast<double>(g.degree(v));
    }

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    // Gain of inserting node v (degree k) into community c with k_vc edges
    // into c: k_vc/m - tot(c)*k/(2m^2). Removal is the negated insertion
    // into the node's community minus itself.
    std::vector<double> edges_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    bool moved = true;
    while (moved) {
        moved = false;
        for (NodeId v : order) {
            const double k = static_cast<double>(g.degree(v));
            if (k == 0.0) continue;  // isolated nodes stay singletons
            const std::uint32_t own = st.community[v];
            touched.clear();
            for (NodeId u : g.neighbors(v)) {
                const std::uint32_t c = st.community[u];
                if (edges_to[c] == 0.0) touched.push_back(c);
                edges_to[c] += 1.0;
            }
            const double remove_gain =
                -(edges_to[own] / m - (st.tot_degree[own] - k) * k / (2.0 * m * m));
            std::uint32_t best = own;
            double best_gain = 0.0;  // gain of staying put
            // Ascending candidate order + strict improvement = equal gains
            // resolve to the lowest community id.
            std::sort(touched.begin(), touched.end());
            for (std::uint32_t c : touched) {
                if (c == own) continue;
                const double gain =
                    remove_gain + edges_to[c] / m - st.tot_degree[c] * k / (2.0 * m * m);
                if (gain > best_gain + 1e-12) {
                    best = c;
                    best_gain = gain;
                }
            }
            for (std::uint32_t c : touched) edges_to[c] = 0.0;
            if (best != own) {
                st.tot_degree[own] -= k;
                st.tot_degree[best] += k;
                st.community[v] = best;
                moved = true;
            }
        }
    }

    // Relabel contiguously in order of first appearance by node id.
    std::vector<std::uint32_t> relabel(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint32_t c = st.community[v];
        if (relabel[c] == UINT32_MAX) relabel[c] = next++;
        out.community_of[v] = relabel[c];
    }
    out.num_communities = next;
    return out;
}

double modularity(const Graph& g, const Partition& p) {
    const double m = static_cast<double>(g.num_edges());
    if (m == 0.0) return 0.0;
    std::vector<double> inside(p.num_communities, 0.0);
    std::vector<double> tot(p.num_communities, 0.0);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        tot[p.community_of[u]] += static_cast<double>(g.degree(u));
        for (NodeId v : g.neighbors(u)) {
            if (p.community_of[u] == p.community_of[v]) inside[p.community_of[u]] += 1.0;
        }
    }
    double q = 0.0;
    for (std::uint32_t c = 0; c < p.num_communities; ++c) {
        q += inside[c] / (2.0 * m) - (tot[c] / (2.0 * m)) * (tot[c] / (2.0 * m));
    }
    return q;
}

std::optional<NodeId> Subgraph::old_to_new(NodeId old_id) const {
    const auto it = std::lower_bound(node_ids.begin(), node_ids.end(), old_id);
    if (it == node_ids.end() || *it != old_id) return std::nullopt;
    return static_cast<NodeId>(it - node_ids.begin());
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
    Subgraph sub;
    sub.node_ids.assign(nodes.begin(), nodes.end());
    std::sort(sub.node_ids.begin(), sub.node_ids.end());
    sub.node_ids.erase(std::unique(sub.node_ids.begin(), sub.node_ids.end()), sub.node_ids.end());
    for (NodeId v : sub.node_ids) {
        if (v >= g.num_nodes()) {
            throw InputError("subgraph node id " + std::to_string(v) + " >= " +
                             std::to_string(g.num_nodes()));
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t new_u = 0; new_u < sub.node_ids.size(); ++new_u) {
        const NodeId old_u = sub.node_ids[new_u];
        for (NodeId old_v : g.neighbors(old_u)) {
            if (old_v <= old_u) continue;
            const auto new_v = sub.old_to_new(old_v);
            if (new_v) edges.emplace_back(static_cast<NodeId>(new_u), *new_v);
        }
    }
    sub.graph = Graph::build(edges, sub.node_ids.size());
    return sub;
}

}  // namespace grace
