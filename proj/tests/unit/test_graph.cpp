#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "grace/errors.hpp"
#include "grace/graph.hpp"
#include "grace/rng.hpp"
#include "helpers.hpp"

using namespace grace;
using testutil::random_graph;

namespace {

// Independent clustering oracle over a dense adjacency matrix.
double clustering_bruteforce(const Graph& g) {
    const std::size_t n = g.num_nodes();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : g.neighbors(u)) adj[u][v] = true;
    }
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t> nbrs;
        for (std::size_t u = 0; u < n; ++u) {
            if (adj[v][u]) nbrs.push_back(u);
        }
        if (nbrs.size() < 2) continue;
        std::size_t links = 0;
        for (std::size_t a = 0; a < nbrs.size(); ++a) {
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                if (adj[nbrs[a]][nbrs[b]]) ++links;
            }
        }
        total += 2.0 * static_cast<double>(links) /
                 (static_cast<double>(nbrs.size()) * static_cast<double>(nbrs.size() - 1));
    }
    return total / static_cast<double>(n);
}

// Two-pass Pearson over oriented edge endpoint degrees.
std::optional<double> assortativity_bruteforce(const Graph& g) {
    std::vector<std::pair<double, double>> pairs;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            pairs.emplace_back(static_cast<double>(g.degree(u)),
                               static_cast<double>(g.degree(v)));
        }
    }
    if (pairs.empty()) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pairs.size());
    my /= static_cast<double>(pairs.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
    std::vector<int> comp(g.num_nodes(), -1);
    std::vector<std::vector<NodeId>> out;
    for (NodeId s = 0; s < g.num_nodes(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<NodeId> stack{s}, members;
        comp[s] = static_cast<int>(out.size());
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (NodeId u : g.neighbors(v)) {
                if (comp[u] < 0) {
                    comp[u] = comp[s];
                    stack.push_back(u);
                }
            }
        }
        out.push_back(std::move(members));
    }
    return out;
}

}  // namespace

TEST_CASE("build_graph drops self-loops and duplicate edges") {
    const std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}, {1, 0}, {1, 1}};
    const Graph g = Graph::build(edges, 2);
    CHECK(g.num_edges() == 1);
    CHECK(g.has_edge(0, 1));
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(1) == 1);
}

TEST_CASE("build_graph with no edges keeps isolated nodes") {
    const Graph g = Graph::build(std::vector<std::pair<NodeId, NodeId>>{}, 3);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("build_graph triangle degree sum") {
    const Graph g = testutil::triangle();
    std::size_t degree_sum = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) degree_sum += g.degree(v);
    CHECK(degree_sum == 6);
    CHECK(degree_sum == 2 * g.num_edges());
}

TEST_CASE("build_graph rejects out-of-range ids") {
    const std::vector<std::pair<NodeId, NodeId>> edges{{0, 5}};
    CHECK_THROWS_AS(Graph::build(edges, 3), InputError);
}

TEST_CASE("graph invariants on random graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = random_graph(rng, 2 + rng.uniform_index(30), rng.uniform_double());
        std::size_t degree_sum = 0;
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
            degree_sum += g.degree(v);
            const auto nbrs = g.neighbors(v);
            CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
            for (NodeId u : nbrs) {
                CHECK(u != v);
                CHECK(g.has_edge(u, v));  // symmetry
            }
        }
        CHECK(degree_sum == 2 * g.num_edges());
    }
}

TEST_CASE("avg_degree basics") {
    CHECK(avg_degree(testutil::triangle()) == doctest::Approx(2.0));
    CHECK(avg_degree(Graph::build(std::vector<std::pair<NodeId, NodeId>>{}, 3)) == 0.0);
    CHECK(avg_degree(testutil::star_graph(4)) == doctest::Approx(1.6));
    CHECK_THROWS_AS(avg_degree(Graph{}), InputError);
}

TEST_CASE("avg_clustering on hand graphs") {
    CHECK(avg_clustering(testutil::triangle()) == doctest::Approx(1.0));
    CHECK(avg_clustering(testutil::path_graph(3)) == doctest::Approx(0.0));

    // 4-cycle plus the chord (0,2): nodes 0 and 2 sit in two of three possible
    // neighbor pairs, nodes 1 and 3 in their only one.
    const Graph chorded = Graph::build(
        std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}, 4);
    const double expected = clustering_bruteforce(chorded);
    CHECK(expected == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(avg_clustering(chorded) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("avg_clustering matches brute force and stays in [0,1]") {
    Rng rng(22);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(12);
        const Graph g = random_graph(rng, n, rng.uniform_double());
        const double value = avg_clustering(g);
        CHECK(value >= 0.0);
        CHECK(value <= 1.0);
        CHECK(value == doctest::Approx(clustering_bruteforce(g)).epsilon(1e-12));
    }
}

TEST_CASE("assortativity hand cases") {
    const auto star = assortativity(testutil::star_graph(3));
    REQUIRE(star.has_value());
    CHECK(*star == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK_FALSE(assortativity(testutil::cycle_graph(4)).has_value());

    const Graph two_edges =
        Graph::build(std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}}, 4);
    CHECK_FALSE(assortativity(two_edges).has_value());

    CHECK_FALSE(assortativity(Graph::build(std::vector<std::pair<NodeId, NodeId>>{}, 3))
                    .has_value());
}

TEST_CASE("assortativity matches an independent two-pass Pearson") {
    Rng rng(33);
    for (int trial = 0; trial < 300; ++trial) {
        const Graph g = random_graph(rng, 2 + rng.uniform_index(25), rng.uniform_double() * 0.6);
        const auto fast = assortativity(g);
        const auto slow = assortativity_bruteforce(g);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(*fast >= -1.0 - 1e-12);
            CHECK(*fast <= 1.0 + 1e-12);
            CHECK(*fast == doctest::Approx(*slow).epsilon(1e-12));
        }
    }
}

TEST_CASE("communities on hand graphs") {
    CHECK(communities(testutil::two_triangles(), 7).num_communities == 2);
    CHECK(communities(Graph::build(std::vector<std::pair<NodeId, NodeId>>{}, 5), 7)
              .num_communities == 5);
    CHECK(communities(testutil::triangle(), 7).num_communities == 1);
}

TEST_CASE("communities determinism and coverage") {
    Rng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = random_graph(rng, 5 + rng.uniform_index(40), 0.15);
        const std::uint64_t seed = rng.next_u64();
        const Partition a = communities(g, seed);
        const Partition b = communities(g, seed);
        CHECK(a.community_of == b.community_of);
        CHECK(a.num_communities == b.num_communities);

        // Contiguous labels covering every node exactly once.
        std::set<std::uint32_t> used(a.community_of.begin(), a.community_of.end());
        CHECK(used.size() == a.num_communities);
        if (!used.empty()) {
            CHECK(*used.begin() == 0);
            CHECK(*used.rbegin() == a.num_communities - 1);
        }

        // No community spans two connected components.
        std::vector<int> comp_of(g.num_nodes(), -1);
        const auto comps = connected_components(g);
        for (std::size_t c = 0; c < comps.size(); ++c) {
            for (NodeId v : comps[c]) comp_of[v] = static_cast<int>(c);
        }
        std::vector<int> community_component(a.num_communities, -1);
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
            const auto community = a.community_of[v];
            if (community_component[community] < 0) {
                community_component[community] = comp_of[v];
            } else {
                CHECK(community_component[community] == comp_of[v]);
            }
        }
    }
}

TEST_CASE("communities never lose isolated nodes") {
    const Graph g = Graph::build(std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}, {0, 2}}, 5);
    const Partition p = communities(g, 1);
    // nodes 3 and 4 are isolated singletons
    CHECK(p.num_communities == 3);
    CHECK(p.community_of[3] != p.community_of[4]);
}

TEST_CASE("community partitions improve on singletons") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = random_graph(rng, 10 + rng.uniform_index(30), 0.2);
        if (g.num_edges() == 0) continue;
        const Partition p = communities(g, trial);
        Partition singletons;
        singletons.community_of.resize(g.num_nodes());
        for (NodeId v = 0; v < g.num_nodes(); ++v) singletons.community_of[v] = v;
        singletons.num_communities = static_cast<std::uint32_t>(g.num_nodes());
        CHECK(modularity(g, p) >= modularity(g, singletons) - 1e-12);
    }
}

TEST_CASE("induced_subgraph basics") {
    const Graph tri = testutil::triangle();
    const std::vector<NodeId> pair{0, 1};
    const Subgraph sub = induced_subgraph(tri, pair);
    CHECK(sub.graph.num_nodes() == 2);
    CHECK(sub.graph.num_edges() == 1);
    CHECK(sub.node_ids == std::vector<NodeId>{0, 1});
    CHECK(sub.old_to_new(1) == NodeId{1});
    CHECK_FALSE(sub.old_to_new(2).has_value());

    const std::vector<NodeId> all{0, 1, 2};
    CHECK(induced_subgraph(tri, all).graph.num_edges() == 3);

    const Graph star = testutil::star_graph(4);
    const std::vector<NodeId> leaves{1, 2, 3, 4};
    CHECK(induced_subgraph(star, leaves).graph.num_edges() == 0);

    const std::vector<NodeId> bad{0, 9};
    CHECK_THROWS_AS(induced_subgraph(tri, bad), InputError);
}

TEST_CASE("induced_subgraph of the full node set preserves the degree sequence") {
    Rng rng(66);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = random_graph(rng, 3 + rng.uniform_index(20), 0.3);
        std::vector<NodeId> all(g.num_nodes());
        for (NodeId v = 0; v < g.num_nodes(); ++v) all[v] = v;
        const Subgraph sub = induced_subgraph(g, all);
        REQUIRE(sub.graph.num_nodes() == g.num_nodes());
        for (NodeId v = 0; v < g.num_nodes(); ++v) CHECK(sub.graph.degree(v) == g.degree(v));
    }
}
