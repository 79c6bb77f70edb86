#pragma once

#include <utility>
#include <vector>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"
#include "grace/rng.hpp"

namespace testutil {

// Erdos-Renyi G(n, p) with a deterministic stream.
inline grace::Graph random_graph(grace::Rng& rng, std::size_t n, double p) {
    std::vector<std::pair<grace::NodeId, grace::NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.bernoulli(p)) {
                edges.emplace_back(static_cast<grace::NodeId>(i), static_cast<grace::NodeId>(j));
            }
        }
    }
    return grace::Graph::build(edges, n);
}

inline grace::Matrix random_matrix(grace::Rng& rng, std::size_t rows, std::size_t cols) {
    grace::Matrix m(rows, cols);
    for (double& v : m.data) v = rng.normal();
    return m;
}

inline grace::Graph path_graph(std::size_t n) {
    std::vector<std::pair<grace::NodeId, grace::NodeId>> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        edges.emplace_back(static_cast<grace::NodeId>(i), static_cast<grace::NodeId>(i + 1));
    }
    return grace::Graph::build(edges, n);
}

inline grace::Graph cycle_graph(std::size_t n) {
    std::vector<std::pair<grace::NodeId, grace::NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.emplace_back(static_cast<grace::NodeId>(i),
                           static_cast<grace::NodeId>((i + 1) % n));
    }
    return grace::Graph::build(edges, n);
}

// Star with the center at id 0.
inline grace::Graph star_graph(std::size_t leaves) {
    std::vector<std::pair<grace::NodeId, grace::NodeId>> edges;
    for (std::size_t i = 1; i <= leaves; ++i) {
        edges.emplace_back(0, static_cast<grace::NodeId>(i));
    }
    return grace::Graph::build(edges, leaves + 1);
}

inline grace::Graph triangle() {
    return grace::Graph::build(
        std::vector<std::pair<grace::NodeId, grace::NodeId>>{{0, 1}, {1, 2}, {0, 2}}, 3);
}

inline grace::Graph two_triangles() {
    return grace::Graph::build(
        std::vector<std::pair<grace::NodeId, grace::NodeId>>{
            {0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}},
        6);
}

}  // namespace testutil
