#pragma once

#include <span>
#include <vector>

#include "grace/graph.hpp"

namespace grace {

// Depth-adaptive weighted tree norm. Each node contributes its computation
// tree's level sizes up to a per-node depth; high-degree nodes get shallow
// trees, low-degree nodes deep ones.
struct TreeNormConfig {
    int depth_min = 1;
    int depth_max = 4;
    double alpha = 1.0;
};

// (deg(v) - d_min) / (d_max - d_min); 0.5 when all degrees are equal.
double normalized_degree(const Graph& g, NodeId v);

// floor(L_max - (L_max - L_min) * normalized_degree), clamped to
// [L_min, L_max].
int node_depth(const Graph& g, NodeId v, const TreeNormConfig& cfg);

// sum_v sum_{l=1..L_v} w_l * T_v(l), where T_v(l) is the number of depth-l
// vertices in the computation tree rooted at v (= length-l walks from v) and
// w_l = lambda_v^(l-1) with lambda_v = exp(-alpha) * normalized_degree(v).
// w_1 is always 1 (0^0 := 1). The depth-0 root is not counted.
double tree_norm(const Graph& g, const TreeNormConfig& cfg);

// Same sum with the per-node depths and lambdas supplied by the caller
// instead of derived from the degree range (used to study the norm under
// edge edits with parameters held fixed).
double tree_norm_fixed(const Graph& g, std::span<const int> depths,
                       std::span<const double> lambdas);

// tree_norm(g) - tree_norm(induced_subgraph(g, s)); each norm uses its own
// graph's degree range.
double tree_norm_gap(const Graph& g, std::span<const NodeId> subset, const TreeNormConfig& cfg);

}  // namespace grace
