#include "grace/treenorm.hpp"

#include <algorithm>
#include <cmath>

#include "grace/errors.hpp"

namespace grace {

namespace {

// Degree range with the degenerate-range convention folded in.
struct DegreeRange {
    std::size_t d_min;
    std::size_t d_max;
};

DegreeRange degree_range(const Graph& g) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        lo = std::min(lo, g.degree(v));
        hi = std::max(hi, g.degree(v));
    }
    return {lo, hi};
}

double normalized_degree_with(const DegreeRange& r, std::size_t d) {
    if (r.d_max == r.d_min) return 0.5;
    return static_cast<double>(d - r.d_min) / static_cast<double>(r.d_max - r.d_min);
}

int depth_with(double dnorm, const TreeNormConfig& cfg) {
    const double raw = std::floor(static_cast<double>(cfg.depth_max) -
                                  static_cast<double>(cfg.depth_max - cfg.depth_min) * dnorm);
    return std::clamp(static_cast<int>(raw), cfg.depth_min, cfg.depth_max);
}

}  // namespace

double normalized_degree(const Graph& g, NodeId v) {
    return normalized_degree_with(degree_range(g), g.degree(v));
}

int node_depth(const Graph& g, NodeId v, const TreeNormConfig& cfg) {
    if (cfg.depth_min < 1 || cfg.depth_max < cfg.depth_min) {
        throw ConfigError("tree norm depths must satisfy 1 <= L_min <= L_max");
    }
    return depth_with(normalized_degree(g, v), cfg);
}

double tree_norm_fixed(const Graph& g, std::span<const int> depths,
                       std::span<const double> lambdas) {
    const std::size_t n = g.num_nodes();
    if (depths.size() != n || lambdas.size() != n) {
        throw InputError("per-node depth/lambda arrays must cover every node");
    }
    if (n == 0) return 0.0;
    int max_depth = 1;
    for (int d : depths) max_depth = std::max(max_depth, d);

    // T_v(l) for all roots at once: walks(l) = A^l * ones, since the number
    // of length-l walks from v is (A^l 1)_v. Kahan-compensated total in fixed
    // (level, node) order.
    std::vector<double> walks(n, 1.0);
    std::vector<double> next(n, 0.0);
    std::vector<double> weight(n, 1.0);  // lambda_v^(l-1); l=1 term is always 1
    double total = 0.0;
    double compensation = 0.0;
    for (int level = 1; level <= max_depth; ++level) {
        for (NodeId v = 0; v < n; ++v) {
            double acc = 0.0;
            for (NodeId u : g.neighbors(v)) acc += walks[u];
            next[v] = acc;
        }
        std::swap(walks, next);
        for (NodeId v = 0; v < n; ++v) {
            if (level <= depths[v]) {
                const double term = weight[v] * walks[v] - compensation;
                const double sum = total + term;
                compensation = (sum - total) - term;
                total = sum;
            }
            weight[v] *= lambdas[v];
        }
    }
    return total;
}

double tree_norm(const Graph& g, const TreeNormConfig& cfg) {
    if (cfg.depth_min < 1 || cfg.depth_max < cfg.depth_min) {
        throw ConfigError("tree norm depths must satisfy 1 <= L_min <= L_max");
    }
    const std::size_t n = g.num_nodes();
    if (n == 0) return 0.0;
    const DegreeRange range = degree_range(g);
    const double damping = std::exp(-cfg.alpha);
    std::vector<int> depths(n);
    std::vector<double> lambdas(n);
    for (NodeId v = 0; v < n; ++v) {
        const double dnorm = normalized_degree_with(range, g.degree(v));
        depths[v] = depth_with(dnorm, cfg);
        lambdas[v] = damping * dnorm;
    }
    return tree_norm_fixed(g, depths, lambdas);
}

double tree_norm_gap(const Graph& g, std::span<const NodeId> subset, const TreeNormConfig& cfg) {
    const Subgraph sub = induced_subgraph(g, subset);
    return tree_norm(g, cfg) - tree_norm(sub.graph, cfg);
}

}  // namespace grace
