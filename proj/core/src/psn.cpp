#include "grace/psn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "grace/errors.hpp"

namespace grace {

std::optional<double> cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw InputError("cosine of vectors with different dimensions");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return std::nullopt;
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

PsnResult build_psn(const FeatureMatrix& x, double threshold) {
    if (threshold < -1.0 || threshold > 1.0) {
        throw ConfigError("similarity threshold must lie in [-1, 1]");
    }
    const std::size_t n = x.num_nodes();
    const std::size_t d = x.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (double value : x.row(i)) {
            if (!std::isfinite(value)) {
                throw InputError("non-finite feature entry in row " + std::to_string(i));
            }
        }
    }

    // Norms first; zero-norm rows stay isolated rather than being dropped so
    // node ids keep lining up with labels.
    std::vector<double> norm(n, 0.0);
    PsnResult result;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double value : x.row(i)) acc += value * value;
        norm[i] = std::sqrt(acc);
        if (acc == 0.0) ++result.zero_norm_rows;
    }

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        if (norm[i] == 0.0) continue;
        const auto ri = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norm[j] == 0.0) continue;
            const auto rj = x.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += ri[k] * rj[k];
            const double sim = std::clamp(dot / (norm[i] * norm[j]), -1.0, 1.0);
            if (sim > threshold) {
                edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    }
    result.graph = Graph::build(edges, n);
    return result;
}

}  // namespace grace
