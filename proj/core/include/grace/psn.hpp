#pragma once

#include <optional>
#include <span>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"

namespace grace {

// u.v / (|u||v|), clamped to [-1, 1]. nullopt when either vector has zero
// norm.
std::optional<double> cosine(std::span<const double> u, std::span<const double> v);

struct PsnResult {
    Graph graph;
    std::size_t zero_norm_rows = 0;  // left isolated, reported to the caller
};

// Patient similarity network: edge (i, j) iff cosine of rows i and j strictly
// exceeds the threshold. Exact all-pairs construction.
PsnResult build_psn(const FeatureMatrix& x, double threshold);

}  // namespace grace
