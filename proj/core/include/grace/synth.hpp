#pragma once

#include <cstdint>
#include <vector>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"

namespace grace {

// Controllable stand-in for the clinical corpus: two Gaussian blobs with an
// exact minority count, plus an optional similarity graph targeting a chosen
// density.
struct SynthConfig {
    std::size_t num_nodes = 2000;
    std::size_t dim = 16;
    double minority_fraction = 0.10;  // in (0, 0.5]
    double class_separation = 1.0;    // mean shift per coordinate, in sd units
    double noise_edges_fraction = 0.0;  // extra cross-class edges as a fraction of |E|
    double target_avg_degree = 45.0;
    std::uint64_t seed = 0;
};

struct SynthData {
    FeatureMatrix features;
    std::vector<int> labels;  // 1 = minority class
};

struct SynthGraphData {
    Graph graph;
    FeatureMatrix features;
    std::vector<int> labels;
    double threshold = 0.0;  // similarity threshold the bisection settled on
};

// Exactly ceil(minority_fraction * n) minority nodes; isotropic unit-variance
// blobs whose means differ by class_separation in every coordinate.
SynthData generate(const SynthConfig& config);

// Features and labels as in generate(); edges from the similarity network at
// a threshold bisected to match target_avg_degree, plus noise_edges_fraction
// random cross-class edges.
SynthGraphData generate_graph(const SynthConfig& config);

}  // namespace grace
