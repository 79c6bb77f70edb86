#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"
#include "grace/treenorm.hpp"

namespace grace {

// Fixed-size node subset of the training graph; ids sorted and distinct.
struct Chromosome {
    std::vector<NodeId> nodes;

    std::size_t size() const { return nodes.size(); }
    bool operator==(const Chromosome&) const = default;
};

// Per-component scores in [0, 1] plus the struct/sem/total sums. With six
// components the total lives in [0, 6] and equals 6 exactly for the identity
// subset.
struct FitnessBreakdown {
    double f_deg = 0.0;
    double f_clust = 0.0;
    double f_assort = 0.0;
    double f_comm = 0.0;
    double f_var = 0.0;
    double f_tn_score = 0.0;

    double f_struct() const { return f_deg + f_comm + f_clust + f_assort; }
    double f_sem() const { return f_var + f_tn_score; }
    double f_total() const { return f_struct() + f_sem(); }
};

struct GAConfig {
    std::size_t population_size = 50;
    std::size_t generations = 100;
    double crossover_rate = 0.8745703676281257;
    double mutation_rate = 0.21873583752075254;
    std::size_t tournament_size = 3;
    std::size_t elitism_count = 2;
    std::uint64_t seed = 0;
};

struct MetaGraph {
    Chromosome chromosome;
    Graph graph;                     // induced on the chromosome
    std::vector<NodeId> node_ids;    // induced id -> training-graph id
    FitnessBreakdown fitness;
};

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
};

struct GaResult {
    MetaGraph meta;
    std::vector<GenerationStats> trace;  // generation 0 = initial population
};

// Maps a nonnegative ratio of a subset statistic over the full-graph
// statistic to a score in (0, 1] that peaks at ratio 1. The 0/0 case counts
// as perfect agreement; x/0 with x > 0 scores 0.
double closeness(double subset_value, double full_value);

// Gap form used for assortativity and the tree norm: 1 / (1 + |gap|/scale)
// with the scale floored away from zero.
double closeness_gap(double gap, double scale);

// Assortativity comparison over the optional sentinel: both undefined -> 1,
// exactly one undefined -> 0, otherwise the absolute-gap form.
double closeness_assortativity(std::optional<double> subset_value,
                               std::optional<double> full_value);

// Evaluates chromosome fitness against a fixed training graph. Full-graph
// statistics are computed once; community detection uses the stored seed so
// fitness is a pure function of the chromosome, which also makes the cache
// sound.
class FitnessEvaluator {
public:
    FitnessEvaluator(const Graph& g, const FeatureMatrix& x, TreeNormConfig tn_config,
                     std::uint64_t seed);

    FitnessBreakdown evaluate(const Chromosome& chromosome) const;

    double full_tree_norm() const { return full_tree_norm_; }

private:
    struct VecHash {
        std::size_t operator()(const std::vector<NodeId>& v) const;
    };

    const Graph& graph_;
    const FeatureMatrix& features_;
    TreeNormConfig tn_config_;
    std::uint64_t seed_;

    double full_avg_degree_ = 0.0;
    double full_clustering_ = 0.0;
    std::optional<double> full_assortativity_;
    std::uint32_t full_communities_ = 0;
    double full_variance_sum_ = 0.0;
    double full_tree_norm_ = 0.0;

    mutable std::unordered_map<std::vector<NodeId>, FitnessBreakdown, VecHash> cache_;
};

// Individual fitness pieces exposed for direct use; all route through a
// one-shot evaluator.
std::tuple<double, double, double, double> structural_fitness(const Graph& g,
                                                              const Chromosome& s,
                                                              std::uint64_t seed);
std::pair<double, double> semantic_fitness(const Graph& g, const Chromosome& s,
                                           const FeatureMatrix& x,
                                           const TreeNormConfig& tn_config);
FitnessBreakdown total_fitness(const Graph& g, const Chromosome& s, const FeatureMatrix& x,
                               const TreeNormConfig& tn_config, std::uint64_t seed);

// Genetic-algorithm search for a representative meta-node subset of size
// ceil(fraction * |V|). Tournament selection, union-and-drop crossover,
// per-gene swap mutation, elitism. The initial population is class-stratified
// from the labels; determinism follows from the config seed.
GaResult ga_sample(const Graph& g, const FeatureMatrix& x, std::span<const int> labels,
                   const GAConfig& ga_config, const TreeNormConfig& tn_config,
                   double fraction = 0.10);

}  // namespace grace
