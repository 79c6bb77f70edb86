#include "grace/meta_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "grace/errors.hpp"
#include "grace/rng.hpp"

namespace grace {

namespace {

// Population variance summed over feature columns; rows restricted to
// `subset` when non-empty.
double variance_sum(const FeatureMatrix& x, std::span<const NodeId> subset) {
    const std::size_t rows = subset.empty() ? x.num_nodes() : subset.size();
    if (rows == 0) return 0.0;
    const std::size_t d = x.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = x.row(subset.empty() ? r : subset[r]);
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(rows);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = x.row(subset.empty() ? r : subset[r]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = row[j] - mean[j];
            total += dlt * dlt;
        }
    }
    return total / static_cast<double>(rows);
}

void validate_chromosome(const Chromosome& s, std::size_t num_nodes, std::size_t k) {
    if (s.size() != k) throw std::logic_error("chromosome size drifted from k");
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        if (s.nodes[i] >= num_nodes) throw std::logic_error("chromosome id out of range");
        if (i > 0 && s.nodes[i] <= s.nodes[i - 1]) {
            throw std::logic_error("chromosome ids not sorted/distinct");
        }
    }
}

}  // namespace

double closeness(double subset_value, double full_value) {
    if (subset_value < 0.0 || full_value < 0.0) {
        throw InputError("closeness ratio requires nonnegative statistics");
    }
    if (full_value == 0.0) return subset_value == 0.0 ? 1.0 : 0.0;
    const double ratio = subset_value / full_value;
    return 1.0 / (1.0 + std::abs(ratio - 1.0));
}

double closeness_gap(double gap, double scale) {
    const double denom = std::max(scale, 1e-12);
    return 1.0 / (1.0 + std::abs(gap) / denom);
}

double closeness_assortativity(std::optional<double> subset_value,
                               std::optional<double> full_value) {
    if (!subset_value && !full_value) return 1.0;
    if (!subset_value || !full_value) return 0.0;
    return 1.0 / (1.0 + std::abs(*subset_value - *full_value));
}

std::size_t FitnessEvaluator::VecHash::operator()(const std::vector<NodeId>& v) const {
    std::string_view bytes(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(NodeId));
    return static_cast<std::size_t>(fnv1a64(bytes));
}

FitnessEvaluator::FitnessEvaluator(const Graph& g, const FeatureMatrix& x,
                                   TreeNormConfig tn_config, std::uint64_t seed)
    : graph_(g), features_(x), tn_config_(tn_config), seed_(seed) {
    if (g.num_nodes() == 0) throw InputError("fitness over an empty graph is undefined");
    if (x.num_nodes() != g.num_nodes()) {
        throw InputError("feature matrix rows must cover every graph node");
    }
    full_avg_degree_ = avg_degree(g);
    full_clustering_ = avg_clustering(g);
    full_assortativity_ = assortativity(g);
    full_communities_ = communities(g, seed_).num_communities;
    full_variance_sum_ = variance_sum(x, {});
    full_tree_norm_ = tree_norm(g, tn_config_);
}

FitnessBreakdown FitnessEvaluator::evaluate(const Chromosome& chromosome) const {
    if (chromosome.size() < 2) {
        throw InputError("fitness needs at least two meta nodes (variance undefined)");
    }
    const auto it = cache_.find(chromosome.nodes);
    if (it != cache_.end()) return it->second;

    const Subgraph sub = induced_subgraph(graph_, chromosome.nodes);
    FitnessBreakdown out;
    out.f_deg = closeness(avg_degree(sub.graph), full_avg_degree_);
    out.f_clust = closeness(avg_clustering(sub.graph), full_clustering_);
    out.f_assort = closeness_assortativity(assortativity(sub.graph), full_assortativity_);
    out.f_comm = closeness(static_cast<double>(communities(sub.graph, seed_).num_communities),
                           static_cast<double>(full_communities_));
    out.f_var = closeness(variance_sum(features_, sub.node_ids), full_variance_sum_);
    out.f_tn_score =
        closeness_gap(full_tree_norm_ - tree_norm(sub.graph, tn_config_), full_tree_norm_);

    cache_.emplace(chromosome.nodes, out);
    return out;
}

std::tuple<double, double, double, double> structural_fitness(const Graph& g, const Chromosome& s,
                                                              std::uint64_t seed) {
    const Subgraph sub = induced_subgraph(g, s.nodes);
    const double f_deg = closeness(avg_degree(sub.graph), avg_degree(g));
    const double f_clust = closeness(avg_clustering(sub.graph), avg_clustering(g));
    const double f_assort = closeness_assortativity(assortativity(sub.graph), assortativity(g));
    const double f_comm =
        closeness(static_cast<double>(communities(sub.graph, seed).num_communities),
                  static_cast<double>(communities(g, seed).num_communities));
    return {f_deg, f_clust, f_assort, f_comm};
}

std::pair<double, double> semantic_fitness(const Graph& g, const Chromosome& s,
                                           const FeatureMatrix& x,
                                           const TreeNormConfig& tn_config) {
    if (s.size() < 2) {
        throw InputError("semantic fitness needs at least two meta nodes");
    }
    const Subgraph sub = induced_subgraph(g, s.nodes);
    const double f_var = closeness(variance_sum(x, sub.node_ids), variance_sum(x, {}));
    const double full_norm = tree_norm(g, tn_config);
    const double f_tn =
        closeness_gap(full_norm - tree_norm(sub.graph, tn_config), full_norm);
    return {f_var, f_tn};
}

FitnessBreakdown total_fitness(const Graph& g, const Chromosome& s, const FeatureMatrix& x,
                               const TreeNormConfig& tn_config, std::uint64_t seed) {
    FitnessEvaluator evaluator(g, x, tn_config, seed);
    return evaluator.evaluate(s);
}

namespace {

// Slot allocation for class-stratified initialization: per-class slots
// proportional to inverse class frequency, at least one per present class,
// capped by class size, summing to k.
std::vector<std::size_t> allocate_slots(const std::vector<std::size_t>& class_counts,
                                        std::size_t k) {
    const std::size_t num_classes = class_counts.size();
    std::vector<std::size_t> slots(num_classes, 0);
    if (num_classes == 0) return slots;

    if (k < num_classes) {
        // Cannot cover every class; favor the rarest ones.
        std::vector<std::size_t> order(num_classes);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (class_counts[a] != class_counts[b]) return class_counts[a] < class_counts[b];
            return a < b;
        });
        std::cerr << "warning: meta subset size " << k << " cannot cover all " << num_classes
                  << " classes\n";
        for (std::size_t i = 0; i < k; ++i) slots[order[i]] = 1;
        return slots;
    }

    double weight_total = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        weight_total += 1.0 / static_cast<double>(class_counts[c]);
    }
    std::vector<double> ideal(num_classes, 0.0);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        ideal[c] = static_cast<double>(k) / (static_cast<double>(class_counts[c]) * weight_total);
        slots[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(ideal[c])), 1,
                                           class_counts[c]);
        assigned += slots[c];
    }

    // Distribute the remainder by descending fractional part; shrink the most
    // overfull classes when clamping overshot.
    std::vector<std::size_t> order(num_classes);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ra = ideal[a] - std::floor(ideal[a]);
        const double rb = ideal[b] - std::floor(ideal[b]);
        if (ra != rb) return ra > rb;
        return a < b;
    });
    while (assigned < k) {
        bool progressed = false;
        for (std::size_t c : order) {
            if (assigned == k) break;
            if (slots[c] < class_counts[c]) {
                ++slots[c];
                ++assigned;
                progressed = true;
            }
        }
        if (!progressed) break;  // every class saturated; k <= n makes this unreachable
    }
    while (assigned > k) {
        bool progressed = false;
        for (auto rit = order.rbegin(); rit != order.rend(); ++rit) {
            if (assigned == k) break;
            if (slots[*rit] > 1) {
                --slots[*rit];
                --assigned;
                progressed = true;
            }
        }
        if (!progressed) break;
    }
    return slots;
}

Chromosome stratified_chromosome(const std::vector<std::vector<NodeId>>& class_members,
                                 const std::vector<std::size_t>& slots, Rng& rng) {
    Chromosome s;
    for (std::size_t c = 0; c < class_members.size(); ++c) {
        const auto picks =
            rng.sample_without_replacement(static_cast<std::uint32_t>(class_members[c].size()),
                                           static_cast<std::uint32_t>(slots[c]));
        for (std::uint32_t p : picks) s.nodes.push_back(class_members[c][p]);
    }
    std::sort(s.nodes.begin(), s.nodes.end());
    return s;
}

Chromosome crossover_union_drop(const Chromosome& a, const Chromosome& b, std::size_t k,
                                Rng& rng) {
    std::vector<NodeId> pool;
    pool.reserve(a.size() + b.size());
    std::merge(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
               std::back_inserter(pool));
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() > k) {
        rng.shuffle(pool);
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
    }
    return Chromosome{std::move(pool)};
}

void mutate(Chromosome& s, std::size_t num_nodes, double per_gene_rate, Rng& rng,
            std::vector<char>& member) {
    std::fill(member.begin(), member.end(), 0);
    for (NodeId v : s.nodes) member[v] = 1;
    std::vector<std::size_t> marked;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        if (rng.bernoulli(per_gene_rate)) marked.push_back(i);
    }
    for (std::size_t i : marked) {
        // Uniform over currently unselected nodes, by rejection.
        NodeId candidate;
        do {
            candidate = static_cast<NodeId>(rng.uniform_index(num_nodes));
        } while (member[candidate]);
        member[s.nodes[i]] = 0;
        member[candidate] = 1;
        s.nodes[i] = candidate;
    }
    if (!marked.empty()) std::sort(s.nodes.begin(), s.nodes.end());
}

}  // namespace

GaResult ga_sample(const Graph& g, const FeatureMatrix& x, std::span<const int> labels,
                   const GAConfig& ga_config, const TreeNormConfig& tn_config, double fraction) {
    const std::size_t n = g.num_nodes();
    if (n < 20) throw ConfigError("meta sampling needs at least 20 nodes");
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ConfigError("meta fraction must lie in (0, 1]");
    }
    if (labels.size() != n) throw InputError("labels must cover every graph node");
    if (ga_config.population_size == 0) throw ConfigError("population size must be positive");
    if (ga_config.tournament_size == 0) throw ConfigError("tournament size must be positive");
    if (ga_config.crossover_rate < 0.0 || ga_config.crossover_rate > 1.0 ||
        ga_config.mutation_rate < 0.0 || ga_config.mutation_rate > 1.0) {
        throw ConfigError("GA rates must lie in [0, 1]");
    }

    const std::size_t k =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    if (k < 2) throw ConfigError("meta subset of size " + std::to_string(k) + " is too small");

    // Group nodes by class label; labels need not be contiguous.
    int max_label = 0;
    for (int label : labels) {
        if (label < 0) throw InputError("class labels must be nonnegative");
        max_label = std::max(max_label, label);
    }
    std::vector<std::vector<NodeId>> members_by_label(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t v = 0; v < n; ++v) {
        members_by_label[static_cast<std::size_t>(labels[v])].push_back(static_cast<NodeId>(v));
    }
    std::vector<std::vector<NodeId>> class_members;
    std::vector<std::size_t> class_counts;
    for (std::size_t label = 0; label < members_by_label.size(); ++label) {
        if (members_by_label[label].empty()) {
            std::cerr << "warning: class " << label << " has no nodes in the training graph\n";
            continue;
        }
        class_counts.push_back(members_by_label[label].size());
        class_members.push_back(std::move(members_by_label[label]));
    }

    const std::vector<std::size_t> slots = allocate_slots(class_counts, k);

    Rng rng(ga_config.seed);
    FitnessEvaluator evaluator(g, x, tn_config, derive_seed(ga_config.seed, "meta-sampler/fitness"));

    std::vector<Chromosome> population;
    population.reserve(ga_config.population_size);
    for (std::size_t i = 0; i < ga_config.population_size; ++i) {
        Chromosome s = stratified_chromosome(class_members, slots, rng);
        validate_chromosome(s, n, k);
        population.push_back(std::move(s));
    }

    std::vector<double> fitness(population.size(), 0.0);
    const auto evaluate_population = [&]() {
        for (std::size_t i = 0; i < population.size(); ++i) {
            fitness[i] = evaluator.evaluate(population[i]).f_total();
        }
    };
    const auto record = [&](std::size_t generation, std::vector<GenerationStats>& trace) {
        const double best = *std::max_element(fitness.begin(), fitness.end());
        const double mean =
            std::accumulate(fitness.begin(), fitness.end(), 0.0) / static_cast<double>(fitness.size());
        trace.push_back({generation, best, mean});
    };
    const auto tournament = [&]() -> const Chromosome& {
        std::size_t winner = rng.uniform_index(population.size());
        for (std::size_t t = 1; t < ga_config.tournament_size; ++t) {
            const std::size_t challenger = rng.uniform_index(population.size());
            if (fitness[challenger] > fitness[winner]) winner = challenger;
        }
        return population[winner];
    };

    GaResult result;
    evaluate_population();
    record(0, result.trace);

    std::size_t best_index =
        static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    Chromosome best_chromosome = population[best_index];
    double best_fitness = fitness[best_index];

    const double per_gene_rate = ga_config.mutation_rate / static_cast<double>(k);
    std::vector<char> member(n, 0);

    for (std::size_t generation = 1; generation <= ga_config.generations; ++generation) {
        std::vector<Chromosome> next;
        next.reserve(population.size());

        // Elites survive unchanged; ties keep the earlier individual.
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        const std::size_t elites = std::min(ga_config.elitism_count, population.size());
        for (std::size_t e = 0; e < elites; ++e) next.push_back(population[order[e]]);

        while (next.size() < ga_config.population_size) {
            const Chromosome& parent_a = tournament();
            const Chromosome& parent_b = tournament();
            Chromosome child = rng.bernoulli(ga_config.crossover_rate)
                                   ? crossover_union_drop(parent_a, parent_b, k, rng)
                                   : parent_a;
            mutate(child, n, per_gene_rate, rng, member);
            validate_chromosome(child, n, k);
            next.push_back(std::move(child));
        }

        population = std::move(next);
        evaluate_population();
        record(generation, result.trace);

        const std::size_t gen_best = static_cast<std::size_t>(
            std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
        if (fitness[gen_best] > best_fitness) {
            best_fitness = fitness[gen_best];
            best_chromosome = population[gen_best];
        }
    }

    Subgraph sub = induced_subgraph(g, best_chromosome.nodes);
    result.meta.chromosome = std::move(best_chromosome);
    result.meta.fitness = evaluator.evaluate(result.meta.chromosome);
    result.meta.graph = std::move(sub.graph);
    result.meta.node_ids = std::move(sub.node_ids);
    return result;
}

}  // namespace grace
