#include "grace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <utility>

#include "grace/errors.hpp"
#include "grace/psn.hpp"
#include "grace/rng.hpp"

namespace grace {

namespace {

void validate(const SynthConfig& config) {
    if (config.num_nodes < 20) throw ConfigError("synthetic corpora need at least 20 nodes");
    if (config.dim < 2) throw ConfigError("synthetic feature dimension must be >= 2");
    if (!(config.minority_fraction > 0.0 && config.minority_fraction <= 0.5)) {
        throw ConfigError("minority fraction must lie in (0, 0.5]");
    }
    if (config.class_separation < 0.0) throw ConfigError("class separation must be >= 0");
    if (!(config.noise_edges_fraction >= 0.0 && config.noise_edges_fraction < 1.0)) {
        throw ConfigError("noise edge fraction must lie in [0, 1)");
    }
    if (config.target_avg_degree <= 0.0) throw ConfigError("target average degree must be > 0");
}

}  // namespace

SynthData generate(const SynthConfig& config) {
    validate(config);
    const std::size_t n = config.num_nodes;
    const auto minority =
        static_cast<std::size_t>(std::ceil(config.minority_fraction * static_cast<double>(n)));

    Rng rng(derive_seed(config.seed, "synth/generate"));
    SynthData out;
    out.labels.assign(n, 0);
    for (std::uint32_t idx : rng.sample_without_replacement(static_cast<std::uint32_t>(n),
                                                            static_cast<std::uint32_t>(minority))) {
        out.labels[idx] = 1;
    }

    Matrix values(n, config.dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double shift = out.labels[i] == 1 ? config.class_separation : 0.0;
        for (std::size_t j = 0; j < config.dim; ++j) {
            values(i, j) = shift + rng.normal();
        }
    }
    out.features = FeatureMatrix(std::move(values));
    return out;
}

SynthGraphData generate_graph(const SynthConfig& config) {
    SynthData data = generate(config);
    const std::size_t n = config.num_nodes;

    // All pairwise similarities once; bisection then only counts.
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (double v : data.features.row(i)) acc += v * v;
        norms[i] = std::sqrt(acc);
    }
    std::vector<double> sims;
    sims.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (norms[i] == 0.0) continue;
        const auto ri = data.features.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (norms[j] == 0.0) continue;
            const auto rj = data.features.row(j);
            double dot = 0.0;
            for (std::size_t t = 0; t < ri.size(); ++t) dot += ri[t] * rj[t];
            sims.push_back(std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0));
        }
    }
    std::sort(sims.begin(), sims.end());

    const double target_edges = config.target_avg_degree * static_cast<double>(n) / 2.0;
    const auto count_above = [&](double threshold) {
        return static_cast<double>(sims.end() -
                                   std::upper_bound(sims.begin(), sims.end(), threshold));
    };

    double lo = -1.0, hi = 1.0;
    if (count_above(-1.0) < target_edges) {
        std::cerr << "warning: target average degree " << config.target_avg_degree
                  << " is unreachable; using every positive-norm pair\n";
        hi = -1.0;
    }
    for (int iter = 0; iter < 100 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (count_above(mid) > target_edges) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The closer endpoint wins.
    const double threshold =
        std::abs(count_above(lo) - target_edges) <= std::abs(count_above(hi) - target_edges) ? lo
                                                                                             : hi;

    PsnResult psn = build_psn(data.features, threshold);
    SynthGraphData out;
    out.threshold = threshold;
    out.features = std::move(data.features);
    out.labels = std::move(data.labels);

    if (config.noise_edges_fraction > 0.0) {
        auto edges = psn.graph.edge_list();
        const auto extra = static_cast<std::size_t>(config.noise_edges_fraction *
                                                    static_cast<double>(edges.size()));
        Rng rng(derive_seed(config.seed, "synth/noise-edges"));
        std::set<std::pair<NodeId, NodeId>> existing(edges.begin(), edges.end());
        std::size_t added = 0, attempts = 0;
        while (added < extra && attempts < 100 * extra + 1000) {
            ++attempts;
            const auto u = static_cast<NodeId>(rng.uniform_index(n));
            const auto v = static_cast<NodeId>(rng.uniform_index(n));
            if (u == v || out.labels[u] == out.labels[v]) continue;  // cross-class only
            const auto key = std::make_pair(std::min(u, v), std::max(u, v));
            if (!existing.insert(key).second) continue;
            edges.push_back(key);
            ++added;
        }
        out.graph = Graph::build(edges, n);
    } else {
        out.graph = std::move(psn.graph);
    }
    return out;
}

}  // namespace grace
