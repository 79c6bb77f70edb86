#include "grace/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "grace/errors.hpp"

namespace grace {

namespace {

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.cols);
    const std::size_t n = a.rows, k = a.cols, m = b.cols;
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.data.data() + i * k;
        double* orow = out.data.data() + i * m;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            if (av == 0.0) continue;
            const double* brow = b.data.data() + t * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

// a^T * b for a: n x k, b: n x m.
Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    Matrix out(a.cols, b.cols);
    const std::size_t n = a.rows, k = a.cols, m = b.cols;
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.data.data() + i * k;
        const double* brow = b.data.data() + i * m;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            if (av == 0.0) continue;
            double* orow = out.data.data() + t * m;
            for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

// a * b^T for a: n x k, b: m x k.
Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = b.data.data() + j * b.cols;
            double acc = 0.0;
            for (std::size_t t = 0; t < a.cols; ++t) acc += arow[t] * brow[t];
            out(i, j) = acc;
        }
    }
    return out;
}

void add_bias_rows(Matrix& m, std::span<const double> bias) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) row[j] += bias[j];
    }
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j];
    }
    return out;
}

// Row v = mean of h over neighbors of v; zero for isolated nodes.
Matrix aggregate_mean(const Graph& g, const Matrix& h) {
    Matrix out(h.rows, h.cols);
    for (NodeId v = 0; v < h.rows; ++v) {
        const auto nbrs = g.neighbors(v);
        if (nbrs.empty()) continue;
        double* orow = out.data.data() + v * h.cols;
        for (NodeId u : nbrs) {
            const double* hrow = h.data.data() + u * h.cols;
            for (std::size_t j = 0; j < h.cols; ++j) orow[j] += hrow[j];
        }
        const double inv = 1.0 / static_cast<double>(nbrs.size());
        for (std::size_t j = 0; j < h.cols; ++j) orow[j] *= inv;
    }
    return out;
}

// Transpose of the mean aggregation: row v = sum over neighbors u of
// h_u / deg(u).
Matrix aggregate_mean_transpose(const Graph& g, const Matrix& h) {
    Matrix out(h.rows, h.cols);
    for (NodeId v = 0; v < h.rows; ++v) {
        double* orow = out.data.data() + v * h.cols;
        for (NodeId u : g.neighbors(v)) {
            const double inv = 1.0 / static_cast<double>(g.degree(u));
            const double* hrow = h.data.data() + u * h.cols;
            for (std::size_t j = 0; j < h.cols; ++j) orow[j] += inv * hrow[j];
        }
    }
    return out;
}

// Symmetric normalized adjacency with self-loops:
// row v = h_v/(deg(v)+1) + sum_u h_u / sqrt((deg(v)+1)(deg(u)+1)).
Matrix aggregate_norm_adj(const Graph& g, const Matrix& h) {
    Matrix out(h.rows, h.cols);
    std::vector<double> inv_sqrt(h.rows);
    for (NodeId v = 0; v < h.rows; ++v) {
        inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)) + 1.0);
    }
    for (NodeId v = 0; v < h.rows; ++v) {
        double* orow = out.data.data() + v * h.cols;
        const double* hv = h.data.data() + v * h.cols;
        const double self_scale = inv_sqrt[v] * inv_sqrt[v];
        for (std::size_t j = 0; j < h.cols; ++j) orow[j] += self_scale * hv[j];
        for (NodeId u : g.neighbors(v)) {
            const double scale = inv_sqrt[v] * inv_sqrt[u];
            const double* hu = h.data.data() + u * h.cols;
            for (std::size_t j = 0; j < h.cols; ++j) orow[j] += scale * hu[j];
        }
    }
    return out;
}

Matrix aggregate(LayerKind kind, const Graph& g, const Matrix& h) {
    return kind == LayerKind::MeanAggregation ? aggregate_mean(g, h) : aggregate_norm_adj(g, h);
}

Matrix aggregate_transpose(LayerKind kind, const Graph& g, const Matrix& h) {
    return kind == LayerKind::MeanAggregation ? aggregate_mean_transpose(g, h)
                                              : aggregate_norm_adj(g, h);
}

void relu_inplace(Matrix& m) {
    for (double& v : m.data) v = v > 0.0 ? v : 0.0;
}

// mask ownership of relu: upstream gradients survive only where the
// pre-activation was strictly positive.
void relu_backward_inplace(Matrix& grad, const Matrix& pre) {
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (pre.data[i] <= 0.0) grad.data[i] = 0.0;
    }
}

void multiply_inplace(Matrix& m, const Matrix& mask) {
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] *= mask.data[i];
}

double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ModelParams zero_like(const ModelParams& p) {
    ModelParams g;
    g.kind = p.kind;
    g.mode = p.mode;
    g.dims = p.dims;
    g.w_in = Matrix(p.w_in.rows, p.w_in.cols);
    g.b_in.assign(p.b_in.size(), 0.0);
    auto zero_layer = [&](const GraphLayerParams& src, GraphLayerParams& dst) {
        dst.w_self = Matrix(src.w_self.rows, src.w_self.cols);
        dst.w_neigh = Matrix(src.w_neigh.rows, src.w_neigh.cols);
        dst.bias.assign(src.bias.size(), 0.0);
        dst.w = Matrix(src.w.rows, src.w.cols);
    };
    zero_layer(p.layer1, g.layer1);
    zero_layer(p.layer2, g.layer2);
    g.w_out = Matrix(p.w_out.rows, p.w_out.cols);
    g.b_out.assign(p.b_out.size(), 0.0);
    return g;
}

// Normalized weights; empty input means uniform. A zero total is the
// "no learning signal" case and yields an empty vector.
std::vector<double> normalized_weights(std::span<const double> weights, std::size_t n) {
    std::vector<double> out;
    if (weights.empty()) {
        out.assign(n, 1.0 / static_cast<double>(n));
        return out;
    }
    if (weights.size() != n) throw InputError("sample weight count must match node count");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) throw InputError("sample weights must be >= 0 and finite");
        total += w;
    }
    if (total == 0.0) return out;
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = weights[i] / total;
    return out;
}

void validate_labels(const NodeLabels& labels, std::size_t n, std::size_t outputs) {
    if (labels.count() != n) throw InputError("labels must cover every node");
    if (labels.mode == TaskMode::BinarySoftmax) {
        for (int y : labels.classes) {
            if (y < 0 || static_cast<std::size_t>(y) >= outputs) {
                throw InputError("class label out of range");
            }
        }
    } else {
        if (labels.multilabel.cols != outputs) {
            throw InputError("label matrix width must match the output dimension");
        }
        for (double y : labels.multilabel.data) {
            if (y != 0.0 && y != 1.0) throw InputError("multilabel entries must be 0 or 1");
        }
    }
}

// d loss_i / d score(i, c), without sample weighting.
Matrix score_gradient(const Matrix& scores, const Matrix& outputs, const NodeLabels& labels) {
    Matrix g(scores.rows, scores.cols);
    if (labels.mode == TaskMode::BinarySoftmax) {
        for (std::size_t i = 0; i < scores.rows; ++i) {
            for (std::size_t c = 0; c < scores.cols; ++c) {
                const double p = std::exp(outputs(i, c));
                g(i, c) = p - (static_cast<std::size_t>(labels.classes[i]) == c ? 1.0 : 0.0);
            }
        }
    } else {
        const double inv_labels = 1.0 / static_cast<double>(scores.cols);
        for (std::size_t i = 0; i < scores.rows; ++i) {
            for (std::size_t c = 0; c < scores.cols; ++c) {
                g(i, c) = (stable_sigmoid(scores(i, c)) - labels.multilabel(i, c)) * inv_labels;
            }
        }
    }
    return g;
}

}  // namespace

std::vector<std::span<double>> param_blocks(ModelParams& p) {
    std::vector<std::span<double>> blocks;
    blocks.emplace_back(p.w_in.data);
    blocks.emplace_back(p.b_in);
    for (GraphLayerParams* layer : {&p.layer1, &p.layer2}) {
        if (p.kind == LayerKind::MeanAggregation) {
            blocks.emplace_back(layer->w_self.data);
            blocks.emplace_back(layer->w_neigh.data);
            blocks.emplace_back(layer->bias);
        } else {
            blocks.emplace_back(layer->w.data);
        }
    }
    blocks.emplace_back(p.w_out.data);
    blocks.emplace_back(p.b_out);
    return blocks;
}

std::vector<std::span<const double>> param_blocks(const ModelParams& p) {
    auto mutable_blocks = param_blocks(const_cast<ModelParams&>(p));
    return {mutable_blocks.begin(), mutable_blocks.end()};
}

std::size_t num_params(const ModelParams& p) {
    std::size_t total = 0;
    for (const auto block : param_blocks(p)) total += block.size();
    return total;
}

std::vector<double> flatten_params(const ModelParams& p) {
    std::vector<double> flat;
    flat.reserve(num_params(p));
    for (const auto block : param_blocks(p)) flat.insert(flat.end(), block.begin(), block.end());
    return flat;
}

void assign_params(ModelParams& p, std::span<const double> flat) {
    std::size_t cursor = 0;
    for (auto block : param_blocks(p)) {
        if (cursor + block.size() > flat.size()) {
            throw InputError("flat parameter vector too short");
        }
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(cursor), block.size(),
                    block.begin());
        cursor += block.size();
    }
    if (cursor != flat.size()) throw InputError("flat parameter vector too long");
}

void axpy_params(ModelParams& p, double scale, const ModelParams& q) {
    auto dst = param_blocks(p);
    auto src = param_blocks(q);
    if (dst.size() != src.size()) throw InputError("parameter shape mismatch");
    for (std::size_t b = 0; b < dst.size(); ++b) {
        if (dst[b].size() != src[b].size()) throw InputError("parameter block shape mismatch");
        for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += scale * src[b][i];
    }
}

double params_norm(const ModelParams& p) {
    double acc = 0.0;
    for (const auto block : param_blocks(p)) {
        for (double v : block) acc += v * v;
    }
    return std::sqrt(acc);
}

ModelParams init_params(const ModelDims& dims, LayerKind kind, TaskMode mode,
                        std::uint64_t seed) {
    if (dims.input == 0 || dims.hidden == 0 || dims.outputs == 0) {
        throw ConfigError("model dimensions must be positive");
    }
    if (mode == TaskMode::BinarySoftmax && dims.outputs != 2) {
        throw ConfigError("binary softmax head needs exactly 2 outputs");
    }
    ModelParams p;
    p.kind = kind;
    p.mode = mode;
    p.dims = dims;
    p.w_in = Matrix(dims.input, dims.hidden);
    p.b_in.assign(dims.hidden, 0.0);
    auto make_layer = [&](GraphLayerParams& layer) {
        if (kind == LayerKind::MeanAggregation) {
            layer.w_self = Matrix(dims.hidden, dims.hidden);
            layer.w_neigh = Matrix(dims.hidden, dims.hidden);
            layer.bias.assign(dims.hidden, 0.0);
        } else {
            layer.w = Matrix(dims.hidden, dims.hidden);
        }
    };
    make_layer(p.layer1);
    make_layer(p.layer2);
    p.w_out = Matrix(dims.hidden, dims.outputs);
    p.b_out.assign(dims.outputs, 0.0);

    Rng rng(seed);
    auto fill_uniform = [&](Matrix& m) {
        // fan_in is the matrix's input dimension (its row count).
        const double bound = 1.0 / std::sqrt(static_cast<double>(m.rows));
        for (double& v : m.data) v = (2.0 * rng.uniform_double() - 1.0) * bound;
    };
    fill_uniform(p.w_in);
    if (kind == LayerKind::MeanAggregation) {
        fill_uniform(p.layer1.w_self);
        fill_uniform(p.layer1.w_neigh);
        fill_uniform(p.layer2.w_self);
        fill_uniform(p.layer2.w_neigh);
    } else {
        fill_uniform(p.layer1.w);
        fill_uniform(p.layer2.w);
    }
    fill_uniform(p.w_out);
    return p;
}

DropoutMasks draw_dropout_masks(std::size_t num_nodes, std::size_t hidden, double rate,
                                Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must lie in [0, 1)");
    DropoutMasks masks{Matrix(num_nodes, hidden), Matrix(num_nodes, hidden),
                       Matrix(num_nodes, hidden)};
    if (rate == 0.0) {
        for (Matrix* m : {&masks.m0, &masks.m1, &masks.m2}) {
            std::fill(m->data.begin(), m->data.end(), 1.0);
        }
        return masks;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    for (Matrix* m : {&masks.m0, &masks.m1, &masks.m2}) {
        for (double& v : m->data) v = rng.bernoulli(rate) ? 0.0 : keep_scale;
    }
    return masks;
}

ForwardCache forward(const ModelParams& p, const Graph& g, const Matrix& x,
                     const DropoutMasks* masks) {
    if (x.cols != p.dims.input) throw InputError("feature dimension does not match the model");
    if (x.rows != g.num_nodes()) throw InputError("feature rows must cover every graph node");
    if (masks &&
        (masks->m0.rows != x.rows || masks->m0.cols != p.dims.hidden)) {
        throw InputError("dropout mask shape mismatch");
    }

    ForwardCache c;
    c.z0 = matmul(x, p.w_in);
    add_bias_rows(c.z0, p.b_in);
    c.d0 = c.z0;
    relu_inplace(c.d0);
    if (masks) multiply_inplace(c.d0, masks->m0);

    auto graph_layer = [&](const GraphLayerParams& layer, const Matrix& input, Matrix& agg,
                           Matrix& z) {
        agg = aggregate(p.kind, g, input);
        if (p.kind == LayerKind::MeanAggregation) {
            z = matmul(input, layer.w_self);
            const Matrix neigh = matmul(agg, layer.w_neigh);
            for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] += neigh.data[i];
            add_bias_rows(z, layer.bias);
        } else {
            z = matmul(agg, layer.w);
        }
    };

    graph_layer(p.layer1, c.d0, c.agg1, c.z1);
    c.d1 = c.z1;
    relu_inplace(c.d1);
    if (masks) multiply_inplace(c.d1, masks->m1);

    graph_layer(p.layer2, c.d1, c.agg2, c.z2);
    c.d2 = c.z2;
    relu_inplace(c.d2);
    if (masks) multiply_inplace(c.d2, masks->m2);

    c.scores = matmul(c.d2, p.w_out);
    add_bias_rows(c.scores, p.b_out);

    if (p.mode == TaskMode::BinarySoftmax) {
        c.outputs = c.scores;
        for (std::size_t i = 0; i < c.outputs.rows; ++i) {
            double* row = c.outputs.data.data() + i * c.outputs.cols;
            double mx = row[0];
            for (std::size_t j = 1; j < c.outputs.cols; ++j) mx = std::max(mx, row[j]);
            double acc = 0.0;
            for (std::size_t j = 0; j < c.outputs.cols; ++j) acc += std::exp(row[j] - mx);
            const double lse = mx + std::log(acc);
            for (std::size_t j = 0; j < c.outputs.cols; ++j) row[j] -= lse;
        }
    } else {
        c.outputs = c.scores;
    }
    return c;
}

std::vector<double> per_node_loss(const Matrix& outputs, const NodeLabels& labels) {
    validate_labels(labels, outputs.rows, outputs.cols);
    std::vector<double> losses(outputs.rows, 0.0);
    if (labels.mode == TaskMode::BinarySoftmax) {
        for (std::size_t i = 0; i < outputs.rows; ++i) {
            losses[i] = -outputs(i, static_cast<std::size_t>(labels.classes[i]));
        }
    } else {
        const double inv_labels = 1.0 / static_cast<double>(outputs.cols);
        for (std::size_t i = 0; i < outputs.rows; ++i) {
            double acc = 0.0;
            for (std::size_t l = 0; l < outputs.cols; ++l) {
                const double z = outputs(i, l);
                const double y = labels.multilabel(i, l);
                // Stable binary cross-entropy on the logit.
                acc += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
            }
            losses[i] = acc * inv_labels;
        }
    }
    return losses;
}

double loss_value(const Matrix& outputs, const NodeLabels& labels,
                  std::span<const double> weights) {
    const auto losses = per_node_loss(outputs, labels);
    const auto norm = normalized_weights(weights, losses.size());
    if (norm.empty()) return 0.0;  // all-zero weights: no learning signal
    double acc = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) acc += norm[i] * losses[i];
    return acc;
}

GradientResult gradients(const ModelParams& p, const Graph& g, const Matrix& x,
                         const NodeLabels& labels, std::span<const double> weights,
                         const DropoutMasks* masks) {
    const ForwardCache c = forward(p, g, x, masks);
    validate_labels(labels, x.rows, p.dims.outputs);

    GradientResult result;
    result.grads = zero_like(p);
    const auto norm = normalized_weights(weights, x.rows);
    if (norm.empty()) return result;  // zero weights -> zero gradients, loss 0

    const auto losses = per_node_loss(c.outputs, labels);
    for (std::size_t i = 0; i < losses.size(); ++i) result.loss += norm[i] * losses[i];

    Matrix g_scores = score_gradient(c.scores, c.outputs, labels);
    for (std::size_t i = 0; i < g_scores.rows; ++i) {
        for (std::size_t j = 0; j < g_scores.cols; ++j) g_scores(i, j) *= norm[i];
    }

    // Head.
    result.grads.w_out = matmul_at_b(c.d2, g_scores);
    result.grads.b_out = column_sums(g_scores);
    Matrix g_d2 = matmul_a_bt(g_scores, p.w_out);

    auto backward_layer = [&](const GraphLayerParams& layer, GraphLayerParams& grad,
                              const Matrix& input, const Matrix& agg, const Matrix& pre,
                              Matrix g_out) -> Matrix {
        relu_backward_inplace(g_out, pre);
        if (p.kind == LayerKind::MeanAggregation) {
            grad.w_self = matmul_at_b(input, g_out);
            grad.w_neigh = matmul_at_b(agg, g_out);
            grad.bias = column_sums(g_out);
            Matrix g_input = matmul_a_bt(g_out, layer.w_self);
            const Matrix g_neigh_path =
                aggregate_transpose(p.kind, g, matmul_a_bt(g_out, layer.w_neigh));
            for (std::size_t i = 0; i < g_input.data.size(); ++i) {
                g_input.data[i] += g_neigh_path.data[i];
            }
            return g_input;
        }
        grad.w = matmul_at_b(agg, g_out);
        return aggregate_transpose(p.kind, g, matmul_a_bt(g_out, layer.w));
    };

    if (masks) multiply_inplace(g_d2, masks->m2);
    Matrix g_d1 = backward_layer(p.layer2, result.grads.layer2, c.d1, c.agg2, c.z2,
                                 std::move(g_d2));
    if (masks) multiply_inplace(g_d1, masks->m1);
    Matrix g_d0 = backward_layer(p.layer1, result.grads.layer1, c.d0, c.agg1, c.z1,
                                 std::move(g_d1));
    if (masks) multiply_inplace(g_d0, masks->m0);

    relu_backward_inplace(g_d0, c.z0);
    result.grads.w_in = matmul_at_b(x, g_d0);
    result.grads.b_in = column_sums(g_d0);
    return result;
}

std::vector<double> loss_directional_derivative(const ModelParams& p,
                                                const ModelParams& direction, const Graph& g,
                                                const Matrix& x, const NodeLabels& labels,
                                                const DropoutMasks* masks) {
    const ForwardCache c = forward(p, g, x, masks);
    validate_labels(labels, x.rows, p.dims.outputs);

    // Tangent pass mirroring the forward computation, with the inputs fixed
    // and parameters moving along `direction`.
    Matrix dz0 = matmul(x, direction.w_in);
    add_bias_rows(dz0, direction.b_in);
    relu_backward_inplace(dz0, c.z0);  // d relu(z) = [z > 0] dz
    if (masks) multiply_inplace(dz0, masks->m0);
    Matrix dd0 = std::move(dz0);

    auto layer_tangent = [&](const GraphLayerParams& layer, const GraphLayerParams& dlayer,
                             const Matrix& input, const Matrix& d_input, const Matrix& agg,
                             const Matrix& pre, const Matrix& mask_or_null,
                             bool has_mask) -> Matrix {
        Matrix dz;
        if (p.kind == LayerKind::MeanAggregation) {
            dz = matmul(d_input, layer.w_self);
            const Matrix t1 = matmul(input, dlayer.w_self);
            const Matrix dagg = aggregate(p.kind, g, d_input);
            const Matrix t2 = matmul(dagg, layer.w_neigh);
            const Matrix t3 = matmul(agg, dlayer.w_neigh);
            for (std::size_t i = 0; i < dz.data.size(); ++i) {
                dz.data[i] += t1.data[i] + t2.data[i] + t3.data[i];
            }
            add_bias_rows(dz, dlayer.bias);
        } else {
            const Matrix dagg = aggregate(p.kind, g, d_input);
            dz = matmul(dagg, layer.w);
            const Matrix t1 = matmul(agg, dlayer.w);
            for (std::size_t i = 0; i < dz.data.size(); ++i) dz.data[i] += t1.data[i];
        }
        relu_backward_inplace(dz, pre);
        if (has_mask) multiply_inplace(dz, mask_or_null);
        return dz;
    };

    Matrix dd1 = layer_tangent(p.layer1, direction.layer1, c.d0, dd0, c.agg1, c.z1,
                               masks ? masks->m1 : Matrix(), masks != nullptr);
    Matrix dd2 = layer_tangent(p.layer2, direction.layer2, c.d1, dd1, c.agg2, c.z2,
                               masks ? masks->m2 : Matrix(), masks != nullptr);

    Matrix dscores = matmul(dd2, p.w_out);
    const Matrix t_out = matmul(c.d2, direction.w_out);
    for (std::size_t i = 0; i < dscores.data.size(); ++i) dscores.data[i] += t_out.data[i];
    add_bias_rows(dscores, direction.b_out);

    const Matrix dl_dscore = score_gradient(c.scores, c.outputs, labels);
    std::vector<double> out(x.rows, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dscores.cols; ++j) acc += dl_dscore(i, j) * dscores(i, j);
        out[i] = acc;
    }
    return out;
}

TrainConfig default_train_config(Task task) {
    TrainConfig cfg;
    switch (task) {
        case Task::T1:
            cfg.hidden_dim = 105;
            cfg.learning_rate = 0.00045;
            cfg.meta_learning_rate = 0.00287;
            cfg.task = TaskMode::BinarySoftmax;
            break;
        case Task::T2:
            cfg.hidden_dim = 60;
            cfg.learning_rate = 0.00411;
            cfg.meta_learning_rate = 0.00015;
            cfg.task = TaskMode::BinarySoftmax;
            break;
        case Task::T3:
            cfg.hidden_dim = 68;
            cfg.learning_rate = 0.00771;
            cfg.meta_learning_rate = 0.00061;
            cfg.task = TaskMode::MultilabelSigmoid;
            break;
    }
    return cfg;
}

Trainer::Trainer(const Graph& g, const Matrix& x, NodeLabels labels, MetaGraphView meta,
                 TrainConfig config, ModelParams initial)
    : graph_(g),
      features_(x),
      labels_(std::move(labels)),
      meta_(std::move(meta)),
      config_(config),
      params_(std::move(initial)),
      rng_main_(derive_seed(config.seed, "gnn/dropout-main")),
      rng_meta_(derive_seed(config.seed, "gnn/dropout-meta")) {
    if (!meta_.graph || meta_.graph->num_nodes() == 0) {
        throw ConfigError("meta graph must be non-empty");
    }
    if (meta_.features.rows != meta_.graph->num_nodes()) {
        throw InputError("meta feature rows must cover the meta graph");
    }
    if (config_.dropout_rate < 0.0 || config_.dropout_rate > 0.5) {
        throw ConfigError("dropout rate must lie in [0, 0.5]");
    }
    if (config_.learning_rate < 0.0 || config_.meta_coefficient < 0.0) {
        throw ConfigError("learning rate and meta coefficient must be nonnegative");
    }
    validate_labels(labels_, graph_.num_nodes(), params_.dims.outputs);
    validate_labels(meta_.labels, meta_.graph->num_nodes(), params_.dims.outputs);
}

StepDiagnostics Trainer::meta_step() {
    const double lr = config_.learning_rate;
    const double lambda =
        config_.mode == TrainConfig::Mode::Plain ? 0.0 : config_.meta_coefficient;

    DropoutMasks main_masks;
    const DropoutMasks* main_ptr = nullptr;
    if (config_.dropout_rate > 0.0) {
        main_masks = draw_dropout_masks(graph_.num_nodes(), params_.dims.hidden,
                                        config_.dropout_rate, rng_main_);
        main_ptr = &main_masks;
    }

    const GradientResult main = gradients(params_, graph_, features_, labels_, {}, main_ptr);
    StepDiagnostics diag;
    diag.loss_main = main.loss;
    diag.grad_norm_main = params_norm(main.grads);

    if (lambda != 0.0) {
        // Candidate step, then the meta gradient evaluated at the candidate.
        ModelParams candidate = params_;
        axpy_params(candidate, -lr, main.grads);

        DropoutMasks meta_masks;
        const DropoutMasks* meta_ptr = nullptr;
        if (config_.dropout_rate > 0.0) {
            meta_masks = draw_dropout_masks(meta_.graph->num_nodes(), params_.dims.hidden,
                                            config_.dropout_rate, rng_meta_);
            meta_ptr = &meta_masks;
        }
        const GradientResult meta =
            gradients(candidate, *meta_.graph, meta_.features, meta_.labels, {}, meta_ptr);
        diag.loss_meta = meta.loss;
        diag.grad_norm_meta = params_norm(meta.grads);

        axpy_params(params_, -lr, main.grads);
        axpy_params(params_, -lr * lambda, meta.grads);
    } else {
        axpy_params(params_, -lr, main.grads);
        diag.loss_meta = loss_value(
            forward(params_, *meta_.graph, meta_.features, nullptr).outputs, meta_.labels, {});
    }
    return diag;
}

StepDiagnostics Trainer::reweight_step() {
    const double lr = config_.learning_rate;
    const std::size_t n = graph_.num_nodes();

    DropoutMasks main_masks;
    const DropoutMasks* main_ptr = nullptr;
    if (config_.dropout_rate > 0.0) {
        main_masks = draw_dropout_masks(n, params_.dims.hidden, config_.dropout_rate, rng_main_);
        main_ptr = &main_masks;
    }
    DropoutMasks meta_masks;
    const DropoutMasks* meta_ptr = nullptr;
    if (config_.dropout_rate > 0.0) {
        meta_masks = draw_dropout_masks(meta_.graph->num_nodes(), params_.dims.hidden,
                                        config_.dropout_rate, rng_meta_);
        meta_ptr = &meta_masks;
    }

    // With the inner step theta'(eps) = theta - lr * grad(sum eps_i l_i)
    // evaluated at eps = 0, the weight signal is
    // -d L_meta/d eps_i = lr * <grad L_meta(theta), grad l_i(theta)>,
    // computed for every i at once by a tangent pass along the meta gradient.
    const GradientResult meta =
        gradients(params_, *meta_.graph, meta_.features, meta_.labels, {}, meta_ptr);
    const std::vector<double> alignment = loss_directional_derivative(
        params_, meta.grads, graph_, features_, labels_, main_ptr);

    std::vector<double> weights(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = std::max(0.0, lr * alignment[i]);
        total += weights[i];
    }
    if (total == 0.0) {
        weights.assign(n, 1.0 / static_cast<double>(n));
    } else {
        for (double& w : weights) w /= total;
    }

    const GradientResult weighted =
        gradients(params_, graph_, features_, labels_, weights, main_ptr);
    axpy_params(params_, -lr, weighted.grads);
    sample_weights_ = std::move(weights);

    StepDiagnostics diag;
    diag.loss_main = weighted.loss;
    diag.loss_meta = meta.loss;
    diag.grad_norm_main = params_norm(weighted.grads);
    diag.grad_norm_meta = params_norm(meta.grads);
    return diag;
}

StepDiagnostics Trainer::step() {
    return config_.mode == TrainConfig::Mode::Reweight ? reweight_step() : meta_step();
}

EpochStats Trainer::eval_losses() const {
    EpochStats stats;
    stats.loss_main =
        loss_value(forward(params_, graph_, features_, nullptr).outputs, labels_, {});
    stats.loss_meta = loss_value(
        forward(params_, *meta_.graph, meta_.features, nullptr).outputs, meta_.labels, {});
    return stats;
}

TrainResult Trainer::run() {
    TrainResult result;
    result.trace.reserve(config_.epochs + 1);

    EpochStats stats = eval_losses();
    result.trace.push_back(stats);
    ModelParams best = params_;
    double best_meta = stats.loss_meta;

    for (std::size_t epoch = 1; epoch <= config_.epochs; ++epoch) {
        step();
        stats = eval_losses();
        result.trace.push_back(stats);
        if (stats.loss_meta < best_meta) {
            best_meta = stats.loss_meta;
            best = params_;
        }
    }
    result.params = std::move(best);
    result.sample_weights = sample_weights_;
    return result;
}

TrainResult train(const Graph& g, const Matrix& x, const NodeLabels& labels,
                  const MetaGraphView& meta, const TrainConfig& config) {
    const std::size_t outputs =
        config.task == TaskMode::BinarySoftmax ? 2 : labels.multilabel.cols;
    const ModelDims dims{x.cols, config.hidden_dim, outputs};
    ModelParams initial =
        init_params(dims, config.layer_kind, config.task, derive_seed(config.seed, "gnn/init"));
    Trainer trainer(g, x, labels, meta, config, std::move(initial));
    return trainer.run();
}

Predictions predict(const ModelParams& p, const Graph& g, const Matrix& x) {
    const ForwardCache c = forward(p, g, x, nullptr);
    Predictions out;
    if (p.mode == TaskMode::BinarySoftmax) {
        out.scores = Matrix(x.rows, 1);
        out.labels.resize(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) {
            out.scores(i, 0) = std::exp(c.outputs(i, 1));
            out.labels[i] = c.outputs(i, 1) > c.outputs(i, 0) ? 1 : 0;
        }
    } else {
        out.scores = Matrix(x.rows, p.dims.outputs);
        out.label_matrix = Matrix(x.rows, p.dims.outputs);
        for (std::size_t i = 0; i < x.rows; ++i) {
            for (std::size_t l = 0; l < p.dims.outputs; ++l) {
                out.scores(i, l) = stable_sigmoid(c.scores(i, l));
                out.label_matrix(i, l) = out.scores(i, l) > 0.5 ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

}  // namespace grace
