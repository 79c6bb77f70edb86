#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "grace/graph.hpp"
#include "grace/matrix.hpp"
#include "grace/rng.hpp"

namespace grace {

// Two message-passing layer kinds: GraphSAGE-style mean aggregation with
// separate self/neighbor weights, and the symmetric normalized-adjacency
// convolution with a single weight per layer.
enum class LayerKind { MeanAggregation, NormalizedAdjacency };

enum class TaskMode { BinarySoftmax, MultilabelSigmoid };

struct ModelDims {
    std::size_t input = 0;
    std::size_t hidden = 0;
    std::size_t outputs = 0;
};

struct GraphLayerParams {
    // Mean aggregation uses w_self/w_neigh/bias; normalized adjacency uses w.
    Matrix w_self;
    Matrix w_neigh;
    std::vector<double> bias;
    Matrix w;
};

// Input projection + two graph layers + linear head. The same struct carries
// gradients (parameter-shaped).
struct ModelParams {
    LayerKind kind = LayerKind::MeanAggregation;
    TaskMode mode = TaskMode::BinarySoftmax;
    ModelDims dims;
    Matrix w_in;
    std::vector<double> b_in;
    GraphLayerParams layer1;
    GraphLayerParams layer2;
    Matrix w_out;
    std::vector<double> b_out;
};

// Parameter blocks in declaration order; the order fixes the checkpoint
// layout, the flattened-vector layout, and SGD update order.
std::vector<std::span<double>> param_blocks(ModelParams& p);
std::vector<std::span<const double>> param_blocks(const ModelParams& p);
std::size_t num_params(const ModelParams& p);
std::vector<double> flatten_params(const ModelParams& p);
void assign_params(ModelParams& p, std::span<const double> flat);
// p += scale * q, blockwise.
void axpy_params(ModelParams& p, double scale, const ModelParams& q);
double params_norm(const ModelParams& p);

// Uniform +-1/sqrt(fan_in) weights, zero biases, deterministic in the seed.
ModelParams init_params(const ModelDims& dims, LayerKind kind, TaskMode mode,
                        std::uint64_t seed);

// Inverted dropout masks with entries {0, 1/(1-rate)}; one mask per hidden
// activation (post input projection and post each graph layer).
struct DropoutMasks {
    Matrix m0, m1, m2;
};
DropoutMasks draw_dropout_masks(std::size_t num_nodes, std::size_t hidden, double rate,
                                Rng& rng);

struct ForwardCache {
    Matrix z0;       // input-projection pre-activation
    Matrix d0;       // relu (+ dropout) of z0; layer-1 input
    Matrix agg1;     // aggregated layer-1 input
    Matrix z1;
    Matrix d1;
    Matrix agg2;
    Matrix z2;
    Matrix d2;
    Matrix scores;   // head logits
    Matrix outputs;  // binary: row log-softmax of scores; multilabel: scores
};

// masks == nullptr means eval mode; training passes the epoch's masks.
ForwardCache forward(const ModelParams& p, const Graph& g, const Matrix& x,
                     const DropoutMasks* masks);

// Labels for either task head. Binary uses `classes` (0/1); multilabel uses
// the node x label 0/1 matrix.
struct NodeLabels {
    TaskMode mode = TaskMode::BinarySoftmax;
    std::vector<int> classes;
    Matrix multilabel;

    std::size_t count() const {
        return mode == TaskMode::BinarySoftmax ? classes.size() : multilabel.rows;
    }
};

// Weighted mean loss; `weights` empty means uniform, otherwise weights are
// normalized internally so only their proportions matter. Binary: negative
// log-likelihood of the true class. Multilabel: per-label binary
// cross-entropy on sigmoid outputs, averaged over labels per node.
double loss_value(const Matrix& outputs, const NodeLabels& labels,
                  std::span<const double> weights);
std::vector<double> per_node_loss(const Matrix& outputs, const NodeLabels& labels);

struct GradientResult {
    ModelParams grads;
    double loss = 0.0;
};

// Exact reverse-mode gradients of the weighted loss.
GradientResult gradients(const ModelParams& p, const Graph& g, const Matrix& x,
                         const NodeLabels& labels, std::span<const double> weights,
                         const DropoutMasks* masks);

// Directional derivative d l_i / dt of every per-node loss along a parameter
// direction (forward-mode tangent pass); used by the reweighting update.
std::vector<double> loss_directional_derivative(const ModelParams& p,
                                                const ModelParams& direction, const Graph& g,
                                                const Matrix& x, const NodeLabels& labels,
                                                const DropoutMasks* masks);

struct TrainConfig {
    enum class Mode { Plain, Meta, Reweight };

    double learning_rate = 0.00045;
    double meta_coefficient = 1.0;
    // Carried through configs and checkpoints for reporting; the update rule
    // itself applies learning_rate to both gradient terms.
    double meta_learning_rate = 0.00287;
    std::size_t epochs = 200;
    double dropout_rate = 0.1;
    std::uint64_t seed = 0;
    TaskMode task = TaskMode::BinarySoftmax;
    Mode mode = Mode::Meta;
    std::size_t hidden_dim = 105;
    LayerKind layer_kind = LayerKind::MeanAggregation;
};

// Tuned defaults per task (hidden_dim, learning_rate, meta_learning_rate).
enum class Task { T1, T2, T3 };
TrainConfig default_train_config(Task task);

// Meta reference set: an induced subgraph of the training graph with its own
// gathered feature rows and labels.
struct MetaGraphView {
    const Graph* graph = nullptr;
    Matrix features;
    NodeLabels labels;
};

struct StepDiagnostics {
    double loss_main = 0.0;
    double loss_meta = 0.0;
    double grad_norm_main = 0.0;
    double grad_norm_meta = 0.0;
};

struct EpochStats {
    double loss_main = 0.0;
    double loss_meta = 0.0;
};

struct TrainResult {
    ModelParams params;             // best by meta loss over the run
    std::vector<EpochStats> trace;  // entry 0 is the initial parameters
    std::vector<double> sample_weights;  // last reweighting step's weights
};

// Full-batch trainer. Meta mode takes a candidate step on the main loss,
// evaluates the meta-graph loss gradient at the candidate point, and applies
// the combined update; reweight mode converts meta-gradient alignment of the
// per-sample losses into sample weights. Dropout masks for the main and meta
// passes come from two independent seeded streams, so a zero meta
// coefficient reproduces plain training bit for bit.
class Trainer {
public:
    Trainer(const Graph& g, const Matrix& x, NodeLabels labels, MetaGraphView meta,
            TrainConfig config, ModelParams initial);

    StepDiagnostics meta_step();
    StepDiagnostics reweight_step();

    TrainResult run();

    const ModelParams& params() const { return params_; }
    const std::vector<double>& sample_weights() const { return sample_weights_; }

private:
    StepDiagnostics step();
    EpochStats eval_losses() const;

    const Graph& graph_;
    const Matrix& features_;
    NodeLabels labels_;
    MetaGraphView meta_;
    TrainConfig config_;
    ModelParams params_;
    Rng rng_main_;
    Rng rng_meta_;
    std::vector<double> sample_weights_;
};

// One-call variant: deterministic initialization from the config seed, then
// the full training loop.
TrainResult train(const Graph& g, const Matrix& x, const NodeLabels& labels,
                  const MetaGraphView& meta, const TrainConfig& config);

struct Predictions {
    Matrix scores;                // binary: n x 1 probability of class 1; multilabel: sigmoids
    std::vector<int> labels;      // binary argmax labels
    Matrix label_matrix;          // multilabel 0/1 at the 0.5 threshold
};

Predictions predict(const ModelParams& p, const Graph& g, const Matrix& x);

}  // namespace grace
