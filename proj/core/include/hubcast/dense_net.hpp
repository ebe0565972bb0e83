#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hubcast {

/**
 * Fully connected network: affine layers with ReLU on every hidden layer
 * and a linear output layer. Weights are row-major (fan_in x fan_out).
 */
struct DenseNet {
  std::vector<int> layer_dims; // [input, hidden..., output]
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  /// He-uniform initialization from a seeded generator; biases start at 0.
  static DenseNet init(const std::vector<int>& dims, std::uint64_t seed);

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;
  bool finite() const;
  void check_shapes() const;
};

/// Per-parameter gradient (or Adam moment) storage, mirroring a DenseNet.
struct ParamTensors {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static ParamTensors zeros_like(const DenseNet& net);
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 500;
  double weight_decay = 0.01; // decoupled from the adaptive step
  int batch_size = 0;         // 0 = full batch
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Adam accumulators; step counts the updates applied so far.
struct AdamState {
  ParamTensors first_moment;
  ParamTensors second_moment;
  long long step = 0;

  static AdamState init(const DenseNet& net);
};

/// Row-major sample matrix pair for supervised training.
struct Dataset {
  int input_dim = 0;
  int output_dim = 0;
  std::vector<double> inputs;  // size() * input_dim
  std::vector<double> targets; // size() * output_dim

  std::size_t size() const;
  void add(const std::vector<double>& x, const std::vector<double>& y);
  const double* input_row(std::size_t i) const { return inputs.data() + i * input_dim; }
  const double* target_row(std::size_t i) const { return targets.data() + i * output_dim; }
};

/// Single forward pass.
std::vector<double> forward(const DenseNet& net, const std::vector<double>& x);

/// Forward pass keeping every layer's activations (input first, output
/// last); used by backpropagation and by the activation-sign tests.
std::vector<std::vector<double>> forward_trace(const DenseNet& net, const std::vector<double>& x);

/// Mean squared error over all outputs and samples. Weight decay is not
/// part of the loss value; it is applied decoupled in the optimizer step.
double loss(const DenseNet& net, const Dataset& batch);

/// Exact gradient of `loss` for every parameter, by backpropagation.
ParamTensors gradients(const DenseNet& net, const Dataset& batch);

struct TrainResult {
  DenseNet net;
  std::vector<double> epoch_loss;
};

/**
 * Adam with decoupled weight decay. Full-batch by default; a positive
 * batch_size enables seeded-shuffle mini-batches. Deterministic for a
 * fixed (net, dataset, config). Throws TrainError when the loss stops
 * being finite, naming the epoch.
 */
TrainResult train(DenseNet net, const Dataset& data, const TrainConfig& cfg);

/// One optimizer update from precomputed gradients (exposed for the
/// weight-decay and determinism tests).
void adam_step(DenseNet& net, const ParamTensors& grads, AdamState& state,
               const TrainConfig& cfg);

/// Versioned text format: dims header plus row-major parameters with
/// round-trip-exact doubles.
void save_dense_net(const DenseNet& net, const std::string& path);
DenseNet load_dense_net(const std::string& path);

/// Feature standardization fitted on a training set and stored with the
/// model so inference applies the identical transform.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev; // constant features keep stddev 1

  static Normalizer fit(const Dataset& data);
  std::vector<double> apply(const std::vector<double>& x) const;
  Dataset apply_all(const Dataset& data) const;
};

} // namespace hubcast
