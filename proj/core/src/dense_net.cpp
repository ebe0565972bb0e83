#include "hubcast/dense_net.hpp"

#include "gemm.hpp"
#include "hubcast/errors.hpp"
#include "hubcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hubcast {

DenseNet DenseNet::init(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw ShapeError("dense net needs at least input and output dims");
  for (int d : dims)
    if (d <= 0) throw ShapeError("dense net dims must be positive");
  DenseNet net;
  net.layer_dims = dims;
  Rng rng(mix_seed(seed, hash_tag("dense-net-init")));
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::size_t fan_in = static_cast<std::size_t>(dims[l]);
    std::size_t fan_out = static_cast<std::size_t>(dims[l + 1]);
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<double> w(fan_in * fan_out);
    for (double& v : w) v = (2.0 * rng.uniform() - 1.0) * bound;
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(fan_out, 0.0);
  }
  return net;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

bool DenseNet::finite() const {
  auto ok = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  for (const auto& w : weights)
    if (!ok(w)) return false;
  for (const auto& b : biases)
    if (!ok(b)) return false;
  return true;
}

void DenseNet::check_shapes() const {
  if (layer_dims.size() < 2 || weights.size() != layer_dims.size() - 1 ||
      biases.size() != weights.size())
    throw ShapeError("dense net: layer bookkeeping is inconsistent");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    std::size_t fan_in = static_cast<std::size_t>(layer_dims[l]);
    std::size_t fan_out = static_cast<std::size_t>(layer_dims[l + 1]);
    if (weights[l].size() != fan_in * fan_out || biases[l].size() != fan_out)
      throw ShapeError("dense net: layer " + std::to_string(l) + " has wrong parameter shape");
  }
}

ParamTensors ParamTensors::zeros_like(const DenseNet& net) {
  ParamTensors p;
  for (const auto& w : net.weights) p.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : net.biases) p.biases.emplace_back(b.size(), 0.0);
  return p;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("train config: learning_rate must be positive");
  if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (weight_decay < 0.0) throw ConfigError("train config: weight_decay must be >= 0");
  if (batch_size < 0) throw ConfigError("train config: batch_size must be >= 0");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("train config: beta constants must lie in [0,1)");
  if (epsilon <= 0.0) throw ConfigError("train config: epsilon must be positive");
}

AdamState AdamState::init(const DenseNet& net) {
  return {ParamTensors::zeros_like(net), ParamTensors::zeros_like(net), 0};
}

std::size_t Dataset::size() const {
  if (input_dim <= 0) return 0;
  return inputs.size() / static_cast<std::size_t>(input_dim);
}

void Dataset::add(const std::vector<double>& x, const std::vector<double>& y) {
  if (static_cast<int>(x.size()) != input_dim || static_cast<int>(y.size()) != output_dim)
    throw ShapeError("dataset: sample does not match declared dims");
  inputs.insert(inputs.end(), x.begin(), x.end());
  targets.insert(targets.end(), y.begin(), y.end());
}

std::vector<double> forward(const DenseNet& net, const std::vector<double>& x) {
  return forward_trace(net, x).back();
}

std::vector<std::vector<double>> forward_trace(const DenseNet& net, const std::vector<double>& x) {
  net.check_shapes();
  if (static_cast<int>(x.size()) != net.input_dim())
    throw ShapeError("forward: input has dim " + std::to_string(x.size()) + ", net expects " +
                     std::to_string(net.input_dim()));
  std::vector<std::vector<double>> acts;
  acts.push_back(x);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const std::size_t fan_in = static_cast<std::size_t>(net.layer_dims[l]);
    const std::size_t fan_out = static_cast<std::size_t>(net.layer_dims[l + 1]);
    std::vector<double> z = net.biases[l];
    const auto& prev = acts.back();
    for (std::size_t i = 0; i < fan_in; ++i) {
      double a = prev[i];
      const double* w_row = net.weights[l].data() + i * fan_out;
      for (std::size_t j = 0; j < fan_out; ++j) z[j] += a * w_row[j];
    }
    if (l + 1 < net.layer_count())
      for (double& v : z) v = std::max(0.0, v);
    acts.push_back(std::move(z));
  }
  return acts;
}

namespace {

// Batched forward over a row-major input block. Returns pre-activation
// copies are not needed: hidden activations are ReLU outputs, and the
// derivative mask is recoverable from the activation sign.
std::vector<std::vector<double>> batch_forward(const DenseNet& net, const double* x,
                                               std::size_t n) {
  std::vector<std::vector<double>> acts;
  acts.emplace_back(x, x + n * static_cast<std::size_t>(net.input_dim()));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const std::size_t fan_in = static_cast<std::size_t>(net.layer_dims[l]);
    const std::size_t fan_out = static_cast<std::size_t>(net.layer_dims[l + 1]);
    std::vector<double> z(n * fan_out);
    for (std::size_t r = 0; r < n; ++r)
      std::copy(net.biases[l].begin(), net.biases[l].end(), z.begin() + r * fan_out);
    detail::gemm(false, false, n, fan_out, fan_in, acts.back().data(), net.weights[l].data(), 1.0,
                 z.data());
    if (l + 1 < net.layer_count())
      for (double& v : z) v = std::max(0.0, v);
    acts.push_back(std::move(z));
  }
  return acts;
}

double batch_loss_and_delta(const DenseNet& net, const std::vector<double>& output,
                            const double* targets, std::size_t n, std::vector<double>* delta) {
  const std::size_t out_dim = static_cast<std::size_t>(net.output_dim());
  const double denom = static_cast<double>(n * out_dim);
  double sum_sq = 0.0;
  if (delta) delta->resize(n * out_dim);
  for (std::size_t i = 0; i < n * out_dim; ++i) {
    double e = output[i] - targets[i];
    sum_sq += e * e;
    if (delta) (*delta)[i] = 2.0 * e / denom;
  }
  return sum_sq / denom;
}

// Backpropagation through the traced activations; fills `grads`.
void batch_backward(const DenseNet& net, const std::vector<std::vector<double>>& acts,
                    std::vector<double> delta, std::size_t n, ParamTensors& grads) {
  for (std::size_t l = net.layer_count(); l-- > 0;) {
    const std::size_t fan_in = static_cast<std::size_t>(net.layer_dims[l]);
    const std::size_t fan_out = static_cast<std::size_t>(net.layer_dims[l + 1]);
    // dW = A_{l}^T * delta ; db = column sums of delta.
    detail::gemm(true, false, fan_in, fan_out, n, acts[l].data(), delta.data(), 0.0,
                 grads.weights[l].data());
    std::fill(grads.biases[l].begin(), grads.biases[l].end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = delta.data() + r * fan_out;
      for (std::size_t j = 0; j < fan_out; ++j) grads.biases[l][j] += row[j];
    }
    if (l == 0) break;
    // delta_{l-1} = (delta * W^T) masked by ReLU'(z_{l-1}).
    std::vector<double> prev_delta(n * fan_in);
    detail::gemm(false, true, n, fan_in, fan_out, delta.data(), net.weights[l].data(), 0.0,
                 prev_delta.data());
    const auto& hidden = acts[l];
    for (std::size_t i = 0; i < prev_delta.size(); ++i)
      if (hidden[i] <= 0.0) prev_delta[i] = 0.0;
    delta = std::move(prev_delta);
  }
}

} // namespace

double loss(const DenseNet& net, const Dataset& batch) {
  net.check_shapes();
  if (batch.size() == 0) throw DataError("loss: empty batch");
  if (batch.input_dim != net.input_dim() || batch.output_dim != net.output_dim())
    throw ShapeError("loss: dataset dims do not match net");
  auto acts = batch_forward(net, batch.inputs.data(), batch.size());
  return batch_loss_and_delta(net, acts.back(), batch.targets.data(), batch.size(), nullptr);
}

ParamTensors gradients(const DenseNet& net, const Dataset& batch) {
  net.check_shapes();
  if (batch.size() == 0) throw DataError("gradients: empty batch");
  if (batch.input_dim != net.input_dim() || batch.output_dim != net.output_dim())
    throw ShapeError("gradients: dataset dims do not match net");
  auto acts = batch_forward(net, batch.inputs.data(), batch.size());
  std::vector<double> delta;
  batch_loss_and_delta(net, acts.back(), batch.targets.data(), batch.size(), &delta);
  ParamTensors grads = ParamTensors::zeros_like(net);
  batch_backward(net, acts, std::move(delta), batch.size(), grads);
  return grads;
}

void adam_step(DenseNet& net, const ParamTensors& grads, AdamState& state,
               const TrainConfig& cfg) {
  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& param, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double m_hat = m[i] / bias1;
      double v_hat = v[i] / bias2;
      param[i] -= cfg.learning_rate * (m_hat / (std::sqrt(v_hat) + cfg.epsilon) +
                                       cfg.weight_decay * param[i]);
    }
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    update(net.weights[l], grads.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(net.biases[l], grads.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

TrainResult train(DenseNet net, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  net.check_shapes();
  if (data.size() == 0) throw TrainError("train: empty dataset");
  if (data.input_dim != net.input_dim() || data.output_dim != net.output_dim())
    throw ShapeError("train: dataset dims do not match net");

  const std::size_t n = data.size();
  const std::size_t batch =
      cfg.batch_size == 0 ? n : std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  AdamState state = AdamState::init(net);
  Rng shuffle_rng(mix_seed(cfg.seed, hash_tag("train-shuffle")));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  Dataset slice;
  slice.input_dim = data.input_dim;
  slice.output_dim = data.output_dim;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) { // Fisher-Yates with the seeded stream
      for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(shuffle_rng.below(i + 1));
        std::swap(order[i], order[j]);
      }
    }
    double epoch_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t count = std::min(batch, n - start);
      const double* x = nullptr;
      const double* y = nullptr;
      if (batch == n) {
        x = data.inputs.data();
        y = data.targets.data();
      } else {
        slice.inputs.clear();
        slice.targets.clear();
        for (std::size_t i = 0; i < count; ++i) {
          std::size_t src = order[start + i];
          slice.inputs.insert(slice.inputs.end(), data.input_row(src),
                              data.input_row(src) + data.input_dim);
          slice.targets.insert(slice.targets.end(), data.target_row(src),
                               data.target_row(src) + data.output_dim);
        }
        x = slice.inputs.data();
        y = slice.targets.data();
      }
      auto acts = batch_forward(net, x, count);
      std::vector<double> delta;
      double batch_mse = batch_loss_and_delta(net, acts.back(), y, count, &delta);
      ParamTensors grads = ParamTensors::zeros_like(net);
      batch_backward(net, acts, std::move(delta), count, grads);
      adam_step(net, grads, state, cfg);
      epoch_sum += batch_mse * static_cast<double>(count);
      seen += count;
    }
    double epoch_mean = epoch_sum / static_cast<double>(seen);
    if (!std::isfinite(epoch_mean))
      throw TrainError("train: loss diverged at epoch " + std::to_string(epoch + 1));
    result.epoch_loss.push_back(epoch_mean);
  }
  if (!net.finite()) throw TrainError("train: parameters not finite after final epoch");
  result.net = std::move(net);
  return result;
}

void save_dense_net(const DenseNet& net, const std::string& path) {
  net.check_shapes();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open model file for writing: " + path);
  out << "#hubcast-densenet v1\n";
  out << "dims";
  for (int d : net.layer_dims) out << ' ' << d;
  out << "\n";
  char buf[40];
  auto dump = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      out << buf << (i + 1 == v.size() ? "" : " ");
    }
    out << "\n";
  };
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    dump(net.weights[l]);
    dump(net.biases[l]);
  }
  if (!out) throw DataError("failed writing model file: " + path);
}

DenseNet load_dense_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "#hubcast-densenet v1")
    throw DataError(path + ": unsupported model header");
  if (!std::getline(in, line)) throw DataError(path + ": missing dims line");
  std::istringstream dims_in(line);
  std::string tag;
  dims_in >> tag;
  if (tag != "dims") throw DataError(path + ": missing dims line");
  DenseNet net;
  int d;
  while (dims_in >> d) net.layer_dims.push_back(d);
  if (net.layer_dims.size() < 2) throw DataError(path + ": bad dims line");
  auto read_row = [&](std::size_t count) {
    if (!std::getline(in, line)) throw DataError(path + ": truncated parameter block");
    std::istringstream row(line);
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
      if (!(row >> v[i])) throw DataError(path + ": truncated parameter row");
    return v;
  };
  for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
    std::size_t fan_in = static_cast<std::size_t>(net.layer_dims[l]);
    std::size_t fan_out = static_cast<std::size_t>(net.layer_dims[l + 1]);
    net.weights.push_back(read_row(fan_in * fan_out));
    net.biases.push_back(read_row(fan_out));
  }
  net.check_shapes();
  return net;
}

Normalizer Normalizer::fit(const Dataset& data) {
  if (data.size() == 0) throw DataError("normalizer: empty dataset");
  const std::size_t dim = static_cast<std::size_t>(data.input_dim);
  const std::size_t n = data.size();
  Normalizer norm;
  norm.mean.assign(dim, 0.0);
  norm.stddev.assign(dim, 1.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) norm.mean[c] += data.inputs[r * dim + c];
  for (double& m : norm.mean) m /= static_cast<double>(n);
  std::vector<double> var(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      double d = data.inputs[r * dim + c] - norm.mean[c];
      var[c] += d * d;
    }
  for (std::size_t c = 0; c < dim; ++c) {
    double sd = std::sqrt(var[c] / static_cast<double>(n));
    if (sd > 1e-12) norm.stddev[c] = sd;
  }
  return norm;
}

std::vector<double> Normalizer::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size()) throw ShapeError("normalizer: input has wrong dimension");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / stddev[i];
  return out;
}

Dataset Normalizer::apply_all(const Dataset& data) const {
  Dataset out = data;
  const std::size_t dim = static_cast<std::size_t>(data.input_dim);
  for (std::size_t r = 0; r < data.size(); ++r)
    for (std::size_t c = 0; c < dim; ++c)
      out.inputs[r * dim + c] = (data.inputs[r * dim + c] - mean[c]) / stddev[c];
  return out;
}

} // namespace hubcast
