#include "hubcast/ensemble.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>

namespace hubcast {

std::vector<double> EnsembleInput::flattened() const {
  check();
  std::vector<double> out;
  out.reserve(u_hat.size() + o_hat.size() + calendar.size());
  out.insert(out.end(), u_hat.begin(), u_hat.end());
  out.insert(out.end(), o_hat.begin(), o_hat.end());
  out.insert(out.end(), calendar.begin(), calendar.end());
  return out;
}

void EnsembleInput::check() const {
  if (u_hat.size() != o_hat.size())
    throw ShapeError("ensemble input: u_hat and o_hat lengths differ");
  for (double v : u_hat)
    if (v < 0.0) throw DataError("ensemble input: negative unordered forecast entry");
  for (double v : o_hat)
    if (v < 0.0) throw DataError("ensemble input: negative ordered forecast entry");
}

std::vector<double> combine_sum(const std::vector<double>& u_hat,
                                const std::vector<double>& o_hat) {
  if (u_hat.size() != o_hat.size())
    throw ShapeError("combine_sum: forecast lengths differ (" + std::to_string(u_hat.size()) +
                     " vs " + std::to_string(o_hat.size()) + ")");
  std::vector<double> out(u_hat.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u_hat[i] + o_hat[i];
  return out;
}

void EnsembleModel::check() const {
  net.check_shapes();
  if (net.layer_dims.size() != 3 || net.layer_dims[1] != 256)
    throw ShapeError("ensemble model: needs exactly one hidden layer of 256 units");
  if (net.output_dim() != horizon_periods)
    throw ShapeError("ensemble model: output width must equal the horizon");
}

EnsembleModel train_ensemble(const std::vector<EnsembleInput>& inputs,
                             const std::vector<std::vector<double>>& actual_totals,
                             const TrainConfig& cfg) {
  if (inputs.empty()) throw TrainError("ensemble: empty training set");
  if (inputs.size() != actual_totals.size())
    throw ShapeError("ensemble: inputs and targets differ in length");
  const int horizon = static_cast<int>(inputs.front().u_hat.size());

  Dataset data;
  data.input_dim = static_cast<int>(inputs.front().flattened().size());
  data.output_dim = horizon;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (static_cast<int>(actual_totals[i].size()) != horizon)
      throw ShapeError("ensemble: target length does not match the horizon");
    data.add(inputs[i].flattened(), actual_totals[i]);
  }

  EnsembleModel model;
  model.horizon_periods = horizon;
  model.normalizer = Normalizer::fit(data);
  Dataset normalized = model.normalizer.apply_all(data);
  DenseNet net = DenseNet::init({data.input_dim, 256, horizon}, cfg.seed);
  TrainResult result = train(std::move(net), normalized, cfg);
  model.net = std::move(result.net);
  model.check();
  return model;
}

std::vector<double> combine_ann(const EnsembleModel& model, const EnsembleInput& input) {
  model.check();
  std::vector<double> out = forward(model.net, model.normalizer.apply(input.flattened()));
  for (double& v : out) v = std::max(0.0, v);
  return out;
}

} // namespace hubcast
