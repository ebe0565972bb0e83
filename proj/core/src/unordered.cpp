#include "hubcast/unordered.hpp"

#include "hubcast/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hubcast {

void UnorderedModel::check() const {
  net.check_shapes();
  if (net.layer_dims.size() != 4 || net.layer_dims[1] != 1024 || net.layer_dims[2] != 512)
    throw ShapeError("unordered model: hidden layers must be exactly 1024 and 512 wide");
  if (net.output_dim() != horizon_periods)
    throw ShapeError("unordered model: output width must equal the horizon");
}

UnorderedTrainingSet UnorderedTrainingSet::slice(long long lo, long long hi) const {
  UnorderedTrainingSet out;
  out.data.input_dim = data.input_dim;
  out.data.output_dim = data.output_dim;
  for (std::size_t i = 0; i < observation_times.size(); ++i) {
    long long t_o = observation_times[i];
    if (t_o < lo || t_o >= hi) continue;
    out.data.inputs.insert(out.data.inputs.end(), data.input_row(i),
                           data.input_row(i) + data.input_dim);
    out.data.targets.insert(out.data.targets.end(), data.target_row(i),
                            data.target_row(i) + data.output_dim);
    out.observation_times.push_back(t_o);
  }
  return out;
}

namespace {

UnorderedTrainingSet build_set(const EventLog& log, const std::string& hub,
                               const IntervalSpec& spec_template, int train_days, bool total) {
  if (train_days < 2)
    throw DataError("cold start: training needs >= 2 days (one day of burn-in plus 4h)");
  const int interval = spec_template.interval_minutes;
  const int per_day = 1440 / interval;

  UnorderedTrainingSet set;
  set.data.input_dim = 0;
  set.data.output_dim = spec_template.periods();
  // Day 1 feeds the previous-day block and day 2's first 4 hours feed the
  // recent block, so day 3 is the first fully eligible day.
  for (int day = 3; day <= train_days; ++day) {
    long long day_start = static_cast<long long>(day - 1) * 1440;
    for (int k = 0; k < per_day; ++k) {
      long long t_o = day_start + static_cast<long long>(k) * interval;
      FeatureVector features = total ? log.build_total_features(hub, t_o, spec_template)
                                     : log.build_features(hub, t_o, spec_template);
      ArrivalSeries target = total ? log.bin_arrivals(hub, spec_template.at(t_o))
                                   : log.unordered_target(hub, spec_template.at(t_o));
      std::vector<double> x = features.flattened();
      if (set.data.input_dim == 0) set.data.input_dim = static_cast<int>(x.size());
      set.data.add(x, target.as_reals());
      set.observation_times.push_back(t_o);
    }
  }
  return set;
}

} // namespace

UnorderedTrainingSet build_training_set(const EventLog& log, const std::string& hub,
                                        const IntervalSpec& spec_template, int train_days) {
  return build_set(log, hub, spec_template, train_days, false);
}

UnorderedTrainingSet build_total_training_set(const EventLog& log, const std::string& hub,
                                              const IntervalSpec& spec_template, int train_days) {
  return build_set(log, hub, spec_template, train_days, true);
}

UnorderedModel fit_unordered(const UnorderedTrainingSet& training,
                             const IntervalSpec& spec_template, const TrainConfig& cfg) {
  if (training.data.size() == 0) throw TrainError("unordered model: empty training set");
  UnorderedModel model;
  model.interval_minutes = spec_template.interval_minutes;
  model.horizon_periods = spec_template.periods();
  model.normalizer = Normalizer::fit(training.data);
  Dataset normalized = model.normalizer.apply_all(training.data);

  DenseNet net = DenseNet::init(
      {training.data.input_dim, 1024, 512, spec_template.periods()}, cfg.seed);
  TrainResult result = train(std::move(net), normalized, cfg);
  model.net = std::move(result.net);
  model.train_window_start = training.observation_times.front();
  model.train_window_end = training.observation_times.back();
  model.check();
  return model;
}

namespace {

std::vector<double> clamped_forward(const UnorderedModel& model, const FeatureVector& features) {
  std::vector<double> out = forward(model.net, model.normalizer.apply(features.flattened()));
  for (double& v : out) v = std::max(0.0, v);
  return out;
}

} // namespace

std::vector<double> forecast_unordered(const UnorderedModel& model, const EventLog& log,
                                       const std::string& hub, long long observation_time) {
  model.check();
  IntervalSpec spec{model.interval_minutes, model.horizon_periods - 1, observation_time};
  return clamped_forward(model, log.build_features(hub, observation_time, spec));
}

std::vector<double> forecast_total_direct(const UnorderedModel& model, const EventLog& log,
                                          const std::string& hub, long long observation_time) {
  model.check();
  IntervalSpec spec{model.interval_minutes, model.horizon_periods - 1, observation_time};
  return clamped_forward(model, log.build_total_features(hub, observation_time, spec));
}

void save_unordered_model(const UnorderedModel& model, const std::string& path) {
  model.check();
  save_dense_net(model.net, path);
  std::ofstream out(path + ".meta", std::ios::binary);
  if (!out) throw DataError("cannot write model sidecar: " + path + ".meta");
  out << "#hubcast-unordered-meta v1\n";
  out << "interval_minutes " << model.interval_minutes << "\n";
  out << "horizon_periods " << model.horizon_periods << "\n";
  out << "train_window " << model.train_window_start << ' ' << model.train_window_end << "\n";
  char buf[40];
  auto dump = [&](const char* tag, const std::vector<double>& v) {
    out << tag;
    for (double x : v) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << ' ' << buf;
    }
    out << "\n";
  };
  dump("mean", model.normalizer.mean);
  dump("stddev", model.normalizer.stddev);
}

UnorderedModel load_unordered_model(const std::string& path) {
  UnorderedModel model;
  model.net = load_dense_net(path);
  std::ifstream in(path + ".meta", std::ios::binary);
  if (!in) throw DataError("cannot open model sidecar: " + path + ".meta");
  std::string line;
  if (!std::getline(in, line) || line != "#hubcast-unordered-meta v1")
    throw DataError(path + ".meta: unsupported sidecar header");
  auto read_tagged = [&](const std::string& expected) {
    if (!std::getline(in, line)) throw DataError(path + ".meta: truncated sidecar");
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != expected) throw DataError(path + ".meta: expected `" + expected + "` line");
    return ss;
  };
  {
    auto ss = read_tagged("interval_minutes");
    ss >> model.interval_minutes;
  }
  {
    auto ss = read_tagged("horizon_periods");
    ss >> model.horizon_periods;
  }
  {
    auto ss = read_tagged("train_window");
    ss >> model.train_window_start >> model.train_window_end;
  }
  auto read_vector = [&](const std::string& tag) {
    auto ss = read_tagged(tag);
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    return v;
  };
  model.normalizer.mean = read_vector("mean");
  model.normalizer.stddev = read_vector("stddev");
  model.check();
  if (model.normalizer.mean.size() != static_cast<std::size_t>(model.net.input_dim()))
    throw DataError(path + ".meta: normalization stats do not match the net input");
  return model;
}

} // namespace hubcast
