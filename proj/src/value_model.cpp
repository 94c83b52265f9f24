#include "cricket/value_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cricket/errors.hpp"
#include "cricket/io.hpp"
#include "cricket/random.hpp"

namespace cricket {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Activations of every layer for one forward pass; reused across samples.
struct Workspace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = output of layer l
  std::vector<std::vector<double>> delta;

  void shape(const std::vector<DenseLayer>& layers) {
    act.resize(layers.size() + 1);
    delta.resize(layers.size());
    act[0].resize(static_cast<std::size_t>(layers.front().inputs));
    for (std::size_t l = 0; l < layers.size(); ++l) {
      act[l + 1].resize(static_cast<std::size_t>(layers[l].outputs));
      delta[l].resize(static_cast<std::size_t>(layers[l].outputs));
    }
  }
};

double run_forward(const std::vector<DenseLayer>& layers, std::span<const double> x,
                   Workspace& ws) {
  ws.shape(layers);
  std::copy(x.begin(), x.end(), ws.act[0].begin());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto& in = ws.act[l];
    auto& out = ws.act[l + 1];
    const bool last = l + 1 == layers.size();
    for (int o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + static_cast<std::size_t>(o) * layer.inputs;
      double z = layer.bias[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.inputs; ++i) z += w[i] * in[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(o)] = last ? sigmoid(z) : std::max(z, 0.0);
    }
  }
  return ws.act.back()[0];
}

// Adds d(loss)/d(theta) to `grad` (flat layout) and returns the loss.
double run_backward(const std::vector<DenseLayer>& layers, std::span<const double> x,
                    double target, Workspace& ws, std::vector<double>& grad, double scale) {
  const double y = run_forward(layers, x, ws);
  const double diff = y - target;
  ws.delta.back()[0] = 2.0 * diff * y * (1.0 - y);
  for (std::size_t l = layers.size() - 1; l > 0; --l) {
    const auto& layer = layers[l];
    auto& prev_delta = ws.delta[l - 1];
    std::fill(prev_delta.begin(), prev_delta.end(), 0.0);
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = ws.delta[l][static_cast<std::size_t>(o)];
      const double* w = layer.weights.data() + static_cast<std::size_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) prev_delta[static_cast<std::size_t>(i)] += w[i] * d;
    }
    const auto& hidden = ws.act[l];
    for (std::size_t i = 0; i < prev_delta.size(); ++i)
      if (hidden[i] <= 0.0) prev_delta[i] = 0.0;
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto& in = ws.act[l];
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = scale * ws.delta[l][static_cast<std::size_t>(o)];
      double* g = grad.data() + offset + static_cast<std::size_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) g[i] += d * in[static_cast<std::size_t>(i)];
    }
    offset += layer.weights.size();
    for (int o = 0; o < layer.outputs; ++o)
      grad[offset + static_cast<std::size_t>(o)] += scale * ws.delta[l][static_cast<std::size_t>(o)];
    offset += layer.bias.size();
  }
  return diff * diff;
}

void check_width(const ValueNetwork& net, std::size_t width) {
  if (static_cast<int>(width) != net.input_width())
    throw DomainError("feature length " + std::to_string(width) + " does not match input width " +
                      std::to_string(net.input_width()));
}

}  // namespace

json to_json(const NetworkConfig& c) {
  return {{"input_width", c.input_width},
          {"hidden_widths", c.hidden_widths},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"seed", c.seed}};
}

NetworkConfig network_config_from_json(const json& j) {
  NetworkConfig c;
  c.input_width = j.at("input_width").get<int>();
  c.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

ValueNetwork::ValueNetwork(int input_width, std::span<const int> hidden_widths) {
  if (input_width <= 0) throw DomainError("input width must be positive");
  int prev = input_width;
  auto add = [&](int width) {
    if (width <= 0) throw DomainError("layer widths must be positive");
    DenseLayer layer;
    layer.inputs = prev;
    layer.outputs = width;
    layer.weights.assign(static_cast<std::size_t>(prev) * width, 0.0);
    layer.bias.assign(static_cast<std::size_t>(width), 0.0);
    layers_.push_back(std::move(layer));
    prev = width;
  };
  for (int w : hidden_widths) add(w);
  add(1);
}

ValueNetwork ValueNetwork::initialize(const NetworkConfig& config) {
  ValueNetwork net(config.input_width, config.hidden_widths);
  Rng rng = make_rng(config.seed, "value-net-init");
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / layer.inputs);
    for (auto& w : layer.weights) w = (2.0 * uniform01(rng) - 1.0) * limit;
  }
  return net;
}

double ValueNetwork::forward(std::span<const double> features) const {
  check_width(*this, features.size());
  thread_local Workspace ws;
  return run_forward(layers_, features, ws);
}

std::vector<int> ValueNetwork::layer_widths() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(layers_.front().inputs);
  for (const auto& l : layers_) out.push_back(l.outputs);
  return out;
}

std::size_t ValueNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

double ValueNetwork::parameter(std::size_t i) const {
  for (const auto& l : layers_) {
    if (i < l.weights.size()) return l.weights[i];
    i -= l.weights.size();
    if (i < l.bias.size()) return l.bias[i];
    i -= l.bias.size();
  }
  throw DomainError("parameter index out of range");
}

void ValueNetwork::set_parameter(std::size_t i, double value) {
  for (auto& l : layers_) {
    if (i < l.weights.size()) {
      l.weights[i] = value;
      return;
    }
    i -= l.weights.size();
    if (i < l.bias.size()) {
      l.bias[i] = value;
      return;
    }
    i -= l.bias.size();
  }
  throw DomainError("parameter index out of range");
}

double ValueNetwork::loss_gradient(std::span<const double> features, double target,
                                   std::vector<double>& gradient) const {
  check_width(*this, features.size());
  gradient.assign(parameter_count(), 0.0);
  thread_local Workspace ws;
  return run_backward(layers_, features, target, ws, gradient, 1.0);
}

double mean_squared_error(const ValueNetwork& net, std::span<const McSample> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) {
    const double d = net.forward(s.features) - s.target;
    sum += d * d;
  }
  return sum / static_cast<double>(samples.size());
}

json to_json(const TrainingReport& r) {
  return {{"epoch_mse", r.epoch_mse},
          {"final_mse", r.final_mse},
          {"config", to_json(r.config)},
          {"samples", r.samples},
          {"seed", r.config.seed}};
}

std::pair<ValueNetwork, TrainingReport> train(const NetworkConfig& config,
                                              std::span<const McSample> samples) {
  if (samples.empty()) throw DomainError("no training samples");
  if (config.epochs <= 0 || config.batch_size <= 0 || !(config.learning_rate > 0.0))
    throw DomainError("epochs, batch_size and learning_rate must be positive");
  for (const auto& s : samples) {
    if (static_cast<int>(s.features.size()) != config.input_width)
      throw DomainError("sample feature length does not match input width");
    if (!(s.target >= 0.0 && s.target <= 1.0)) throw DomainError("target outside [0,1]");
  }

  ValueNetwork net = ValueNetwork::initialize(config);
  TrainingReport report;
  report.config = config;
  report.samples = samples.size();

  Rng rng = make_rng(config.seed, "value-net-shuffle");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.parameter_count());
  Workspace ws;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = samples[order[k]];
        run_backward(net.layers(), s.features, s.target, ws, grad, scale);
      }
      std::size_t offset = 0;
      for (auto& layer : net.layers()) {
        for (auto& w : layer.weights) w -= config.learning_rate * grad[offset++];
        for (auto& b : layer.bias) b -= config.learning_rate * grad[offset++];
      }
    }
    const double mse = mean_squared_error(net, samples);
    if (!std::isfinite(mse)) throw DivergenceError(epoch, "non-finite training loss");
    report.epoch_mse.push_back(mse);
  }
  report.final_mse = report.epoch_mse.back();
  return {std::move(net), std::move(report)};
}

GradientCheckResult gradient_check(const ValueNetwork& net, const McSample& sample,
                                   double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw DomainError("epsilon must lie in (0, 1e-3]");
  std::vector<double> analytic;
  net.loss_gradient(sample.features, sample.target, analytic);
  ValueNetwork probe = net;
  auto loss = [&](const ValueNetwork& n) {
    const double d = n.forward(sample.features) - sample.target;
    return d * d;
  };
  GradientCheckResult result;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double original = net.parameter(i);
    probe.set_parameter(i, original + epsilon);
    const double up = loss(probe);
    probe.set_parameter(i, original - epsilon);
    const double down = loss(probe);
    probe.set_parameter(i, original);
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-7});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(a - numeric) / denom);
    result.max_abs_analytic = std::max(result.max_abs_analytic, std::abs(a));
    result.max_abs_numeric = std::max(result.max_abs_numeric, std::abs(numeric));
  }
  return result;
}

json to_json(const ValueNetwork& net) {
  json layers = json::array();
  std::vector<std::string> activations;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& layer = net.layers()[l];
    std::vector<std::string> w, b;
    for (double v : layer.weights) w.push_back(hex_double(v));
    for (double v : layer.bias) b.push_back(hex_double(v));
    layers.push_back({{"inputs", layer.inputs}, {"outputs", layer.outputs}, {"weights", w}, {"bias", b}});
    activations.push_back(l + 1 == net.layers().size() ? "sigmoid" : "relu");
  }
  return {{"layer_widths", net.layer_widths()}, {"activations", activations}, {"layers", layers}};
}

ValueNetwork network_from_json(const json& j) {
  try {
    const auto widths = j.at("layer_widths").get<std::vector<int>>();
    if (widths.size() < 2 || widths.back() != 1) throw ParseError("model must end in one output");
    std::vector<int> hidden(widths.begin() + 1, widths.end() - 1);
    ValueNetwork net(widths.front(), hidden);
    const auto& layers = j.at("layers");
    if (layers.size() != net.layers().size()) throw ParseError("layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto& layer = net.layers()[l];
      const auto w = layers[l].at("weights").get<std::vector<std::string>>();
      const auto b = layers[l].at("bias").get<std::vector<std::string>>();
      if (w.size() != layer.weights.size() || b.size() != layer.bias.size())
        throw ParseError("layer " + std::to_string(l) + " parameter count mismatch");
      for (std::size_t i = 0; i < w.size(); ++i) layer.weights[i] = parse_hex_double(w[i]);
      for (std::size_t i = 0; i < b.size(); ++i) layer.bias[i] = parse_hex_double(b[i]);
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

}  // namespace cricket
