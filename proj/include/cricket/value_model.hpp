#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cricket/state_space.hpp"

namespace cricket {

struct NetworkConfig {
  int input_width = 5;  // 5 first innings, 6 second innings
  std::vector<int> hidden_widths{32, 16};
  int epochs = 30;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t seed = 0;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

nlohmann::json to_json(const NetworkConfig& config);
NetworkConfig network_config_from_json(const nlohmann::json& j);

/// Dense layer, row-major `weights[out * inputs + in]`.
struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward net: rectifier hidden layers, one sigmoid output unit, so every
/// prediction lies strictly inside (0, 1).
class ValueNetwork {
 public:
  ValueNetwork() = default;

  /// Layers chained input_width -> hidden... -> 1, all parameters zero.
  ValueNetwork(int input_width, std::span<const int> hidden_widths);

  /// Seeded symmetric-uniform initialisation with limit sqrt(6 / fan_in); zero bias.
  static ValueNetwork initialize(const NetworkConfig& config);

  double forward(std::span<const double> features) const;
  double predict(const InningsState& state) const { return forward(normalize_features(state)); }

  int input_width() const { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::vector<int> layer_widths() const;

  std::size_t parameter_count() const;
  /// Flat view: layer by layer, weights then bias.
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double value);

  /// Squared error (f(x) - target)^2 of one sample and its gradient in flat order.
  double loss_gradient(std::span<const double> features, double target,
                       std::vector<double>& gradient) const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  friend bool operator==(const ValueNetwork&, const ValueNetwork&) = default;

 private:
  std::vector<DenseLayer> layers_;
};

struct TrainingReport {
  std::vector<double> epoch_mse;  // full-data MSE after each epoch
  double final_mse = 0.0;
  NetworkConfig config;
  std::size_t samples = 0;
};

nlohmann::json to_json(const TrainingReport& report);

/// Mini-batch gradient descent on the mean squared error. Deterministic for a
/// given seed. Throws DivergenceError on a non-finite loss, DomainError on bad input.
std::pair<ValueNetwork, TrainingReport> train(const NetworkConfig& config,
                                              std::span<const McSample> samples);

/// Mean squared error of the network over a sample set.
double mean_squared_error(const ValueNetwork& net, std::span<const McSample> samples);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
};

/// Back-propagated gradient of the single-sample squared error against central
/// finite differences of step `epsilon` in (0, 1e-3].
GradientCheckResult gradient_check(const ValueNetwork& net, const McSample& sample,
                                   double epsilon);

/// Model file payload: widths, activations and hex-encoded parameters.
nlohmann::json to_json(const ValueNetwork& net);
ValueNetwork network_from_json(const nlohmann::json& j);

}  // namespace cricket
