#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twinforge/dataset.hpp"

namespace twinforge {

struct TwinNnConfig {
  std::vector<std::size_t> hidden_layers{256, 128};
  std::size_t num_planes = 1;
  double c1 = 1.0;
  double c_neg1 = 1.0;
  double learning_rate = 0.002;
  std::size_t batch_size = 30;
  std::size_t max_epochs = 200;
  /// Training stops once this many epochs pass without a new best validation
  /// loss. The default never stops early; the best snapshot is still returned.
  std::size_t patience = 200;
  std::uint64_t seed = 0;
  /// Half-width of the uniform weight init. Unset means 1/sqrt(fan_in) per layer.
  std::optional<double> init_scale;

  void validate() const;
  /// Penalty on same-class preactivations for the network of class j.
  double penalty_for(int label) const { return label == kNegative ? c_neg1 : c1; }
};

/// Fully connected layer, weights shaped (out x in).
struct DenseLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

/// One network of the twin ensemble: a tanh hidden stack phi(.) followed by
/// k linear output planes a_m = w_m' phi(x) + b_m.
struct ClassNetwork {
  int label = kPositive;
  std::vector<DenseLayer> hidden;
  DenseLayer planes;

  std::size_t input_dim() const;
  std::size_t num_planes() const { return static_cast<std::size_t>(planes.weights.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(planes.weights.cols()); }
  /// Throws ShapeError when layer shapes do not chain.
  void validate() const;
  Eigen::VectorXd features(const Eigen::VectorXd& x) const;

  /// Uniform init; `init_scale` unset means 1/sqrt(fan_in).
  static ClassNetwork random(int label, std::size_t input_dim, const std::vector<std::size_t>& hidden_layers,
                             std::size_t num_planes, std::optional<double> init_scale, std::uint64_t seed);
};

/// Parameter-shaped container for gradients of a ClassNetwork.
struct NetworkGradient {
  std::vector<DenseLayer> hidden;
  DenseLayer planes;

  static NetworkGradient zeros_like(const ClassNetwork& net);
};

Eigen::VectorXd plane_preactivations(const ClassNetwork& net, const Eigen::VectorXd& x);

struct ClosestPlane {
  std::size_t index = 0;
  double value = 0.0;     // signed preactivation of the selected plane
  double distance = 0.0;  // |value| / ||w_index||
};

/// Plane with the smallest |a_m|; ties go to the smallest index.
ClosestPlane closest_plane(const ClassNetwork& net, const Eigen::VectorXd& x);

/// Target of tanh(a*) for samples of other classes: +1 for the class -1
/// network, -1 for every other network.
inline double pull_away_target(int network_label) { return network_label == kNegative ? 1.0 : -1.0; }

struct TwinLoss {
  double loss = 0.0;
  NetworkGradient gradient;
};

/// Twin error of network `label` on a batch:
///   1/(2 N_other) sum_other (t - tanh(a*))^2 + c/(2 N_same) sum_same (a*)^2
/// with a* the signed closest-plane preactivation. Gradients follow only the
/// selected plane of each sample.
TwinLoss twin_loss(const ClassNetwork& net, const Dataset& batch, int label, double c);

/// Same as above on a column-major batch (one sample per column).
TwinLoss twin_loss(const ClassNetwork& net, const Eigen::MatrixXd& batch_columns, std::span<const int> labels,
                   int label, double c, bool want_gradient = true);

struct EpochRecord {
  std::size_t epoch = 0;
  std::vector<double> train_loss;  // aligned with TwinNnModel::classes
  std::vector<double> val_loss;
  double val_f1 = 0.0;
};

struct TwinNnModel {
  std::vector<int> classes;  // sorted
  std::map<int, ClassNetwork> networks;
  TwinNnConfig config;
  std::vector<EpochRecord> training_history;
  std::size_t best_epoch = 0;

  std::size_t input_dim() const;
  bool is_binary() const;
};

/// Minibatch SGD on each network's twin loss; returns the snapshot with the
/// lowest summed validation loss (validation F1 breaks exact ties).
TwinNnModel train_twin_nn(const Dataset& train, const Dataset& val, const TwinNnConfig& cfg);
/// Same, starting from the given networks instead of a seeded random init.
TwinNnModel train_twin_nn(const Dataset& train, const Dataset& val, const TwinNnConfig& cfg,
                          std::map<int, ClassNetwork> initial);

/// Class whose closest plane has the smallest geometric distance. Ties within
/// 1e-12 go to +1 for binary models and to the lowest label otherwise.
int predict_twin_nn(const TwinNnModel& model, const Eigen::VectorXd& x);
std::vector<int> predict_twin_nn(const TwinNnModel& model, const Dataset& data);

/// Per-class closest-plane distances for one sample.
std::map<int, double> twin_nn_distances(const TwinNnModel& model, const Eigen::VectorXd& x);

}  // namespace twinforge
