#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twinforge/dataset.hpp"

namespace twinforge {

enum class BaselineLoss { unweighted_ce, weighted_ce, focal };

std::string to_string(BaselineLoss loss);
BaselineLoss parse_baseline_loss(const std::string& text);

struct BaselineConfig {
  BaselineLoss loss = BaselineLoss::unweighted_ce;
  /// Per-class multipliers, used by weighted_ce only. Missing classes weigh 1.
  std::map<int, double> class_weights;
  double focal_gamma = 2.0;
  double learning_rate = 0.002;
  std::size_t batch_size = 30;
  std::size_t max_epochs = 200;
  std::size_t patience = 200;
  std::uint64_t seed = 0;

  void validate() const;
  double weight_for(int label) const;
};

/// Single linear layer followed by softmax.
struct LinearHead {
  std::vector<int> classes;  // sorted; row r of `weights` scores classes[r]
  Eigen::MatrixXd weights;   // K x d
  Eigen::VectorXd bias;      // K
  BaselineConfig config;
  std::vector<double> train_loss_history;
  std::vector<double> val_loss_history;
  std::size_t best_epoch = 0;

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t class_index(int label) const;
};

struct HeadLoss {
  double loss = 0.0;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};

/// Per-sample loss from logits: cross entropy -log p_y, scaled by
/// class_weights[y] for weighted_ce or by (1 - p_y)^gamma for focal.
double sample_loss(const Eigen::VectorXd& logits, std::size_t true_index, int true_label, const BaselineConfig& cfg);

/// Mean per-sample loss over a column-major batch, with gradients.
HeadLoss head_loss(const LinearHead& head, const Eigen::MatrixXd& batch_columns, std::span<const int> labels,
                   const BaselineConfig& cfg, bool want_gradient = true);

LinearHead train_linear_head(const Dataset& train, const Dataset& val, const BaselineConfig& cfg);

Eigen::VectorXd head_probabilities(const LinearHead& head, const Eigen::VectorXd& x);
int predict_linear_head(const LinearHead& head, const Eigen::VectorXd& x);
std::vector<int> predict_linear_head(const LinearHead& head, const Dataset& data);

// ---------------------------------------------------------------------------
// ADASYN

struct AdasynConfig {
  std::size_t k_neighbors = 5;
  /// Minority : majority ratio after synthesis.
  double target_ratio = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Intermediate quantities of ADASYN, exposed for inspection.
struct AdasynPlan {
  int minority_label = kPositive;
  std::vector<std::size_t> minority_rows;
  /// Fraction of majority samples among each minority point's k nearest
  /// neighbors in the full dataset.
  std::vector<double> hardness;
  /// Synthetic samples to draw around each minority point; sums to the deficit.
  std::vector<std::size_t> allocation;
  /// k nearest minority neighbors (as dataset row indices) of each minority point.
  std::vector<std::vector<std::size_t>> minority_neighbors;
};

AdasynPlan adasyn_plan(const Dataset& data, const AdasynConfig& cfg);

/// Originals first, in input order, followed by the synthetic minority samples.
Dataset adasyn_oversample(const Dataset& data, const AdasynConfig& cfg);

}  // namespace twinforge
