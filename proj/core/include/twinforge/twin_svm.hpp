#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

#include "twinforge/dataset.hpp"
#include "twinforge/error.hpp"

namespace twinforge {

struct TwinSvmConfig {
  double c1 = 1.0;
  double c_neg1 = 1.0;
  /// Adds ridge_epsilon * ||(w, b)||^2 to each objective; X'X is often singular.
  double ridge_epsilon = 1e-6;
  double solver_tolerance = 1e-9;
  std::size_t max_iterations = 5000;

  void validate() const;
};

/// Solution of one twin QPP. `primal_variables` holds w followed by b.
struct QppSolution {
  Eigen::VectorXd primal_variables;
  Eigen::VectorXd slack;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::size_t iterations = 0;

  Eigen::VectorXd w() const { return primal_variables.head(primal_variables.size() - 1); }
  double b() const { return primal_variables[primal_variables.size() - 1]; }
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, QppSolution best)
      : Error(what), best_(std::move(best)) {}
  const QppSolution& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return best_.kkt_residual; }

 private:
  QppSolution best_;
};

/// Two non-parallel hyperplanes w1'x + b1 = 0 (near class +1) and
/// w_neg1'x + b_neg1 = 0 (near class -1).
struct TwinSvmModel {
  Eigen::VectorXd w1;
  double b1 = 0.0;
  Eigen::VectorXd w_neg1;
  double b_neg1 = 0.0;
  std::pair<double, double> training_objective_values{0.0, 0.0};
  TwinSvmConfig config;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(w1.size()); }
};

/// Solves the QPP for one plane in isolation:
///   min 0.5||A w + e b||^2 + eps ||(w,b)||^2 + c e'xi
///   s.t. -(B w + e b) + xi >= e, xi >= 0
/// where A holds the plane's own class and B the other class.
QppSolution solve_twin_qpp(const RowMatrix& own, const RowMatrix& other, double c, const TwinSvmConfig& cfg);

/// Plane that passes near class +1 and is pushed away from class -1.
QppSolution solve_qpp_plane1(const Dataset& data, const TwinSvmConfig& cfg);
/// Mirror image: near class -1, away from class +1.
QppSolution solve_qpp_plane_neg1(const Dataset& data, const TwinSvmConfig& cfg);

TwinSvmModel fit_twin_svm(const Dataset& data, const TwinSvmConfig& cfg);

/// Geometric distances |w'x + b| / ||w|| to the (+1, -1) planes.
std::pair<double, double> plane_distances(const TwinSvmModel& model, const Eigen::VectorXd& x);

/// +1 when the +1 plane is strictly closer, -1 otherwise; distances equal
/// within 1e-12 go to +1.
int predict_twin_svm(const TwinSvmModel& model, const Eigen::VectorXd& x);

/// Primal objective of one QPP at (w, b) with slack eliminated.
double twin_qpp_objective(const RowMatrix& own, const RowMatrix& other, double c, double ridge_epsilon,
                          const Eigen::VectorXd& w_and_b);

}  // namespace twinforge
