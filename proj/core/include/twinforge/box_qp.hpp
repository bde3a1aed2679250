#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace twinforge {

/// Applies a symmetric positive semidefinite operator: out = M * in.
using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct BoxQpOptions {
  double tolerance = 1e-9;          // on the infinity norm of the projected gradient
  std::size_t max_iterations = 5000;
};

struct BoxQpResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double projected_gradient_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes 0.5 x'Mx - q'x subject to 0 <= x <= upper.
///
/// Alternates a projected-gradient (Cauchy) step, which identifies the active
/// face, with conjugate-gradient minimization over the free variables followed
/// by a projected line search. Terminates finitely on small problems once the
/// active set settles.
BoxQpResult solve_box_qp(const LinearOperator& apply_m, const Eigen::VectorXd& q, const Eigen::VectorXd& upper,
                         const BoxQpOptions& options = {}, const Eigen::VectorXd* start = nullptr);

/// Projected gradient of the box problem at x for gradient g.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& upper);

}  // namespace twinforge
