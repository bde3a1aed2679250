#include "twinforge/twin_svm.hpp"

#include <cmath>

#include "twinforge/box_qp.hpp"

namespace twinforge {
namespace {

Eigen::MatrixXd augment(const RowMatrix& x) {
  Eigen::MatrixXd out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setOnes();
  return out;
}

RowMatrix rows_of(const Dataset& data, int label) {
  const auto idx = data.indices_of(label);
  RowMatrix out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(data.dim()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = data.features().row(static_cast<Eigen::Index>(idx[k]));
  }
  return out;
}

void require_binary(const Dataset& data) {
  if (!data.is_binary()) throw PreconditionError("twin SVM requires labels in {+1, -1}");
  if (data.count(kPositive) == 0 || data.count(kNegative) == 0) {
    throw PreconditionError("twin SVM requires samples of both classes");
  }
}

}  // namespace

void TwinSvmConfig::validate() const {
  if (!(c1 > 0.0) || !(c_neg1 > 0.0)) throw ConfigError("twin SVM penalties must be positive");
  if (!(ridge_epsilon >= 0.0)) throw ConfigError("ridge_epsilon must be non-negative");
  if (!(solver_tolerance > 0.0)) throw ConfigError("solver_tolerance must be positive");
  if (max_iterations == 0) throw ConfigError("max_iterations must be positive");
}

double twin_qpp_objective(const RowMatrix& own, const RowMatrix& other, double c, double ridge_epsilon,
                          const Eigen::VectorXd& w_and_b) {
  const Eigen::MatrixXd h = augment(own);
  const Eigen::MatrixXd g = augment(other);
  const Eigen::VectorXd slack = (Eigen::VectorXd::Ones(g.rows()) + g * w_and_b).cwiseMax(0.0);
  return 0.5 * (h * w_and_b).squaredNorm() + ridge_epsilon * w_and_b.squaredNorm() + c * slack.sum();
}

QppSolution solve_twin_qpp(const RowMatrix& own, const RowMatrix& other, double c, const TwinSvmConfig& cfg) {
  cfg.validate();
  if (own.rows() == 0 || other.rows() == 0) {
    throw PreconditionError("twin QPP needs samples on both sides");
  }
  if (own.cols() != other.cols()) throw ShapeError("twin QPP class matrices differ in dimension");

  // Dual of the QPP: with Q = H'H + 2 eps I, the multipliers a of the margin
  // constraints solve   min 0.5 a' G Q^-1 G' a - e'a,  0 <= a <= c,
  // and the plane is recovered as (w, b) = -Q^-1 G' a.
  const Eigen::MatrixXd h = augment(own);
  const Eigen::MatrixXd g = augment(other);
  const Eigen::Index p = h.cols();
  Eigen::MatrixXd q = h.transpose() * h;
  q.diagonal().array() += 2.0 * cfg.ridge_epsilon;
  const Eigen::LLT<Eigen::MatrixXd> chol(q);
  if (chol.info() != Eigen::Success) {
    throw PreconditionError("twin QPP Hessian is singular; increase ridge_epsilon");
  }
  {
    const Eigen::VectorXd d = chol.matrixLLT().diagonal();
    if (d.minCoeff() <= 0.0 || !d.allFinite()) {
      throw PreconditionError("twin QPP Hessian is singular; increase ridge_epsilon");
    }
  }

  Eigen::VectorXd tmp(p);
  LinearOperator apply_m = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    tmp.noalias() = g.transpose() * in;
    chol.solveInPlace(tmp);
    out.noalias() = g * tmp;
  };
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.rows());
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(g.rows(), c);
  const BoxQpResult dual = solve_box_qp(apply_m, ones, upper, {cfg.solver_tolerance, cfg.max_iterations});

  QppSolution sol;
  sol.primal_variables = -chol.solve(g.transpose() * dual.x);
  sol.slack = (ones + g * sol.primal_variables).cwiseMax(0.0);
  sol.objective = 0.5 * (h * sol.primal_variables).squaredNorm() +
                  cfg.ridge_epsilon * sol.primal_variables.squaredNorm() + c * sol.slack.sum();
  sol.kkt_residual = dual.projected_gradient_norm;
  sol.iterations = dual.iterations;
  if (!dual.converged) {
    throw ConvergenceError("twin QPP solver stopped after " + std::to_string(dual.iterations) +
                               " iterations with KKT residual " + std::to_string(dual.projected_gradient_norm),
                           std::move(sol));
  }
  return sol;
}

QppSolution solve_qpp_plane1(const Dataset& data, const TwinSvmConfig& cfg) {
  require_binary(data);
  return solve_twin_qpp(rows_of(data, kPositive), rows_of(data, kNegative), cfg.c1, cfg);
}

QppSolution solve_qpp_plane_neg1(const Dataset& data, const TwinSvmConfig& cfg) {
  require_binary(data);
  return solve_twin_qpp(rows_of(data, kNegative), rows_of(data, kPositive), cfg.c_neg1, cfg);
}

TwinSvmModel fit_twin_svm(const Dataset& data, const TwinSvmConfig& cfg) {
  const QppSolution pos = solve_qpp_plane1(data, cfg);
  const QppSolution neg = solve_qpp_plane_neg1(data, cfg);
  TwinSvmModel model;
  model.w1 = pos.w();
  model.b1 = pos.b();
  model.w_neg1 = neg.w();
  model.b_neg1 = neg.b();
  model.training_objective_values = {pos.objective, neg.objective};
  model.config = cfg;
  if (model.w1.norm() == 0.0 || model.w_neg1.norm() == 0.0) {
    throw DegeneratePlaneError("twin SVM produced a plane with zero normal vector");
  }
  return model;
}

std::pair<double, double> plane_distances(const TwinSvmModel& model, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != model.dim()) {
    throw ShapeError("sample has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(model.dim()));
  }
  const double d1 = std::abs(model.w1.dot(x) + model.b1) / model.w1.norm();
  const double d2 = std::abs(model.w_neg1.dot(x) + model.b_neg1) / model.w_neg1.norm();
  return {d1, d2};
}

int predict_twin_svm(const TwinSvmModel& model, const Eigen::VectorXd& x) {
  const auto [d1, d2] = plane_distances(model, x);
  if (std::abs(d1 - d2) <= 1e-12) return kPositive;
  return d1 < d2 ? kPositive : kNegative;
}

}  // namespace twinforge
