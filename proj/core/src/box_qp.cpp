#include "twinforge/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twinforge {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& upper) {
  return x.cwiseMax(0.0).cwiseMin(upper);
}

struct Quadratic {
  const LinearOperator& apply_m;
  const Eigen::VectorXd& q;
  mutable Eigen::VectorXd scratch;

  double value(const Eigen::VectorXd& x) const {
    apply_m(x, scratch);
    return 0.5 * x.dot(scratch) - q.dot(x);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    apply_m(x, scratch);
    return scratch - q;
  }
};

// Backtracking along the projected path x(t) = P(x + t * dir) with an Armijo
// test. Returns the accepted point, or x itself when no decrease is found.
Eigen::VectorXd projected_search(const Quadratic& f, const Eigen::VectorXd& x, double fx, const Eigen::VectorXd& g,
                                 const Eigen::VectorXd& dir, const Eigen::VectorXd& upper, double t0) {
  constexpr double kArmijo = 1e-4;
  double t = t0;
  for (int k = 0; k < 60; ++k, t *= 0.5) {
    Eigen::VectorXd trial = project(x + t * dir, upper);
    const Eigen::VectorXd step = trial - x;
    if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
    const double ft = f.value(trial);
    if (ft <= fx + kArmijo * g.dot(step)) return trial;
  }
  return x;
}

}  // namespace

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& upper) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) {
      pg[i] = std::min(g[i], 0.0);
    } else if (x[i] >= upper[i]) {
      pg[i] = std::max(g[i], 0.0);
    }
  }
  return pg;
}

BoxQpResult solve_box_qp(const LinearOperator& apply_m, const Eigen::VectorXd& q, const Eigen::VectorXd& upper,
                         const BoxQpOptions& options, const Eigen::VectorXd* start) {
  const Eigen::Index n = q.size();
  Quadratic f{apply_m, q, Eigen::VectorXd(n)};
  BoxQpResult result;
  result.x = start ? project(*start, upper) : Eigen::VectorXd::Zero(n);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  Eigen::VectorXd mv(n);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    Eigen::VectorXd g = f.gradient(result.x);
    Eigen::VectorXd pg = projected_gradient(result.x, g, upper);
    result.projected_gradient_norm = pg.lpNorm<Eigen::Infinity>();
    if (result.projected_gradient_norm <= options.tolerance) {
      result.converged = true;
      break;
    }

    // Cauchy step along -g, starting from the exact minimizer along -pg.
    double fx = f.value(result.x);
    apply_m(pg, mv);
    const double curvature = pg.dot(mv);
    const double t0 = curvature > 0.0 ? pg.squaredNorm() / curvature : 1.0;
    Eigen::VectorXd next = projected_search(f, result.x, fx, g, -g, upper, t0);
    if (next == result.x) {
      // Backtracking failed: fall back to the unprojected projected-gradient direction.
      next = projected_search(f, result.x, fx, g, -pg, upper, t0);
    }
    result.x = std::move(next);

    // Subspace minimization over the free variables.
    g = f.gradient(result.x);
    fx = f.value(result.x);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (result.x[i] > 0.0 && result.x[i] < upper[i]) free.push_back(i);
    }
    if (free.empty()) continue;

    const auto nf = static_cast<Eigen::Index>(free.size());
    auto restrict_to_free = [&](const Eigen::VectorXd& full) {
      Eigen::VectorXd out(nf);
      for (Eigen::Index k = 0; k < nf; ++k) out[k] = full[free[static_cast<std::size_t>(k)]];
      return out;
    };
    Eigen::VectorXd embed = Eigen::VectorXd::Zero(n);
    auto apply_free = [&](const Eigen::VectorXd& v) {
      embed.setZero();
      for (Eigen::Index k = 0; k < nf; ++k) embed[free[static_cast<std::size_t>(k)]] = v[k];
      apply_m(embed, mv);
      return restrict_to_free(mv);
    };

    Eigen::VectorXd p = Eigen::VectorXd::Zero(nf);
    Eigen::VectorXd r = -restrict_to_free(g);
    Eigen::VectorXd dir = r;
    double rr = r.squaredNorm();
    const double stop = std::max(1e-3 * options.tolerance, 1e-14) * std::max(1.0, std::sqrt(rr));
    for (Eigen::Index k = 0; k < 2 * nf && std::sqrt(rr) > stop; ++k) {
      const Eigen::VectorXd md = apply_free(dir);
      const double dmd = dir.dot(md);
      if (!(dmd > std::numeric_limits<double>::min())) break;
      const double a = rr / dmd;
      p += a * dir;
      r -= a * md;
      const double rr_next = r.squaredNorm();
      dir = r + (rr_next / rr) * dir;
      rr = rr_next;
    }
    Eigen::VectorXd full_p = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < nf; ++k) full_p[free[static_cast<std::size_t>(k)]] = p[k];
    if (full_p.lpNorm<Eigen::Infinity>() > 0.0) {
      result.x = projected_search(f, result.x, fx, g, full_p, upper, 1.0);
    }
  }

  Eigen::VectorXd g = f.gradient(result.x);
  result.projected_gradient_norm = projected_gradient(result.x, g, upper).lpNorm<Eigen::Infinity>();
  result.converged = result.projected_gradient_norm <= options.tolerance;
  result.objective = f.value(result.x);
  return result;
}

}  // namespace twinforge
