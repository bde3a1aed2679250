#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "twinforge/error.hpp"
#include "twinforge/random.hpp"
#include "twinforge/twin_svm.hpp"

namespace tf = twinforge;

namespace {

tf::Dataset toy(bool duplicate_negatives = false) {
  tf::RowMatrix x(4, 2);
  x << 0, 0, 0, 1, 5, 0, 5, 1;
  std::vector<int> y{1, 1, -1, -1};
  if (duplicate_negatives) {
    x.conservativeResize(6, 2);
    x.row(4) << 5, 0;
    x.row(5) << 5, 1;
    y.push_back(-1);
    y.push_back(-1);
  }
  return tf::Dataset(x, y);
}

tf::RowMatrix rows_with(const tf::Dataset& d, int label) {
  const auto idx = d.indices_of(label);
  tf::RowMatrix out(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(d.dim()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = d.features().row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

tf::TwinSvmModel planes_at_0_and_5() {
  tf::TwinSvmModel m;
  m.w1 = Eigen::Vector2d(1.0, 0.0);
  m.b1 = 0.0;
  m.w_neg1 = Eigen::Vector2d(1.0, 0.0);
  m.b_neg1 = -5.0;
  return m;
}

}  // namespace

TEST(TwinSvm, ToyPlaneThroughPositives) {
  const auto sol = tf::solve_qpp_plane1(toy(), tf::TwinSvmConfig{});
  const Eigen::VectorXd w = sol.w();
  EXPECT_GT(std::abs(w.x()), 0.1);
  EXPECT_LT(std::abs(w.y()), 1e-4 * std::abs(w.x()));
  EXPECT_LT(std::abs(sol.b()), 1e-4);
  const auto ref = oracle::brute_force_qpp(rows_with(toy(), 1), rows_with(toy(), -1), 1.0, 1e-6);
  EXPECT_NEAR(sol.objective, ref.objective, 1e-4 * ref.objective);
  EXPECT_LE(sol.kkt_residual, 1e-9);
}

TEST(TwinSvm, ToyPlaneThroughNegatives) {
  const auto sol = tf::solve_qpp_plane_neg1(toy(), tf::TwinSvmConfig{});
  const Eigen::VectorXd w = sol.w();
  EXPECT_LT(std::abs(w.y()), 1e-4 * std::abs(w.x()));
  // The plane passes x1 = 5.
  EXPECT_NEAR(-sol.b() / w.x(), 5.0, 1e-4);
}

TEST(TwinSvm, VanishingPenaltyDrivesObjectiveToZero) {
  tf::TwinSvmConfig cfg;
  cfg.c1 = 1e-8;
  const auto sol = tf::solve_qpp_plane1(toy(), cfg);
  EXPECT_LE(sol.objective, 1e-6);
  const auto own = oracle::with_ones(rows_with(toy(), 1));
  EXPECT_LE((own * sol.primal_variables).norm(), 1e-3);
}

TEST(TwinSvm, NeedsBothClasses) {
  tf::RowMatrix own(2, 2);
  own << 0, 0, 0, 1;
  EXPECT_THROW(tf::solve_twin_qpp(own, tf::RowMatrix(0, 2), 1.0, tf::TwinSvmConfig{}), tf::PreconditionError);
}

TEST(TwinSvm, ConfigValidation) {
  tf::TwinSvmConfig cfg;
  cfg.c1 = 0.0;
  EXPECT_THROW(cfg.validate(), tf::ConfigError);
  cfg = {};
  cfg.solver_tolerance = 0.0;
  EXPECT_THROW(cfg.validate(), tf::ConfigError);
}

TEST(TwinSvm, LabelSwapSwapsPlanes) {
  const auto d = toy();
  tf::TwinSvmConfig cfg;
  const auto a = tf::fit_twin_svm(d, cfg);
  const auto b = tf::fit_twin_svm(d.with_swapped_labels(), cfg);
  EXPECT_LT((a.w1 - b.w_neg1).norm(), 1e-6);
  EXPECT_NEAR(a.b1, b.b_neg1, 1e-6);
  EXPECT_LT((a.w_neg1 - b.w1).norm(), 1e-6);
  EXPECT_NEAR(a.b_neg1, b.b1, 1e-6);
}

TEST(TwinSvm, DuplicatedNegativesKeepDirection) {
  const auto a = tf::fit_twin_svm(toy(), tf::TwinSvmConfig{});
  const auto b = tf::fit_twin_svm(toy(true), tf::TwinSvmConfig{});
  EXPECT_NEAR(std::abs(a.w1.normalized().dot(b.w1.normalized())), 1.0, 1e-6);
  const auto ref = oracle::brute_force_qpp(rows_with(toy(true), 1), rows_with(toy(true), -1), 1.0, 1e-6);
  EXPECT_NEAR(b.training_objective_values.first, ref.objective, 1e-4 * ref.objective);
}

TEST(TwinSvm, PlanesAreDistinct) {
  const auto m = tf::fit_twin_svm(toy(), tf::TwinSvmConfig{});
  Eigen::Vector3d p1(m.w1.x(), m.w1.y(), m.b1);
  Eigen::Vector3d p2(m.w_neg1.x(), m.w_neg1.y(), m.b_neg1);
  EXPECT_GT(std::min((p1.normalized() - p2.normalized()).norm(), (p1.normalized() + p2.normalized()).norm()), 1e-3);
}

TEST(TwinSvm, OracleAgreementOnRandomInstances) {
  tf::Rng rng(31);
  for (int inst = 0; inst < 30; ++inst) {
    const std::size_t n = 4 + rng.below(5);
    const std::size_t d = 2 + rng.below(2);
    tf::RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < 2 ? 1 : (i < 4 ? -1 : (rng.below(2) ? 1 : -1));
    const tf::Dataset data(x, y);
    tf::TwinSvmConfig cfg;
    cfg.c1 = rng.uniform(0.1, 3.0);
    const auto sol = tf::solve_qpp_plane1(data, cfg);
    const auto ref = oracle::brute_force_qpp(rows_with(data, 1), rows_with(data, -1), cfg.c1, cfg.ridge_epsilon);
    EXPECT_NEAR(sol.objective, ref.objective, 1e-4 * ref.objective) << "instance " << inst;
    EXPECT_TRUE((sol.slack.array() >= -cfg.solver_tolerance).all());
    EXPECT_NEAR(tf::twin_qpp_objective(rows_with(data, 1), rows_with(data, -1), cfg.c1, cfg.ridge_epsilon,
                                       sol.primal_variables),
                sol.objective, 1e-12 * std::max(1.0, sol.objective));
  }
}

TEST(TwinSvm, ProximityPrediction) {
  const auto m = planes_at_0_and_5();
  EXPECT_EQ(tf::predict_twin_svm(m, Eigen::Vector2d(0.5, 0.5)), 1);
  EXPECT_EQ(tf::predict_twin_svm(m, Eigen::Vector2d(4.9, 0.0)), -1);
  EXPECT_EQ(tf::predict_twin_svm(m, Eigen::Vector2d(2.5, 0.0)), 1);
  const auto [d1, d2] = tf::plane_distances(m, Eigen::Vector2d(0.5, 0.5));
  EXPECT_DOUBLE_EQ(d1, 0.5);
  EXPECT_DOUBLE_EQ(d2, 4.5);
}

TEST(TwinSvm, PredictionInvariantUnderPositiveScaling) {
  const auto m = tf::fit_twin_svm(toy(), tf::TwinSvmConfig{});
  auto scaled = m;
  scaled.w1 *= 3.7;
  scaled.b1 *= 3.7;
  scaled.w_neg1 *= 0.01;
  scaled.b_neg1 *= 0.01;
  tf::Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector2d x(rng.uniform(-3, 8), rng.uniform(-3, 3));
    EXPECT_EQ(tf::predict_twin_svm(m, x), tf::predict_twin_svm(scaled, x));
  }
}

TEST(TwinSvm, ToyDataClassifiedPerfectly) {
  const auto d = toy();
  const auto m = tf::fit_twin_svm(d, tf::TwinSvmConfig{});
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(tf::predict_twin_svm(m, d.row(i)), d.label(i));
}
