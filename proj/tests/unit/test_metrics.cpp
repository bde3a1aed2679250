#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "twinforge/error.hpp"
#include "twinforge/metrics.hpp"
#include "twinforge/random.hpp"

namespace tf = twinforge;

TEST(Metrics, CountsArithmetic) {
  const auto r = tf::report_from_counts({9, 1, 1, 89});
  EXPECT_DOUBLE_EQ(r.precision, 0.9);
  EXPECT_DOUBLE_EQ(r.recall, 0.9);
  EXPECT_DOUBLE_EQ(r.f1, 0.9);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.98);
}

TEST(Metrics, AllPositivePredictor) {
  std::vector<int> truth(341, -1);
  std::fill(truth.begin(), truth.begin() + 31, 1);
  const auto r = tf::evaluate_predictions(std::vector<int>(341, 1), truth);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.precision, 31.0 / 341.0);
  EXPECT_NEAR(r.precision, 0.0909, 5e-5);
}

TEST(Metrics, ZeroDenominatorsGiveZero) {
  const auto none_predicted = tf::evaluate_predictions(std::vector<int>{-1, -1, -1}, std::vector<int>{1, -1, -1});
  EXPECT_EQ(none_predicted.precision, 0.0);
  EXPECT_EQ(none_predicted.f1, 0.0);
  const auto no_positives = tf::evaluate_predictions(std::vector<int>{-1, -1}, std::vector<int>{-1, -1});
  EXPECT_EQ(no_positives.recall, 0.0);
  EXPECT_EQ(no_positives.accuracy, 1.0);
}

TEST(Metrics, Errors) {
  EXPECT_THROW(tf::evaluate_predictions(std::vector<int>{}, std::vector<int>{}), tf::PreconditionError);
  EXPECT_THROW(tf::evaluate_predictions(std::vector<int>{1}, std::vector<int>{1, -1}), tf::ShapeError);
  EXPECT_THROW(tf::evaluate_predictions(std::vector<int>{0}, std::vector<int>{2}), tf::UnsupportedError);
}

TEST(Metrics, IndependentPassAndPermutationInvariance) {
  tf::Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(200);
    std::vector<int> pred(n);
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.below(2) ? 1 : -1;
      truth[i] = rng.below(3) ? -1 : 1;
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pred[i] == 1 && truth[i] == 1) ++tp;
      if (pred[i] == 1 && truth[i] == -1) ++fp;
      if (pred[i] == -1 && truth[i] == 1) ++fn;
      if (pred[i] == -1 && truth[i] == -1) ++tn;
    }
    const auto r = tf::evaluate_predictions(pred, truth);
    EXPECT_EQ(r.counts, (tf::ConfusionCounts{tp, fp, fn, tn}));
    const double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rc = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    EXPECT_DOUBLE_EQ(r.precision, p);
    EXPECT_DOUBLE_EQ(r.recall, rc);
    if (p > 0 && rc > 0) {
      EXPECT_LE(r.f1, std::max(p, rc) + 1e-15);
      EXPECT_GE(r.f1, std::min(p, rc) - 1e-15);
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<int> pp(n), tt(n);
    for (std::size_t i = 0; i < n; ++i) {
      pp[i] = pred[perm[i]];
      tt[i] = truth[perm[i]];
    }
    const auto s = tf::evaluate_predictions(pp, tt);
    EXPECT_EQ(s.counts, r.counts);
    EXPECT_EQ(s.f1, r.f1);
  }
}

TEST(Metrics, EvaluateWithClassifier) {
  tf::RowMatrix x(4, 1);
  x << -2, -1, 1, 2;
  const tf::Dataset d(x, {-1, -1, 1, -1});
  const auto r = tf::evaluate([](const Eigen::VectorXd& v) { return v[0] > 0 ? 1 : -1; }, d);
  EXPECT_EQ(r.counts, (tf::ConfusionCounts{1, 1, 0, 2}));
}

TEST(Aggregate, MeanAndSampleStd) {
  const std::vector<double> v{0.8, 0.9};
  const auto s = tf::mean_std(v);
  EXPECT_DOUBLE_EQ(s.mean, 0.85);
  EXPECT_NEAR(s.std, 0.0707107, 1e-6);
  EXPECT_EQ(tf::mean_std(std::vector<double>{0.3}).std, 0.0);
  EXPECT_EQ(tf::mean_std(std::vector<double>{0.4, 0.4, 0.4}).std, 0.0);
}

TEST(Aggregate, Reports) {
  const std::vector<tf::EvalReport> runs{tf::report_from_counts({9, 1, 1, 89}), tf::report_from_counts({8, 2, 2, 88})};
  const auto a = tf::aggregate(runs);
  EXPECT_EQ(a.runs.size(), 2u);
  EXPECT_DOUBLE_EQ(a.f1.mean, (0.9 + 0.8) / 2);
  EXPECT_GT(a.f1.std, 0.0);
  EXPECT_THROW(tf::aggregate(std::vector<tf::EvalReport>{}), tf::PreconditionError);
}
