#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twinforge/dataset.hpp"

namespace twinforge {

/// Confusion counts with +1 as the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Precision, recall and F1 are 0 whenever their denominator is 0.
struct EvalReport {
  ConfusionCounts counts;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

struct AggregateReport {
  std::vector<EvalReport> runs;
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
};

using Classifier = std::function<int(const Eigen::VectorXd&)>;

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth);
EvalReport report_from_counts(const ConfusionCounts& counts);
EvalReport evaluate_predictions(std::span<const int> predicted, std::span<const int> truth);
EvalReport evaluate(const Classifier& predict, const Dataset& data);

MetricSummary mean_std(std::span<const double> values);
AggregateReport aggregate(std::span<const EvalReport> reports);

}  // namespace twinforge
