#include "twinforge/metrics.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>

#include "twinforge/error.hpp"

namespace twinforge {

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ShapeError("prediction and label counts differ");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i];
    const int y = truth[i];
    if ((p != kPositive && p != kNegative) || (y != kPositive && y != kNegative)) {
      throw UnsupportedError("metrics are defined for binary labels {+1, -1} only");
    }
    if (y == kPositive) {
      (p == kPositive ? c.tp : c.fn) += 1;
    } else {
      (p == kPositive ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

EvalReport report_from_counts(const ConfusionCounts& counts) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  EvalReport r;
  r.counts = counts;
  r.accuracy = ratio(counts.tp + counts.tn, counts.total());
  r.precision = ratio(counts.tp, counts.tp + counts.fp);
  r.recall = ratio(counts.tp, counts.tp + counts.fn);
  const double denom = r.precision + r.recall;
  r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
  return r;
}

EvalReport evaluate_predictions(std::span<const int> predicted, std::span<const int> truth) {
  if (truth.empty()) throw PreconditionError("cannot evaluate on an empty dataset");
  return report_from_counts(confusion(predicted, truth));
}

EvalReport evaluate(const Classifier& predict, const Dataset& data) {
  if (data.empty()) throw PreconditionError("cannot evaluate on an empty dataset");
  if (!data.is_binary()) throw UnsupportedError("metrics are defined for binary labels {+1, -1} only");
  std::vector<int> predicted(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) predicted[i] = predict(data.row(i));
  return evaluate_predictions(predicted, data.labels());
}

MetricSummary mean_std(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("cannot summarize an empty list");
  const double n = static_cast<double>(values.size());
  // Identical values summarize exactly, without rounding noise from the sum.
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    return {values.front(), 0.0};
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

AggregateReport aggregate(std::span<const EvalReport> reports) {
  if (reports.empty()) throw PreconditionError("cannot aggregate zero reports");
  AggregateReport out;
  out.runs.assign(reports.begin(), reports.end());
  auto summarize = [&](double EvalReport::*field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(r.*field);
    return mean_std(v);
  };
  out.accuracy = summarize(&EvalReport::accuracy);
  out.precision = summarize(&EvalReport::precision);
  out.recall = summarize(&EvalReport::recall);
  out.f1 = summarize(&EvalReport::f1);
  return out;
}

}  // namespace twinforge
