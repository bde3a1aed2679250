#include "twinforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "twinforge/error.hpp"

namespace twinforge {

Dataset::Dataset(RowMatrix features, std::vector<int> labels, std::vector<std::string> sources,
                 std::vector<int> classes)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      sources_(std::move(sources)),
      classes_(std::move(classes)) {
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw ShapeError("dataset has " + std::to_string(features_.rows()) + " feature rows but " +
                     std::to_string(labels_.size()) + " labels");
  }
  if (!sources_.empty() && sources_.size() != labels_.size()) {
    throw ShapeError("dataset source tags do not match the row count");
  }
  if (!features_.allFinite()) {
    throw SchemaError("dataset contains non-finite feature values");
  }
  const std::set<int> present(labels_.begin(), labels_.end());
  if (classes_.empty()) {
    classes_.assign(present.begin(), present.end());
  } else {
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    for (int c : classes_) {
      if (!present.contains(c)) {
        throw SchemaError("declared class " + std::to_string(c) + " has no samples");
      }
    }
    for (int c : present) {
      if (!std::binary_search(classes_.begin(), classes_.end(), c)) {
        throw SchemaError("label " + std::to_string(c) + " is outside the declared class set");
      }
    }
  }
}

bool Dataset::is_binary() const noexcept {
  return std::all_of(labels_.begin(), labels_.end(),
                     [](int y) { return y == kPositive || y == kNegative; });
}

std::size_t Dataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y;
  std::vector<std::string> s;
  y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw ShapeError("subset row index out of range");
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
    y.push_back(labels_[rows[r]]);
    if (!sources_.empty()) s.push_back(sources_[rows[r]]);
  }
  std::vector<int> declared;
  const bool all_present = std::all_of(classes_.begin(), classes_.end(), [&](int c) {
    return std::find(y.begin(), y.end(), c) != y.end();
  });
  if (all_present) declared = classes_;
  return Dataset(std::move(x), std::move(y), std::move(s), std::move(declared));
}

Dataset Dataset::with_swapped_labels() const {
  std::vector<int> y = labels_;
  for (int& v : y) {
    if (v == kPositive) {
      v = kNegative;
    } else if (v == kNegative) {
      v = kPositive;
    }
  }
  return Dataset(features_, std::move(y), sources_);
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.dim() != b.dim()) throw ShapeError("cannot concatenate datasets of different dimension");
  RowMatrix x(static_cast<Eigen::Index>(a.size() + b.size()), a.features_.cols());
  x.topRows(static_cast<Eigen::Index>(a.size())) = a.features_;
  x.bottomRows(static_cast<Eigen::Index>(b.size())) = b.features_;
  std::vector<int> y = a.labels_;
  y.insert(y.end(), b.labels_.begin(), b.labels_.end());
  std::vector<std::string> s;
  if (a.has_sources() && b.has_sources()) {
    s = a.sources_;
    s.insert(s.end(), b.sources_.begin(), b.sources_.end());
  }
  return Dataset(std::move(x), std::move(y), std::move(s));
}

ImbalanceStats imbalance(const Dataset& data) {
  ImbalanceStats stats;
  for (int y : data.labels()) ++stats.counts_per_class[y];
  if (stats.counts_per_class.empty()) return stats;
  std::size_t lo = data.size();
  std::size_t hi = 0;
  for (const auto& [label, n] : stats.counts_per_class) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  stats.imbalance_factor = static_cast<double>(hi) / static_cast<double>(lo);
  return stats;
}

}  // namespace twinforge
