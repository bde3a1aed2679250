#include <algorithm>
#include <cmath>
#include <numeric>

#include "twinforge/baselines.hpp"
#include "twinforge/error.hpp"
#include "twinforge/random.hpp"

namespace twinforge {
namespace {

// Indices of the k nearest rows to `query` among `candidates`, excluding the
// query row itself. Equal distances keep candidate order.
std::vector<std::size_t> nearest(const RowMatrix& x, std::size_t query, const std::vector<std::size_t>& candidates,
                                 std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(candidates.size());
  const auto q = static_cast<Eigen::Index>(query);
  for (std::size_t c : candidates) {
    if (c == query) continue;
    dist.emplace_back((x.row(static_cast<Eigen::Index>(c)) - x.row(q)).squaredNorm(), c);
  }
  const std::size_t take = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::size_t> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = dist[i].second;
  return out;
}

}  // namespace

void AdasynConfig::validate() const {
  if (k_neighbors < 1) throw ConfigError("ADASYN k_neighbors must be at least 1");
  if (!(target_ratio > 0.0 && target_ratio <= 1.0)) throw ConfigError("ADASYN target_ratio must lie in (0, 1]");
}

AdasynPlan adasyn_plan(const Dataset& data, const AdasynConfig& cfg) {
  cfg.validate();
  if (!data.is_binary()) throw PreconditionError("ADASYN requires a binary dataset");
  const std::size_t n_pos = data.count(kPositive);
  const std::size_t n_neg = data.count(kNegative);
  if (n_pos == 0 || n_neg == 0) throw PreconditionError("ADASYN requires both classes");

  AdasynPlan plan;
  plan.minority_label = n_pos <= n_neg ? kPositive : kNegative;
  const std::size_t n_min = std::min(n_pos, n_neg);
  const std::size_t n_maj = std::max(n_pos, n_neg);
  if (n_min <= cfg.k_neighbors) {
    throw PreconditionError("ADASYN needs more minority samples (" + std::to_string(n_min) + ") than k_neighbors (" +
                            std::to_string(cfg.k_neighbors) + ")");
  }
  plan.minority_rows = data.indices_of(plan.minority_label);

  const auto target = static_cast<std::size_t>(std::llround(cfg.target_ratio * static_cast<double>(n_maj)));
  const std::size_t deficit = target > n_min ? target - n_min : 0;

  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  plan.hardness.resize(n_min);
  plan.minority_neighbors.resize(n_min);
  for (std::size_t i = 0; i < n_min; ++i) {
    const std::size_t row = plan.minority_rows[i];
    const auto neighbors = nearest(data.features(), row, all, cfg.k_neighbors);
    const auto majority = std::count_if(neighbors.begin(), neighbors.end(),
                                        [&](std::size_t r) { return data.label(r) != plan.minority_label; });
    plan.hardness[i] = static_cast<double>(majority) / static_cast<double>(cfg.k_neighbors);
    plan.minority_neighbors[i] = nearest(data.features(), row, plan.minority_rows, cfg.k_neighbors);
  }

  // Density-weighted allocation, rounded by largest remainder so that the
  // total is exactly the deficit. Without any majority neighbors the weights
  // fall back to uniform.
  const double total = std::accumulate(plan.hardness.begin(), plan.hardness.end(), 0.0);
  std::vector<double> share(n_min, 1.0 / static_cast<double>(n_min));
  if (total > 0.0) {
    for (std::size_t i = 0; i < n_min; ++i) share[i] = plan.hardness[i] / total;
  }
  plan.allocation.assign(n_min, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n_min; ++i) {
    const double exact = share[i] * static_cast<double>(deficit);
    plan.allocation[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += plan.allocation[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < deficit; ++r, ++assigned) {
    ++plan.allocation[remainders[r % remainders.size()].second];
  }
  return plan;
}

Dataset adasyn_oversample(const Dataset& data, const AdasynConfig& cfg) {
  const AdasynPlan plan = adasyn_plan(data, cfg);
  const std::size_t extra = std::accumulate(plan.allocation.begin(), plan.allocation.end(), std::size_t{0});
  if (extra == 0) return data;

  RowMatrix x(static_cast<Eigen::Index>(data.size() + extra), static_cast<Eigen::Index>(data.dim()));
  x.topRows(static_cast<Eigen::Index>(data.size())) = data.features();
  std::vector<int> y = data.labels();
  y.reserve(data.size() + extra);

  Rng rng(cfg.seed);
  auto out_row = static_cast<Eigen::Index>(data.size());
  for (std::size_t i = 0; i < plan.minority_rows.size(); ++i) {
    const auto base = data.features().row(static_cast<Eigen::Index>(plan.minority_rows[i]));
    const auto& neighbors = plan.minority_neighbors[i];
    for (std::size_t s = 0; s < plan.allocation[i]; ++s) {
      const std::size_t z = neighbors[rng.below(neighbors.size())];
      const double lambda = rng.uniform();
      x.row(out_row++) = base + lambda * (data.features().row(static_cast<Eigen::Index>(z)) - base);
      y.push_back(plan.minority_label);
    }
  }
  std::vector<std::string> sources;
  if (data.has_sources()) {
    sources = data.sources();
    sources.resize(data.size() + extra, "adasyn");
  }
  return Dataset(std::move(x), std::move(y), std::move(sources));
}

}  // namespace twinforge
