#include <cmath>
#include <numbers>

#include "twinforge/dataset.hpp"
#include "twinforge/error.hpp"
#include "twinforge/random.hpp"

namespace twinforge {

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::gaussian_pair:
      return "gaussian_pair";
    case SyntheticKind::disjoint_clusters:
      return "disjoint_clusters";
    case SyntheticKind::ring_imbalance:
      return "ring_imbalance";
  }
  return "unknown";
}

SyntheticKind parse_synthetic_kind(const std::string& text) {
  if (text == "gaussian_pair") return SyntheticKind::gaussian_pair;
  if (text == "disjoint_clusters") return SyntheticKind::disjoint_clusters;
  if (text == "ring_imbalance") return SyntheticKind::ring_imbalance;
  throw ConfigError("unknown synthetic kind `" + text +
                    "` (expected gaussian_pair, disjoint_clusters or ring_imbalance)");
}

namespace {

void check_geometry(SyntheticKind kind, const Geometry& g) {
  for (double v : {g.separation, g.spread, g.offset, g.ring_radius}) {
    if (!std::isfinite(v)) throw GenerationError("geometry parameters must be finite");
  }
  if (g.dim < 1) throw GenerationError("dimension must be at least 1");
  if (g.spread <= 0.0) throw GenerationError("spread must be positive");
  switch (kind) {
    case SyntheticKind::gaussian_pair:
      if (g.separation == 0.0) throw GenerationError("gaussian_pair class centers coincide");
      break;
    case SyntheticKind::disjoint_clusters:
      if (g.dim < 2) throw GenerationError("disjoint_clusters needs at least two dimensions");
      if (g.clusters < 2) throw GenerationError("disjoint_clusters needs at least two minority clusters");
      if (g.offset <= 0.0) throw GenerationError("disjoint_clusters cluster centers coincide");
      break;
    case SyntheticKind::ring_imbalance:
      if (g.dim < 2) throw GenerationError("ring_imbalance needs at least two dimensions");
      if (g.ring_radius <= 0.0) throw GenerationError("ring radius must be positive");
      break;
  }
}

}  // namespace

Dataset gen_synthetic(SyntheticKind kind, std::size_t n_majority, std::size_t n_minority, const Geometry& geometry,
                      std::uint64_t seed) {
  if (n_majority < 1 || n_minority < 1) throw GenerationError("class counts must be at least 1");
  check_geometry(kind, geometry);

  const std::size_t n = n_majority + n_minority;
  const auto d = static_cast<Eigen::Index>(geometry.dim);
  RowMatrix x(static_cast<Eigen::Index>(n), d);
  std::vector<int> y(n);
  Rng rng(seed);
  const double s = geometry.spread;

  // Centers for disjoint_clusters: 2c points on a circle, alternating
  // minority / majority so adjacent blobs belong to different classes.
  const double radius = geometry.offset * std::numbers::sqrt2;
  auto cluster_center = [&](std::size_t slot) {
    const double angle = std::numbers::pi / 4.0 +
                         std::numbers::pi * static_cast<double>(slot) / static_cast<double>(geometry.clusters);
    return std::pair{radius * std::cos(angle), radius * std::sin(angle)};
  };

  for (std::size_t i = 0; i < n; ++i) {
    const bool minority = i >= n_majority;
    const std::size_t member = minority ? i - n_majority : i;
    const auto r = static_cast<Eigen::Index>(i);
    y[i] = minority ? kPositive : kNegative;
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = s * rng.normal();

    switch (kind) {
      case SyntheticKind::gaussian_pair:
        if (minority) x(r, 0) += geometry.separation;
        break;
      case SyntheticKind::disjoint_clusters: {
        const std::size_t blob = member % geometry.clusters;
        const auto [cx, cy] = cluster_center(2 * blob + (minority ? 0 : 1));
        x(r, 0) += cx;
        x(r, 1) += cy;
        break;
      }
      case SyntheticKind::ring_imbalance:
        if (!minority) {
          const double angle = 2.0 * std::numbers::pi * rng.uniform();
          const double rad = geometry.ring_radius + x(r, 0);
          x(r, 0) = rad * std::cos(angle);
          x(r, 1) = rad * std::sin(angle);
        }
        break;
    }
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace twinforge
