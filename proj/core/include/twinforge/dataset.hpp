#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace twinforge {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kPositive = 1;
inline constexpr int kNegative = -1;

/// Labeled feature vectors. Binary problems use labels {+1, -1}; multi-class
/// problems use {0, ..., K-1}. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  /// Validates shape, finiteness and class presence. When `classes` is empty
  /// the declared class set is the set of labels that occur.
  Dataset(RowMatrix features, std::vector<int> labels, std::vector<std::string> sources = {},
          std::vector<int> classes = {});

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  bool empty() const noexcept { return labels_.empty(); }

  const RowMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& sources() const noexcept { return sources_; }
  bool has_sources() const noexcept { return !sources_.empty(); }
  /// Sorted declared class set.
  const std::vector<int>& classes() const noexcept { return classes_; }

  /// True when every label is +1 or -1.
  bool is_binary() const noexcept;

  Eigen::VectorXd row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)).transpose(); }
  int label(std::size_t i) const { return labels_[i]; }

  std::size_t count(int label) const;
  std::vector<std::size_t> indices_of(int label) const;

  /// Rows in the given order. The declared class set is carried over only when
  /// every class is still present.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Same rows with +1 and -1 exchanged.
  Dataset with_swapped_labels() const;

  /// Concatenation of two datasets with matching dimension.
  static Dataset concat(const Dataset& a, const Dataset& b);

 private:
  RowMatrix features_;
  std::vector<int> labels_;
  std::vector<std::string> sources_;
  std::vector<int> classes_;
};

struct ImbalanceStats {
  std::map<int, std::size_t> counts_per_class;
  double imbalance_factor = 1.0;  // majority count / minority count
};

ImbalanceStats imbalance(const Dataset& data);

// ---------------------------------------------------------------------------
// CSV ingestion

enum class DataFormat {
  csv_features,   // header: arbitrary feature names, optional `source`, then `label`
  embedding_csv,  // header: d0,...,d{n-1},label
};

struct LoadOptions {
  DataFormat format = DataFormat::csv_features;
  /// 0 means binary: labels {0,1} or {-1,1}, canonicalized to {-1,+1}.
  /// K > 0 means multi-class with labels 0..K-1.
  int num_classes = 0;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_dataset(std::istream& in, const std::string& name, const LoadOptions& options = {});

/// Writes `d0,...,d{n-1}[,source],label` with round-trip precision.
void write_dataset(const std::filesystem::path& path, const Dataset& data);
void write_dataset(std::ostream& out, const Dataset& data);

/// FNV-1a over the bytes of a file; used for run fingerprints.
std::uint64_t content_hash(const std::filesystem::path& path);
std::uint64_t content_hash(std::span<const char> bytes);

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratify_by_source = false;

  void validate() const;
  /// Parses "0.7,0.1,0.2".
  static SplitSpec parse_fractions(const std::string& text);
};

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Per-class (and per-source) seeded shuffle followed by a contiguous
/// partition. Train and validation sizes are floor(fraction * cell size); the
/// remainder goes to test.
SplitResult split(const Dataset& data, const SplitSpec& spec);

/// Cell sizes used by `split` for a cell of `n` samples.
std::tuple<std::size_t, std::size_t, std::size_t> split_sizes(std::size_t n, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic generators

enum class SyntheticKind { gaussian_pair, disjoint_clusters, ring_imbalance };

std::string to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(const std::string& text);

struct Geometry {
  std::size_t dim = 2;
  /// gaussian_pair: distance between class means along the first axis.
  double separation = 4.0;
  /// Isotropic standard deviation of every blob.
  double spread = 1.0;
  /// disjoint_clusters: number of minority blobs (and of majority blobs).
  std::size_t clusters = 2;
  /// disjoint_clusters: blob centers sit at (+-offset, +-offset) for two
  /// clusters, on a circle of radius offset*sqrt(2) in general.
  double offset = 5.0;
  /// ring_imbalance: radius of the majority ring.
  double ring_radius = 4.0;
};

/// Minority samples are labeled +1, majority samples -1. Pure function of its
/// arguments.
Dataset gen_synthetic(SyntheticKind kind, std::size_t n_majority, std::size_t n_minority,
                      const Geometry& geometry, std::uint64_t seed);

}  // namespace twinforge
