#pragma once

// Library side of the twinforge command line: each run_* function performs one
// subcommand, writes its outputs into a run directory and returns the results
// for programmatic use.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twinforge/baselines.hpp"
#include "twinforge/dataset.hpp"
#include "twinforge/metrics.hpp"
#include "twinforge/serialize.hpp"
#include "twinforge/twin_nn.hpp"
#include "twinforge/twin_svm.hpp"

namespace twinforge {

namespace fs = std::filesystem;

enum class Method { twin, twin_svm, unweighted_ce, weighted_ce, focal, adasyn_ce };

std::string to_string(Method method);
/// Accepts twin (alias twin_nn), twin_svm, unweighted_ce, weighted_ce, focal,
/// adasyn+ce. Throws UsageError listing the valid names otherwise.
Method parse_method(const std::string& text);
std::vector<Method> parse_method_list(const std::string& comma_separated);

struct DataPaths {
  fs::path train;
  fs::path val;
  fs::path test;
};

/// Hyperparameters for every method a run may train.
struct MethodSettings {
  TwinNnConfig twin;
  TwinSvmConfig svm;
  /// Shared by the linear-head baselines; `loss` is set per method.
  BaselineConfig baseline;
  /// Empty means {minority: 1, majority: 1 / imbalance factor of train}.
  std::map<int, double> class_weights;
  AdasynConfig adasyn;
};

struct DatasetFingerprint {
  std::string path;
  std::size_t rows = 0;
  std::uint64_t hash = 0;
};

/// Everything needed to reproduce a run. `config_json` holds the resolved
/// options with every default materialized.
struct RunManifest {
  std::string command;
  std::string config_json;
  std::vector<DatasetFingerprint> datasets;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> outputs;
  std::map<std::string, double> timings_ms;
};

void write_manifest(const fs::path& path, const RunManifest& manifest);
RunManifest read_manifest(const fs::path& path);

// ---------------------------------------------------------------------------

struct GenOptions {
  SyntheticKind kind = SyntheticKind::gaussian_pair;
  std::size_t majority = 1000;
  std::size_t minority = 100;
  Geometry geometry;
  SplitSpec split;  // split.seed is ignored; `seed` drives both generation and split
  std::uint64_t seed = 0;
};

struct GenResult {
  DataPaths paths;
  SplitResult data;
  RunManifest manifest;
};

GenResult run_gen(const GenOptions& options, const fs::path& out_dir);

struct TrainOptions {
  Method method = Method::twin;
  DataPaths data;
  DataFormat format = DataFormat::csv_features;
  MethodSettings settings;
  std::uint64_t seed = 0;
};

struct TrainResult {
  AnyModel model;
  EvalReport report;
  RunManifest manifest;
};

TrainResult run_train(const TrainOptions& options, const fs::path& out_dir);

/// Trains only a twin head on frozen-encoder embeddings and evaluates it on
/// the test embeddings.
struct AugmentOptions {
  DataPaths data;
  TwinNnConfig twin;
};

TrainResult run_augment(const AugmentOptions& options, const fs::path& out_dir);

struct EvalOptions {
  fs::path model;
  fs::path data;
  DataFormat format = DataFormat::csv_features;
};

struct EvalResult {
  EvalReport report;
  RunManifest manifest;
};

EvalResult run_eval(const EvalOptions& options, const fs::path& out_dir);

enum class SweepKind { planes, hidden };

struct AblateOptions {
  DataPaths data;
  DataFormat format = DataFormat::embedding_csv;
  SweepKind sweep = SweepKind::planes;
  /// Plane counts, or hidden-layer counts (first layer 256 wide, each further
  /// layer 128 wide).
  std::vector<std::size_t> values;
  TwinNnConfig twin;
  std::size_t runs = 5;
  std::uint64_t seed = 0;
};

struct AblateRow {
  std::size_t setting = 0;
  std::vector<std::size_t> hidden_layers;
  std::size_t num_planes = 0;
  AggregateReport result;
};

struct AblateResult {
  std::vector<AblateRow> rows;
  RunManifest manifest;
};

/// Hidden widths used for a hidden-layer sweep setting.
std::vector<std::size_t> hidden_layers_for_depth(std::size_t depth);

AblateResult run_ablate(const AblateOptions& options, const fs::path& out_dir);

struct CompareOptions {
  DataPaths data;
  DataFormat format = DataFormat::embedding_csv;
  std::vector<Method> methods{Method::twin, Method::unweighted_ce, Method::weighted_ce, Method::focal,
                              Method::adasyn_ce};
  MethodSettings settings;
  std::size_t runs = 3;
  std::uint64_t seed = 0;
};

struct CompareRow {
  Method method = Method::twin;
  AggregateReport result;
};

struct CompareResult {
  std::vector<CompareRow> rows;
  RunManifest manifest;
};

CompareResult run_compare(const CompareOptions& options, const fs::path& out_dir);

/// Re-executes the command recorded in a manifest, writing into `out_dir`.
/// Returns the command name.
std::string replay(const fs::path& manifest_path, const fs::path& out_dir);

// Option records in the manifest's config_json form.
std::string options_to_json(const GenOptions& o);
std::string options_to_json(const TrainOptions& o);
std::string options_to_json(const AugmentOptions& o);
std::string options_to_json(const EvalOptions& o);
std::string options_to_json(const AblateOptions& o);
std::string options_to_json(const CompareOptions& o);
GenOptions gen_options_from_json(const std::string& text);
TrainOptions train_options_from_json(const std::string& text);
AugmentOptions augment_options_from_json(const std::string& text);
EvalOptions eval_options_from_json(const std::string& text);
AblateOptions ablate_options_from_json(const std::string& text);
CompareOptions compare_options_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Report emission

/// Human-readable table with accuracy, precision, recall and F1 as mean +- std.
std::string format_table(const std::vector<std::pair<std::string, AggregateReport>>& rows);
/// Machine-readable records: one JSON line per run, then one aggregate line per row.
std::string format_records(const std::vector<std::pair<std::string, AggregateReport>>& rows);

}  // namespace twinforge
