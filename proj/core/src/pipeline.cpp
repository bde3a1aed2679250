#include "twinforge/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json_codec.hpp"

namespace twinforge {
namespace {

using codec::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_name(DataFormat f) { return f == DataFormat::embedding_csv ? "embedding_csv" : "csv_features"; }

DataFormat parse_format(const std::string& s) {
  if (s == "embedding_csv") return DataFormat::embedding_csv;
  if (s == "csv_features") return DataFormat::csv_features;
  throw UsageError("unknown data format `" + s + "` (expected csv_features or embedding_csv)");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create run directory " + dir.string() + ": " + ec.message());
}

DatasetFingerprint fingerprint(const fs::path& path, const Dataset& data) {
  return {path.string(), data.size(), content_hash(path)};
}

struct LoadedSplits {
  Dataset train;
  Dataset val;
  Dataset test;
};

LoadedSplits load_splits(const DataPaths& paths, DataFormat format, RunManifest& manifest) {
  const auto start = Clock::now();
  LoadOptions opts;
  opts.format = format;
  LoadedSplits s{load_dataset(paths.train, opts), load_dataset(paths.val, opts), load_dataset(paths.test, opts)};
  if (s.val.dim() != s.train.dim()) {
    throw SchemaError(paths.val.string() + ": dimension " + std::to_string(s.val.dim()) +
                      " does not match the training data (" + std::to_string(s.train.dim()) + ")");
  }
  if (s.test.dim() != s.train.dim()) {
    throw SchemaError(paths.test.string() + ": dimension " + std::to_string(s.test.dim()) +
                      " does not match the training data (" + std::to_string(s.train.dim()) + ")");
  }
  manifest.datasets = {fingerprint(paths.train, s.train), fingerprint(paths.val, s.val),
                       fingerprint(paths.test, s.test)};
  manifest.timings_ms["load"] = elapsed_ms(start);
  return s;
}

std::map<int, double> resolve_class_weights(const MethodSettings& settings, const Dataset& train) {
  if (!settings.class_weights.empty()) return settings.class_weights;
  const ImbalanceStats stats = imbalance(train);
  const std::size_t n_pos = train.count(kPositive);
  const std::size_t n_neg = train.count(kNegative);
  const int minority = n_pos <= n_neg ? kPositive : kNegative;
  return {{minority, 1.0}, {-minority, 1.0 / stats.imbalance_factor}};
}

struct Fitted {
  AnyModel model;
  EvalReport report;
};

Fitted fit_method(Method method, const LoadedSplits& d, const MethodSettings& settings, std::uint64_t seed) {
  auto finish = [&](AnyModel model) {
    const EvalReport report = evaluate_predictions(predict(model, d.test), d.test.labels());
    return Fitted{std::move(model), report};
  };
  switch (method) {
    case Method::twin: {
      TwinNnConfig cfg = settings.twin;
      cfg.seed = seed;
      return finish(train_twin_nn(d.train, d.val, cfg));
    }
    case Method::twin_svm:
      return finish(fit_twin_svm(d.train, settings.svm));
    case Method::unweighted_ce:
    case Method::weighted_ce:
    case Method::focal: {
      BaselineConfig cfg = settings.baseline;
      cfg.seed = seed;
      cfg.loss = method == Method::focal         ? BaselineLoss::focal
                 : method == Method::weighted_ce ? BaselineLoss::weighted_ce
                                                 : BaselineLoss::unweighted_ce;
      if (method == Method::weighted_ce) cfg.class_weights = resolve_class_weights(settings, d.train);
      return finish(train_linear_head(d.train, d.val, cfg));
    }
    case Method::adasyn_ce: {
      AdasynConfig acfg = settings.adasyn;
      acfg.seed = seed;
      const Dataset augmented = adasyn_oversample(d.train, acfg);
      BaselineConfig cfg = settings.baseline;
      cfg.seed = seed;
      cfg.loss = BaselineLoss::unweighted_ce;
      return finish(train_linear_head(augmented, d.val, cfg));
    }
  }
  throw UsageError("unhandled method");
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, std::size_t runs) {
  if (runs == 0) throw UsageError("at least one run is required");
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t r = 0; r < runs; ++r) seeds[r] = base + r;
  return seeds;
}

json report_json(const EvalReport& r) {
  return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"tp", r.counts.tp},      {"fp", r.counts.fp},         {"fn", r.counts.fn},   {"tn", r.counts.tn}};
}

std::string single_report(const std::string& name, const EvalReport& r) {
  return format_records({{name, aggregate(std::span<const EvalReport>(&r, 1))}});
}

// ---- option codecs ---------------------------------------------------------

json paths_json(const DataPaths& p) {
  return {{"train", p.train.string()}, {"val", p.val.string()}, {"test", p.test.string()}};
}

DataPaths paths_from(const json& j) {
  return {j.at("train").get<std::string>(), j.at("val").get<std::string>(), j.at("test").get<std::string>()};
}

json settings_json(const MethodSettings& s) {
  json weights = json::object();
  for (const auto& [label, w] : s.class_weights) weights[std::to_string(label)] = w;
  return {{"twin", codec::to_json(s.twin)},
          {"svm", codec::to_json(s.svm)},
          {"baseline", codec::to_json(s.baseline)},
          {"class_weights", std::move(weights)},
          {"adasyn", codec::to_json(s.adasyn)}};
}

MethodSettings settings_from(const json& j) {
  MethodSettings s;
  s.twin = codec::twin_nn_config_from_json(j.at("twin"));
  s.svm = codec::twin_svm_config_from_json(j.at("svm"));
  s.baseline = codec::baseline_config_from_json(j.at("baseline"));
  for (const auto& [key, w] : j.at("class_weights").items()) s.class_weights[std::stoi(key)] = w.get<double>();
  s.adasyn = codec::adasyn_config_from_json(j.at("adasyn"));
  return s;
}

template <typename F>
auto decode_options(const std::string& text, F&& decode) {
  try {
    return decode(json::parse(text));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed run configuration: ") + e.what());
  }
}

std::string to_string(SweepKind k) { return k == SweepKind::planes ? "planes" : "hidden"; }

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Method method) {
  switch (method) {
    case Method::twin:
      return "twin";
    case Method::twin_svm:
      return "twin_svm";
    case Method::unweighted_ce:
      return "unweighted_ce";
    case Method::weighted_ce:
      return "weighted_ce";
    case Method::focal:
      return "focal";
    case Method::adasyn_ce:
      return "adasyn+ce";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "twin" || text == "twin_nn") return Method::twin;
  if (text == "twin_svm") return Method::twin_svm;
  if (text == "unweighted_ce") return Method::unweighted_ce;
  if (text == "weighted_ce") return Method::weighted_ce;
  if (text == "focal") return Method::focal;
  if (text == "adasyn+ce") return Method::adasyn_ce;
  throw UsageError("unknown method `" + text +
                   "`; valid methods: twin, twin_svm, unweighted_ce, weighted_ce, focal, adasyn+ce");
}

std::vector<Method> parse_method_list(const std::string& comma_separated) {
  std::vector<Method> out;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw UsageError("method list is empty");
  return out;
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  json datasets = json::array();
  for (const auto& d : m.datasets) datasets.push_back({{"path", d.path}, {"rows", d.rows}, {"hash", hex64(d.hash)}});
  json j = {{"format", "twinforge-manifest"},
            {"version", 1},
            {"command", m.command},
            {"config", json::parse(m.config_json)},
            {"datasets", std::move(datasets)},
            {"seeds", m.seeds},
            {"outputs", m.outputs},
            {"timings_ms", m.timings_ms}};
  write_text(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "twinforge-manifest") throw SchemaError(path.string() + " is not a run manifest");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_json = j.at("config").dump();
    for (const auto& d : j.at("datasets")) {
      m.datasets.push_back({d.at("path").get<std::string>(), d.at("rows").get<std::size_t>(),
                            std::stoull(d.at("hash").get<std::string>(), nullptr, 16)});
    }
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": malformed manifest: " + e.what());
  }
}

// ---- option records --------------------------------------------------------

std::string options_to_json(const GenOptions& o) {
  const Geometry& g = o.geometry;
  return json{{"kind", to_string(o.kind)},
              {"majority", o.majority},
              {"minority", o.minority},
              {"geometry",
               {{"dim", g.dim},
                {"separation", g.separation},
                {"spread", g.spread},
                {"clusters", g.clusters},
                {"offset", g.offset},
                {"ring_radius", g.ring_radius}}},
              {"split", {o.split.train_fraction, o.split.val_fraction, o.split.test_fraction}},
              {"stratify_by_source", o.split.stratify_by_source},
              {"seed", o.seed}}
      .dump();
}

GenOptions gen_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    GenOptions o;
    o.kind = parse_synthetic_kind(j.at("kind").get<std::string>());
    o.majority = j.at("majority").get<std::size_t>();
    o.minority = j.at("minority").get<std::size_t>();
    const json& g = j.at("geometry");
    o.geometry.dim = g.at("dim").get<std::size_t>();
    o.geometry.separation = g.at("separation").get<double>();
    o.geometry.spread = g.at("spread").get<double>();
    o.geometry.clusters = g.at("clusters").get<std::size_t>();
    o.geometry.offset = g.at("offset").get<double>();
    o.geometry.ring_radius = g.at("ring_radius").get<double>();
    const auto fr = j.at("split").get<std::vector<double>>();
    if (fr.size() != 3) throw SchemaError("split needs three fractions");
    o.split.train_fraction = fr[0];
    o.split.val_fraction = fr[1];
    o.split.test_fraction = fr[2];
    o.split.stratify_by_source = j.at("stratify_by_source").get<bool>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
  });
}

std::string options_to_json(const TrainOptions& o) {
  return json{{"method", to_string(o.method)},
              {"data", paths_json(o.data)},
              {"format", format_name(o.format)},
              {"settings", settings_json(o.settings)},
              {"seed", o.seed}}
      .dump();
}

TrainOptions train_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    TrainOptions o;
    o.method = parse_method(j.at("method").get<std::string>());
    o.data = paths_from(j.at("data"));
    o.format = parse_format(j.at("format").get<std::string>());
    o.settings = settings_from(j.at("settings"));
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
  });
}

std::string options_to_json(const AugmentOptions& o) {
  return json{{"data", paths_json(o.data)}, {"twin", codec::to_json(o.twin)}}.dump();
}

AugmentOptions augment_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    AugmentOptions o;
    o.data = paths_from(j.at("data"));
    o.twin = codec::twin_nn_config_from_json(j.at("twin"));
    return o;
  });
}

std::string options_to_json(const EvalOptions& o) {
  return json{{"model", o.model.string()}, {"data", o.data.string()}, {"format", format_name(o.format)}}.dump();
}

EvalOptions eval_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    EvalOptions o;
    o.model = j.at("model").get<std::string>();
    o.data = j.at("data").get<std::string>();
    o.format = parse_format(j.at("format").get<std::string>());
    return o;
  });
}

std::string options_to_json(const AblateOptions& o) {
  return json{{"data", paths_json(o.data)},
              {"format", format_name(o.format)},
              {"sweep", to_string(o.sweep)},
              {"values", o.values},
              {"twin", codec::to_json(o.twin)},
              {"runs", o.runs},
              {"seed", o.seed}}
      .dump();
}

AblateOptions ablate_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    AblateOptions o;
    o.data = paths_from(j.at("data"));
    o.format = parse_format(j.at("format").get<std::string>());
    const std::string sweep = j.at("sweep").get<std::string>();
    if (sweep != "planes" && sweep != "hidden") throw SchemaError("unknown sweep `" + sweep + "`");
    o.sweep = sweep == "planes" ? SweepKind::planes : SweepKind::hidden;
    o.values = j.at("values").get<std::vector<std::size_t>>();
    o.twin = codec::twin_nn_config_from_json(j.at("twin"));
    o.runs = j.at("runs").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
  });
}

std::string options_to_json(const CompareOptions& o) {
  std::vector<std::string> methods;
  for (Method m : o.methods) methods.push_back(to_string(m));
  return json{{"data", paths_json(o.data)},
              {"format", format_name(o.format)},
              {"methods", methods},
              {"settings", settings_json(o.settings)},
              {"runs", o.runs},
              {"seed", o.seed}}
      .dump();
}

CompareOptions compare_options_from_json(const std::string& text) {
  return decode_options(text, [](const json& j) {
    CompareOptions o;
    o.data = paths_from(j.at("data"));
    o.format = parse_format(j.at("format").get<std::string>());
    o.methods.clear();
    for (const auto& m : j.at("methods")) o.methods.push_back(parse_method(m.get<std::string>()));
    o.settings = settings_from(j.at("settings"));
    o.runs = j.at("runs").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
  });
}

// ---- commands --------------------------------------------------------------

GenResult run_gen(const GenOptions& options, const fs::path& out_dir) {
  if (options.majority < 1 || options.minority < 1) throw UsageError("class counts must be at least 1");
  options.split.validate();
  prepare_dir(out_dir);
  GenResult result;
  RunManifest& m = result.manifest;
  m.command = "gen";
  m.config_json = options_to_json(options);
  m.seeds = {options.seed};

  auto start = Clock::now();
  const Dataset all = gen_synthetic(options.kind, options.majority, options.minority, options.geometry, options.seed);
  m.timings_ms["generate"] = elapsed_ms(start);

  start = Clock::now();
  SplitSpec spec = options.split;
  spec.seed = options.seed;
  result.data = split(all, spec);
  m.timings_ms["split"] = elapsed_ms(start);

  start = Clock::now();
  result.paths = {out_dir / "train.csv", out_dir / "val.csv", out_dir / "test.csv"};
  write_dataset(result.paths.train, result.data.train);
  write_dataset(result.paths.val, result.data.val);
  write_dataset(result.paths.test, result.data.test);
  m.timings_ms["write"] = elapsed_ms(start);
  m.datasets = {fingerprint(result.paths.train, result.data.train), fingerprint(result.paths.val, result.data.val),
                fingerprint(result.paths.test, result.data.test)};
  m.outputs = {{"train", result.paths.train.string()},
               {"val", result.paths.val.string()},
               {"test", result.paths.test.string()},
               {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return result;
}

TrainResult run_train(const TrainOptions& options, const fs::path& out_dir) {
  prepare_dir(out_dir);
  RunManifest m;
  m.command = "train";
  m.config_json = options_to_json(options);
  m.seeds = {options.seed};
  const LoadedSplits data = load_splits(options.data, options.format, m);

  const auto start = Clock::now();
  Fitted fitted = fit_method(options.method, data, options.settings, options.seed);
  m.timings_ms["train_and_evaluate"] = elapsed_ms(start);

  save_model(out_dir / "model", fitted.model);
  write_text(out_dir / "report", single_report(to_string(options.method), fitted.report));
  m.outputs = {{"model", (out_dir / "model").string()},
               {"report", (out_dir / "report").string()},
               {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return {std::move(fitted.model), fitted.report, std::move(m)};
}

TrainResult run_augment(const AugmentOptions& options, const fs::path& out_dir) {
  prepare_dir(out_dir);
  RunManifest m;
  m.command = "augment";
  m.config_json = options_to_json(options);
  m.seeds = {options.twin.seed};
  const LoadedSplits data = load_splits(options.data, DataFormat::embedding_csv, m);

  auto start = Clock::now();
  TwinNnModel model = train_twin_nn(data.train, data.val, options.twin);
  m.timings_ms["train"] = elapsed_ms(start);
  start = Clock::now();
  const EvalReport report = evaluate_predictions(predict_twin_nn(model, data.test), data.test.labels());
  m.timings_ms["evaluate"] = elapsed_ms(start);

  AnyModel any = std::move(model);
  save_model(out_dir / "model", any);
  write_text(out_dir / "report", single_report("twin", report));
  m.outputs = {{"model", (out_dir / "model").string()},
               {"report", (out_dir / "report").string()},
               {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return {std::move(any), report, std::move(m)};
}

EvalResult run_eval(const EvalOptions& options, const fs::path& out_dir) {
  prepare_dir(out_dir);
  RunManifest m;
  m.command = "eval";
  m.config_json = options_to_json(options);
  auto start = Clock::now();
  const AnyModel model = load_model(options.model);
  LoadOptions lo;
  lo.format = options.format;
  const Dataset data = load_dataset(options.data, lo);
  m.datasets = {fingerprint(options.data, data)};
  m.timings_ms["load"] = elapsed_ms(start);

  start = Clock::now();
  const EvalReport report = evaluate_predictions(predict(model, data), data.labels());
  m.timings_ms["evaluate"] = elapsed_ms(start);
  write_text(out_dir / "report", single_report(model_kind(model), report));
  m.outputs = {{"report", (out_dir / "report").string()}, {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return {report, std::move(m)};
}

std::vector<std::size_t> hidden_layers_for_depth(std::size_t depth) {
  std::vector<std::size_t> widths;
  for (std::size_t l = 0; l < depth; ++l) widths.push_back(l == 0 ? 256 : 128);
  return widths;
}

AblateResult run_ablate(const AblateOptions& options, const fs::path& out_dir) {
  if (options.values.empty()) throw UsageError("ablation sweep is empty");
  prepare_dir(out_dir);
  AblateResult result;
  RunManifest& m = result.manifest;
  m.command = "ablate";
  m.config_json = options_to_json(options);
  m.seeds = seed_list(options.seed, options.runs);
  // Encodings are loaded once and shared by every setting.
  const LoadedSplits data = load_splits(options.data, options.format, m);

  const auto start = Clock::now();
  std::vector<std::pair<std::string, AggregateReport>> table;
  std::ostringstream plot;
  plot.imbue(std::locale::classic());
  plot << "# " << to_string(options.sweep) << " f1_mean f1_std\n" << std::setprecision(17);
  for (std::size_t value : options.values) {
    AblateRow row;
    row.setting = value;
    TwinNnConfig cfg = options.twin;
    if (options.sweep == SweepKind::planes) {
      if (value < 1) throw UsageError("plane counts must be at least 1");
      cfg.num_planes = value;
    } else {
      cfg.hidden_layers = hidden_layers_for_depth(value);
    }
    row.hidden_layers = cfg.hidden_layers;
    row.num_planes = cfg.num_planes;
    std::vector<EvalReport> reports;
    for (std::uint64_t seed : m.seeds) {
      cfg.seed = seed;
      const TwinNnModel model = train_twin_nn(data.train, data.val, cfg);
      reports.push_back(evaluate_predictions(predict_twin_nn(model, data.test), data.test.labels()));
    }
    row.result = aggregate(reports);
    plot << value << ' ' << row.result.f1.mean << ' ' << row.result.f1.std << '\n';
    table.emplace_back(to_string(options.sweep) + "=" + std::to_string(value), row.result);
    result.rows.push_back(std::move(row));
  }
  m.timings_ms["sweep"] = elapsed_ms(start);

  write_text(out_dir / "report", format_records(table));
  write_text(out_dir / "plot.dat", plot.str());
  m.outputs = {{"report", (out_dir / "report").string()},
               {"plot", (out_dir / "plot.dat").string()},
               {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return result;
}

CompareResult run_compare(const CompareOptions& options, const fs::path& out_dir) {
  if (options.methods.empty()) throw UsageError("method list is empty");
  prepare_dir(out_dir);
  CompareResult result;
  RunManifest& m = result.manifest;
  m.command = "compare";
  m.config_json = options_to_json(options);
  m.seeds = seed_list(options.seed, options.runs);
  const LoadedSplits data = load_splits(options.data, options.format, m);

  std::vector<std::pair<std::string, AggregateReport>> table;
  for (Method method : options.methods) {
    const auto start = Clock::now();
    std::vector<EvalReport> reports;
    for (std::uint64_t seed : m.seeds) reports.push_back(fit_method(method, data, options.settings, seed).report);
    CompareRow row{method, aggregate(reports)};
    m.timings_ms["method:" + to_string(method)] = elapsed_ms(start);
    table.emplace_back(to_string(method), row.result);
    result.rows.push_back(std::move(row));
  }
  write_text(out_dir / "report", format_records(table));
  write_text(out_dir / "report.txt", format_table(table));
  m.outputs = {{"report", (out_dir / "report").string()},
               {"table", (out_dir / "report.txt").string()},
               {"manifest", (out_dir / "manifest").string()}};
  write_manifest(out_dir / "manifest", m);
  return result;
}

std::string replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const RunManifest m = read_manifest(manifest_path);
  // Inputs must be the bytes the original run saw. gen has no inputs.
  if (m.command != "gen") {
    for (const auto& d : m.datasets) {
      if (!fs::exists(d.path) || content_hash(fs::path(d.path)) != d.hash) {
        throw SchemaError(d.path + " differs from the file recorded in " + manifest_path.string());
      }
    }
  }
  if (m.command == "gen") {
    run_gen(gen_options_from_json(m.config_json), out_dir);
  } else if (m.command == "train") {
    run_train(train_options_from_json(m.config_json), out_dir);
  } else if (m.command == "augment") {
    run_augment(augment_options_from_json(m.config_json), out_dir);
  } else if (m.command == "eval") {
    run_eval(eval_options_from_json(m.config_json), out_dir);
  } else if (m.command == "ablate") {
    run_ablate(ablate_options_from_json(m.config_json), out_dir);
  } else if (m.command == "compare") {
    run_compare(compare_options_from_json(m.config_json), out_dir);
  } else {
    throw SchemaError(manifest_path.string() + ": unknown command `" + m.command + "`");
  }
  return m.command;
}

// ---- reports ---------------------------------------------------------------

std::string format_table(const std::vector<std::pair<std::string, AggregateReport>>& rows) {
  std::size_t name_width = 6;
  for (const auto& [name, r] : rows) name_width = std::max(name_width, name.size());
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::left << std::setw(static_cast<int>(name_width)) << "method";
  for (const char* col : {"accuracy", "precision", "recall", "f1"}) out << "  " << std::setw(17) << col;
  out << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << name;
    for (const MetricSummary* s : {&r.accuracy, &r.precision, &r.recall, &r.f1}) {
      std::ostringstream cell;
      cell.imbue(std::locale::classic());
      cell << std::fixed << std::setprecision(4) << s->mean << " +- " << s->std;
      out << "  " << std::setw(17) << cell.str();
    }
    out << '\n';
  }
  return out.str();
}

std::string format_records(const std::vector<std::pair<std::string, AggregateReport>>& rows) {
  std::string out;
  for (const auto& [name, r] : rows) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      json line = report_json(r.runs[i]);
      line["record"] = "run";
      line["name"] = name;
      line["run"] = i;
      out += line.dump() + "\n";
    }
    json agg = {{"record", "aggregate"},
                {"name", name},
                {"runs", r.runs.size()},
                {"accuracy_mean", r.accuracy.mean},
                {"accuracy_std", r.accuracy.std},
                {"precision_mean", r.precision.mean},
                {"precision_std", r.precision.std},
                {"recall_mean", r.recall.mean},
                {"recall_std", r.recall.std},
                {"f1_mean", r.f1.mean},
                {"f1_std", r.f1.std}};
    out += agg.dump() + "\n";
  }
  return out;
}

}  // namespace twinforge
