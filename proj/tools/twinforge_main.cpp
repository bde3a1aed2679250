// twinforge: command-line front end for the twin classifiers.
//
//   twinforge <gen|train|augment|eval|ablate|compare> [flags]
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure. Tables go to
// stdout, diagnostics to stderr.

#include <charconv>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twinforge/error.hpp"
#include "twinforge/pipeline.hpp"

namespace tf = twinforge;

namespace {

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  if (text.empty() || text == "none") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // a..b ranges expand inclusively
    const auto dots = item.find("..");
    auto parse_one = [&](const std::string& s) {
      std::size_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw tf::UsageError(std::string("bad ") + what + " entry `" + s + "`");
      }
      return v;
    };
    if (dots != std::string::npos) {
      const std::size_t lo = parse_one(item.substr(0, dots));
      const std::size_t hi = parse_one(item.substr(dots + 2));
      if (hi < lo) throw tf::UsageError(std::string("empty ") + what + " range `" + item + "`");
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_one(item));
    }
  }
  return out;
}

struct TwinFlags {
  std::string hidden = "256,128";
  double init_scale = 0.0;
};

void add_twin_flags(CLI::App& app, tf::TwinNnConfig& cfg, TwinFlags& flags) {
  app.add_option("--hidden", flags.hidden, "Hidden layer widths, e.g. 256,128 (`none` for no hidden layer)")
      ->capture_default_str();
  app.add_option("--planes", cfg.num_planes, "Output hyperplanes per class network")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  app.add_option("--c1", cfg.c1, "Penalty C1 of the class +1 network")->capture_default_str();
  app.add_option("--c-neg1", cfg.c_neg1, "Penalty C-1 of the class -1 network")->capture_default_str();
  app.add_option("--lr", cfg.learning_rate, "SGD learning rate")->capture_default_str();
  app.add_option("--batch", cfg.batch_size, "Minibatch size")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  app.add_option("--epochs", cfg.max_epochs, "Maximum epochs")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  app.add_option("--patience", cfg.patience, "Early-stopping patience in epochs")->capture_default_str();
  app.add_option("--init-scale", flags.init_scale, "Uniform init half-width (default 1/sqrt(fan_in))");
}

void finish_twin_flags(tf::TwinNnConfig& cfg, const TwinFlags& flags) {
  cfg.hidden_layers = parse_size_list(flags.hidden, "hidden width");
  if (flags.init_scale > 0.0) cfg.init_scale = flags.init_scale;
}

void add_data_flags(CLI::App& app, tf::DataPaths& paths) {
  app.add_option("--train", paths.train, "Training split file");
  app.add_option("--val", paths.val, "Validation split file");
  app.add_option("--test", paths.test, "Test split file");
}

void require_data(const tf::DataPaths& paths) {
  if (paths.train.empty() || paths.val.empty() || paths.test.empty()) {
    throw tf::UsageError("--train, --val and --test are required");
  }
}

tf::DataFormat parse_format(const std::string& s) {
  if (s == "embedding_csv") return tf::DataFormat::embedding_csv;
  if (s == "csv_features") return tf::DataFormat::csv_features;
  throw tf::UsageError("--format must be csv_features or embedding_csv");
}

void add_baseline_flags(CLI::App& app, tf::MethodSettings& s) {
  app.add_option("--baseline-lr", s.baseline.learning_rate, "Linear-head learning rate")->capture_default_str();
  app.add_option("--baseline-epochs", s.baseline.max_epochs, "Linear-head epochs")->capture_default_str();
  app.add_option("--baseline-batch", s.baseline.batch_size, "Linear-head minibatch size")->capture_default_str();
  app.add_option("--baseline-patience", s.baseline.patience, "Linear-head early-stopping patience")
      ->capture_default_str();
  app.add_option("--focal-gamma", s.baseline.focal_gamma, "Focal loss gamma")->capture_default_str();
  app.add_option("--adasyn-k", s.adasyn.k_neighbors, "ADASYN neighbors")->capture_default_str();
  app.add_option("--adasyn-ratio", s.adasyn.target_ratio, "ADASYN minority:majority target")->capture_default_str();
  app.add_option("--svm-c1", s.svm.c1, "Twin SVM penalty C1")->capture_default_str();
  app.add_option("--svm-c-neg1", s.svm.c_neg1, "Twin SVM penalty C-1")->capture_default_str();
  app.add_option("--svm-ridge", s.svm.ridge_epsilon, "Twin SVM ridge regularizer")->capture_default_str();
}

void print_table(const std::string& name, const tf::EvalReport& r) {
  std::cout << tf::format_table({{name, tf::aggregate(std::span<const tf::EvalReport>(&r, 1))}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twin classifiers for imbalanced data: Twin SVM, Twin NN heads over frozen embeddings, baselines"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file merged with flags (flags win)");

  std::string out_dir = "run";
  std::string replay_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Run directory for outputs")->capture_default_str();
    sub->add_option("--replay", replay_path, "Re-execute the run recorded in this manifest");
  };

  // gen
  tf::GenOptions gen;
  std::string gen_kind = "gaussian_pair";
  std::string gen_split = "0.7,0.1,0.2";
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic imbalanced dataset and split it");
  gen_cmd->add_option("--kind", gen_kind, "gaussian_pair | disjoint_clusters | ring_imbalance")
      ->check(CLI::IsMember({"gaussian_pair", "disjoint_clusters", "ring_imbalance"}))
      ->capture_default_str();
  gen_cmd->add_option("--majority", gen.majority, "Majority (-1) sample count")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  gen_cmd->add_option("--minority", gen.minority, "Minority (+1) sample count")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  gen_cmd->add_option("--dim", gen.geometry.dim, "Feature dimension")->capture_default_str();
  gen_cmd->add_option("--separation", gen.geometry.separation, "gaussian_pair mean distance")->capture_default_str();
  gen_cmd->add_option("--spread", gen.geometry.spread, "Blob standard deviation")->capture_default_str();
  gen_cmd->add_option("--clusters", gen.geometry.clusters, "disjoint_clusters minority blobs")->capture_default_str();
  gen_cmd->add_option("--offset", gen.geometry.offset, "disjoint_clusters center offset")->capture_default_str();
  gen_cmd->add_option("--ring-radius", gen.geometry.ring_radius, "ring_imbalance radius")->capture_default_str();
  gen_cmd->add_option("--split", gen_split, "train,val,test fractions")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Seed for generation and splitting")->capture_default_str();
  add_common(gen_cmd);

  // train
  tf::TrainOptions train;
  std::string train_method = "twin";
  std::string train_format = "csv_features";
  TwinFlags train_twin;
  auto* train_cmd = app.add_subcommand("train", "Train one method on train/val files and evaluate on test");
  train_cmd->add_option("--method", train_method, "twin | twin_svm | unweighted_ce | weighted_ce | focal | adasyn+ce")
      ->capture_default_str();
  train_cmd->add_option("--format", train_format, "csv_features | embedding_csv")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Training seed")->capture_default_str();
  add_data_flags(*train_cmd, train.data);
  add_twin_flags(*train_cmd, train.settings.twin, train_twin);
  add_baseline_flags(*train_cmd, train.settings);
  add_common(train_cmd);

  // augment
  tf::AugmentOptions augment;
  TwinFlags augment_twin;
  auto* augment_cmd =
      app.add_subcommand("augment", "Train a twin head on frozen-encoder embeddings (train/val/test files)");
  augment_cmd->add_option("--seed", augment.twin.seed, "Training seed")->capture_default_str();
  add_data_flags(*augment_cmd, augment.data);
  add_twin_flags(*augment_cmd, augment.twin, augment_twin);
  add_common(augment_cmd);

  // eval
  tf::EvalOptions eval;
  std::string eval_format = "csv_features";
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a labeled file");
  eval_cmd->add_option("--model", eval.model, "Model file");
  eval_cmd->add_option("--data", eval.data, "Labeled data file");
  eval_cmd->add_option("--format", eval_format, "csv_features | embedding_csv")->capture_default_str();
  add_common(eval_cmd);

  // ablate
  tf::AblateOptions ablate;
  std::string ablate_sweep = "planes";
  std::string ablate_values;
  std::string ablate_format = "embedding_csv";
  TwinFlags ablate_twin;
  auto* ablate_cmd = app.add_subcommand("ablate", "Sweep the number of planes or hidden layers over fixed embeddings");
  ablate_cmd->add_option("--sweep", ablate_sweep, "planes | hidden")
      ->check(CLI::IsMember({"planes", "hidden"}))
      ->capture_default_str();
  ablate_cmd->add_option("--values", ablate_values, "Settings, e.g. 1..6 or 1,2,4");
  ablate_cmd->add_option("--runs", ablate.runs, "Seeds per setting")->capture_default_str();
  ablate_cmd->add_option("--seed", ablate.seed, "First seed")->capture_default_str();
  ablate_cmd->add_option("--format", ablate_format, "csv_features | embedding_csv")->capture_default_str();
  add_data_flags(*ablate_cmd, ablate.data);
  add_twin_flags(*ablate_cmd, ablate.twin, ablate_twin);
  add_common(ablate_cmd);

  // compare
  tf::CompareOptions compare;
  std::string compare_methods = "twin,unweighted_ce,weighted_ce,focal,adasyn+ce";
  std::string compare_format = "embedding_csv";
  TwinFlags compare_twin;
  auto* compare_cmd = app.add_subcommand("compare", "Train several methods on identical data and seeds");
  compare_cmd->add_option("--methods", compare_methods, "Comma-separated method list")->capture_default_str();
  compare_cmd->add_option("--runs", compare.runs, "Seeds per method")->capture_default_str();
  compare_cmd->add_option("--seed", compare.seed, "First seed")->capture_default_str();
  compare_cmd->add_option("--format", compare_format, "csv_features | embedding_csv")->capture_default_str();
  add_data_flags(*compare_cmd, compare.data);
  add_twin_flags(*compare_cmd, compare.settings.twin, compare_twin);
  add_baseline_flags(*compare_cmd, compare.settings);
  add_common(compare_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "twinforge: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (!replay_path.empty()) {
      const std::string command = tf::replay(replay_path, out_dir);
      std::cerr << "replayed `" << command << "` into " << out_dir << "\n";
      return 0;
    }

    if (gen_cmd->parsed()) {
      gen.kind = tf::parse_synthetic_kind(gen_kind);
      gen.split = tf::SplitSpec::parse_fractions(gen_split);
      const auto r = tf::run_gen(gen, out_dir);
      std::cerr << "wrote " << r.data.train.size() << "/" << r.data.val.size() << "/" << r.data.test.size()
                << " train/val/test rows to " << out_dir << "\n";
    } else if (train_cmd->parsed()) {
      require_data(train.data);
      train.method = tf::parse_method(train_method);
      train.format = parse_format(train_format);
      finish_twin_flags(train.settings.twin, train_twin);
      const auto r = tf::run_train(train, out_dir);
      print_table(tf::to_string(train.method), r.report);
    } else if (augment_cmd->parsed()) {
      require_data(augment.data);
      finish_twin_flags(augment.twin, augment_twin);
      const auto r = tf::run_augment(augment, out_dir);
      print_table("twin", r.report);
    } else if (eval_cmd->parsed()) {
      if (eval.model.empty() || eval.data.empty()) throw tf::UsageError("--model and --data are required");
      eval.format = parse_format(eval_format);
      const auto r = tf::run_eval(eval, out_dir);
      print_table("model", r.report);
    } else if (ablate_cmd->parsed()) {
      require_data(ablate.data);
      ablate.sweep = ablate_sweep == "planes" ? tf::SweepKind::planes : tf::SweepKind::hidden;
      ablate.values = parse_size_list(ablate_values, "sweep value");
      ablate.format = parse_format(ablate_format);
      finish_twin_flags(ablate.twin, ablate_twin);
      const auto r = tf::run_ablate(ablate, out_dir);
      std::vector<std::pair<std::string, tf::AggregateReport>> rows;
      for (const auto& row : r.rows) rows.emplace_back(ablate_sweep + "=" + std::to_string(row.setting), row.result);
      std::cout << tf::format_table(rows);
    } else if (compare_cmd->parsed()) {
      require_data(compare.data);
      compare.methods = tf::parse_method_list(compare_methods);
      compare.format = parse_format(compare_format);
      finish_twin_flags(compare.settings.twin, compare_twin);
      const auto r = tf::run_compare(compare, out_dir);
      std::vector<std::pair<std::string, tf::AggregateReport>> rows;
      for (const auto& row : r.rows) rows.emplace_back(tf::to_string(row.method), row.result);
      std::cout << tf::format_table(rows);
    }
  } catch (const tf::UsageError& e) {
    std::cerr << "twinforge: " << e.what() << "\n";
    return 2;
  } catch (const tf::ConfigError& e) {
    std::cerr << "twinforge: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "twinforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
