#pragma once

// nlohmann adapters shared by model serialization and run manifests.

#include <nlohmann/json.hpp>

#include "twinforge/baselines.hpp"
#include "twinforge/error.hpp"
#include "twinforge/twin_nn.hpp"
#include "twinforge/twin_svm.hpp"

namespace twinforge::codec {

using nlohmann::json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw SchemaError("matrix record has inconsistent shape");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline json to_json(const TwinSvmConfig& c) {
  return {{"c1", c.c1},
          {"c_neg1", c.c_neg1},
          {"ridge_epsilon", c.ridge_epsilon},
          {"solver_tolerance", c.solver_tolerance},
          {"max_iterations", c.max_iterations}};
}

inline TwinSvmConfig twin_svm_config_from_json(const json& j) {
  TwinSvmConfig c;
  c.c1 = j.at("c1").get<double>();
  c.c_neg1 = j.at("c_neg1").get<double>();
  c.ridge_epsilon = j.at("ridge_epsilon").get<double>();
  c.solver_tolerance = j.at("solver_tolerance").get<double>();
  c.max_iterations = j.at("max_iterations").get<std::size_t>();
  return c;
}

inline json to_json(const TwinNnConfig& c) {
  return {{"hidden_layers", c.hidden_layers},
          {"num_planes", c.num_planes},
          {"c1", c.c1},
          {"c_neg1", c.c_neg1},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"init_scale", c.init_scale ? json(*c.init_scale) : json(nullptr)}};
}

inline TwinNnConfig twin_nn_config_from_json(const json& j) {
  TwinNnConfig c;
  c.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
  c.num_planes = j.at("num_planes").get<std::size_t>();
  c.c1 = j.at("c1").get<double>();
  c.c_neg1 = j.at("c_neg1").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("init_scale").is_null()) c.init_scale = j.at("init_scale").get<double>();
  return c;
}

inline json to_json(const BaselineConfig& c) {
  json weights = json::object();
  for (const auto& [label, w] : c.class_weights) weights[std::to_string(label)] = w;
  return {{"loss", to_string(c.loss)},
          {"class_weights", std::move(weights)},
          {"focal_gamma", c.focal_gamma},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed}};
}

inline BaselineConfig baseline_config_from_json(const json& j) {
  BaselineConfig c;
  c.loss = parse_baseline_loss(j.at("loss").get<std::string>());
  for (const auto& [key, w] : j.at("class_weights").items()) c.class_weights[std::stoi(key)] = w.get<double>();
  c.focal_gamma = j.at("focal_gamma").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline json to_json(const AdasynConfig& c) {
  return {{"k_neighbors", c.k_neighbors}, {"target_ratio", c.target_ratio}, {"seed", c.seed}};
}

inline AdasynConfig adasyn_config_from_json(const json& j) {
  AdasynConfig c;
  c.k_neighbors = j.at("k_neighbors").get<std::size_t>();
  c.target_ratio = j.at("target_ratio").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace twinforge::codec
