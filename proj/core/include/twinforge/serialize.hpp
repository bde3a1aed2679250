#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "twinforge/baselines.hpp"
#include "twinforge/dataset.hpp"
#include "twinforge/twin_nn.hpp"
#include "twinforge/twin_svm.hpp"

namespace twinforge {

using AnyModel = std::variant<TwinSvmModel, TwinNnModel, LinearHead>;

/// Self-describing JSON text with explicit field names, per-layer shapes and
/// row-major weight dumps. Numbers are written in shortest round-trip form, so
/// deserialize(serialize(m)) reproduces every double bit for bit.
std::string serialize_model(const AnyModel& model);
AnyModel deserialize_model(const std::string& text);

void save_model(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_model(const std::filesystem::path& path);

std::string model_kind(const AnyModel& model);
std::size_t model_input_dim(const AnyModel& model);

int predict(const AnyModel& model, const Eigen::VectorXd& x);
std::vector<int> predict(const AnyModel& model, const Dataset& data);

}  // namespace twinforge
