#include "twinforge/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace twinforge {
namespace {

using codec::json;

constexpr const char* kFormat = "twinforge-model";
constexpr int kVersion = 1;

json layer_to_json(const DenseLayer& layer) {
  return {{"weights", codec::matrix_to_json(layer.weights)}, {"bias", codec::vector_to_json(layer.bias)}};
}

DenseLayer layer_from_json(const json& j) {
  return {codec::matrix_from_json(j.at("weights")), codec::vector_from_json(j.at("bias"))};
}

json encode(const TwinSvmModel& m) {
  return {{"kind", "twin_svm"},
          {"dim", m.dim()},
          {"config", codec::to_json(m.config)},
          {"w1", codec::vector_to_json(m.w1)},
          {"b1", m.b1},
          {"w_neg1", codec::vector_to_json(m.w_neg1)},
          {"b_neg1", m.b_neg1},
          {"training_objective_values", {m.training_objective_values.first, m.training_objective_values.second}}};
}

json encode(const TwinNnModel& m) {
  json networks = json::array();
  for (int label : m.classes) {
    const ClassNetwork& net = m.networks.at(label);
    json hidden = json::array();
    for (const auto& layer : net.hidden) hidden.push_back(layer_to_json(layer));
    networks.push_back({{"label", label}, {"hidden", std::move(hidden)}, {"planes", layer_to_json(net.planes)}});
  }
  json history = json::array();
  for (const auto& e : m.training_history) {
    history.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}, {"val_f1", e.val_f1}});
  }
  return {{"kind", "twin_nn"},
          {"dim", m.input_dim()},
          {"classes", m.classes},
          {"config", codec::to_json(m.config)},
          {"best_epoch", m.best_epoch},
          {"networks", std::move(networks)},
          {"training_history", std::move(history)}};
}

json encode(const LinearHead& m) {
  return {{"kind", "linear_head"},
          {"dim", m.input_dim()},
          {"classes", m.classes},
          {"config", codec::to_json(m.config)},
          {"best_epoch", m.best_epoch},
          {"weights", codec::matrix_to_json(m.weights)},
          {"bias", codec::vector_to_json(m.bias)},
          {"train_loss_history", m.train_loss_history},
          {"val_loss_history", m.val_loss_history}};
}

TwinSvmModel decode_twin_svm(const json& j) {
  TwinSvmModel m;
  m.config = codec::twin_svm_config_from_json(j.at("config"));
  m.w1 = codec::vector_from_json(j.at("w1"));
  m.b1 = j.at("b1").get<double>();
  m.w_neg1 = codec::vector_from_json(j.at("w_neg1"));
  m.b_neg1 = j.at("b_neg1").get<double>();
  const auto& obj = j.at("training_objective_values");
  m.training_objective_values = {obj.at(0).get<double>(), obj.at(1).get<double>()};
  if (m.w1.size() != m.w_neg1.size() || m.dim() != j.at("dim").get<std::size_t>()) {
    throw SchemaError("twin SVM record has inconsistent dimensions");
  }
  return m;
}

TwinNnModel decode_twin_nn(const json& j) {
  TwinNnModel m;
  m.classes = j.at("classes").get<std::vector<int>>();
  m.config = codec::twin_nn_config_from_json(j.at("config"));
  m.best_epoch = j.at("best_epoch").get<std::size_t>();
  for (const auto& n : j.at("networks")) {
    ClassNetwork net;
    net.label = n.at("label").get<int>();
    for (const auto& layer : n.at("hidden")) net.hidden.push_back(layer_from_json(layer));
    net.planes = layer_from_json(n.at("planes"));
    net.validate();
    m.networks.emplace(net.label, std::move(net));
  }
  for (const auto& e : j.at("training_history")) {
    EpochRecord rec;
    rec.epoch = e.at("epoch").get<std::size_t>();
    rec.train_loss = e.at("train_loss").get<std::vector<double>>();
    rec.val_loss = e.at("val_loss").get<std::vector<double>>();
    rec.val_f1 = e.at("val_f1").get<double>();
    m.training_history.push_back(std::move(rec));
  }
  if (m.networks.size() != m.classes.size()) throw SchemaError("twin NN record needs one network per class");
  for (int label : m.classes) {
    if (!m.networks.contains(label)) throw SchemaError("twin NN record lacks the network of class " + std::to_string(label));
    if (m.networks.at(label).input_dim() != j.at("dim").get<std::size_t>()) {
      throw SchemaError("twin NN networks disagree on input dimension");
    }
  }
  return m;
}

LinearHead decode_linear_head(const json& j) {
  LinearHead m;
  m.classes = j.at("classes").get<std::vector<int>>();
  m.config = codec::baseline_config_from_json(j.at("config"));
  m.best_epoch = j.at("best_epoch").get<std::size_t>();
  m.weights = codec::matrix_from_json(j.at("weights"));
  m.bias = codec::vector_from_json(j.at("bias"));
  m.train_loss_history = j.at("train_loss_history").get<std::vector<double>>();
  m.val_loss_history = j.at("val_loss_history").get<std::vector<double>>();
  if (static_cast<std::size_t>(m.weights.rows()) != m.classes.size() || m.bias.size() != m.weights.rows()) {
    throw SchemaError("linear head record has inconsistent shapes");
  }
  return m;
}

}  // namespace

std::string serialize_model(const AnyModel& model) {
  json j = std::visit([](const auto& m) { return encode(m); }, model);
  j["format"] = kFormat;
  j["version"] = kVersion;
  return j.dump(1) + "\n";
}

AnyModel deserialize_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw SchemaError("not a twinforge model record");
    if (j.at("version").get<int>() != kVersion) throw SchemaError("unsupported model record version");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "twin_svm") return decode_twin_svm(j);
    if (kind == "twin_nn") return decode_twin_nn(j);
    if (kind == "linear_head") return decode_linear_head(j);
    throw SchemaError("unknown model kind `" + kind + "`");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model record: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw Error("write failed for " + path.string());
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

std::string model_kind(const AnyModel& model) {
  struct Visitor {
    std::string operator()(const TwinSvmModel&) const { return "twin_svm"; }
    std::string operator()(const TwinNnModel&) const { return "twin_nn"; }
    std::string operator()(const LinearHead&) const { return "linear_head"; }
  };
  return std::visit(Visitor{}, model);
}

std::size_t model_input_dim(const AnyModel& model) {
  struct Visitor {
    std::size_t operator()(const TwinSvmModel& m) const { return m.dim(); }
    std::size_t operator()(const TwinNnModel& m) const { return m.input_dim(); }
    std::size_t operator()(const LinearHead& m) const { return m.input_dim(); }
  };
  return std::visit(Visitor{}, model);
}

int predict(const AnyModel& model, const Eigen::VectorXd& x) {
  struct Visitor {
    const Eigen::VectorXd& x;
    int operator()(const TwinSvmModel& m) const { return predict_twin_svm(m, x); }
    int operator()(const TwinNnModel& m) const { return predict_twin_nn(m, x); }
    int operator()(const LinearHead& m) const { return predict_linear_head(m, x); }
  };
  return std::visit(Visitor{x}, model);
}

std::vector<int> predict(const AnyModel& model, const Dataset& data) {
  if (data.dim() != model_input_dim(model)) {
    throw ShapeError("data has dimension " + std::to_string(data.dim()) + ", model expects " +
                     std::to_string(model_input_dim(model)));
  }
  if (const auto* nn = std::get_if<TwinNnModel>(&model)) return predict_twin_nn(*nn, data);
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(model, data.row(i));
  return out;
}

}  // namespace twinforge
