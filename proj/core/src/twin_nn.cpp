#include "twinforge/twin_nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twinforge/error.hpp"
#include "twinforge/metrics.hpp"
#include "twinforge/random.hpp"

namespace twinforge {
namespace {

constexpr double kTieTolerance = 1e-12;

struct Forward {
  std::vector<Eigen::MatrixXd> hidden;  // tanh outputs, one per hidden layer
  Eigen::MatrixXd planes;               // k x batch preactivations
};

Forward forward(const ClassNetwork& net, const Eigen::MatrixXd& x) {
  Forward f;
  f.hidden.reserve(net.hidden.size());
  const Eigen::MatrixXd* in = &x;
  for (const auto& layer : net.hidden) {
    Eigen::MatrixXd z = layer.weights * *in;
    z.colwise() += layer.bias;
    f.hidden.push_back(z.array().tanh().matrix());
    in = &f.hidden.back();
  }
  f.planes = net.planes.weights * *in;
  f.planes.colwise() += net.planes.bias;
  return f;
}

// Index of the smallest |a_m| in column `col`; first index wins ties.
Eigen::Index closest_index(const Eigen::MatrixXd& a, Eigen::Index col) {
  Eigen::Index best = 0;
  double best_abs = std::abs(a(0, col));
  for (Eigen::Index m = 1; m < a.rows(); ++m) {
    const double v = std::abs(a(m, col));
    if (v < best_abs) {
      best_abs = v;
      best = m;
    }
  }
  return best;
}

Eigen::VectorXd plane_norms(const ClassNetwork& net) {
  Eigen::VectorXd norms = net.planes.weights.rowwise().norm();
  for (Eigen::Index m = 0; m < norms.size(); ++m) {
    if (!(norms[m] > 0.0)) {
      throw DegeneratePlaneError("output plane " + std::to_string(m) + " of the class " +
                                 std::to_string(net.label) + " network has a zero normal vector");
    }
  }
  return norms;
}

void check_input(const ClassNetwork& net, Eigen::Index rows) {
  if (static_cast<std::size_t>(rows) != net.input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(rows) + ", network expects " +
                     std::to_string(net.input_dim()));
  }
}

void sgd_step(ClassNetwork& net, const NetworkGradient& grad, double lr) {
  for (std::size_t l = 0; l < net.hidden.size(); ++l) {
    net.hidden[l].weights -= lr * grad.hidden[l].weights;
    net.hidden[l].bias -= lr * grad.hidden[l].bias;
  }
  net.planes.weights -= lr * grad.planes.weights;
  net.planes.bias -= lr * grad.planes.bias;
}

// Per-class closest-plane distances for every column of x.
Eigen::MatrixXd distance_table(const TwinNnModel& model, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(model.classes.size()), x.cols());
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const ClassNetwork& net = model.networks.at(model.classes[c]);
    check_input(net, x.rows());
    const Eigen::VectorXd norms = plane_norms(net);
    const Forward f = forward(net, x);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      const Eigen::Index m = closest_index(f.planes, i);
      table(static_cast<Eigen::Index>(c), i) = std::abs(f.planes(m, i)) / norms[m];
    }
  }
  return table;
}

int decide(const TwinNnModel& model, const Eigen::MatrixXd& table, Eigen::Index col) {
  const double best = table.col(col).minCoeff();
  if (model.is_binary()) {
    // classes are sorted, so index 1 is +1
    return table(1, col) <= best + kTieTolerance ? kPositive : kNegative;
  }
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    if (table(static_cast<Eigen::Index>(c), col) <= best + kTieTolerance) return model.classes[c];
  }
  return model.classes.front();
}

}  // namespace

void TwinNnConfig::validate() const {
  for (std::size_t w : hidden_layers) {
    if (w < 1) throw ConfigError("hidden layer widths must be at least 1");
  }
  if (num_planes < 1) throw ConfigError("num_planes must be at least 1");
  if (!(c1 > 0.0) || !(c_neg1 > 0.0)) throw ConfigError("twin NN penalties must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (init_scale && !(*init_scale > 0.0)) throw ConfigError("init_scale must be positive");
}

std::size_t ClassNetwork::input_dim() const {
  if (!hidden.empty()) return static_cast<std::size_t>(hidden.front().weights.cols());
  return static_cast<std::size_t>(planes.weights.cols());
}

void ClassNetwork::validate() const {
  Eigen::Index width = static_cast<Eigen::Index>(input_dim());
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    if (hidden[l].weights.cols() != width || hidden[l].bias.size() != hidden[l].weights.rows()) {
      throw ShapeError("hidden layer " + std::to_string(l) + " does not chain with its input");
    }
    width = hidden[l].weights.rows();
  }
  if (planes.weights.cols() != width || planes.bias.size() != planes.weights.rows() || planes.weights.rows() < 1) {
    throw ShapeError("output planes do not match the final hidden width");
  }
}

Eigen::VectorXd ClassNetwork::features(const Eigen::VectorXd& x) const {
  check_input(*this, x.size());
  Eigen::VectorXd h = x;
  for (const auto& layer : hidden) h = (layer.weights * h + layer.bias).array().tanh().matrix();
  return h;
}

ClassNetwork ClassNetwork::random(int label, std::size_t input_dim, const std::vector<std::size_t>& hidden_layers,
                                  std::size_t num_planes, std::optional<double> init_scale, std::uint64_t seed) {
  Rng rng(seed);
  auto make_layer = [&](std::size_t out, std::size_t in) {
    const double s = init_scale ? *init_scale : 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd(out)};
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = rng.uniform(-s, s);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = rng.uniform(-s, s);
    return layer;
  };
  ClassNetwork net;
  net.label = label;
  std::size_t width = input_dim;
  for (std::size_t w : hidden_layers) {
    net.hidden.push_back(make_layer(w, width));
    width = w;
  }
  net.planes = make_layer(num_planes, width);
  return net;
}

NetworkGradient NetworkGradient::zeros_like(const ClassNetwork& net) {
  NetworkGradient g;
  for (const auto& layer : net.hidden) {
    g.hidden.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                        Eigen::VectorXd::Zero(layer.bias.size())});
  }
  g.planes = {Eigen::MatrixXd::Zero(net.planes.weights.rows(), net.planes.weights.cols()),
              Eigen::VectorXd::Zero(net.planes.bias.size())};
  return g;
}

Eigen::VectorXd plane_preactivations(const ClassNetwork& net, const Eigen::VectorXd& x) {
  return net.planes.weights * net.features(x) + net.planes.bias;
}

ClosestPlane closest_plane(const ClassNetwork& net, const Eigen::VectorXd& x) {
  const Eigen::VectorXd norms = plane_norms(net);
  const Eigen::MatrixXd a = plane_preactivations(net, x);
  const Eigen::Index m = closest_index(a, 0);
  return {static_cast<std::size_t>(m), a(m, 0), std::abs(a(m, 0)) / norms[m]};
}

TwinLoss twin_loss(const ClassNetwork& net, const Eigen::MatrixXd& batch_columns, std::span<const int> labels,
                   int label, double c, bool want_gradient) {
  check_input(net, batch_columns.rows());
  if (static_cast<std::size_t>(batch_columns.cols()) != labels.size()) {
    throw ShapeError("batch has " + std::to_string(batch_columns.cols()) + " samples but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (!(c >= 0.0)) throw ConfigError("twin loss penalty must be non-negative");
  std::size_t n_same = 0;
  for (int y : labels) n_same += (y == label);
  const std::size_t n_other = labels.size() - n_same;
  if (labels.empty()) throw PreconditionError("twin loss on an empty batch");

  const Forward f = forward(net, batch_columns);
  const double target = pull_away_target(label);
  const double other_scale = n_other ? 1.0 / static_cast<double>(n_other) : 0.0;
  const double same_scale = n_same ? c / static_cast<double>(n_same) : 0.0;

  TwinLoss out;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(f.planes.rows(), f.planes.cols());
  for (Eigen::Index i = 0; i < f.planes.cols(); ++i) {
    const Eigen::Index m = closest_index(f.planes, i);
    const double a = f.planes(m, i);
    if (labels[static_cast<std::size_t>(i)] == label) {
      out.loss += 0.5 * same_scale * a * a;
      delta(m, i) = same_scale * a;
    } else {
      const double th = std::tanh(a);
      const double r = target - th;
      out.loss += 0.5 * other_scale * r * r;
      delta(m, i) = -other_scale * r * (1.0 - th * th);
    }
  }
  if (!want_gradient) return out;

  const Eigen::MatrixXd& last = f.hidden.empty() ? batch_columns : f.hidden.back();
  out.gradient.hidden.resize(net.hidden.size());
  out.gradient.planes.weights = delta * last.transpose();
  out.gradient.planes.bias = delta.rowwise().sum();
  if (net.hidden.empty()) return out;

  Eigen::MatrixXd back = net.planes.weights.transpose() * delta;
  for (std::size_t l = net.hidden.size(); l-- > 0;) {
    const Eigen::MatrixXd& act = f.hidden[l];
    const Eigen::MatrixXd dz = back.cwiseProduct((1.0 - act.array().square()).matrix());
    const Eigen::MatrixXd& input = l == 0 ? batch_columns : f.hidden[l - 1];
    out.gradient.hidden[l].weights = dz * input.transpose();
    out.gradient.hidden[l].bias = dz.rowwise().sum();
    if (l > 0) back = net.hidden[l].weights.transpose() * dz;
  }
  return out;
}

TwinLoss twin_loss(const ClassNetwork& net, const Dataset& batch, int label, double c) {
  const Eigen::MatrixXd cols = batch.features().transpose();
  return twin_loss(net, cols, batch.labels(), label, c, true);
}

std::size_t TwinNnModel::input_dim() const {
  return networks.empty() ? 0 : networks.begin()->second.input_dim();
}

bool TwinNnModel::is_binary() const {
  return classes.size() == 2 && classes[0] == kNegative && classes[1] == kPositive;
}

TwinNnModel train_twin_nn(const Dataset& train, const Dataset& val, const TwinNnConfig& cfg) {
  cfg.validate();
  std::map<int, ClassNetwork> initial;
  const std::vector<int>& classes = train.classes();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    initial.emplace(classes[c], ClassNetwork::random(classes[c], train.dim(), cfg.hidden_layers, cfg.num_planes,
                                                     cfg.init_scale, Rng::derive(cfg.seed, c)));
  }
  return train_twin_nn(train, val, cfg, std::move(initial));
}

TwinNnModel train_twin_nn(const Dataset& train, const Dataset& val, const TwinNnConfig& cfg,
                          std::map<int, ClassNetwork> initial) {
  cfg.validate();
  if (val.empty()) throw ConfigError("validation set is empty");
  if (train.empty()) throw ConfigError("training set is empty");
  if (train.dim() != val.dim()) throw ConfigError("train and validation dimensions differ");
  if (train.classes() != val.classes()) throw ConfigError("train and validation class sets differ");
  if (train.classes().size() < 2) throw ConfigError("training needs at least two classes");

  TwinNnModel model;
  model.classes = train.classes();
  model.config = cfg;
  for (int label : model.classes) {
    auto it = initial.find(label);
    if (it == initial.end()) throw ConfigError("no initial network for class " + std::to_string(label));
    it->second.validate();
    if (it->second.input_dim() != train.dim()) throw ShapeError("initial network input dimension mismatch");
    it->second.label = label;
    model.networks.emplace(label, std::move(it->second));
  }

  const Eigen::MatrixXd train_cols = train.features().transpose();
  const Eigen::MatrixXd val_cols = val.features().transpose();
  const std::size_t n = train.size();
  const std::size_t batch = std::min(cfg.batch_size, n);
  // One batch order per epoch shared by every class network.
  Rng order_rng(Rng::derive(cfg.seed, 0xB47C4));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::map<int, ClassNetwork> best = model.networks;
  double best_total = std::numeric_limits<double>::infinity();
  double best_f1 = -1.0;
  Eigen::MatrixXd batch_cols(train.dim(), batch);
  std::vector<int> batch_labels;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    EpochRecord rec;
    rec.epoch = epoch;
    for (int label : model.classes) {
      ClassNetwork& net = model.networks.at(label);
      const double c = cfg.penalty_for(label);
      double sum = 0.0;
      std::size_t batches = 0;
      for (std::size_t start = 0; start < n; start += batch) {
        const std::size_t len = std::min(batch, n - start);
        batch_cols.resize(Eigen::NoChange, static_cast<Eigen::Index>(len));
        batch_labels.resize(len);
        for (std::size_t k = 0; k < len; ++k) {
          batch_cols.col(static_cast<Eigen::Index>(k)) = train_cols.col(static_cast<Eigen::Index>(order[start + k]));
          batch_labels[k] = train.label(order[start + k]);
        }
        const TwinLoss step = twin_loss(net, batch_cols, batch_labels, label, c);
        if (!std::isfinite(step.loss)) {
          throw TrainingError("class " + std::to_string(label) + " network diverged", epoch);
        }
        sgd_step(net, step.gradient, cfg.learning_rate);
        sum += step.loss;
        ++batches;
      }
      rec.train_loss.push_back(sum / static_cast<double>(batches));
      const double vl = twin_loss(net, val_cols, val.labels(), label, c, false).loss;
      if (!std::isfinite(vl)) throw TrainingError("validation loss is not finite", epoch);
      rec.val_loss.push_back(vl);
    }

    double total = 0.0;
    for (double v : rec.val_loss) total += v;
    if (model.is_binary()) {
      const Eigen::MatrixXd table = distance_table(model, val_cols);
      std::vector<int> predicted(val.size());
      for (std::size_t i = 0; i < val.size(); ++i) predicted[i] = decide(model, table, static_cast<Eigen::Index>(i));
      rec.val_f1 = evaluate_predictions(predicted, val.labels()).f1;
    }
    if (total < best_total || (total == best_total && rec.val_f1 > best_f1)) {
      best_total = total;
      best_f1 = rec.val_f1;
      model.best_epoch = epoch;
      best = model.networks;
    }
    model.training_history.push_back(std::move(rec));
    if (epoch - model.best_epoch >= cfg.patience) break;
  }
  model.networks = std::move(best);
  return model;
}

std::map<int, double> twin_nn_distances(const TwinNnModel& model, const Eigen::VectorXd& x) {
  std::map<int, double> out;
  for (const auto& [label, net] : model.networks) out[label] = closest_plane(net, x).distance;
  return out;
}

int predict_twin_nn(const TwinNnModel& model, const Eigen::VectorXd& x) {
  Eigen::MatrixXd col = x;
  return decide(model, distance_table(model, col), 0);
}

std::vector<int> predict_twin_nn(const TwinNnModel& model, const Dataset& data) {
  std::vector<int> out(data.size());
  if (data.empty()) return out;
  const Eigen::MatrixXd cols = data.features().transpose();
  const Eigen::MatrixXd table = distance_table(model, cols);
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = decide(model, table, static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace twinforge
