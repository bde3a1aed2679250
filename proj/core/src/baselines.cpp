#include "twinforge/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twinforge/error.hpp"
#include "twinforge/random.hpp"

namespace twinforge {
namespace {

// Numerically stable log-softmax.
Eigen::VectorXd log_softmax(const Eigen::VectorXd& z) {
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return z.array() - lse;
}

// dL/dp_y * p_y for the focal family; the CE case is -1.
double focal_coefficient(double p, double log_p, double gamma) {
  const double q = 1.0 - p;
  const double modulating = std::pow(q, gamma);
  double lead = 0.0;
  if (gamma != 0.0 && q > 0.0) lead = gamma * std::pow(q, gamma - 1.0) * p * log_p;
  return lead - modulating;
}

}  // namespace

std::string to_string(BaselineLoss loss) {
  switch (loss) {
    case BaselineLoss::unweighted_ce:
      return "unweighted_ce";
    case BaselineLoss::weighted_ce:
      return "weighted_ce";
    case BaselineLoss::focal:
      return "focal";
  }
  return "unknown";
}

BaselineLoss parse_baseline_loss(const std::string& text) {
  if (text == "unweighted_ce") return BaselineLoss::unweighted_ce;
  if (text == "weighted_ce") return BaselineLoss::weighted_ce;
  if (text == "focal") return BaselineLoss::focal;
  throw ConfigError("unknown baseline loss `" + text + "`");
}

void BaselineConfig::validate() const {
  if (!(focal_gamma >= 0.0)) throw ConfigError("focal_gamma must be non-negative");
  for (const auto& [label, w] : class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("class weights must be positive");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
}

double BaselineConfig::weight_for(int label) const {
  if (loss != BaselineLoss::weighted_ce) return 1.0;
  const auto it = class_weights.find(label);
  return it == class_weights.end() ? 1.0 : it->second;
}

std::size_t LinearHead::class_index(int label) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) throw SchemaError("label " + std::to_string(label) + " unknown to head");
  return static_cast<std::size_t>(it - classes.begin());
}

double sample_loss(const Eigen::VectorXd& logits, std::size_t true_index, int true_label, const BaselineConfig& cfg) {
  const double log_p = log_softmax(logits)[static_cast<Eigen::Index>(true_index)];
  switch (cfg.loss) {
    case BaselineLoss::unweighted_ce:
      return -log_p;
    case BaselineLoss::weighted_ce:
      return -cfg.weight_for(true_label) * log_p;
    case BaselineLoss::focal:
      return -std::pow(1.0 - std::exp(log_p), cfg.focal_gamma) * log_p;
  }
  return 0.0;
}

HeadLoss head_loss(const LinearHead& head, const Eigen::MatrixXd& batch_columns, std::span<const int> labels,
                   const BaselineConfig& cfg, bool want_gradient) {
  if (batch_columns.rows() != head.weights.cols()) throw ShapeError("batch dimension does not match the head");
  if (static_cast<std::size_t>(batch_columns.cols()) != labels.size()) throw ShapeError("batch/label size mismatch");
  if (labels.empty()) throw PreconditionError("head loss on an empty batch");

  Eigen::MatrixXd logits = head.weights * batch_columns;
  logits.colwise() += head.bias;
  const double inv_n = 1.0 / static_cast<double>(labels.size());
  Eigen::MatrixXd dlogits(logits.rows(), logits.cols());
  HeadLoss out;
  for (Eigen::Index i = 0; i < logits.cols(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    const auto yi = static_cast<Eigen::Index>(head.class_index(y));
    const Eigen::VectorXd logp = log_softmax(logits.col(i));
    const Eigen::VectorXd p = logp.array().exp();
    double coef = -1.0;  // dL/dz = coef * (onehot - p)
    switch (cfg.loss) {
      case BaselineLoss::unweighted_ce:
        out.loss += -logp[yi];
        break;
      case BaselineLoss::weighted_ce: {
        const double w = cfg.weight_for(y);
        out.loss += -w * logp[yi];
        coef = -w;
        break;
      }
      case BaselineLoss::focal:
        out.loss += -std::pow(1.0 - p[yi], cfg.focal_gamma) * logp[yi];
        coef = focal_coefficient(p[yi], logp[yi], cfg.focal_gamma);
        break;
    }
    Eigen::VectorXd g = -p;
    g[yi] += 1.0;
    dlogits.col(i) = coef * inv_n * g;
  }
  out.loss *= inv_n;
  if (want_gradient) {
    out.grad_weights = dlogits * batch_columns.transpose();
    out.grad_bias = dlogits.rowwise().sum();
  }
  return out;
}

LinearHead train_linear_head(const Dataset& train, const Dataset& val, const BaselineConfig& cfg) {
  cfg.validate();
  if (train.empty() || val.empty()) throw ConfigError("train and validation sets must be nonempty");
  if (train.dim() != val.dim()) throw ConfigError("train and validation dimensions differ");
  if (train.classes().size() < 2) throw PreconditionError("linear head needs at least two classes in train");

  LinearHead head;
  head.classes = train.classes();
  head.config = cfg;
  const auto k = static_cast<Eigen::Index>(head.classes.size());
  const auto d = static_cast<Eigen::Index>(train.dim());
  Rng rng(cfg.seed);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  head.weights.resize(k, d);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) head.weights(r, c) = rng.uniform(-s, s);
  }
  head.bias = Eigen::VectorXd::Zero(k);
  for (int y : val.labels()) (void)head.class_index(y);

  const Eigen::MatrixXd train_cols = train.features().transpose();
  const Eigen::MatrixXd val_cols = val.features().transpose();
  const std::size_t n = train.size();
  const std::size_t batch = std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Eigen::MatrixXd best_w = head.weights;
  Eigen::VectorXd best_b = head.bias;
  double best_val = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd batch_cols(d, static_cast<Eigen::Index>(batch));
  std::vector<int> batch_labels;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      batch_cols.resize(Eigen::NoChange, static_cast<Eigen::Index>(len));
      batch_labels.resize(len);
      for (std::size_t j = 0; j < len; ++j) {
        batch_cols.col(static_cast<Eigen::Index>(j)) = train_cols.col(static_cast<Eigen::Index>(order[start + j]));
        batch_labels[j] = train.label(order[start + j]);
      }
      const HeadLoss step = head_loss(head, batch_cols, batch_labels, cfg);
      if (!std::isfinite(step.loss)) throw TrainingError("linear head diverged", epoch);
      head.weights -= cfg.learning_rate * step.grad_weights;
      head.bias -= cfg.learning_rate * step.grad_bias;
      sum += step.loss;
      ++batches;
    }
    head.train_loss_history.push_back(sum / static_cast<double>(batches));
    const double vl = head_loss(head, val_cols, val.labels(), cfg, false).loss;
    if (!std::isfinite(vl)) throw TrainingError("validation loss is not finite", epoch);
    head.val_loss_history.push_back(vl);
    if (vl < best_val) {
      best_val = vl;
      head.best_epoch = epoch;
      best_w = head.weights;
      best_b = head.bias;
    }
    if (epoch - head.best_epoch >= cfg.patience) break;
  }
  head.weights = std::move(best_w);
  head.bias = std::move(best_b);
  return head;
}

Eigen::VectorXd head_probabilities(const LinearHead& head, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != head.input_dim()) throw ShapeError("sample dimension does not match head");
  return log_softmax(head.weights * x + head.bias).array().exp();
}

int predict_linear_head(const LinearHead& head, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != head.input_dim()) throw ShapeError("sample dimension does not match head");
  const Eigen::VectorXd z = head.weights * x + head.bias;
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < z.size(); ++r) {
    if (z[r] > z[best]) best = r;
  }
  return head.classes[static_cast<std::size_t>(best)];
}

std::vector<int> predict_linear_head(const LinearHead& head, const Dataset& data) {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict_linear_head(head, data.row(i));
  return out;
}

}  // namespace twinforge
