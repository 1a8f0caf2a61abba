#include "gconv/models.hpp"

#include <cmath>
#include <string>

#include "gconv/error.hpp"
#include "gconv/numerics.hpp"
#include "gconv/random.hpp"

namespace gconv {

std::string to_string(Arch arch) { return arch == Arch::kGcn ? "gcn" : "sgc"; }

Arch parse_arch(const std::string& text) {
  if (text == "gcn" || text == "GCN") return Arch::kGcn;
  if (text == "sgc" || text == "SGC") return Arch::kSgc;
  throw ParameterError("unknown model architecture '" + text + "' (expected gcn or sgc)");
}

std::string to_string(Optimizer opt) { return opt == Optimizer::kAdam ? "adam" : "gd"; }

Optimizer parse_optimizer(const std::string& text) {
  if (text == "adam") return Optimizer::kAdam;
  if (text == "gd" || text == "sgd") return Optimizer::kGradientDescent;
  throw ParameterError("unknown optimizer '" + text + "' (expected adam or gd)");
}

ModelConfig ModelConfig::defaults(Arch arch) {
  ModelConfig cfg;
  cfg.arch = arch;
  if (arch == Arch::kSgc) {
    cfg.epochs = 100;
    cfg.learning_rate = 0.2;
  }
  return cfg;
}

void ModelConfig::validate() const {
  if (epochs < 0) throw ParameterError("epochs must be nonnegative");
  if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ParameterError("weight_decay must be nonnegative");
  if (arch == Arch::kGcn && hidden_dim < 1) throw ParameterError("hidden_dim must be positive");
  if (arch == Arch::kSgc && sgc_power < 1) throw ParameterError("sgc_power must be >= 1");
}

namespace {

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.cols() != b.rows()) {
    throw DimensionError(std::string(what) + ": cannot multiply " + shape(a) + " by " + shape(b));
  }
}

}  // namespace

GcnForward gcn_forward(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& features, const Eigen::MatrixXd& w0,
                       const Eigen::MatrixXd& w1) {
  require_product(kernel, features, "gcn_forward (F X)");
  return gcn_forward_propagated(kernel, kernel * features, w0, w1);
}

GcnForward gcn_forward_propagated(const Eigen::MatrixXd& kernel, Eigen::MatrixXd propagated,
                                  const Eigen::MatrixXd& w0, const Eigen::MatrixXd& w1) {
  if (kernel.rows() != kernel.cols()) throw DimensionError("gcn_forward: kernel " + shape(kernel) + " is not square");
  require_product(propagated, w0, "gcn_forward (F X W0)");
  require_product(w0, w1, "gcn_forward (W0 W1)");
  GcnForward out;
  out.propagated = std::move(propagated);
  out.pre_activation = out.propagated * w0;
  out.hidden = out.pre_activation.cwiseMax(0.0);
  out.hidden_propagated = kernel * out.hidden;
  out.logits = out.hidden_propagated * w1;
  return out;
}

GcnGradients backward(const GcnForward& cache, const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& w1,
                      const Eigen::MatrixXd& d_logits) {
  if (d_logits.rows() != cache.logits.rows() || d_logits.cols() != cache.logits.cols()) {
    throw DimensionError("backward: gradient " + shape(d_logits) + " does not match cached logits " +
                         shape(cache.logits));
  }
  if (kernel.rows() != cache.hidden.rows() || kernel.cols() != cache.hidden.rows() ||
      w1.rows() != cache.hidden.cols() || w1.cols() != cache.logits.cols()) {
    throw DimensionError("backward: stale cache (kernel " + shape(kernel) + ", W1 " + shape(w1) + ", hidden " +
                         shape(cache.hidden) + ")");
  }
  GcnGradients grads;
  grads.w1 = cache.hidden_propagated.transpose() * d_logits;
  const Eigen::MatrixXd d_hidden = kernel.transpose() * (d_logits * w1.transpose());
  const Eigen::MatrixXd d_pre = (cache.pre_activation.array() > 0.0).select(d_hidden, 0.0);
  grads.w0 = cache.propagated.transpose() * d_pre;
  return grads;
}

Eigen::MatrixXd sgc_propagate(const Eigen::MatrixXd& kernel, int k, const Eigen::MatrixXd& features) {
  if (k < 1) throw ParameterError("SGC power k must be >= 1");
  require_product(kernel, features, "sgc_forward (F^k X)");
  return matrix_power(kernel, static_cast<std::uint64_t>(k)) * features;
}

Eigen::MatrixXd sgc_forward(const Eigen::MatrixXd& kernel, int k, const Eigen::MatrixXd& features,
                            const Eigen::MatrixXd& w) {
  require_product(features, w, "sgc_forward (X W)");
  return sgc_propagate(kernel, k, features) * w;
}

namespace {

void require_mask(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels, std::span<const int> mask) {
  if (mask.empty()) throw ParameterError("mask is empty");
  if (labels.size() != logits.rows()) {
    throw DimensionError("labels have " + std::to_string(labels.size()) + " entries, logits " + shape(logits));
  }
  for (int i : mask) {
    if (i < 0 || i >= logits.rows()) throw DimensionError("mask index " + std::to_string(i) + " out of range");
    if (labels(i) < 0 || labels(i) >= logits.cols()) {
      throw DimensionError("label " + std::to_string(labels(i)) + " of node " + std::to_string(i) +
                           " has no logit column");
    }
  }
}

}  // namespace

LossAndGradient masked_cross_entropy(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels,
                                     std::span<const int> mask) {
  require_mask(logits, labels, mask);
  const double scale = 1.0 / static_cast<double>(mask.size());
  LossAndGradient out{0.0, Eigen::MatrixXd::Zero(logits.rows(), logits.cols())};
  for (int i : mask) {
    const Eigen::RowVectorXd shifted = logits.row(i).array() - logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = shifted.array().exp();
    const double z = e.sum();
    out.loss += (std::log(z) - shifted(labels(i))) * scale;
    out.gradient.row(i) = e / z * scale;
    out.gradient(i, labels(i)) -= scale;
  }
  return out;
}

double evaluate(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels, std::span<const int> mask) {
  require_mask(logits, labels, mask);
  int correct = 0;
  for (int i : mask) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    if (best == labels(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
  }
  return w;
}

namespace {

// One parameter matrix with its optimizer state.
struct Parameter {
  Eigen::MatrixXd value;
  Eigen::MatrixXd m;
  Eigen::MatrixXd v;

  explicit Parameter(Eigen::MatrixXd init)
      : value(std::move(init)),
        m(Eigen::MatrixXd::Zero(value.rows(), value.cols())),
        v(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}

  void step(const Eigen::MatrixXd& grad, const ModelConfig& cfg, int t) {
    if (cfg.optimizer == Optimizer::kGradientDescent) {
      value -= cfg.learning_rate * grad;
      return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    m = kBeta1 * m + (1.0 - kBeta1) * grad;
    v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kBeta1, t);
    const double c2 = 1.0 - std::pow(kBeta2, t);
    value.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }
};

double accuracy_on(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels, const std::vector<int>& mask) {
  return mask.empty() ? 0.0 : evaluate(logits, labels, mask);
}

}  // namespace

TrainReport train(const Dataset& dataset, const KernelSpec& kernel, const ModelConfig& config) {
  return train_with_kernel(dataset, kernel, build_kernel(dataset.graph, kernel), config);
}

TrainReport train_with_kernel(const Dataset& dataset, const KernelSpec& spec, const Eigen::MatrixXd& kernel,
                              const ModelConfig& config) {
  config.validate();
  const Graph& g = dataset.graph;
  if (!g.features()) throw ParameterError("dataset has no features");
  if (!g.labels()) throw ParameterError("dataset has no labels");
  if (dataset.split.train.empty()) throw ParameterError("dataset split has no training nodes");
  if (kernel.rows() != g.num_nodes() || kernel.cols() != g.num_nodes()) {
    throw DimensionError("kernel " + shape(kernel) + " does not match " + std::to_string(g.num_nodes()) + " nodes");
  }
  const Eigen::MatrixXd& x = *g.features();
  const Eigen::VectorXi& y = *g.labels();
  const Split& split = dataset.split;
  const int classes = g.num_classes();
  const int d = static_cast<int>(x.cols());

  Rng rng(config.init_seed);
  const bool gcn = config.arch == Arch::kGcn;
  std::vector<Parameter> params;
  Eigen::MatrixXd propagated;
  if (gcn) {
    params.emplace_back(glorot_uniform(d, config.hidden_dim, rng));
    params.emplace_back(glorot_uniform(config.hidden_dim, classes, rng));
    propagated = kernel * x;
  } else {
    params.emplace_back(glorot_uniform(d, classes, rng));
    propagated = sgc_propagate(kernel, config.sgc_power, x);
  }

  TrainReport report;
  report.kernel = spec.name();
  report.model = config;
  report.dataset = dataset.provenance;
  report.loss_curve.reserve(config.epochs);

  double best_val = -1.0;
  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    GcnForward cache;
    Eigen::MatrixXd logits;
    if (gcn) {
      cache = gcn_forward_propagated(kernel, propagated, params[0].value, params[1].value);
      logits = cache.logits;
    } else {
      logits = propagated * params[0].value;
    }
    const LossAndGradient lg = masked_cross_entropy(logits, y, split.train);
    const Accuracy acc{accuracy_on(logits, y, split.train), accuracy_on(logits, y, split.val),
                       accuracy_on(logits, y, split.test)};
    if (epoch == 0) report.initial_loss = lg.loss;
    const double selector = split.val.empty() ? acc.train : acc.val;
    if (selector > best_val) {
      best_val = selector;
      report.best_epoch = epoch;
      report.accuracy = acc;
      report.best_loss = lg.loss;
    }
    if (epoch == config.epochs) {
      report.final_accuracy = acc;
      break;
    }
    report.loss_curve.push_back(lg.loss);

    if (gcn) {
      GcnGradients grads = backward(cache, kernel, params[1].value, lg.gradient);
      grads.w0 += config.weight_decay * params[0].value;
      params[0].step(grads.w0, config, epoch + 1);
      params[1].step(grads.w1, config, epoch + 1);
    } else {
      Eigen::MatrixXd grad = propagated.transpose() * lg.gradient + config.weight_decay * params[0].value;
      params[0].step(grad, config, epoch + 1);
    }
  }
  return report;
}

}  // namespace gconv
