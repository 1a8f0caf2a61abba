#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gconv/kernels.hpp"
#include "gconv/synth.hpp"

namespace gconv {

enum class Arch { kGcn, kSgc };
enum class Optimizer { kAdam, kGradientDescent };

std::string to_string(Arch arch);
Arch parse_arch(const std::string& text);
std::string to_string(Optimizer opt);
Optimizer parse_optimizer(const std::string& text);

struct ModelConfig {
  Arch arch = Arch::kGcn;
  int hidden_dim = 16;
  int epochs = 200;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  std::uint64_t init_seed = 0;
  int sgc_power = 2;
  Optimizer optimizer = Optimizer::kAdam;

  // GCN: 16 hidden, 200 epochs, lr 0.01. SGC: 100 epochs, lr 0.2.
  static ModelConfig defaults(Arch arch);
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Everything backward() needs from a GCN forward pass.
struct GcnForward {
  Eigen::MatrixXd propagated;      // F X
  Eigen::MatrixXd pre_activation;  // F X W0
  Eigen::MatrixXd hidden;          // ReLU(F X W0)
  Eigen::MatrixXd hidden_propagated;  // F H
  Eigen::MatrixXd logits;          // F H W1
};

// logits = F · ReLU(F X W0) · W1.
GcnForward gcn_forward(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& features,
                       const Eigen::MatrixXd& w0, const Eigen::MatrixXd& w1);

// Same, with F X already computed.
GcnForward gcn_forward_propagated(const Eigen::MatrixXd& kernel, Eigen::MatrixXd propagated,
                                  const Eigen::MatrixXd& w0, const Eigen::MatrixXd& w1);

struct GcnGradients {
  Eigen::MatrixXd w0;
  Eigen::MatrixXd w1;
};

// Exact gradients of the loss through F·ReLU(F X W0)·W1; ReLU'(0) = 0.
// Throws DimensionError when the cache does not match the inputs.
GcnGradients backward(const GcnForward& cache, const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& w1,
                      const Eigen::MatrixXd& d_logits);

// F^k X, the fixed SGC feature transform.
Eigen::MatrixXd sgc_propagate(const Eigen::MatrixXd& kernel, int k, const Eigen::MatrixXd& features);

// F^k X W.
Eigen::MatrixXd sgc_forward(const Eigen::MatrixXd& kernel, int k, const Eigen::MatrixXd& features,
                            const Eigen::MatrixXd& w);

struct LossAndGradient {
  double loss;
  Eigen::MatrixXd gradient;  // d loss / d logits; zero rows outside the mask
};

// Mean over masked nodes of -log softmax(logits)[label].
LossAndGradient masked_cross_entropy(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels,
                                     std::span<const int> mask);

// Fraction of masked rows whose argmax (lowest index on ties) equals the label.
double evaluate(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels, std::span<const int> mask);

// Glorot-uniform rows × cols matrix.
Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng);

struct Accuracy {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
};

struct TrainReport {
  std::vector<double> loss_curve;  // masked train loss before each update
  Accuracy accuracy;               // at best_epoch
  Accuracy final_accuracy;         // after the last update
  int best_epoch = 0;              // 0 = initial weights
  double initial_loss = 0.0;
  double best_loss = 0.0;          // train loss at best_epoch
  std::string kernel;
  ModelConfig model;
  Provenance dataset;
};

TrainReport train(const Dataset& dataset, const KernelSpec& kernel, const ModelConfig& config);

// Same, with the kernel already materialized for this dataset.
TrainReport train_with_kernel(const Dataset& dataset, const KernelSpec& spec, const Eigen::MatrixXd& kernel,
                              const ModelConfig& config);

}  // namespace gconv
