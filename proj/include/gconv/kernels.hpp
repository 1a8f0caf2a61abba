#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gconv/error.hpp"
#include "gconv/graph.hpp"
#include "gconv/numerics.hpp"

namespace gconv {

inline constexpr double kDefaultPoissonR = 0.5;

namespace kernel {

struct Laplacian {
  bool operator==(const Laplacian&) const = default;
};
struct Power {
  int k = 2;
  bool operator==(const Power&) const = default;
};
struct SmoothingLimit {
  bool operator==(const SmoothingLimit&) const = default;
};
struct Linear {
  bool operator==(const Linear&) const = default;
};
struct Poisson {
  double r = kDefaultPoissonR;
  bool operator==(const Poisson&) const = default;
};
struct ChebyshevPartial {
  double r = kDefaultPoissonR;
  int order = 1;
  bool operator==(const ChebyshevPartial&) const = default;
};

}  // namespace kernel

// Which graph convolutional kernel to materialize, with its parameters.
// Grammar: laplacian | power:k=<int> | limit | linear | poisson:r=<float>
//          | cheb:r=<float>,K=<int>
class KernelSpec {
 public:
  using Family = std::variant<kernel::Laplacian, kernel::Power, kernel::SmoothingLimit,
                              kernel::Linear, kernel::Poisson, kernel::ChebyshevPartial>;

  KernelSpec() = default;
  // Validates parameters; throws ParameterError.
  KernelSpec(Family family);  // NOLINT(google-explicit-constructor)

  static KernelSpec parse(std::string_view text);

  const Family& family() const noexcept { return family_; }
  std::string name() const;  // canonical grammar form
  bool operator==(const KernelSpec&) const = default;

 private:
  Family family_ = kernel::Laplacian{};
};

inline void require_radius(double r) {
  if (!(std::abs(r) < 1.0)) {
    throw ParameterError("Poisson radius r must satisfy |r| < 1 (got " + std::to_string(r) + ")");
  }
}

// λ ↦ (1 - r²) / (1 - 2rλ + r²).
template <typename Scalar>
Scalar eigenvalue_map_poisson(Scalar lambda, Scalar r) {
  require_radius(static_cast<double>(r));
  return (Scalar(1) - r * r) / (Scalar(1) - Scalar(2) * r * lambda + r * r);
}

// λ ↦ 1 + 2 Σ_{k=1..K} r^k T_k(λ), via the three-term recurrence.
template <typename Scalar>
Scalar chebyshev_partial_map(Scalar lambda, Scalar r, int order) {
  Scalar sum(1);
  Scalar t_prev(1);
  Scalar t_cur = lambda;
  Scalar rk(1);
  for (int k = 1; k <= order; ++k) {
    rk *= r;
    sum += Scalar(2) * rk * t_cur;
    const Scalar t_next = Scalar(2) * lambda * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return sum;
}

template <typename Derived>
Matrix<typename Derived::Scalar> kernel_power(const Eigen::MatrixBase<Derived>& l_hat, int k) {
  if (k < 1) throw ParameterError("kernel power k must be >= 1");
  return matrix_power(l_hat, static_cast<std::uint64_t>(k));
}

// (I + L̂) / 2.
template <typename Derived>
Matrix<typename Derived::Scalar> kernel_linear(const Eigen::MatrixBase<Derived>& l_hat) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = l_hat / Scalar(2);
  out.diagonal().array() += Scalar(0.5);
  return out;
}

// (1 - r²) ((r² + 1) I - 2r L̂)^(-1). The system matrix is positive definite
// whenever |r| < 1 and the spectrum of L̂ lies in [-1, 1].
template <typename Derived>
Matrix<typename Derived::Scalar> kernel_poisson(const Eigen::MatrixBase<Derived>& l_hat,
                                                typename Derived::Scalar r) {
  using Scalar = typename Derived::Scalar;
  require_radius(static_cast<double>(r));
  const Eigen::Index n = l_hat.rows();
  Matrix<Scalar> system = Scalar(-2) * r * l_hat;
  system.diagonal().array() += r * r + Scalar(1);
  Matrix<Scalar> p = (Scalar(1) - r * r) * solve_spd(system, Matrix<Scalar>::Identity(n, n));
  return (p + p.transpose()) / Scalar(2);
}

// I + 2 Σ_{k=1..K} r^k T_k(L̂). Uses only matrix products, never an
// eigendecomposition, so it is an independent route to the Poisson kernel.
template <typename Derived>
Matrix<typename Derived::Scalar> cheb_partial(const Eigen::MatrixBase<Derived>& l_hat,
                                              typename Derived::Scalar r, int order) {
  using Scalar = typename Derived::Scalar;
  require_radius(static_cast<double>(r));
  if (order < 0) throw ParameterError("Chebyshev order K must be >= 0");
  const Eigen::Index n = l_hat.rows();
  Matrix<Scalar> sum = Matrix<Scalar>::Identity(n, n);
  if (order == 0) return sum;
  Matrix<Scalar> t_prev = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> t_cur = l_hat;
  Scalar rk(1);
  for (int k = 1; k <= order; ++k) {
    rk *= r;
    sum += Scalar(2) * rk * t_cur;
    if (k == order) break;
    Matrix<Scalar> t_next = Scalar(2) * (l_hat * t_cur) - t_prev;
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return sum;
}

// Block-wise S_ij = sqrt(d_i d_j) / Σ_{v in component} d_v, degrees counted
// with self-loops; zero across components.
Eigen::MatrixXd kernel_smoothing_limit(const Graph& g);

Eigen::MatrixXd build_kernel(const Graph& g, const KernelSpec& spec);

// Scalar eigenvalue map f with build_kernel(g, spec) = U f(Λ) U^T where
// L̂ = U Λ U^T. For the smoothing limit this is the indicator of λ = 1.
double kernel_eigenvalue_map(const KernelSpec& spec, double lambda);

struct SelfSmoothingReport {
  double idempotency_defect = 0.0;
  double trace = 0.0;
  Eigen::Index rank = 0;
  Eigen::Index subspace_dim = 0;
  bool self_smoothing = false;
};

// Default tolerance for the idempotency verdict, 1e-8 · n.
inline double default_idempotency_tolerance(Eigen::Index n) { return 1e-8 * static_cast<double>(n); }

// Negative tol selects default_idempotency_tolerance.
SelfSmoothingReport detect_self_smoothing(const Eigen::MatrixXd& m, double tol = -1.0);

// Expected Â of a two-block model: unit diagonal, p within blocks, q across.
Eigen::MatrixXd expected_adjacency(int n1, int n2, double p, double q);

struct EigenvalueMultiplicity {
  double value;
  int multiplicity;
};

// Spectrum of D̂^(-1/2) E[Â] D̂^(-1/2) for the two-block model, in closed
// form. Entries with zero multiplicity are omitted.
std::vector<EigenvalueMultiplicity> smallgap_spectrum_closed_form(int n1, int n2, double p, double q);

}  // namespace gconv
