#pragma once

// Dense symmetric linear algebra shared by the kernels, the models and the
// invariant suite. Everything here is a free function template over Eigen
// expressions; the scalar type follows the argument.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "gconv/error.hpp"

namespace gconv {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Ascending eigenvalues; column k of `eigenvectors` pairs with eigenvalue k.
template <typename Scalar>
struct Spectrum {
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;
};

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar asymmetry(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  return max_abs(m - m.transpose());
}

// Throws NotSymmetricError when max |M - M^T| exceeds tol * max(1, max|M|).
template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m,
                       typename Derived::Scalar tol = typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  const Scalar gap = asymmetry(m);
  if (gap > tol * std::max(Scalar(1), max_abs(m))) throw NotSymmetricError(static_cast<double>(gap));
}

template <typename Derived>
Spectrum<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.derived().eval(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Derived>
Vector<typename Derived::Scalar> eigvalsh(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m.derived().eval(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

// Lower Cholesky factor of a symmetric positive-definite matrix. Reports the
// first non-positive pivot.
template <typename Derived>
Matrix<typename Derived::Scalar> cholesky_lower(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(m);
  const Eigen::Index n = m.rows();
  Matrix<Scalar> l = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > Scalar(0))) throw NotPositiveDefiniteError(j);
    l(j, j) = std::sqrt(pivot);
    const Eigen::Index below = n - j - 1;
    if (below > 0) {
      l.col(j).tail(below) =
          (m.col(j).tail(below) - l.bottomLeftCorner(below, j) * l.row(j).head(j).transpose()) / l(j, j);
    }
  }
  return l;
}

// X with M X = B for symmetric positive-definite M.
template <typename DerivedM, typename DerivedB>
Matrix<typename DerivedM::Scalar> solve_spd(const Eigen::MatrixBase<DerivedM>& m,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  if (m.rows() != m.cols()) throw DimensionError("solve_spd: matrix is not square");
  if (b.rows() != m.rows()) {
    throw DimensionError("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                         " rows, matrix has " + std::to_string(m.rows()));
  }
  const auto l = cholesky_lower(m);
  Matrix<typename DerivedM::Scalar> x = l.template triangularView<Eigen::Lower>().solve(b);
  l.template triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

// M^k by repeated squaring; M^0 = I.
template <typename Derived>
Matrix<typename Derived::Scalar> matrix_power(const Eigen::MatrixBase<Derived>& m, std::uint64_t k) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw DimensionError("matrix_power: matrix is not square");
  Matrix<Scalar> result = Matrix<Scalar>::Identity(m.rows(), m.cols());
  Matrix<Scalar> base = m;
  bool first = true;
  while (k > 0) {
    if (k & 1u) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = (result * base).eval();
      }
    }
    k >>= 1u;
    if (k > 0) base = (base * base).eval();
  }
  return result;
}

// max |M^2 - M|; zero exactly when M is idempotent.
template <typename Derived>
typename Derived::Scalar idempotency_defect(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw DimensionError("idempotency_defect: matrix is not square");
  const auto dense = m.derived().eval();
  return max_abs(dense * dense - dense);
}

// Count of eigenvalues with |λ| > tol. A negative tol selects the default
// 1e-8 · n · max|λ|.
template <typename Derived>
Eigen::Index numeric_rank(const Eigen::MatrixBase<Derived>& m,
                          typename Derived::Scalar tol = typename Derived::Scalar(-1)) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> ev = eigvalsh(m);
  if (tol < Scalar(0)) {
    const Scalar radius = ev.size() ? ev.cwiseAbs().maxCoeff() : Scalar(0);
    tol = Scalar(1e-8) * Scalar(m.rows()) * radius;
  }
  return (ev.array().abs() > tol).count();
}

// Rank from singular values, for rectangular matrices (e.g. logits).
template <typename Derived>
Eigen::Index numeric_rank_rect(const Eigen::MatrixBase<Derived>& m,
                               typename Derived::Scalar tol = typename Derived::Scalar(-1)) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m.derived().eval());
  const Vector<Scalar>& sv = svd.singularValues();
  if (tol < Scalar(0)) tol = Scalar(1e-8) * Scalar(std::max(m.rows(), m.cols())) * sv(0);
  return (sv.array() > tol).count();
}

template <typename Derived>
typename Derived::Scalar trace(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw DimensionError("trace: matrix is not square");
  return m.trace();
}

// U diag(f(λ)) U^T.
template <typename Scalar, typename F>
Matrix<Scalar> apply_spectral_function(const Spectrum<Scalar>& s, F&& f) {
  const Vector<Scalar> mapped = s.eigenvalues.unaryExpr([&](Scalar x) { return Scalar(f(x)); });
  return s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.transpose();
}

// Spectral norm of a symmetric matrix.
template <typename Derived>
typename Derived::Scalar spectral_norm_sym(const Eigen::MatrixBase<Derived>& m) {
  const auto ev = eigvalsh(m);
  return ev.size() ? ev.cwiseAbs().maxCoeff() : typename Derived::Scalar(0);
}

}  // namespace gconv
