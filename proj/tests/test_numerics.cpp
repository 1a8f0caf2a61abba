#include <doctest.h>

#include <cmath>

#include "gconv/check.hpp"
#include "gconv/error.hpp"
#include "gconv/kernels.hpp"
#include "gconv/numerics.hpp"
#include "gconv/random.hpp"

using namespace gconv;

namespace {

Eigen::MatrixXd path2_hat() { return Eigen::MatrixXd::Constant(2, 2, 0.5); }

Eigen::MatrixXd random_dense(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m(i) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("eigh examples") {
  CHECK(max_abs(eigvalsh(Eigen::Matrix3d::Identity()) - Eigen::Vector3d::Ones()) < 1e-15);
  CHECK(max_abs(eigvalsh(Eigen::Vector3d(3, 1, 2).asDiagonal().toDenseMatrix()) - Eigen::Vector3d(1, 2, 3)) <
        1e-15);
  // x² - x = 0 for [[.5,.5],[.5,.5]]
  CHECK(max_abs(eigvalsh(path2_hat()) - Eigen::Vector2d(0, 1)) < 1e-15);
}

TEST_CASE("eigh rejects asymmetric input") {
  Eigen::Matrix2d m;
  m << 1, 2, 0, 1;
  CHECK_THROWS_AS(eigh(m), NotSymmetricError);
}

TEST_CASE("eigh is generic over the scalar type") {
  Eigen::Matrix2f m;
  m << 2, 1, 1, 2;
  const auto s = eigh(m);
  CHECK(s.eigenvalues(0) == doctest::Approx(1.0f));
  CHECK(s.eigenvalues(1) == doctest::Approx(3.0f));
}

TEST_CASE("solve_spd examples") {
  const Eigen::Vector3d b(1, -2, 5);
  CHECK(max_abs(solve_spd(Eigen::Matrix3d::Identity(), b) - b) < 1e-15);
  CHECK(max_abs(solve_spd(2.0 * Eigen::Matrix3d::Identity(), b) - b / 2) < 1e-15);

  const double r = 0.5;
  Eigen::MatrixXd m = -2 * r * path2_hat();
  m.diagonal().array() += r * r + 1;
  const Eigen::MatrixXd inv = solve_spd(m, Eigen::MatrixXd::Identity(2, 2));
  CHECK(max_abs(m * inv - Eigen::MatrixXd::Identity(2, 2)) < 1e-14);
}

TEST_CASE("cholesky reports the failing pivot") {
  Eigen::Matrix3d m;
  m << 4, 0, 0, 0, 1, 2, 0, 2, 1;
  try {
    cholesky_lower(m);
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.pivot() == 2);
  }
}

TEST_CASE("matrix_power examples") {
  Rng rng(5);
  const Eigen::MatrixXd m = random_symmetric(rng, 6);
  CHECK(matrix_power(m, 0) == Eigen::MatrixXd::Identity(6, 6));
  CHECK(max_abs(matrix_power(path2_hat(), 2) - path2_hat()) < 1e-15);
  CHECK(max_abs(matrix_power(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix(), 3) -
                Eigen::Vector2d(8, 27).asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("idempotency_defect examples") {
  CHECK(idempotency_defect(Eigen::MatrixXd::Identity(4, 4)) == 0.0);
  CHECK(idempotency_defect(Eigen::MatrixXd::Constant(5, 5, 0.2)) < 1e-15);
  CHECK(idempotency_defect(2.0 * Eigen::MatrixXd::Identity(3, 3)) == 2.0);
}

TEST_CASE("numeric_rank and trace examples") {
  CHECK(numeric_rank(Eigen::MatrixXd::Identity(7, 7)) == 7);
  CHECK(trace(Eigen::MatrixXd::Identity(7, 7)) == 7.0);
  CHECK(numeric_rank(Eigen::MatrixXd::Zero(4, 4)) == 0);
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
  const Eigen::MatrixXd s = kernel_smoothing_limit(g);
  CHECK(numeric_rank(s) == 1);
  CHECK(trace(s) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apply_spectral_function examples") {
  Rng rng(9);
  const Eigen::MatrixXd m = random_symmetric(rng, 8);
  const auto s = eigh(m);
  CHECK(max_abs(apply_spectral_function(s, [](double x) { return x; }) - m) < 1e-12);
  CHECK(max_abs(apply_spectral_function(s, [](double) { return 1.0; }) - Eigen::MatrixXd::Identity(8, 8)) < 1e-12);
  CHECK(max_abs(apply_spectral_function(s, [](double x) { return x * x * x; }) - matrix_power(m, 3)) < 1e-8);
}

TEST_CASE("random symmetric matrices: spectrum, solve and power invariants") {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng.below(64));
    const Eigen::MatrixXd m = random_symmetric(rng, n);
    const auto s = eigh(m);
    CHECK(max_abs(s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n)) <= 1e-8);
    CHECK(max_abs(s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose() - m) <=
          1e-8 * max_abs(m));
    for (Eigen::Index i = 1; i < n; ++i) CHECK(s.eigenvalues(i - 1) <= s.eigenvalues(i));

    const Eigen::MatrixXd r = random_dense(rng, n, n);
    const Eigen::MatrixXd spd = r.transpose() * r + 0.5 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd b = random_dense(rng, n, 2);
    CHECK(max_abs(spd * solve_spd(spd, b) - b) <= 1e-8 * max_abs(b));

    for (int k : {1, 2, 5, 16}) {
      const Eigen::MatrixXd spectral = apply_spectral_function(s, [k](double x) { return std::pow(x, k); });
      CHECK(max_abs(matrix_power(m, k) - spectral) <= 1e-7 * std::max(1.0, max_abs(spectral)));
    }
  }
}

TEST_CASE("numeric_rank of S equals the component count") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const Graph g = random_graph(rng, 2 + static_cast<int>(rng.below(50)), rng.uniform(0.0, 0.15));
    CHECK(numeric_rank(kernel_smoothing_limit(g)) == static_cast<Eigen::Index>(connected_components(g).size()));
  }
}

TEST_CASE("default rank tolerance scales with the spectral radius") {
  // A rank-2 matrix scaled to huge magnitude must not pick up roundoff rank.
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(50, 2);
  u.col(0).setOnes();
  for (int i = 0; i < 50; ++i) u(i, 1) = i % 2 ? 1.0 : -1.0;
  const Eigen::MatrixXd m = 1e12 * u * u.transpose();
  CHECK(numeric_rank(m) == 2);
  CHECK(numeric_rank_rect(Eigen::MatrixXd(m.leftCols(7))) == 2);
}
