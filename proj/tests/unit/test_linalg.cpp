#include <cmath>
#include <limits>
#include <random>

#include "cmaes/errors.hpp"
#include "cmaes/linalg.hpp"
#include "doctest.h"
#include "random_matrices.hpp"

using namespace cmaes;

namespace {

double max_orthogonality_error(const DenseMatrix& b) {
  const std::size_t n = b.rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += b(r, i) * b(r, j);
      worst = std::max(worst, std::abs(d - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double relative_reconstruction_error(const SymMatrix& c, const EigenSystem& es) {
  const SymMatrix r = reconstruct(es);
  double diff = 0.0;
  for (std::size_t i = 0; i < c.data().size(); ++i) {
    const double d = r.data()[i] - c.data()[i];
    diff += d * d;
  }
  return std::sqrt(diff) / c.frobenius_norm();
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("identity decomposes to identity") {
    const EigenSystem es = eigendecompose(SymMatrix::identity(3));
    CHECK(es.basis == DenseMatrix::identity(3));
    CHECK(es.scales == Vector{1.0, 1.0, 1.0});
  }

  TEST_CASE("diagonal matrix keeps its axes") {
    const EigenSystem es = eigendecompose(SymMatrix::diagonal({1.0, 4.0}));
    CHECK(es.basis == DenseMatrix::identity(2));
    CHECK(es.scales[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(es.scales[1] == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("diagonal entries come back sorted ascending") {
    const EigenSystem es = eigendecompose(SymMatrix::diagonal({9.0, 1.0, 4.0}));
    CHECK(es.scales[0] == doctest::Approx(1.0));
    CHECK(es.scales[1] == doctest::Approx(2.0));
    CHECK(es.scales[2] == doctest::Approx(3.0));
    // eigenvalue 1 lives on axis 1
    CHECK(std::abs(es.basis(1, 0)) == doctest::Approx(1.0));
  }

  TEST_CASE("2x2 with known characteristic polynomial") {
    // x^2 - 4x + 3 = 0 -> eigenvalues 1 and 3
    const SymMatrix c = SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
    const EigenSystem es = eigendecompose(c);
    CHECK(es.scales[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(es.scales[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(es.basis(0, 1)) == doctest::Approx(h).epsilon(1e-14));
    CHECK(es.basis(0, 1) * es.basis(1, 1) > 0.0);
    CHECK(es.basis(0, 0) * es.basis(1, 0) < 0.0);
    CHECK(max_orthogonality_error(es.basis) <= 1e-15);
  }

  TEST_CASE("eigenvector sign: largest-magnitude component is nonnegative") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
      const SymMatrix c = testsupport::random_spd(6, 1e3, gen);
      const EigenSystem es = eigendecompose(c);
      for (std::size_t k = 0; k < 6; ++k) {
        std::size_t arg = 0;
        for (std::size_t r = 1; r < 6; ++r)
          if (std::abs(es.basis(r, k)) > std::abs(es.basis(arg, k))) arg = r;
        CHECK(es.basis(arg, k) >= 0.0);
      }
    }
  }

  TEST_CASE("inv_sqrt_apply examples") {
    const Vector a = inv_sqrt_apply(eigendecompose(SymMatrix::identity(2)), Vector{3.0, 4.0});
    CHECK(a == Vector{3.0, 4.0});

    const Vector b = inv_sqrt_apply(eigendecompose(SymMatrix::diagonal({4.0, 9.0})), Vector{2.0, 3.0});
    CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-15));

    const SymMatrix c = SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
    const Vector v = inv_sqrt_apply(eigendecompose(c), Vector{1.0, 1.0});
    CHECK(v[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  }

  TEST_CASE("inv_sqrt_apply dimension mismatch") {
    CHECK_THROWS_AS(inv_sqrt_apply(EigenSystem::identity(3), Vector{1.0, 2.0}), Error);
  }

  TEST_CASE("condition number examples") {
    CHECK(condition_number(eigendecompose(SymMatrix::identity(5))) == 1.0);
    CHECK(condition_number(eigendecompose(SymMatrix::diagonal({1.0, 1e6}))) ==
          doctest::Approx(1e6).epsilon(1e-12));
    CHECK(condition_number(eigendecompose(SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}))) ==
          doctest::Approx(3.0).epsilon(1e-14));
  }

  TEST_CASE("non-finite entries are rejected") {
    SymMatrix c = SymMatrix::identity(3);
    c.set(0, 2, std::numeric_limits<double>::quiet_NaN());
    try {
      eigendecompose(c);
      FAIL("expected NonFinite");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFinite);
    }
    c.set(0, 2, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(eigendecompose(c), Error);
  }

  TEST_CASE("indefinite and singular matrices are rejected") {
    for (const SymMatrix& c : {SymMatrix::from_rows({{1.0, 2.0}, {2.0, 1.0}}),
                               SymMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}}),
                               SymMatrix::diagonal({1.0, -1e-3})}) {
      try {
        eigendecompose(c);
        FAIL("expected NotPositiveDefinite");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveDefinite);
      }
    }
  }

  TEST_CASE("symmetry is exact after every mutation") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    SymMatrix c = SymMatrix::identity(7);
    for (int k = 0; k < 50; ++k) {
      Vector v(7);
      for (double& x : v) x = nd(gen);
      c.add_outer(nd(gen), v);
      c.scale(1.0 + 0.01 * nd(gen));
      c.set(k % 7, (3 * k) % 7, nd(gen));
    }
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) CHECK(c(i, j) == c(j, i));
  }

  TEST_CASE("from_upper mirrors the upper triangle") {
    const Vector raw = {1, 2, 3, 99, 5, 6, 98, 97, 9};
    const SymMatrix c = SymMatrix::from_upper(3, raw);
    CHECK(c(1, 0) == 2.0);
    CHECK(c(2, 0) == 3.0);
    CHECK(c(2, 1) == 6.0);
    SymMatrix d = c;
    d.enforce_symmetry();
    CHECK(d == c);
  }

  TEST_CASE("decomposition agrees with an independent solver") {
    std::mt19937_64 gen(11);
    for (std::size_t n : {2u, 3u, 5u, 10u, 20u}) {
      const SymMatrix c = testsupport::random_spd(n, 1e6, gen);
      const EigenSystem es = eigendecompose(c);
      const Vector ref = testsupport::reference_eigenvalues(c);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(es.scales[i] * es.scales[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    }
  }

  TEST_CASE("random SPD: reconstruction, orthogonality, inverse square root") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> dim(1, 20);
    std::uniform_real_distribution<double> log_cond(0.0, 8.0);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = static_cast<std::size_t>(dim(gen));
      const double cond = std::pow(10.0, log_cond(gen));
      const SymMatrix c = testsupport::random_spd(n, cond, gen);
      const EigenSystem es = eigendecompose(c);
      CHECK(relative_reconstruction_error(c, es) <= 1e-10);
      CHECK(max_orthogonality_error(es.basis) <= 1e-10);
      for (double d : es.scales) CHECK(d > 0.0);
      for (std::size_t i = 1; i < n; ++i) CHECK(es.scales[i - 1] <= es.scales[i]);

      Vector v(n);
      for (double& x : v) x = nd(gen);
      const Vector w = c.multiply(inv_sqrt_apply(es, inv_sqrt_apply(es, v)));
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err += (w[i] - v[i]) * (w[i] - v[i]);
      // Rounding C^-1 v alone leaves a residual of order cond * eps * |v|.
      const double tol = std::max(1e-8, 4.0 * cond * std::numeric_limits<double>::epsilon());
      CHECK(std::sqrt(err) <= tol * norm(v));
    }
  }

  TEST_CASE("sqrt_apply is the square root transport") {
    const SymMatrix c = SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}});
    const EigenSystem es = eigendecompose(c);
    // y = B D z and B D^-1 B^T y recovers B z
    const Vector z = {0.3, -1.2};
    const Vector y = sqrt_apply(es, z);
    const Vector back = inv_sqrt_apply(es, y);
    const Vector bz = basis_apply(es, z);
    CHECK(back[0] == doctest::Approx(bz[0]).epsilon(1e-14));
    CHECK(back[1] == doctest::Approx(bz[1]).epsilon(1e-14));
  }

  TEST_CASE("vector helpers") {
    CHECK(norm(Vector{3.0, 4.0}) == 5.0);
    CHECK(squared_norm(Vector{1.0, 2.0, 2.0}) == 9.0);
    CHECK(dot(Vector{1.0, 2.0}, Vector{3.0, -1.0}) == 1.0);
  }
}
