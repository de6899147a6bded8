#include "cmaes/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cmaes/errors.hpp"

namespace cmaes {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-14;

void require_same_dim(std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionMismatch,
                "dimension mismatch: expected " + std::to_string(expected) + ", got " +
                    std::to_string(actual));
  }
}

// Every off-diagonal entry small next to the geometric mean of its two
// diagonal entries. Small eigenvalues then keep their relative accuracy.
bool converged(const std::vector<double>& a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double off = std::abs(a[i * n + j]);
      if (off > kOffDiagonalTolerance * std::sqrt(std::abs(a[i * n + i]) * std::abs(a[j * n + j])))
        return false;
    }
  return true;
}

// One Jacobi rotation annihilating a(p, q); v accumulates the rotations.
void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t n, std::size_t p,
            std::size_t q) {
  const double apq = a[p * n + q];
  if (apq == 0.0) return;
  const double app = a[p * n + p];
  const double aqq = a[q * n + q];
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a[k * n + p];
    const double akq = a[k * n + q];
    const double new_kp = c * akp - s * akq;
    const double new_kq = s * akp + c * akq;
    a[k * n + p] = new_kp;
    a[p * n + k] = new_kp;
    a[k * n + q] = new_kq;
    a[q * n + k] = new_kq;
  }
  a[p * n + p] = app - t * apq;
  a[q * n + q] = aqq + t * apq;
  a[p * n + q] = 0.0;
  a[q * n + p] = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v[k * n + p];
    const double vkq = v[k * n + q];
    v[k * n + p] = c * vkp - s * vkq;
    v[k * n + q] = s * vkp + c * vkq;
  }
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SymMatrix SymMatrix::from_upper(std::size_t n, std::span<const double> row_major) {
  require_same_dim(n * n, row_major.size());
  SymMatrix m(n);
  std::copy(row_major.begin(), row_major.end(), m.data_.begin());
  m.enforce_symmetry();
  return m;
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : rows) {
    require_same_dim(n, row.size());
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_upper(n, flat);
}

void SymMatrix::enforce_symmetry() {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) data_[j * n_ + i] = data_[i * n_ + j];
}

void SymMatrix::scale(double factor) {
  for (double& x : data_) x *= factor;
}

void SymMatrix::add_outer(double alpha, std::span<const double> v) {
  require_same_dim(n_, v.size());
  for (std::size_t i = 0; i < n_; ++i) {
    const double avi = alpha * v[i];
    for (std::size_t j = i; j < n_; ++j) data_[i * n_ + j] += avi * v[j];
  }
  enforce_symmetry();
}

Vector SymMatrix::multiply(std::span<const double> v) const {
  require_same_dim(n_, v.size());
  Vector out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += data_[i * n_ + j] * v[j];
    out[i] = acc;
  }
  return out;
}

double SymMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (double x : data_) acc += x * x;
  return std::sqrt(acc);
}

EigenSystem EigenSystem::identity(std::size_t n) {
  return EigenSystem{DenseMatrix::identity(n), Vector(n, 1.0)};
}

EigenSystem eigendecompose(const SymMatrix& c) {
  const std::size_t n = c.dim();
  for (double x : c.data()) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "matrix has a non-finite entry");
  }

  std::vector<double> a(c.data().begin(), c.data().end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[j * n + i] = a[i * n + j];

  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (converged(a, n)) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, n, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return a[l * n + l] < a[r * n + r]; });

  EigenSystem es{DenseMatrix(n, n), Vector(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    const double lambda = a[src * n + src];
    if (!std::isfinite(lambda)) throw Error(ErrorCode::NonFinite, "non-finite eigenvalue");
    if (!(lambda > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "eigenvalue " + std::to_string(lambda) + " is not positive");
    }
    es.scales[k] = std::sqrt(lambda);

    std::size_t argmax = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (std::abs(v[r * n + src]) > std::abs(v[argmax * n + src])) argmax = r;
    }
    const double sign = v[argmax * n + src] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) es.basis(r, k) = sign * v[r * n + src];
  }
  return es;
}

Vector basis_apply(const EigenSystem& es, std::span<const double> v) {
  const std::size_t n = es.dim();
  require_same_dim(n, v.size());
  Vector out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += es.basis(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

Vector sqrt_apply(const EigenSystem& es, std::span<const double> z) {
  const std::size_t n = es.dim();
  require_same_dim(n, z.size());
  Vector dz(n);
  for (std::size_t i = 0; i < n; ++i) dz[i] = es.scales[i] * z[i];
  return basis_apply(es, dz);
}

Vector inv_sqrt_apply(const EigenSystem& es, std::span<const double> v) {
  const std::size_t n = es.dim();
  require_same_dim(n, v.size());
  // w = diag(1/d) B^T v
  Vector w(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += es.basis(r, c) * v[r];
    w[c] = acc / es.scales[c];
  }
  return basis_apply(es, w);
}

SymMatrix reconstruct(const EigenSystem& es) {
  const std::size_t n = es.dim();
  SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += es.basis(i, k) * es.scales[k] * es.scales[k] * es.basis(j, k);
      out.set(i, j, acc);
    }
  }
  return out;
}

double condition_number(const EigenSystem& es) {
  const auto [lo, hi] = std::minmax_element(es.scales.begin(), es.scales.end());
  const double ratio = *hi / *lo;
  return ratio * ratio;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

}  // namespace cmaes
