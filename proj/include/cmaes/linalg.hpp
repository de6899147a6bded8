#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cmaes {

using Vector = std::vector<double>;

/// Dense row-major matrix. Used for eigenbases; covariance lives in SymMatrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Vector column(std::size_t c) const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric n x n matrix stored in full. Every mutator keeps
/// (i, j) and (j, i) bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix diagonal(std::initializer_list<double> diag);

  /// Builds from a full row-major n x n array. The upper triangle is
  /// authoritative; the strict lower triangle is overwritten by its mirror.
  static SymMatrix from_upper(std::size_t n, std::span<const double> row_major);
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value) {
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }

  std::span<const double> data() const noexcept { return data_; }

  /// C <- upper(C) + strict_upper(C)^T.
  void enforce_symmetry();

  void scale(double factor);
  /// this += alpha * v v^T
  void add_outer(double alpha, std::span<const double> v);

  Vector multiply(std::span<const double> v) const;
  double frobenius_norm() const;

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// C = B diag(d^2) B^T with B orthogonal. Columns of `basis` are eigenvectors,
/// `scales` holds the square roots of the eigenvalues in ascending order.
struct EigenSystem {
  DenseMatrix basis;
  Vector scales;

  std::size_t dim() const noexcept { return scales.size(); }
  static EigenSystem identity(std::size_t n);
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized from its upper triangle first. Eigenvalues come
/// back ascending, and each eigenvector is signed so that its largest-magnitude
/// component is nonnegative. Throws Error{NonFinite} on NaN/inf entries and
/// Error{NotPositiveDefinite} when an eigenvalue is not strictly positive.
EigenSystem eigendecompose(const SymMatrix& c);

/// B diag(1/d) B^T v, i.e. C^{-1/2} v without forming the matrix.
Vector inv_sqrt_apply(const EigenSystem& es, std::span<const double> v);

/// B diag(d) z, the sampling transport N(0, I) -> N(0, C).
Vector sqrt_apply(const EigenSystem& es, std::span<const double> z);

/// B v
Vector basis_apply(const EigenSystem& es, std::span<const double> v);

/// B diag(d^2) B^T
SymMatrix reconstruct(const EigenSystem& es);

/// max(d)^2 / min(d)^2
double condition_number(const EigenSystem& es);

double norm(std::span<const double> v);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace cmaes
