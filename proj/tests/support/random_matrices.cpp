#include "random_matrices.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace testsupport {

cmaes::DenseMatrix random_orthogonal(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = normal(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  cmaes::DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = q(i, j);
  return out;
}

cmaes::SymMatrix random_spd(std::size_t n, double max_condition, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, std::log(max_condition));
  Eigen::VectorXd ev(n);
  for (std::size_t i = 0; i < n; ++i) ev(i) = std::exp(u(gen));
  if (n >= 2) {
    ev(0) = 1.0;
    ev(1) = max_condition;
  }
  const cmaes::DenseMatrix qd = random_orthogonal(n, gen);
  Eigen::MatrixXd q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = qd(i, j);
  const Eigen::MatrixXd c = q * ev.asDiagonal() * q.transpose();
  cmaes::SymMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.set(i, j, c(i, j));
  return out;
}

cmaes::Vector reference_eigenvalues(const cmaes::SymMatrix& c) {
  const std::size_t n = c.dim();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = c(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd v = es.eigenvalues();
  return cmaes::Vector(v.data(), v.data() + v.size());
}

}  // namespace testsupport
