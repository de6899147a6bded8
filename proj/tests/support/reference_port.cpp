#include "reference_port.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace testsupport {

ReferencePort::ReferencePort(std::size_t n, const std::vector<double>& xmean, double sigma,
                             std::uint64_t seed)
    : n_(n), sigma_(sigma), randn_(seed) {
  const double N = static_cast<double>(n);
  lambda_ = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(N)));
  const double mu_real = static_cast<double>(lambda_) / 2.0;
  mu_ = static_cast<std::size_t>(std::floor(mu_real));
  weights_.resize(mu_);
  for (std::size_t i = 0; i < mu_; ++i)
    weights_(i) = std::log(mu_real + 0.5) - std::log(static_cast<double>(i + 1));
  weights_ /= weights_.sum();
  mueff_ = weights_.sum() * weights_.sum() / weights_.squaredNorm();

  cc_ = (4.0 + mueff_ / N) / (N + 4.0 + 2.0 * mueff_ / N);
  cs_ = (mueff_ + 2.0) / (N + mueff_ + 5.0);
  c1_ = 2.0 / ((N + 1.3) * (N + 1.3) + mueff_);
  cmu_ = 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((N + 2.0) * (N + 2.0) + 2.0 * mueff_ / 2.0);
  damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (N + 1.0)) - 1.0) + cs_;

  xmean_ = Eigen::Map<const Eigen::VectorXd>(xmean.data(), static_cast<Eigen::Index>(n));
  pc_ = Eigen::VectorXd::Zero(n);
  ps_ = Eigen::VectorXd::Zero(n);
  b_ = Eigen::MatrixXd::Identity(n, n);
  d_ = Eigen::MatrixXd::Identity(n, n);
  c_ = b_ * d_ * (b_ * d_).transpose();
  chin_ = std::sqrt(N) * (1.0 - 1.0 / (4.0 * N) + 1.0 / (21.0 * N * N));
}

double ReferencePort::iterate(const Fitness& f) {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto lambda = static_cast<Eigen::Index>(lambda_);
  const auto mu = static_cast<Eigen::Index>(mu_);

  Eigen::MatrixXd arz(n, lambda), arx(n, lambda);
  std::vector<double> arfitness(lambda_);
  for (Eigen::Index k = 0; k < lambda; ++k) {
    const std::vector<double> z = randn_.normal_vector(n_);
    arz.col(k) = Eigen::Map<const Eigen::VectorXd>(z.data(), n);
    arx.col(k) = xmean_ + sigma_ * (b_ * d_ * arz.col(k));
    arfitness[k] = f(std::span<const double>(arx.col(k).data(), n_));
    ++counteval_;
  }

  std::vector<Eigen::Index> arindex(lambda_);
  std::iota(arindex.begin(), arindex.end(), 0);
  std::stable_sort(arindex.begin(), arindex.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return arfitness[a] < arfitness[b]; });
  std::vector<double> sorted(lambda_);
  for (std::size_t k = 0; k < lambda_; ++k) sorted[k] = arfitness[arindex[k]];

  Eigen::MatrixXd xsel(n, mu), zsel(n, mu);
  for (Eigen::Index i = 0; i < mu; ++i) {
    xsel.col(i) = arx.col(arindex[i]);
    zsel.col(i) = arz.col(arindex[i]);
  }
  xmean_ = xsel * weights_;
  const Eigen::VectorXd zmean = zsel * weights_;

  ps_ = (1.0 - cs_) * ps_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * (b_ * zmean);
  const double g = static_cast<double>(counteval_) / static_cast<double>(lambda_);
  const bool hsig = ps_.norm() / std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * g)) / chin_ <
                    1.4 + 2.0 / (static_cast<double>(n_) + 1.0);
  pc_ = (1.0 - cc_) * pc_ + (hsig ? 1.0 : 0.0) * std::sqrt(cc_ * (2.0 - cc_) * mueff_) * (b_ * d_ * zmean);

  const Eigen::MatrixXd artmp = b_ * d_ * zsel;
  c_ = (1.0 - c1_ - cmu_) * c_ +
       c1_ * (pc_ * pc_.transpose() + (hsig ? 0.0 : 1.0) * cc_ * (2.0 - cc_) * c_) +
       cmu_ * artmp * weights_.asDiagonal() * artmp.transpose();

  sigma_ = sigma_ * std::exp((cs_ / damps_) * (ps_.norm() / chin_ - 1.0));

  if (static_cast<double>(counteval_ - eigeneval_) >
      static_cast<double>(lambda_) / (c1_ + cmu_) / static_cast<double>(n_) / 10.0) {
    eigeneval_ = counteval_;
    const Eigen::MatrixXd upper = c_.triangularView<Eigen::Upper>();
    const Eigen::MatrixXd strict = c_.triangularView<Eigen::StrictlyUpper>();
    c_ = upper + strict.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c_);
    Eigen::MatrixXd nb = es.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index arg = 0;
      for (Eigen::Index r = 1; r < n; ++r)
        if (std::abs(nb(r, j)) > std::abs(nb(arg, j))) arg = r;
      if (nb(arg, j) < 0.0) nb.col(j) *= -1.0;
      double best = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double dd = b_.col(k).dot(nb.col(j));
        if (std::abs(dd) > std::abs(best)) best = dd;
      }
      if (best < 0.0) nb.col(j) *= -1.0;
    }
    b_ = nb;
    d_ = es.eigenvalues().cwiseSqrt().asDiagonal();
  }

  if (sorted[0] == sorted[static_cast<std::size_t>(std::ceil(0.7 * static_cast<double>(lambda_))) - 1])
    sigma_ = sigma_ * std::exp(0.2 + cs_ / damps_);
  return sorted[0];
}

}  // namespace testsupport
