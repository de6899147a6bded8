#include "cmaes/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cmaes/errors.hpp"

namespace cmaes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSumTolerance = 1e-12;

// (sum x)^2 / sum x^2 over the selected entries; 0 for an empty selection.
template <typename Pred>
double effective_mass(std::span<const double> w, Pred select) {
  double sum = 0.0, sum_sq = 0.0;
  for (double x : w) {
    if (!select(x)) continue;
    sum += x;
    sum_sq += x * x;
  }
  return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double StrategyParams::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double StrategyParams::positive_weight_sum() const {
  double s = 0.0;
  for (double w : weights)
    if (w > 0.0) s += w;
  return s;
}

double StrategyParams::negative_weight_mass() const {
  double s = 0.0;
  for (double w : weights)
    if (w < 0.0) s -= w;
  return s;
}

std::size_t default_lambda(std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

Vector raw_weights(std::size_t lambda) {
  if (lambda < 2) throw Error(ErrorCode::InvalidLambda, "lambda must be at least 2");
  Vector w(lambda);
  const double head = std::log((static_cast<double>(lambda) + 1.0) / 2.0);
  for (std::size_t i = 0; i < lambda; ++i) w[i] = head - std::log(static_cast<double>(i + 1));
  return w;
}

double expected_normal_norm(std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
}

StrategyParams finalize(std::size_t n, std::size_t lambda, std::span<const double> raw,
                        double alpha_cov) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  if (lambda < 2) throw Error(ErrorCode::InvalidLambda, "lambda must be at least 2");
  if (raw.size() != lambda) {
    throw Error(ErrorCode::InvalidWeights, "expected " + std::to_string(lambda) +
                                               " raw weights, got " + std::to_string(raw.size()));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw Error(ErrorCode::InvalidWeights, "non-finite raw weight");
    if (i > 0 && raw[i] > raw[i - 1])
      throw Error(ErrorCode::InvalidWeights, "raw weights must be nonincreasing");
  }
  if (!(raw[0] > 0.0)) throw Error(ErrorCode::InvalidWeights, "no positive raw weight");
  if (!(alpha_cov > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha_cov must be positive");

  const double nd = static_cast<double>(n);
  StrategyParams p;
  p.n = n;
  p.lambda = lambda;
  p.alpha_cov = alpha_cov;
  p.mu = static_cast<std::size_t>(std::count_if(raw.begin(), raw.end(), [](double x) { return x > 0.0; }));

  // 1. selection masses from the raw weights
  p.mu_eff = effective_mass(raw, [](double x) { return x > 0.0; });
  p.mu_eff_minus = effective_mass(raw, [](double x) { return x < 0.0; });

  // 2. covariance learning rates
  p.c_1 = alpha_cov / ((nd + 1.3) * (nd + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1, alpha_cov * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) /
                                     ((nd + 2.0) * (nd + 2.0) + alpha_cov * p.mu_eff / 2.0));

  // 3. bounds on the negative weight mass
  p.alpha_mu_minus = p.c_mu > 0.0 ? 1.0 + p.c_1 / p.c_mu : kInf;
  p.alpha_mu_eff_minus = 1.0 + 2.0 * p.mu_eff_minus / (p.mu_eff + 2.0);
  p.alpha_posdef_minus = p.c_mu > 0.0 ? (1.0 - p.c_1 - p.c_mu) / (nd * p.c_mu) : kInf;

  // 4. final weights
  double positive_sum = 0.0, negative_mass = 0.0;
  for (double x : raw) {
    if (x > 0.0) positive_sum += x;
    if (x < 0.0) negative_mass -= x;
  }
  const double negative_target =
      std::min({p.alpha_mu_minus, p.alpha_mu_eff_minus, p.alpha_posdef_minus});
  p.weights.resize(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    p.weights[i] = raw[i] >= 0.0 ? raw[i] / positive_sum : negative_target / negative_mass * raw[i];
  }

  p.c_m = 1.0;
  p.c_sigma = (p.mu_eff + 2.0) / (nd + p.mu_eff + 5.0);
  p.d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (nd + 1.0)) - 1.0) + p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / nd) / (nd + 4.0 + 2.0 * p.mu_eff / nd);
  p.chi_n = expected_normal_norm(n);
  return p;
}

StrategyParams make_params(std::size_t n, const ParamOverrides& overrides) {
  const std::size_t lambda = overrides.lambda.value_or(default_lambda(n));
  Vector raw = overrides.raw_weights.value_or(raw_weights(lambda));
  if (overrides.positive_weights_only) {
    for (double& w : raw) w = std::max(w, 0.0);
  }
  StrategyParams p = finalize(n, lambda, raw, overrides.alpha_cov.value_or(2.0));
  if (overrides.c_m) p.c_m = *overrides.c_m;
  return p;
}

std::vector<Violation> validate_overrides(const StrategyParams& p) {
  std::vector<Violation> out;
  auto flag = [&](std::string invariant, double value) {
    std::string message = invariant + " violated (value " + format_value(value) + ")";
    out.push_back(Violation{std::move(invariant), value, std::move(message)});
  };

  if (p.n < 1) flag("n >= 1", static_cast<double>(p.n));
  if (p.lambda < 2) flag("lambda >= 2", static_cast<double>(p.lambda));
  if (p.weights.size() != p.lambda) {
    flag("weights.size() == lambda", static_cast<double>(p.weights.size()));
    return out;
  }

  for (std::size_t i = 1; i < p.weights.size(); ++i) {
    if (p.weights[i] > p.weights[i - 1]) {
      flag("weights nonincreasing", p.weights[i] - p.weights[i - 1]);
      break;
    }
  }
  for (double w : p.weights) {
    if (!std::isfinite(w)) {
      flag("weights finite", w);
      break;
    }
  }
  const auto positives = static_cast<std::size_t>(
      std::count_if(p.weights.begin(), p.weights.end(), [](double w) { return w > 0.0; }));
  if (positives != p.mu || p.mu < 1) flag("mu == |{w_i > 0}| >= 1", static_cast<double>(p.mu));

  const double pos_sum = p.positive_weight_sum();
  if (std::abs(pos_sum - 1.0) > kSumTolerance) flag("sum of positive weights == 1", pos_sum);

  if (p.mu_eff < 1.0 - kSumTolerance || p.mu_eff > static_cast<double>(p.mu) + kSumTolerance)
    flag("1 <= mu_eff <= mu", p.mu_eff);

  if (p.c_1 < 0.0) flag("c_1 >= 0", p.c_1);
  if (p.c_mu < 0.0) flag("c_mu >= 0", p.c_mu);
  if (p.c_1 + p.c_mu > 1.0) flag("c_1 + c_mu <= 1", p.c_1 + p.c_mu);
  if (!(p.c_sigma > 0.0 && p.c_sigma < 1.0)) flag("0 < c_sigma < 1", p.c_sigma);
  if (!(p.d_sigma > 0.0)) flag("d_sigma > 0", p.d_sigma);
  if (!(p.c_c > 0.0 && p.c_c <= 1.0)) flag("0 < c_c <= 1", p.c_c);
  if (!(p.c_m > 0.0 && p.c_m <= 1.0)) flag("0 < c_m <= 1", p.c_m);
  if (!(p.chi_n > 0.0)) flag("chi_n > 0", p.chi_n);

  const double neg_mass = p.negative_weight_mass();
  if (p.lambda >= 4 && neg_mass > 0.0) {
    const double bound =
        std::min({p.alpha_mu_minus, p.alpha_mu_eff_minus, p.alpha_posdef_minus});
    if (std::abs(neg_mass - bound) > kSumTolerance)
      flag("sum |w_i<0| == min(alpha_mu-, alpha_mueff-, alpha_posdef-)", neg_mass);
  }
  return out;
}

}  // namespace cmaes
