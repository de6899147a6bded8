#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmaes/linalg.hpp"

namespace cmaes {

/// Complete strategy parameter set. Immutable for the lifetime of a run.
struct StrategyParams {
  std::size_t n = 0;
  std::size_t lambda = 0;
  std::size_t mu = 0;
  /// Length lambda, nonincreasing; the first mu entries are positive.
  Vector weights;
  double mu_eff = 0.0;
  double mu_eff_minus = 0.0;
  double c_m = 1.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;
  double alpha_cov = 2.0;
  // Candidate bounds on the total negative weight mass; the smallest wins.
  double alpha_mu_minus = 0.0;
  double alpha_mu_eff_minus = 0.0;
  double alpha_posdef_minus = 0.0;

  double weight_sum() const;
  double positive_weight_sum() const;
  /// Sum of |w_i| over the negative weights.
  double negative_weight_mass() const;
};

/// 4 + floor(3 ln n)
std::size_t default_lambda(std::size_t n);

/// ln((lambda + 1) / 2) - ln i for i = 1..lambda.
Vector raw_weights(std::size_t lambda);

/// E||N(0, I)|| approximated by sqrt(n) (1 - 1/(4n) + 1/(21 n^2)).
double expected_normal_norm(std::size_t n);

/// Derives all constants from (n, lambda, raw weights). The ordering is fixed:
/// mu_eff and mu_eff_minus from the raw weights, then c_1 and c_mu, then the
/// three negative-mass bounds, then the final weights.
StrategyParams finalize(std::size_t n, std::size_t lambda, std::span<const double> raw,
                        double alpha_cov = 2.0);

/// User-facing overrides. Everything not listed is always derived.
struct ParamOverrides {
  std::optional<std::size_t> lambda;
  std::optional<double> alpha_cov;
  std::optional<double> c_m;
  std::optional<Vector> raw_weights;
  /// Zero out the negative weights (passive CMA, as in the classic reference code).
  bool positive_weights_only = false;
};

StrategyParams make_params(std::size_t n, const ParamOverrides& overrides = {});

struct Violation {
  std::string invariant;
  double value = 0.0;
  std::string message;
};

/// Empty iff every StrategyParams invariant holds.
std::vector<Violation> validate_overrides(const StrategyParams& p);

}  // namespace cmaes
