#include "cmaes/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cmaes/errors.hpp"

namespace cmaes {

namespace {

constexpr double kSigmaMin = 1e-300;
constexpr double kSigmaMax = 1e300;

void check_sigma(double sigma) {
  if (!(sigma >= kSigmaMin && sigma <= kSigmaMax)) {
    throw Error(ErrorCode::StepSizeOverflow, "step-size left [1e-300, 1e300]: " + std::to_string(sigma));
  }
}

bool fitness_is_regular(double f) { return std::isfinite(f); }

double median_of_sorted(std::span<const double> v) {
  const std::size_t k = v.size();
  if (k == 0) return 0.0;
  if (k % 2 == 1) return v[k / 2];
  return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// Flip columns of `fresh` so each one points the same way as the previous
// basis vector it overlaps most with. Keeps sampling continuous across
// refreshes and makes the transport B D z equivariant under rotations.
void align_basis(EigenSystem& fresh, const EigenSystem& previous) {
  const std::size_t n = fresh.dim();
  for (std::size_t j = 0; j < n; ++j) {
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += previous.basis(r, k) * fresh.basis(r, j);
      if (std::abs(d) > std::abs(best)) best = d;
    }
    if (best < 0.0) {
      for (std::size_t r = 0; r < n; ++r) fresh.basis(r, j) = -fresh.basis(r, j);
    }
  }
}

}  // namespace

std::vector<std::size_t> rank(std::span<const double> fitnesses) {
  std::vector<std::size_t> order(fitnesses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double fa = fitnesses[a];
    const double fb = fitnesses[b];
    const bool ra = fitness_is_regular(fa);
    const bool rb = fitness_is_regular(fb);
    if (ra != rb) return ra;
    if (!ra) return false;
    return fa < fb;
  });
  return order;
}

std::vector<std::size_t> rank(std::span<const Candidate> candidates) {
  Vector f(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].fitness) {
      throw Error(ErrorCode::MissingFitness, "candidate " + std::to_string(i) + " has no fitness");
    }
    f[i] = *candidates[i].fitness;
  }
  return rank(std::span<const double>(f));
}

Vector next_step_size_path(std::span<const double> p_sigma,
                           std::span<const double> whitened_mean_step, const StrategyParams& p) {
  const double decay = 1.0 - p.c_sigma;
  const double gain = std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff);
  Vector out(p_sigma.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = decay * p_sigma[i] + gain * whitened_mean_step[i];
  return out;
}

double next_step_size(double sigma, double p_sigma_norm, const StrategyParams& p) {
  const double next = sigma * std::exp((p.c_sigma / p.d_sigma) * (p_sigma_norm / p.chi_n - 1.0));
  check_sigma(next);
  return next;
}

bool heaviside_sigma(double p_sigma_norm, std::uint64_t generation, const StrategyParams& p) {
  const double exponent = 2.0 * (static_cast<double>(generation) + 1.0);
  const double correction = std::sqrt(1.0 - std::pow(1.0 - p.c_sigma, exponent));
  const double threshold = 1.4 + 2.0 / (static_cast<double>(p.n) + 1.0);
  return p_sigma_norm / correction / p.chi_n < threshold;
}

Vector next_cov_path(std::span<const double> p_c, std::span<const double> mean_step, bool h_sigma,
                     const StrategyParams& p) {
  const double decay = 1.0 - p.c_c;
  const double gain = h_sigma ? std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_eff) : 0.0;
  Vector out(p_c.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = decay * p_c[i] + gain * mean_step[i];
  return out;
}

Vector active_weights(const StrategyParams& p, std::span<const double> ranked_z_squared_norms) {
  if (ranked_z_squared_norms.size() != p.weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one squared norm per weight expected");
  }
  Vector out(p.weights);
  const double nd = static_cast<double>(p.n);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] >= 0.0) continue;
    const double sq = ranked_z_squared_norms[i];
    out[i] = sq > 0.0 ? out[i] * (nd / sq) : 0.0;
  }
  return out;
}

SymMatrix updated_covariance(const SymMatrix& c, std::span<const double> p_c,
                             std::span<const Vector> ranked_steps, std::span<const double> active,
                             bool h_sigma, const StrategyParams& p) {
  if (ranked_steps.size() != active.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one weight per ranked step expected");
  }
  const double delta = h_sigma ? 0.0 : p.c_c * (2.0 - p.c_c);
  const double decay = 1.0 + p.c_1 * delta - p.c_1 - p.c_mu * p.weight_sum();

  SymMatrix next = c;
  next.scale(decay);
  if (p.c_1 != 0.0) next.add_outer(p.c_1, p_c);
  if (p.c_mu != 0.0) {
    for (std::size_t i = 0; i < ranked_steps.size(); ++i) {
      if (active[i] == 0.0) continue;
      next.add_outer(p.c_mu * active[i], ranked_steps[i]);
    }
  }
  next.enforce_symmetry();
  return next;
}

bool eigen_refresh_due(std::uint64_t eval_count, std::uint64_t evals_at_last_eigen,
                       const StrategyParams& p) {
  const double rate = p.c_1 + p.c_mu;
  if (!(rate > 0.0)) return false;
  const double gap = static_cast<double>(p.lambda) / rate / static_cast<double>(p.n) / 10.0;
  return static_cast<double>(eval_count - evals_at_last_eigen) > gap;
}

bool is_flat_fitness(std::span<const double> ranked_fitnesses) {
  const std::size_t lambda = ranked_fitnesses.size();
  if (lambda == 0) return false;
  const auto idx = static_cast<std::size_t>(std::ceil(0.7 * static_cast<double>(lambda)));
  return ranked_fitnesses[0] == ranked_fitnesses[std::max<std::size_t>(idx, 1) - 1];
}

Engine::Engine(StrategyParams params, Vector mean, double sigma, std::uint64_t seed,
               EngineOptions options)
    : options_(std::move(options)) {
  const std::size_t n = params.n;
  if (mean.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "initial mean has dimension " +
                                                  std::to_string(mean.size()) + ", expected " +
                                                  std::to_string(n));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "initial step-size must be positive and finite");
  }
  state_.params = std::move(params);
  state_.mean = std::move(mean);
  state_.sigma = sigma;
  state_.cov = SymMatrix::identity(n);
  state_.eig = EigenSystem::identity(n);
  if (options_.initial_basis) {
    const DenseMatrix& b = *options_.initial_basis;
    if (b.rows() != n || b.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "initial basis must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        for (std::size_t r = 0; r < n; ++r) d += b(r, i) * b(r, j);
        if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-10)
          throw Error(ErrorCode::InvalidArgument, "initial basis is not orthogonal");
      }
    }
    state_.eig.basis = b;
  }
  state_.p_sigma.assign(n, 0.0);
  state_.p_c.assign(n, 0.0);
  state_.rng = NormalSource(seed);
  validate();
}

Engine::Engine(EngineState state, EngineOptions options)
    : state_(std::move(state)), options_(std::move(options)) {
  validate();
}

Engine Engine::restore(EngineState state, EngineOptions options) {
  return Engine(std::move(state), std::move(options));
}

void Engine::validate() const {
  const StrategyParams& p = state_.params;
  const std::size_t n = p.n;
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  if (p.lambda < 2) throw Error(ErrorCode::InvalidLambda, "lambda must be at least 2");
  if (p.weights.size() != p.lambda)
    throw Error(ErrorCode::InvalidWeights, "weights must have lambda entries");
  if (p.mu < 1 || p.mu > p.lambda) throw Error(ErrorCode::InvalidWeights, "mu out of range");
  auto dims_ok = state_.mean.size() == n && state_.p_sigma.size() == n && state_.p_c.size() == n &&
                 state_.cov.dim() == n && state_.eig.dim() == n && state_.eig.basis.rows() == n &&
                 state_.eig.basis.cols() == n;
  if (!dims_ok) throw Error(ErrorCode::DimensionMismatch, "engine state dimensions disagree");
  if (!(state_.sigma > 0.0) || !std::isfinite(state_.sigma))
    throw Error(ErrorCode::InvalidArgument, "step-size must be positive and finite");
}

Candidate Engine::sample(EngineState& s) {
  const std::size_t n = s.params.n;
  Candidate c;
  c.z = s.rng.normal_vector(n);
  c.y = sqrt_apply(s.eig, c.z);
  c.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.x[i] = s.mean[i] + s.sigma * c.y[i];
  return c;
}

Population Engine::ask() {
  Population pop;
  pop.candidates.reserve(state_.params.lambda);
  for (std::size_t k = 0; k < state_.params.lambda; ++k) pop.candidates.push_back(sample(state_));
  pop.tag = ++state_.batch;
  state_.batch_open = true;
  return pop;
}

void Engine::resample(Population& population, std::size_t index) {
  if (!state_.batch_open || population.tag != state_.batch)
    throw Error(ErrorCode::StaleBatch, "population does not belong to the open batch");
  if (index >= population.size())
    throw Error(ErrorCode::InvalidArgument, "candidate index out of range");
  population[index] = sample(state_);
}

bool Engine::maybe_refresh_eigensystem() {
  if (!eigen_refresh_due(state_.eval_count, state_.evals_at_last_eigen, state_.params)) return false;
  EngineState next = state_;
  try {
    EigenSystem fresh = eigendecompose(next.cov);
    align_basis(fresh, next.eig);
    next.eig = std::move(fresh);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConditionError, std::string("covariance degenerated: ") + e.what());
  }
  next.evals_at_last_eigen = next.eval_count;
  state_ = std::move(next);
  return true;
}

GenerationReport Engine::tell(const Population& evaluated) {
  if (!state_.batch_open || evaluated.tag != state_.batch)
    throw Error(ErrorCode::StaleBatch, "population does not come from the latest ask");
  const StrategyParams& p = state_.params;
  const std::size_t n = p.n;
  const std::size_t lambda = p.lambda;
  if (evaluated.size() != lambda) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(lambda) +
                                                  " candidates, got " +
                                                  std::to_string(evaluated.size()));
  }

  const std::vector<std::size_t> order = rank(std::span<const Candidate>(evaluated.candidates));

  EngineState next = state_;
  GenerationReport report;
  report.generation = state_.generation;
  report.sigma = state_.sigma;
  report.condition = condition_number(state_.eig);
  const auto [dmin, dmax] = std::minmax_element(state_.eig.scales.begin(), state_.eig.scales.end());
  report.min_axis = state_.sigma * *dmin;
  report.max_axis = state_.sigma * *dmax;

  // Selection and recombination.
  Vector y_w(n, 0.0), z_w(n, 0.0);
  for (std::size_t i = 0; i < p.mu; ++i) {
    const Candidate& c = evaluated[order[i]];
    for (std::size_t j = 0; j < n; ++j) {
      y_w[j] += p.weights[i] * c.y[j];
      z_w[j] += p.weights[i] * c.z[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) next.mean[j] += p.c_m * state_.sigma * y_w[j];

  // Step-size control. C^{-1/2} <y>_w = B sum w_i z_{i:lambda}.
  next.p_sigma = next_step_size_path(state_.p_sigma, basis_apply(state_.eig, z_w), p);
  const double ps_norm = norm(next.p_sigma);
  next.sigma = next_step_size(state_.sigma, ps_norm, p);

  // Covariance adaptation.
  const bool h_sigma = heaviside_sigma(ps_norm, state_.generation, p);
  next.p_c = next_cov_path(state_.p_c, y_w, h_sigma, p);

  std::vector<Vector> ranked_steps;
  Vector z_sq(lambda);
  ranked_steps.reserve(lambda);
  for (std::size_t i = 0; i < lambda; ++i) {
    const Candidate& c = evaluated[order[i]];
    ranked_steps.push_back(c.y);
    z_sq[i] = squared_norm(c.z);
  }
  const Vector w_active = active_weights(p, z_sq);
  next.cov = updated_covariance(state_.cov, next.p_c, ranked_steps, w_active, h_sigma, p);

  next.generation = state_.generation + 1;
  next.eval_count = state_.eval_count + lambda;

  if (options_.eager_eigen || eigen_refresh_due(next.eval_count, next.evals_at_last_eigen, p)) {
    try {
      EigenSystem fresh = eigendecompose(next.cov);
      align_basis(fresh, next.eig);
      next.eig = std::move(fresh);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConditionError, std::string("covariance degenerated: ") + e.what());
    }
    next.evals_at_last_eigen = next.eval_count;
    report.eigen_refreshed = true;
  }

  report.ranked_fitnesses.resize(lambda);
  for (std::size_t i = 0; i < lambda; ++i) report.ranked_fitnesses[i] = *evaluated[order[i]].fitness;

  if (options_.flat_fitness_escape && is_flat_fitness(report.ranked_fitnesses)) {
    next.sigma *= std::exp(0.2 + p.c_sigma / p.d_sigma);
    check_sigma(next.sigma);
    report.flat_fitness = true;
  }

  next.batch_open = false;
  state_ = std::move(next);

  report.evaluations = state_.eval_count;
  report.best_fitness = report.ranked_fitnesses.front();
  report.best_x = evaluated[order.front()].x;
  report.median_fitness = median_of_sorted(report.ranked_fitnesses);
  report.h_sigma = h_sigma;
  return report;
}

}  // namespace cmaes
