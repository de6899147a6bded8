#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmaes/linalg.hpp"
#include "cmaes/params.hpp"
#include "cmaes/rng.hpp"

namespace cmaes {

/// One sampled search point. The chain x = m + sigma * y, y = B D z is stored
/// as computed and never recomputed.
struct Candidate {
  Vector z;
  Vector y;
  Vector x;
  std::optional<double> fitness;
};

/// A batch handed out by Engine::ask. `tag` identifies the ask call so tell can
/// reject stale or foreign batches.
struct Population {
  std::uint64_t tag = 0;
  std::vector<Candidate> candidates;

  std::size_t size() const noexcept { return candidates.size(); }
  Candidate& operator[](std::size_t i) { return candidates[i]; }
  const Candidate& operator[](std::size_t i) const { return candidates[i]; }
};

/// Outcome of one tell. The sigma/condition/axis fields describe the
/// distribution the batch was sampled from, so generation 0 reports the
/// initial distribution.
struct GenerationReport {
  std::uint64_t generation = 0;
  std::uint64_t evaluations = 0;
  double best_fitness = 0.0;
  Vector best_x;
  double median_fitness = 0.0;
  /// All fitnesses of the batch in rank order.
  Vector ranked_fitnesses;
  double sigma = 0.0;
  double condition = 1.0;
  double min_axis = 0.0;
  double max_axis = 0.0;
  bool h_sigma = true;
  bool eigen_refreshed = false;
  bool flat_fitness = false;
};

struct EngineState {
  StrategyParams params;
  Vector mean;
  double sigma = 1.0;
  SymMatrix cov;
  EigenSystem eig;
  Vector p_sigma;
  Vector p_c;
  std::uint64_t generation = 0;
  std::uint64_t eval_count = 0;
  std::uint64_t evals_at_last_eigen = 0;
  NormalSource rng{0};
  // ask/tell bookkeeping
  std::uint64_t batch = 0;
  bool batch_open = false;
};

struct EngineOptions {
  /// Recompute the eigensystem after every tell instead of the lazy cadence.
  bool eager_eigen = false;
  bool flat_fitness_escape = true;
  /// Orthogonal basis for the initial eigensystem (C = I either way).
  std::optional<DenseMatrix> initial_basis;
};

/// (mu/mu_W, lambda)-CMA-ES with active covariance update, driven by ask/tell.
///
/// Single-owner. Between ask and tell the caller may evaluate the candidates in
/// any order and on any threads. A tell that throws leaves the state exactly as
/// it was before the call.
class Engine {
 public:
  Engine(StrategyParams params, Vector mean, double sigma, std::uint64_t seed,
         EngineOptions options = {});

  /// Resumes from a snapshot, e.g. one read back from a checkpoint.
  static Engine restore(EngineState state, EngineOptions options = {});

  Population ask();

  /// Redraws candidate `index` of an open batch (resampling of infeasible points).
  void resample(Population& population, std::size_t index);

  GenerationReport tell(const Population& evaluated);

  /// Recomputes B and D when enough evaluations have passed since the last
  /// decomposition. Returns whether a decomposition happened.
  bool maybe_refresh_eigensystem();

  const EngineState& state() const noexcept { return state_; }
  const StrategyParams& params() const noexcept { return state_.params; }
  const EngineOptions& options() const noexcept { return options_; }

 private:
  Engine(EngineState state, EngineOptions options);
  void validate() const;
  Candidate sample(EngineState& s);

  EngineState state_;
  EngineOptions options_;
};

// Update steps, exposed individually for testing.

/// Indices sorted by ascending fitness; NaN and +-inf rank last; ties keep
/// sampling order. Throws Error{MissingFitness} on an unevaluated candidate.
std::vector<std::size_t> rank(std::span<const Candidate> candidates);
std::vector<std::size_t> rank(std::span<const double> fitnesses);

/// p_sigma <- (1 - c_sigma) p_sigma + sqrt(c_sigma (2 - c_sigma) mu_eff) C^{-1/2} <y>_w
Vector next_step_size_path(std::span<const double> p_sigma,
                           std::span<const double> whitened_mean_step, const StrategyParams& p);

/// sigma * exp((c_sigma / d_sigma) (|p_sigma| / chi_n - 1)); throws
/// Error{StepSizeOverflow} if the result leaves [1e-300, 1e300].
double next_step_size(double sigma, double p_sigma_norm, const StrategyParams& p);

/// h_sigma for the tell that completes generation index `generation` (0 for
/// the first tell), i.e. with the exponent 2 (generation + 1).
bool heaviside_sigma(double p_sigma_norm, std::uint64_t generation, const StrategyParams& p);

Vector next_cov_path(std::span<const double> p_c, std::span<const double> mean_step,
                     bool h_sigma, const StrategyParams& p);

/// w_i unchanged for w_i >= 0; w_i * n / |z_{i:lambda}|^2 otherwise (0 if |z| = 0).
Vector active_weights(const StrategyParams& p, std::span<const double> ranked_z_squared_norms);

/// Combined rank-one and rank-mu update. `ranked_steps` are the y vectors in rank order.
SymMatrix updated_covariance(const SymMatrix& c, std::span<const double> p_c,
                             std::span<const Vector> ranked_steps,
                             std::span<const double> active, bool h_sigma,
                             const StrategyParams& p);

/// eval_count - evals_at_last_eigen > lambda / ((c_1 + c_mu) n 10)
bool eigen_refresh_due(std::uint64_t eval_count, std::uint64_t evals_at_last_eigen,
                       const StrategyParams& p);

/// Best fitness equals the fitness at rank ceil(0.7 lambda).
bool is_flat_fitness(std::span<const double> ranked_fitnesses);

}  // namespace cmaes
