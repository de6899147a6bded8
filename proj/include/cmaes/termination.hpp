#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmaes/engine.hpp"

namespace cmaes {

enum class Criterion {
  NoEffectAxis,
  NoEffectCoord,
  ConditionCov,
  EqualFunValues,
  Stagnation,
  TolXUp,
  TolFun,
  TolX,
};

inline constexpr std::array<Criterion, 8> kAllCriteria = {
    Criterion::NoEffectAxis,   Criterion::NoEffectCoord, Criterion::ConditionCov,
    Criterion::EqualFunValues, Criterion::Stagnation,    Criterion::TolXUp,
    Criterion::TolFun,         Criterion::TolX,
};

std::string_view to_string(Criterion c) noexcept;
std::optional<Criterion> criterion_from_string(std::string_view name) noexcept;

/// Names joined with ',' in canonical order.
std::string join_criteria(const std::vector<Criterion>& triggered);

struct TerminationConfig {
  double tol_fun = 1e-12;
  /// Multiplies the initial step-size.
  double tol_x_rel = 1e-12;
  double max_cond = 1e14;
  double tol_x_up = 1e4;
  std::array<bool, 8> enabled = {true, true, true, true, true, true, true, true};

  bool is_enabled(Criterion c) const { return enabled[static_cast<std::size_t>(c)]; }
  void set_enabled(Criterion c, bool on) { enabled[static_cast<std::size_t>(c)] = on; }
};

/// Throws Error{InvalidArgument} unless all tolerances are strictly positive.
void validate(const TerminationConfig& cfg);

/// Rolling per-generation fitness history.
///
/// The best/median buffers keep min(20000, max(ceil(0.2 g), 120 + 30 n / lambda))
/// generations, where g is the number of recorded generations.
class History {
 public:
  /// `initial_sigma` is sigma_0; `initial_max_axis` is sigma_0 * max(d) at start.
  History(std::size_t n, std::size_t lambda, double initial_sigma, double initial_max_axis);
  History(std::size_t n, std::size_t lambda, double initial_sigma);

  void record(const GenerationReport& report);
  void record(double best, double median, std::span<const double> generation_fitnesses);

  std::size_t dim() const noexcept { return n_; }
  std::size_t lambda() const noexcept { return lambda_; }
  std::uint64_t gen_count() const noexcept { return gen_count_; }
  double initial_sigma() const noexcept { return initial_sigma_; }
  double initial_max_axis() const noexcept { return initial_max_axis_; }
  const std::deque<double>& best() const noexcept { return best_; }
  const std::deque<double>& median() const noexcept { return median_; }
  const Vector& last_generation() const noexcept { return last_generation_; }

  /// 10 + ceil(30 n / lambda), shared by TolFun and EqualFunValues.
  std::size_t flat_window() const noexcept;
  /// ceil(120 + 30 n / lambda)
  std::size_t min_stagnation_window() const noexcept;
  /// Current retention length of the best/median buffers.
  std::size_t capacity() const noexcept;

  /// Rebuilds a history from serialized buffers (checkpoint restore).
  static History restore(std::size_t n, std::size_t lambda, double initial_sigma,
                         double initial_max_axis, std::uint64_t gen_count,
                         std::deque<double> best, std::deque<double> median,
                         Vector last_generation);

 private:
  std::size_t n_;
  std::size_t lambda_;
  double initial_sigma_;
  double initial_max_axis_;
  std::uint64_t gen_count_ = 0;
  std::deque<double> best_;
  std::deque<double> median_;
  Vector last_generation_;
};

/// Every enabled criterion that fires for this snapshot, in canonical order.
std::vector<Criterion> check(const EngineState& state, const History& history,
                             const TerminationConfig& cfg);

}  // namespace cmaes
