#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmaes/linalg.hpp"

namespace cmaes {

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct KnownOptimum {
  Vector location;
  double value = 0.0;
};

/// A named objective of fixed dimension. Registry objectives are stateless and
/// may be called from any thread.
struct Objective {
  std::string name;
  std::size_t dim = 0;
  ObjectiveFn eval;
  std::optional<KnownOptimum> known_optimum;

  double operator()(std::span<const double> x) const;
};

double sphere(std::span<const double> x);
/// sum_i 1e6^(i/(n-1)) x_i^2; needs n >= 2.
double elli(std::span<const double> x);
/// x_0^2 + 1e6 sum_{i>0} x_i^2
double cigar(std::span<const double> x);
/// 1e6 x_0^2 + sum_{i>0} x_i^2
double tablet(std::span<const double> x);
/// sum 100 (x_i^2 - x_{i+1})^2 + (x_i - 1)^2; needs n >= 2.
double rosenbrock(std::span<const double> x);

/// Names accepted by make_objective.
std::vector<std::string> objective_names();

/// Throws Error{ConfigError} for an unknown name, Error{DimensionTooSmall} for
/// elli/rosenbrock with n < 2.
Objective make_objective(std::string_view name, std::size_t dim);

struct BoxBounds {
  Vector lower;
  Vector upper;

  /// Throws Error{InvalidArgument} unless lower_i < upper_i for all i.
  void validate() const;
  bool contains(std::span<const double> x) const;
  Vector clamp(std::span<const double> x) const;
};

/// f(clamp(x)) + alpha |x - clamp(x)|^2. The repaired point is only used for
/// the evaluation. alpha is a tuning knob: pick it so both summands have a
/// similar magnitude.
Objective box_repair_penalty_wrap(Objective inner, BoxBounds bounds, double alpha);

/// Worst feasible fitness seen so far. Single-owner; not thread-safe.
class FMaxTracker {
 public:
  void observe(double feasible_fitness);
  bool empty() const noexcept { return !seen_; }
  /// Strictly above every observed feasible fitness.
  double f_max() const;

 private:
  bool seen_ = false;
  double worst_ = 0.0;
};

/// Feasible x: f(x), observed by the tracker. Infeasible x: f_max + |x - x_feasible|.
/// Pair with Engine::resample to redraw infeasible candidates.
Objective resample_penalty_wrap(Objective inner, std::function<bool(std::span<const double>)> feasible,
                                Vector x_feasible, std::shared_ptr<FMaxTracker> tracker);

enum class OffsetPolicy { Median, Quartile25, Best };

/// Constraint penalty for problems without a repair operator. Constraints
/// c_i(x) <= 0 are satisfied; infeasible points get
/// f_offset + alpha sum_{c_i > 0} c_i(x)^2 where f_offset comes from the
/// feasible points of the same generation.
class ConstraintPenalty {
 public:
  using Constraint = std::function<double(std::span<const double>)>;

  ConstraintPenalty(Objective inner, std::vector<Constraint> constraints, double alpha,
                    OffsetPolicy policy = OffsetPolicy::Median);

  bool feasible(std::span<const double> x) const;
  double violation(std::span<const double> x) const;
  double penalized(std::span<const double> x, double f_offset) const;

  /// Fitness for one generation. Throws Error{NoFeasiblePoints} if some point
  /// is infeasible and none is feasible.
  Vector evaluate(std::span<const Vector> generation) const;

 private:
  Objective inner_;
  std::vector<Constraint> constraints_;
  double alpha_;
  OffsetPolicy policy_;
};

}  // namespace cmaes
