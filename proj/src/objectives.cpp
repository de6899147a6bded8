#include "cmaes/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cmaes/errors.hpp"

namespace cmaes {

namespace {

void require_dim_at_least(std::span<const double> x, std::size_t min_dim, const char* name) {
  if (x.size() < min_dim) {
    throw Error(ErrorCode::DimensionTooSmall,
                std::string(name) + ": dimension must be greater than one");
  }
}

using Factory = Objective (*)(std::size_t);

Objective simple(std::string name, std::size_t dim, double (*fn)(std::span<const double>),
                 Vector optimum, std::size_t min_dim) {
  if (dim < min_dim) {
    throw Error(ErrorCode::DimensionTooSmall, name + ": dimension must be at least " + std::to_string(min_dim));
  }
  return Objective{std::move(name), dim, fn, KnownOptimum{std::move(optimum), 0.0}};
}

const std::map<std::string, Factory, std::less<>>& registry() {
  static const std::map<std::string, Factory, std::less<>> table = {
      {"sphere", [](std::size_t n) { return simple("sphere", n, sphere, Vector(n, 0.0), 1); }},
      {"elli", [](std::size_t n) { return simple("elli", n, elli, Vector(n, 0.0), 2); }},
      {"cigar", [](std::size_t n) { return simple("cigar", n, cigar, Vector(n, 0.0), 1); }},
      {"tablet", [](std::size_t n) { return simple("tablet", n, tablet, Vector(n, 0.0), 1); }},
      {"rosenbrock",
       [](std::size_t n) { return simple("rosenbrock", n, rosenbrock, Vector(n, 1.0), 2); }},
  };
  return table;
}

}  // namespace

double Objective::operator()(std::span<const double> x) const {
  if (x.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, name + ": expected dimension " + std::to_string(dim));
  }
  return eval(x);
}

double sphere(std::span<const double> x) {
  double f = 0.0;
  for (double v : x) f += v * v;
  return f;
}

double elli(std::span<const double> x) {
  require_dim_at_least(x, 2, "elli");
  const double denom = static_cast<double>(x.size() - 1);
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    f += std::pow(1e6, static_cast<double>(i) / denom) * x[i] * x[i];
  return f;
}

double cigar(std::span<const double> x) {
  double f = x.empty() ? 0.0 : x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) f += 1e6 * x[i] * x[i];
  return f;
}

double tablet(std::span<const double> x) {
  double f = x.empty() ? 0.0 : 1e6 * x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) f += x[i] * x[i];
  return f;
}

double rosenbrock(std::span<const double> x) {
  require_dim_at_least(x, 2, "rosenbrock");
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i] * x[i] - x[i + 1];
    const double b = x[i] - 1.0;
    f += 100.0 * a * a + b * b;
  }
  return f;
}

std::vector<std::string> objective_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

Objective make_objective(std::string_view name, std::size_t dim) {
  const auto& table = registry();
  const auto it = table.find(name);
  if (it == table.end()) {
    throw Error(ErrorCode::ConfigError, "unknown objective '" + std::string(name) + "'");
  }
  return it->second(dim);
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size())
    throw Error(ErrorCode::DimensionMismatch, "bounds have different lengths");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]))
      throw Error(ErrorCode::InvalidArgument, "lower bound must be below upper bound in every coordinate");
  }
}

bool BoxBounds::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

Vector BoxBounds::clamp(std::span<const double> x) const {
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
  return out;
}

Objective box_repair_penalty_wrap(Objective inner, BoxBounds bounds, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty alpha must be positive");
  bounds.validate();
  if (bounds.lower.size() != inner.dim)
    throw Error(ErrorCode::DimensionMismatch, "bounds dimension does not match objective");
  Objective out;
  out.name = inner.name + "+box";
  out.dim = inner.dim;
  auto fn = inner.eval;
  out.eval = [fn, bounds = std::move(bounds), alpha](std::span<const double> x) {
    const Vector repaired = bounds.clamp(x);
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - repaired[i];
      dist_sq += d * d;
    }
    return fn(repaired) + alpha * dist_sq;
  };
  return out;
}

void FMaxTracker::observe(double feasible_fitness) {
  if (!seen_ || feasible_fitness > worst_) worst_ = feasible_fitness;
  seen_ = true;
}

double FMaxTracker::f_max() const {
  if (!seen_) return 0.0;
  // one unit in the last place above the worst, scaled so it survives large magnitudes
  const double margin = std::max(std::abs(worst_) * std::numeric_limits<double>::epsilon(),
                                 std::numeric_limits<double>::min());
  return worst_ + margin;
}

Objective resample_penalty_wrap(Objective inner, std::function<bool(std::span<const double>)> feasible,
                                Vector x_feasible, std::shared_ptr<FMaxTracker> tracker) {
  if (x_feasible.size() != inner.dim)
    throw Error(ErrorCode::DimensionMismatch, "x_feasible dimension does not match objective");
  if (!feasible(x_feasible))
    throw Error(ErrorCode::InvalidArgument, "x_feasible is not feasible");
  if (!tracker) tracker = std::make_shared<FMaxTracker>();
  tracker->observe(inner.eval(x_feasible));
  Objective out;
  out.name = inner.name + "+resample";
  out.dim = inner.dim;
  auto fn = inner.eval;
  out.eval = [fn, feasible = std::move(feasible), x_feasible = std::move(x_feasible),
              tracker](std::span<const double> x) {
    if (feasible(x)) {
      const double f = fn(x);
      tracker->observe(f);
      return f;
    }
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - x_feasible[i];
      dist_sq += d * d;
    }
    return tracker->f_max() + std::sqrt(dist_sq);
  };
  return out;
}

ConstraintPenalty::ConstraintPenalty(Objective inner, std::vector<Constraint> constraints,
                                     double alpha, OffsetPolicy policy)
    : inner_(std::move(inner)), constraints_(std::move(constraints)), alpha_(alpha), policy_(policy) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty alpha must be positive");
}

bool ConstraintPenalty::feasible(std::span<const double> x) const {
  for (const auto& c : constraints_)
    if (c(x) > 0.0) return false;
  return true;
}

double ConstraintPenalty::violation(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& c : constraints_) {
    const double ci = c(x);
    if (ci > 0.0) v += ci * ci;
  }
  return v;
}

double ConstraintPenalty::penalized(std::span<const double> x, double f_offset) const {
  if (feasible(x)) return inner_(x);
  return f_offset + alpha_ * violation(x);
}

Vector ConstraintPenalty::evaluate(std::span<const Vector> generation) const {
  Vector out(generation.size());
  std::vector<double> feasible_values;
  std::vector<bool> ok(generation.size());
  for (std::size_t k = 0; k < generation.size(); ++k) {
    ok[k] = feasible(generation[k]);
    if (ok[k]) {
      out[k] = inner_(generation[k]);
      feasible_values.push_back(out[k]);
    }
  }
  if (feasible_values.size() == generation.size()) return out;
  if (feasible_values.empty())
    throw Error(ErrorCode::NoFeasiblePoints, "no feasible point in this generation");

  std::sort(feasible_values.begin(), feasible_values.end());
  const std::size_t m = feasible_values.size();
  double offset = feasible_values.front();
  switch (policy_) {
    case OffsetPolicy::Best:
      break;
    case OffsetPolicy::Median:
      offset = m % 2 == 1 ? feasible_values[m / 2]
                          : 0.5 * (feasible_values[m / 2 - 1] + feasible_values[m / 2]);
      break;
    case OffsetPolicy::Quartile25:
      offset = feasible_values[(m - 1) / 4];
      break;
  }
  for (std::size_t k = 0; k < generation.size(); ++k) {
    if (!ok[k]) out[k] = offset + alpha_ * violation(generation[k]);
  }
  return out;
}

}  // namespace cmaes
