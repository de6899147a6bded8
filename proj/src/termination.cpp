#include "cmaes/termination.hpp"

#include <algorithm>
#include <cmath>

#include "cmaes/errors.hpp"

namespace cmaes {

namespace {

constexpr std::size_t kMaxHistory = 20000;

constexpr std::array<std::string_view, 8> kNames = {
    "NoEffectAxis", "NoEffectCoord", "ConditionCov", "EqualFunValues",
    "Stagnation",   "TolXUp",        "TolFun",       "TolX",
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  if (k % 2 == 1) return v[k / 2];
  return 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// Median of the most recent 30% is not below the median of the oldest 30%.
bool stagnated(const std::deque<double>& h) {
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(0.3 * static_cast<double>(h.size())));
  std::vector<double> first(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<double> last(h.end() - static_cast<std::ptrdiff_t>(k), h.end());
  return !(median_of(std::move(last)) < median_of(std::move(first)));
}

}  // namespace

std::string_view to_string(Criterion c) noexcept { return kNames[static_cast<std::size_t>(c)]; }

std::optional<Criterion> criterion_from_string(std::string_view name) noexcept {
  for (Criterion c : kAllCriteria)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string join_criteria(const std::vector<Criterion>& triggered) {
  std::string out;
  for (Criterion c : triggered) {
    if (!out.empty()) out += ',';
    out += to_string(c);
  }
  return out;
}

void validate(const TerminationConfig& cfg) {
  if (!(cfg.tol_fun > 0.0) || !(cfg.tol_x_rel > 0.0) || !(cfg.max_cond > 0.0) ||
      !(cfg.tol_x_up > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "termination tolerances must be strictly positive");
  }
}

History::History(std::size_t n, std::size_t lambda, double initial_sigma, double initial_max_axis)
    : n_(n), lambda_(lambda), initial_sigma_(initial_sigma), initial_max_axis_(initial_max_axis) {
  if (n < 1 || lambda < 1) throw Error(ErrorCode::InvalidArgument, "history needs n, lambda >= 1");
}

History::History(std::size_t n, std::size_t lambda, double initial_sigma)
    : History(n, lambda, initial_sigma, initial_sigma) {}

std::size_t History::flat_window() const noexcept {
  return 10 + (30 * n_ + lambda_ - 1) / lambda_;
}

std::size_t History::min_stagnation_window() const noexcept {
  return 120 + (30 * n_ + lambda_ - 1) / lambda_;
}

std::size_t History::capacity() const noexcept {
  const auto grown = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(gen_count_)));
  return std::min(kMaxHistory, std::max(grown, min_stagnation_window()));
}

void History::record(double best, double median, std::span<const double> generation_fitnesses) {
  ++gen_count_;
  best_.push_back(best);
  median_.push_back(median);
  const std::size_t cap = capacity();
  while (best_.size() > cap) best_.pop_front();
  while (median_.size() > cap) median_.pop_front();
  last_generation_.assign(generation_fitnesses.begin(), generation_fitnesses.end());
}

void History::record(const GenerationReport& report) {
  record(report.best_fitness, report.median_fitness, report.ranked_fitnesses);
}

History History::restore(std::size_t n, std::size_t lambda, double initial_sigma,
                         double initial_max_axis, std::uint64_t gen_count,
                         std::deque<double> best, std::deque<double> median,
                         Vector last_generation) {
  History h(n, lambda, initial_sigma, initial_max_axis);
  h.gen_count_ = gen_count;
  h.best_ = std::move(best);
  h.median_ = std::move(median);
  h.last_generation_ = std::move(last_generation);
  return h;
}

std::vector<Criterion> check(const EngineState& state, const History& history,
                             const TerminationConfig& cfg) {
  const std::size_t n = state.params.n;
  const EigenSystem& es = state.eig;
  const double sigma = state.sigma;
  std::array<bool, 8> fired{};
  auto fire = [&](Criterion c) { fired[static_cast<std::size_t>(c)] = true; };

  {
    const std::size_t axis = static_cast<std::size_t>(state.generation % n);
    const double step = 0.1 * sigma * es.scales[axis];
    bool unchanged = true;
    for (std::size_t i = 0; i < n && unchanged; ++i)
      unchanged = (state.mean[i] + step * es.basis(i, axis) == state.mean[i]);
    if (unchanged) fire(Criterion::NoEffectAxis);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (state.mean[i] + 0.2 * sigma * std::sqrt(state.cov(i, i)) == state.mean[i]) {
      fire(Criterion::NoEffectCoord);
      break;
    }
  }

  if (condition_number(es) > cfg.max_cond) fire(Criterion::ConditionCov);

  const std::size_t window = history.flat_window();
  const auto& best = history.best();
  if (best.size() >= window) {
    const auto [lo, hi] = std::minmax_element(best.end() - static_cast<std::ptrdiff_t>(window), best.end());
    if (*hi - *lo == 0.0) fire(Criterion::EqualFunValues);

    double fmin = *lo, fmax = *hi;
    for (double f : history.last_generation()) {
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    if (fmax - fmin < cfg.tol_fun) fire(Criterion::TolFun);
  }

  if (best.size() >= history.min_stagnation_window() &&
      history.median().size() >= history.min_stagnation_window()) {
    if (stagnated(best) && stagnated(history.median())) fire(Criterion::Stagnation);
  }

  const double max_axis = sigma * *std::max_element(es.scales.begin(), es.scales.end());
  if (max_axis > cfg.tol_x_up * history.initial_max_axis()) fire(Criterion::TolXUp);

  {
    const double tol_x = cfg.tol_x_rel * history.initial_sigma();
    bool small = true;
    for (std::size_t i = 0; i < n && small; ++i) {
      small = sigma * std::sqrt(state.cov(i, i)) < tol_x && sigma * std::abs(state.p_c[i]) < tol_x;
    }
    if (small) fire(Criterion::TolX);
  }

  std::vector<Criterion> out;
  for (Criterion c : kAllCriteria) {
    if (fired[static_cast<std::size_t>(c)] && cfg.is_enabled(c)) out.push_back(c);
  }
  return out;
}

}  // namespace cmaes
