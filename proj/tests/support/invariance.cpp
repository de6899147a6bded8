#include "invariance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cmaes/engine.hpp"
#include "cmaes/objectives.hpp"
#include "cmaes/state_io.hpp"
#include "random_matrices.hpp"

namespace testsupport {

using cmaes::DenseMatrix;
using cmaes::Engine;
using cmaes::EngineOptions;
using cmaes::Vector;

namespace {

using Map = std::function<Vector(const Vector&)>;

Vector start_mean(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed ^ 0x5bd1e995u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector m(n);
  for (double& x : m) x = u(gen);
  return m;
}

Vector mat_vec(const DenseMatrix& a, const Vector& v) {
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

// Drives both engines; `to_twin` maps reference-space vectors into the twin's
// coordinates and `cov_to_twin` does the same for C.
InvarianceReport drive(Engine& ref, Engine& twin, const std::function<double(const Vector&)>& f_ref,
                       const std::function<double(const Vector&)>& f_twin, std::size_t generations,
                       const Map& to_twin,
                       const std::function<double(const cmaes::SymMatrix&, const cmaes::SymMatrix&)>& cov_err) {
  InvarianceReport rep;
  for (std::size_t g = 0; g < generations; ++g) {
    cmaes::Population a = ref.ask();
    cmaes::Population b = twin.ask();
    Vector fa, fb;
    for (auto& c : a.candidates) fa.push_back(*(c.fitness = f_ref(c.x)));
    for (auto& c : b.candidates) fb.push_back(*(c.fitness = f_twin(c.x)));
    if (cmaes::rank(fa) != cmaes::rank(fb)) {
      rep.ranks_identical = false;
      break;
    }
    ref.tell(a);
    twin.tell(b);
    ++rep.generations;

    const auto& sa = ref.state();
    const auto& sb = twin.state();
    const Vector mapped = to_twin(sa.mean);
    for (std::size_t i = 0; i < mapped.size(); ++i)
      rep.mean_error = std::max(rep.mean_error, std::abs(mapped[i] - sb.mean[i]));
    rep.sigma_error = std::max(rep.sigma_error, std::abs(sa.sigma - sb.sigma) / sa.sigma);
    rep.cov_error = std::max(rep.cov_error, cov_err(sa.cov, sb.cov));
  }
  return rep;
}

double max_abs_diff_rel(const cmaes::SymMatrix& a, const cmaes::SymMatrix& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      diff = std::max(diff, std::abs(a(i, j) - b(i, j)));
      scale = std::max(scale, std::abs(a(i, j)));
    }
  return diff / scale;
}

}  // namespace

InvarianceReport monotone_invariance(const std::string& objective, std::size_t n,
                                     std::size_t generations, std::uint64_t seed,
                                     const std::function<double(double)>& h) {
  const cmaes::Objective f = cmaes::make_objective(objective, n);
  const Vector m0 = start_mean(n, seed);
  Engine a(cmaes::make_params(n), m0, 0.5, seed);
  Engine b(cmaes::make_params(n), m0, 0.5, seed);
  InvarianceReport rep = drive(
      a, b, [&](const Vector& x) { return f(x); }, [&](const Vector& x) { return h(f(x)); },
      generations, [](const Vector& v) { return v; }, max_abs_diff_rel);
  rep.state_bit_identical =
      cmaes::serialize_state(a.state()) == cmaes::serialize_state(b.state());
  return rep;
}

InvarianceReport translation_invariance(const std::string& objective, std::size_t n,
                                        std::size_t generations, std::uint64_t seed,
                                        double shift_scale) {
  const cmaes::Objective f = cmaes::make_objective(objective, n);
  std::mt19937_64 gen(seed + 17);
  std::normal_distribution<double> nd(0.0, shift_scale);
  Vector t(n);
  for (double& x : t) x = nd(gen);
  const Vector m0 = start_mean(n, seed);
  Vector m0t = m0;
  for (std::size_t i = 0; i < n; ++i) m0t[i] += t[i];

  Engine a(cmaes::make_params(n), m0, 0.5, seed);
  Engine b(cmaes::make_params(n), m0t, 0.5, seed);
  InvarianceReport rep = drive(
      a, b, [&](const Vector& x) { return f(x); },
      [&](const Vector& x) {
        Vector y = x;
        for (std::size_t i = 0; i < n; ++i) y[i] -= t[i];
        return f(y);
      },
      generations,
      [&](const Vector& v) {
        Vector y = v;
        for (std::size_t i = 0; i < n; ++i) y[i] += t[i];
        return y;
      },
      max_abs_diff_rel);
  rep.state_bit_identical = a.state().cov == b.state().cov && a.state().sigma == b.state().sigma;
  return rep;
}

InvarianceReport rotation_invariance(const std::string& objective, std::size_t n,
                                     std::size_t generations, std::uint64_t seed) {
  const cmaes::Objective f = cmaes::make_objective(objective, n);
  std::mt19937_64 gen(seed * 7919 + 1);
  const DenseMatrix r = random_orthogonal(n, gen);
  DenseMatrix rt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rt(i, j) = r(j, i);

  const Vector m0 = start_mean(n, seed);
  EngineOptions opts;
  opts.initial_basis = rt;
  Engine a(cmaes::make_params(n), m0, 0.5, seed);
  Engine b(cmaes::make_params(n), mat_vec(rt, m0), 0.5, seed, opts);

  const auto cov_err = [&](const cmaes::SymMatrix& c, const cmaes::SymMatrix& c_twin) {
    // R^T C R
    DenseMatrix tmp(n, n), rot(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += c(i, k) * r(k, j);
        tmp(i, j) = s;
      }
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += rt(i, k) * tmp(k, j);
        diff = std::max(diff, std::abs(s - c_twin(i, j)));
        scale = std::max(scale, std::abs(c(i, j)));
      }
    return diff / scale;
  };
  InvarianceReport rep = drive(
      a, b, [&](const Vector& x) { return f(x); }, [&](const Vector& x) { return f(mat_vec(r, x)); },
      generations, [&](const Vector& v) { return mat_vec(rt, v); }, cov_err);
  rep.state_bit_identical = false;
  return rep;
}

}  // namespace testsupport
