#include "termination_fixtures.hpp"

#include <cmath>

namespace testsupport {

using namespace cmaes;

Fixture fresh_fixture(std::size_t n) {
  Engine e(make_params(n), Vector(n, 0.5), 0.5, 1);
  return Fixture{e.state(), History(n, e.params().lambda, 0.5)};
}

namespace {

void set_eigensystem(EngineState& s, EigenSystem es) {
  s.cov = reconstruct(es);
  s.eig = std::move(es);
}

}  // namespace

Fixture trigger_fixture(Criterion c) {
  switch (c) {
    case Criterion::NoEffectAxis: {
      // The tiny principal axis is absorbed by m; the coordinates are not
      // because the axis is diagonal and the other one is long.
      Fixture f = fresh_fixture(2);
      EigenSystem es;
      const double h = 1.0 / std::sqrt(2.0);
      es.basis = DenseMatrix(2, 2);
      es.basis(0, 0) = h;
      es.basis(1, 0) = -h;
      es.basis(0, 1) = h;
      es.basis(1, 1) = h;
      es.scales = {1e-16, 1e-10};
      set_eigensystem(f.state, std::move(es));
      f.state.sigma = 1.0;
      f.state.mean = {1.0, 1.0};
      f.state.generation = 0;
      f.history = History(2, f.state.params.lambda, 1.0, 1.0);
      return f;
    }
    case Criterion::NoEffectCoord: {
      Fixture f = fresh_fixture(2);
      f.state.sigma = 1e-20;
      f.state.mean = {1.0, 0.0};
      f.state.generation = 1;  // tested axis sits on the zero coordinate
      f.history = History(2, f.state.params.lambda, 1e-20, 1e-20);
      return f;
    }
    case Criterion::ConditionCov: {
      Fixture f = fresh_fixture(2);
      set_eigensystem(f.state, eigendecompose(SymMatrix::diagonal({1.0, 1e15})));
      f.state.cov = SymMatrix::diagonal({1.0, 1e15});
      f.state.sigma = 1.0;
      f.state.mean = {0.0, 0.0};
      f.history = History(2, f.state.params.lambda, 1.0, std::sqrt(1e15));
      return f;
    }
    case Criterion::EqualFunValues: {
      Fixture f = fresh_fixture(3);
      for (std::size_t g = 0; g < f.history.flat_window(); ++g)
        f.history.record(4.0, 5.0, Vector{4.0, 5.0, 6.0});
      return f;
    }
    case Criterion::Stagnation: {
      Fixture f = fresh_fixture(3);
      const std::size_t len = f.history.min_stagnation_window();
      for (std::size_t g = 0; g < len; ++g) {
        const double b = 1.0 + 0.1 * static_cast<double>(g % 7);
        f.history.record(b, b + 1.0, Vector{b, b + 1.0, b + 2.0});
      }
      return f;
    }
    case Criterion::TolXUp: {
      Fixture f = fresh_fixture(3);
      f.state.sigma = 2e4;
      f.history = History(3, f.state.params.lambda, 1.0, 1.0);
      return f;
    }
    case Criterion::TolFun: {
      Fixture f = fresh_fixture(3);
      for (std::size_t g = 0; g < f.history.flat_window(); ++g) {
        const double b = 1.0 + 1e-14 * static_cast<double>(g % 3);
        f.history.record(b, b, Vector{b, b + 1e-14});
      }
      return f;
    }
    case Criterion::TolX: {
      Fixture f = fresh_fixture(3);
      f.state.sigma = 1e-13;
      f.state.mean = Vector(3, 0.0);
      f.history = History(3, f.state.params.lambda, 1.0, 1.0);
      return f;
    }
  }
  return fresh_fixture(2);
}

}  // namespace testsupport
