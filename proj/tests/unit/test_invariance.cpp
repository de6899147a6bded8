#include <cmath>
#include <string>

#include "doctest.h"
#include "invariance.hpp"

using namespace testsupport;

TEST_SUITE("invariance") {
  TEST_CASE("strictly increasing transforms leave the run bit-identical") {
    const std::function<double(double)> transforms[] = {
        [](double f) { return 2.0 * f; },
        [](double f) { return f * f; },
        [](double f) { return f * f * f; },
    };
    for (const auto& h : transforms) {
      for (const char* name : {"sphere", "elli", "rosenbrock"}) {
        const auto rep = monotone_invariance(name, 6, 200, 3, h);
        INFO(std::string(name));
        CHECK(rep.ranks_identical);
        CHECK(rep.generations == 200);
        CHECK(rep.state_bit_identical);
      }
    }
  }

  TEST_CASE("translation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto rep = translation_invariance("elli", 5, 150, seed, 10.0);
      INFO("seed " << seed << " mean " << rep.mean_error);
      CHECK(rep.ranks_identical);
      CHECK(rep.state_bit_identical);
      CHECK(rep.mean_error <= 1e-9);
    }
  }

  TEST_CASE("rotation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto rep = rotation_invariance("elli", 5, 150, seed);
      INFO("seed " << seed << " mean " << rep.mean_error << " sigma " << rep.sigma_error << " cov "
                   << rep.cov_error);
      CHECK(rep.ranks_identical);
      CHECK(rep.within(1e-9));
    }
  }
}
