#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "cmaes/linalg.hpp"

namespace cmaes {

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic seed for restart leg `leg` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t leg);

/// xoshiro256** base generator.
class Xoshiro256 {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit Xoshiro256(std::uint64_t seed);
  static Xoshiro256 from_state(const State& s);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  const State& state() const noexcept { return s_; }

 private:
  Xoshiro256() = default;
  State s_{};
};

/// Standard-normal variates from polar Box-Muller over xoshiro256**.
/// Both variates of every accepted pair are used. Single-owner.
class NormalSource {
 public:
  struct State {
    Xoshiro256::State words{};
    bool has_spare = false;
    double spare = 0.0;

    bool operator==(const State&) const = default;
  };

  explicit NormalSource(std::uint64_t seed);
  static NormalSource from_state(const State& s);

  double next();
  Vector normal_vector(std::size_t n);
  void fill(std::span<double> out);

  State state() const;

 private:
  explicit NormalSource(Xoshiro256 base) : base_(base) {}

  Xoshiro256 base_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cmaes
