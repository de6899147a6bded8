#include "cmaes/rng.hpp"

#include <cmath>

namespace cmaes {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t leg) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (leg * 0xd1b54a32d192ed03ULL);
  return splitmix64(t);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256 Xoshiro256::from_state(const State& s) {
  Xoshiro256 g;
  g.s_ = s;
  return g;
}

std::uint64_t Xoshiro256::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

NormalSource::NormalSource(std::uint64_t seed) : base_(seed) {}

NormalSource NormalSource::from_state(const State& s) {
  NormalSource src(Xoshiro256::from_state(s.words));
  src.has_spare_ = s.has_spare;
  src.spare_ = s.spare;
  return src;
}

double NormalSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * base_.uniform() - 1.0;
    v = 2.0 * base_.uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

void NormalSource::fill(std::span<double> out) {
  for (double& x : out) x = next();
}

Vector NormalSource::normal_vector(std::size_t n) {
  Vector out(n);
  fill(out);
  return out;
}

NormalSource::State NormalSource::state() const {
  return State{base_.state(), has_spare_, spare_};
}

}  // namespace cmaes
