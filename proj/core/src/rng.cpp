#include "trigopt/rng.hpp"

#include <cmath>
#include <numbers>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

// SplitMix64 finalizer; good avalanche, cheap, and stable across platforms.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = mix(master);
  for (std::uint64_t step : path) {
    state = mix(state ^ mix(step));
  }
  return state;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo < hi)) {
    throw ValidationError("uniform: require lo < hi");
  }
  return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw ValidationError("uniform_int: require lo <= hi");
  }
  // Rejection sampling keeps the distribution exactly uniform.
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
  if (span == 0) {  // full 64-bit range
    return static_cast<std::int64_t>(next_u64());
  }
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

double Rng::normal() {
  // Box-Muller; u1 is shifted into (0, 1] so the log never sees zero.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw ValidationError("exponential: require rate > 0");
  }
  return -std::log(1.0 - uniform()) / rate;
}

}  // namespace trigopt
