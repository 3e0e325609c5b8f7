#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace trigopt {

/// Mixes a seed with a path of integers so that independent random streams
/// can be derived from one master seed. Every run component (initial
/// population, per-member evaluation, per-generation variation, victim
/// training) draws from its own derived stream; this is what makes runs
/// reproducible independently of thread count or evaluation order.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Deterministic random source. All distributions are implemented by hand on
/// top of mt19937_64 because the standard library leaves distribution output
/// unspecified across implementations; results here are identical on any
/// conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform real in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform real in [lo, hi). Requires lo < hi.
  double uniform(double lo, double hi);

  /// Uniform integer in the inclusive range [lo, hi]. Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller. One variate per call, no cached spare.
  double normal();

  double normal(double mean, double stddev);

  /// Exponential with the given rate. Requires rate > 0.
  double exponential(double rate);

  /// Fisher-Yates shuffle, deterministic given the stream state.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(
          uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trigopt
