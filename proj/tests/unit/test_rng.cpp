#include <cmath>
#include <set>

#include "doctest.h"
#include "trigopt/errors.hpp"
#include "trigopt/rng.hpp"

using trigopt::Rng;
using trigopt::derive_seed;

TEST_CASE("derive_seed is deterministic and path sensitive") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));
}

TEST_CASE("uniform stays in [0, 1) and reproduces per seed") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
}

TEST_CASE("uniform_int covers the whole inclusive range") {
  Rng rng(7);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    std::int64_t v = rng.uniform_int(-2, 3);
    CHECK(v >= -2);
    CHECK(v <= 3);
    seen.insert(v);
  }
  CHECK(seen.size() == 6);
  CHECK_THROWS_AS(rng.uniform_int(4, 3), trigopt::ValidationError);
}

TEST_CASE("normal has roughly standard moments") {
  Rng rng(11);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("exponential has the requested rate") {
  Rng rng(13);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = rng.exponential(2.0);
    CHECK(x >= 0.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  CHECK_THROWS_AS(rng.exponential(0.0), trigopt::ValidationError);
}

TEST_CASE("shuffle permutes deterministically") {
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  Rng a(3);
  Rng b(3);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}
