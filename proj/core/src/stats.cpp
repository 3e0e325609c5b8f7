#include "trigopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = rank;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("spearman: need two equal-length sequences");
  }
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  double n = static_cast<double>(x.size());
  double mean = (n + 1.0) / 2.0;
  double num = 0.0, den_x = 0.0, den_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    num += dx * dy;
    den_x += dx * dx;
    den_y += dy * dy;
  }
  if (den_x == 0.0 || den_y == 0.0) {
    throw ValidationError("spearman: constant input sequence");
  }
  return num / std::sqrt(den_x * den_y);
}

}  // namespace trigopt
