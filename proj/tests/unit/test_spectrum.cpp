#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/spectrum.hpp"

using namespace trigopt;

namespace {

ImageTensor random_image(int h, int w, int c, Rng& rng) {
  ImageTensor image = ImageTensor::zeros(h, w, c);
  for (double& v : image.data) {
    v = rng.uniform();
  }
  return image;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("dct2 matches the direct evaluation of the analysis formula") {
  Rng rng(101);
  for (auto [h, w] : {std::pair{8, 8}, {16, 16}, {7, 5}, {12, 16}}) {
    ImageTensor image = random_image(h, w, 3, rng);
    Spectrum fast = dct2(image);
    Spectrum slow = oracle::dct2_direct(image);
    CHECK(max_abs_diff(fast.coeffs, slow.coeffs) < 1e-10);
  }
}

TEST_CASE("idct2 matches the direct synthesis formula") {
  Rng rng(102);
  ImageTensor image = random_image(9, 11, 2, rng);
  Spectrum spec = dct2(image);
  ImageTensor fast = idct2(spec);
  ImageTensor slow = oracle::idct2_direct(spec);
  CHECK(max_abs_diff(fast.data, slow.data) < 1e-10);
}

TEST_CASE("round trip reproduces the input") {
  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    ImageTensor image = random_image(16, 16, 3, rng);
    ImageTensor back = idct2(dct2(image));
    CHECK(max_abs_diff(image.data, back.data) < 1e-12);
  }
}

TEST_CASE("transform preserves the l2 norm") {
  Rng rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    ImageTensor image = random_image(16, 12, 3, rng);
    Spectrum spec = dct2(image);
    CHECK(l2_norm(image.data) ==
          doctest::Approx(l2_norm(spec.coeffs)).epsilon(1e-12));
  }
}

TEST_CASE("constant image concentrates in the DC coefficient") {
  ImageTensor image = ImageTensor::zeros(8, 8, 1);
  for (double& v : image.data) {
    v = 0.25;
  }
  Spectrum spec = dct2(image);
  CHECK(spec.at(0, 0, 0) == doctest::Approx(0.25 * 8.0).epsilon(1e-12));
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      if (u == 0 && v == 0) {
        continue;
      }
      CHECK(std::abs(spec.at(u, v, 0)) < 1e-12);
    }
  }
}

TEST_CASE("single coefficient inverts to the matching cosine product") {
  Spectrum spec = Spectrum::zeros(8, 8, 1);
  spec.at(2, 3, 0) = 1.0;
  ImageTensor image = idct2(spec);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double expected = std::sqrt(2.0 / 8.0) * std::sqrt(2.0 / 8.0) *
                        std::cos((2.0 * i + 1.0) * 2.0 * std::numbers::pi /
                                 16.0) *
                        std::cos((2.0 * j + 1.0) * 3.0 * std::numbers::pi /
                                 16.0);
      CHECK(image.at(i, j, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("channels transform independently") {
  Rng rng(105);
  ImageTensor image = random_image(8, 8, 3, rng);
  Spectrum whole = dct2(image);
  for (int c = 0; c < 3; ++c) {
    ImageTensor single = ImageTensor::zeros(8, 8, 1);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        single.at(y, x, 0) = image.at(y, x, c);
      }
    }
    Spectrum one = dct2(single);
    for (int u = 0; u < 8; ++u) {
      for (int v = 0; v < 8; ++v) {
        CHECK(whole.at(u, v, c) == doctest::Approx(one.at(u, v, 0)));
      }
    }
  }
}

TEST_CASE("low_freq_region uses ceil of the scaled side lengths") {
  LowFreqRegion region = low_freq_region(32, 32, 0.183);
  CHECK(region.rows == 14);
  CHECK(region.cols == 14);
  region = low_freq_region(64, 64, 0.183);
  CHECK(region.rows == 28);
  CHECK(region.cols == 28);
  region = low_freq_region(16, 16, 0.183);
  CHECK(region.rows == 7);
  CHECK(region.cols == 7);
  region = low_freq_region(16, 16, 1.0);
  CHECK(region.rows == 16);
  CHECK(region.cols == 16);

  CHECK(region.contains({0, 0}));
  CHECK(region.contains({15, 15}));
  CHECK_FALSE(region.contains({16, 0}));
  CHECK_FALSE(region.contains({-1, 0}));

  CHECK_THROWS_AS(low_freq_region(16, 16, 0.0), ValidationError);
  CHECK_THROWS_AS(low_freq_region(16, 16, 1.5), ValidationError);
  CHECK_THROWS_AS(low_freq_region(0, 16, 0.5), ValidationError);
}

TEST_CASE("band_norm is the Euclidean distance from the origin") {
  CHECK(band_norm({0, 0}) == 0.0);
  CHECK(band_norm({3, 4}) == doctest::Approx(5.0));
  CHECK(band_norm({1, 1}) == doctest::Approx(std::sqrt(2.0)));
}
