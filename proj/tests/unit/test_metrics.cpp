#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/metrics.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/trigger.hpp"

using namespace trigopt;

namespace {

ImageTensor gray_image(int h, int w, int c, double value) {
  ImageTensor img = ImageTensor::zeros(h, w, c);
  std::fill(img.data.begin(), img.data.end(), value);
  return img;
}

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
  Rng rng(seed);
  ImageTensor img = ImageTensor::zeros(h, w, c);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

}  // namespace

TEST_CASE("peak signal-to-noise ratio") {
  ImageTensor a = gray_image(8, 8, 3, 0.5);

  // identical images saturate to +infinity
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0.0);

  // [TRIVIAL] uniform offset 0.1: MSE = 0.01, 10 log10(1/0.01) = 20 dB
  ImageTensor b = gray_image(8, 8, 3, 0.6);
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));

  // offset 0.5 gives MSE 0.25 and about 6.02 dB
  ImageTensor c = gray_image(8, 8, 3, 1.0);
  CHECK(psnr(a, c) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));

  // symmetric in its arguments
  ImageTensor x = random_image(8, 8, 3, 1);
  ImageTensor y = random_image(8, 8, 3, 2);
  CHECK(psnr(x, y) == doctest::Approx(psnr(y, x)));

  CHECK_THROWS_AS(psnr(a, gray_image(4, 4, 3, 0.5)), ShapeMismatchError);
}

TEST_CASE("structural similarity basics") {
  // identical inputs score exactly 1
  ImageTensor a = random_image(16, 16, 3, 7);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  // constant pair at different levels scores below 1
  ImageTensor white = gray_image(16, 16, 1, 1.0);
  ImageTensor dark = gray_image(16, 16, 1, 0.2);
  double s = ssim(white, dark);
  CHECK(s < 1.0);
  CHECK(s > 0.0);

  // symmetric
  ImageTensor b = random_image(16, 16, 3, 8);
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));

  // heavy noise hurts more than a faint perturbation
  ImageTensor mild = a;
  ImageTensor harsh = a;
  Rng rng(3);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double n = rng.normal();
    mild.data[i] = std::clamp(mild.data[i] + 0.01 * n, 0.0, 1.0);
    harsh.data[i] = std::clamp(harsh.data[i] + 0.5 * n, 0.0, 1.0);
  }
  CHECK(ssim(a, mild) > ssim(a, harsh));
  CHECK(ssim(a, mild) > 0.9);

  // an 11 x 11 image has exactly one valid window and still works
  ImageTensor tiny = random_image(11, 11, 1, 9);
  CHECK(ssim(tiny, tiny) == doctest::Approx(1.0));
  // anything smaller cannot host the window
  ImageTensor small = random_image(10, 10, 1, 9);
  CHECK_THROWS_AS(ssim(small, small), ValidationError);
  CHECK_THROWS_AS(ssim(a, gray_image(16, 16, 1, 0.5)), ShapeMismatchError);
}

TEST_CASE("constant-shift similarity follows the luminance term") {
  // For two constant images the structure and contrast terms are exactly 1,
  // so the score reduces to (2 m1 m2 + C1) / (m1^2 + m2^2 + C1).
  double m1 = 0.3, m2 = 0.5;
  double c1 = 0.01 * 0.01;
  double expected = (2 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
  ImageTensor a = gray_image(16, 16, 1, m1);
  ImageTensor b = gray_image(16, 16, 1, m2);
  CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-9));  // [DERIVED]
}

TEST_CASE("spectral residual localizes an injected trigger") {
  LowFreqRegion region = low_freq_region(16, 16, 0.183);
  Trigger t({{1, 2}, {4, 0}}, {0.3, -0.2}, 0.5, region);
  ImageTensor img = gray_image(16, 16, 3, 0.5);
  ImageTensor poisoned = inject_unclipped(img, t);

  Spectrum res = spectral_residual(img, poisoned);
  for (int c = 0; c < 3; ++c) {
    CHECK(res.at(1, 2, c) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(res.at(4, 0, c) == doctest::Approx(0.2).epsilon(1e-9));
  }
  // everything else is numerically zero
  double off_band = 0.0;
  for (int u = 0; u < 16; ++u) {
    for (int v = 0; v < 16; ++v) {
      if ((u == 1 && v == 2) || (u == 4 && v == 0)) continue;
      off_band = std::max(off_band, res.at(u, v, 0));
    }
  }
  CHECK(off_band < 1e-9);

  // mirrors the direct-transform definition on arbitrary pairs
  ImageTensor x = random_image(12, 10, 2, 4);
  ImageTensor y = random_image(12, 10, 2, 5);
  Spectrum got = spectral_residual(x, y);
  Spectrum sx = oracle::dct2_direct(x);
  Spectrum sy = oracle::dct2_direct(y);
  for (std::size_t i = 0; i < got.coeffs.size(); ++i) {
    CHECK(got.coeffs[i] ==
          doctest::Approx(std::abs(sy.coeffs[i] - sx.coeffs[i])).epsilon(1e-9));
  }
}

TEST_CASE("stealth report bundles the three measures consistently") {
  LowFreqRegion region = low_freq_region(16, 16, 0.183);
  Trigger t({{0, 1}, {2, 2}}, {0.05, -0.04}, 0.5, region);
  ImageTensor img = gray_image(16, 16, 3, 0.5);
  ImageTensor poisoned = inject(img, t);  // far from the clip rails

  StealthReport r = measure_stealth(img, poisoned);
  CHECK(r.l2 == doctest::Approx(spatial_disparity(img, poisoned)));
  CHECK(r.psnr == doctest::Approx(psnr(img, poisoned)));
  CHECK(r.ssim == doctest::Approx(ssim(img, poisoned)));
  // a tiny trigger keeps the image close to the original
  CHECK(r.psnr > 30.0);
  CHECK(r.ssim > 0.9);
  // the transform is an isometry, so l2 equals the magnitude norm here
  double mag_norm = std::sqrt(3.0 * (0.05 * 0.05 + 0.04 * 0.04));
  CHECK(r.l2 == doctest::Approx(mag_norm).epsilon(1e-9));
}

TEST_CASE("spectrum rendering normalizes to the unit range") {
  Spectrum s = Spectrum::zeros(8, 8, 2);
  s.at(0, 0, 0) = 4.0;
  s.at(0, 0, 1) = 2.0;
  s.at(3, 5, 0) = -1.5;
  s.at(3, 5, 1) = 0.5;

  ImageTensor img = spectrum_to_image(s, 1.0, false);
  REQUIRE(img.channels == 1);
  REQUIRE(img.height == 8);
  REQUIRE(img.width == 8);
  // the strongest cell maps to exactly 1, others scale linearly
  CHECK(img.at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(img.at(3, 5, 0) == doctest::Approx(1.0 / 3.0));  // (1.5+0.5)/2 over 3
  CHECK(img.at(7, 7, 0) == doctest::Approx(0.0));
  for (double v : img.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // log compression keeps ordering and the unit maximum
  ImageTensor logged = spectrum_to_image(s, 1.0, true);
  CHECK(logged.at(0, 0, 0) == doctest::Approx(1.0));
  CHECK(logged.at(3, 5, 0) > img.at(3, 5, 0));

  // an all-zero spectrum stays black instead of dividing by zero
  Spectrum zero = Spectrum::zeros(4, 4, 1);
  ImageTensor black = spectrum_to_image(zero, 2.0, true);
  for (double v : black.data) CHECK(v == 0.0);

  CHECK_THROWS_AS(spectrum_to_image(s, 0.0, false), ValidationError);
  CHECK_THROWS_AS(spectrum_to_image(s, -1.0, true), ValidationError);
}
