#include "trigopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trigopt/errors.hpp"
#include "trigopt/trigger.hpp"

namespace trigopt {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;  // (K1 L)^2, L = 1
constexpr double kSsimC2 = 0.03 * 0.03;  // (K2 L)^2

std::vector<double> ssim_window_weights() {
  std::vector<double> w(kSsimWindow * kSsimWindow);
  int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    for (int j = 0; j < kSsimWindow; ++j) {
      double dy = i - half;
      double dx = j - half;
      double v = std::exp(-(dy * dy + dx * dx) / (2.0 * kSsimSigma * kSsimSigma));
      w[static_cast<std::size_t>(i) * kSsimWindow + j] = v;
      sum += v;
    }
  }
  for (double& v : w) {
    v /= sum;
  }
  return w;
}

}  // namespace

double psnr(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b);
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b);
  if (a.height < kSsimWindow || a.width < kSsimWindow) {
    throw ValidationError("ssim: image smaller than the 11x11 window");
  }
  static const std::vector<double> weights = ssim_window_weights();

  double channel_acc = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    double window_acc = 0.0;
    std::size_t windows = 0;
    for (int y = 0; y + kSsimWindow <= a.height; ++y) {
      for (int x = 0; x + kSsimWindow <= a.width; ++x) {
        double mu_a = 0.0, mu_b = 0.0;
        for (int i = 0; i < kSsimWindow; ++i) {
          for (int j = 0; j < kSsimWindow; ++j) {
            double w = weights[static_cast<std::size_t>(i) * kSsimWindow + j];
            mu_a += w * a.at(y + i, x + j, c);
            mu_b += w * b.at(y + i, x + j, c);
          }
        }
        double var_a = 0.0, var_b = 0.0, cov = 0.0;
        for (int i = 0; i < kSsimWindow; ++i) {
          for (int j = 0; j < kSsimWindow; ++j) {
            double w = weights[static_cast<std::size_t>(i) * kSsimWindow + j];
            double da = a.at(y + i, x + j, c) - mu_a;
            double db = b.at(y + i, x + j, c) - mu_b;
            var_a += w * da * da;
            var_b += w * db * db;
            cov += w * da * db;
          }
        }
        double numer = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
        double denom = (mu_a * mu_a + mu_b * mu_b + kSsimC1) *
                       (var_a + var_b + kSsimC2);
        window_acc += numer / denom;
        ++windows;
      }
    }
    channel_acc += window_acc / static_cast<double>(windows);
  }
  return channel_acc / static_cast<double>(a.channels);
}

Spectrum spectral_residual(const ImageTensor& clean,
                           const ImageTensor& modified) {
  require_same_shape(clean, modified);
  Spectrum sc = dct2(clean);
  Spectrum sm = dct2(modified);
  Spectrum out = Spectrum::zeros(sc.height, sc.width, sc.channels);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] = std::abs(sm.coeffs[i] - sc.coeffs[i]);
  }
  return out;
}

StealthReport measure_stealth(const ImageTensor& clean,
                              const ImageTensor& modified) {
  StealthReport report;
  report.l2 = spatial_disparity(clean, modified);
  report.psnr = psnr(clean, modified);
  report.ssim = ssim(clean, modified);
  return report;
}

ImageTensor spectrum_to_image(const Spectrum& spectrum, double gain,
                              bool log_scale) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw ValidationError("spectrum_to_image: gain must be positive");
  }
  ImageTensor out = ImageTensor::zeros(spectrum.height, spectrum.width, 1);
  double max_value = 0.0;
  for (int u = 0; u < spectrum.height; ++u) {
    for (int v = 0; v < spectrum.width; ++v) {
      double acc = 0.0;
      for (int c = 0; c < spectrum.channels; ++c) {
        acc += std::abs(spectrum.at(u, v, c));
      }
      double value = gain * acc / spectrum.channels;
      if (log_scale) {
        value = std::log1p(value);
      }
      out.at(u, v, 0) = value;
      max_value = std::max(max_value, value);
    }
  }
  if (max_value > 0.0) {
    for (double& v : out.data) {
      v /= max_value;
    }
  }
  return out;
}

}  // namespace trigopt
