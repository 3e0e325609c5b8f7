#include "trigopt/defense.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

void require_uniform_batch(std::span<const ImageTensor> images) {
  if (images.empty()) {
    throw ValidationError("defense: empty image batch");
  }
  for (const ImageTensor& image : images) {
    if (!image.same_shape(images.front())) {
      throw ShapeMismatchError("defense: batch images differ in shape");
    }
  }
}

}  // namespace

Spectrum average_spectrum(std::span<const ImageTensor> images) {
  require_uniform_batch(images);
  const ImageTensor& first = images.front();
  Spectrum acc = Spectrum::zeros(first.height, first.width, first.channels);
  for (const ImageTensor& image : images) {
    Spectrum s = dct2(image);
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) {
      acc.coeffs[i] += std::abs(s.coeffs[i]);
    }
  }
  for (double& v : acc.coeffs) {
    v /= static_cast<double>(images.size());
  }
  return acc;
}

RadialProfile radial_profile(std::span<const ImageTensor> images) {
  require_uniform_batch(images);
  const ImageTensor& first = images.front();
  int h = first.height;
  int w = first.width;
  int max_bin = static_cast<int>(std::floor(
      std::sqrt(static_cast<double>(h - 1) * (h - 1) +
                static_cast<double>(w - 1) * (w - 1))));

  std::vector<double> power(static_cast<std::size_t>(max_bin) + 1, 0.0);
  std::vector<long long> count(static_cast<std::size_t>(max_bin) + 1, 0);
  for (const ImageTensor& image : images) {
    Spectrum s = dct2(image);
    for (int c = 0; c < s.channels; ++c) {
      for (int u = 0; u < h; ++u) {
        for (int v = 0; v < w; ++v) {
          int bin = static_cast<int>(std::floor(
              std::sqrt(static_cast<double>(u) * u +
                        static_cast<double>(v) * v)));
          if (bin < 1) {
            continue;  // DC excluded
          }
          double coeff = s.at(u, v, c);
          power[bin] += coeff * coeff;
          ++count[bin];
        }
      }
    }
  }

  RadialProfile profile;
  for (int k = 1; k <= max_bin; ++k) {
    if (count[k] == 0) {
      continue;
    }
    profile.freqs.push_back(k);
    profile.magnitudes.push_back(power[k] / static_cast<double>(count[k]));
  }
  return profile;
}

double spectral_slope(const RadialProfile& profile) {
  if (profile.freqs.size() != profile.magnitudes.size()) {
    throw ValidationError("spectral_slope: malformed profile");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < profile.freqs.size(); ++i) {
    if (profile.magnitudes[i] <= 0.0) {
      continue;
    }
    xs.push_back(std::log(static_cast<double>(profile.freqs[i])));
    ys.push_back(std::log(profile.magnitudes[i]));
  }
  if (xs.size() < 2) {
    throw ValidationError("spectral_slope: need at least two usable bins");
  }
  double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mean_x) * (ys[i] - mean_y);
    den += (xs[i] - mean_x) * (xs[i] - mean_x);
  }
  if (den == 0.0) {
    throw ValidationError("spectral_slope: degenerate frequency axis");
  }
  return num / den;
}

DetectVerdict detect_anomaly(std::span<const ImageTensor> images,
                             double threshold) {
  DetectVerdict verdict;
  verdict.threshold = threshold;
  verdict.slope = spectral_slope(radial_profile(images));
  verdict.flagged = verdict.slope > threshold;
  return verdict;
}

void write_profile(const RadialProfile& profile, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("write_profile: cannot open " + path);
  }
  char line[64];
  for (std::size_t i = 0; i < profile.freqs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%d %.17g\n", profile.freqs[i],
                  profile.magnitudes[i]);
    out << line;
  }
  if (!out) {
    throw DatasetError("write_profile: write failed for " + path);
  }
}

}  // namespace trigopt
