#pragma once

#include <span>
#include <vector>

#include "trigopt/image.hpp"

namespace trigopt {

/// Per-channel frequency coefficients of an image, same planar layout as
/// ImageTensor: coefficient (u, v, c) at coeffs[(c * height + u) * width + v].
struct Spectrum {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> coeffs;

  static Spectrum zeros(int height, int width, int channels);

  double& at(int u, int v, int c) {
    return coeffs[(static_cast<std::size_t>(c) * height + u) * width + v];
  }
  double at(int u, int v, int c) const {
    return coeffs[(static_cast<std::size_t>(c) * height + u) * width + v];
  }

  bool same_shape(const Spectrum& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }
};

/// Frequency location: u indexes vertical frequency (rows), v horizontal.
struct FrequencyBand {
  int u = 0;
  int v = 0;

  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

/// Euclidean distance of a band from the spectrum origin.
double band_norm(const FrequencyBand& band);

/// Top-left rectangle of the coefficient grid holding roughly `fraction` of
/// all bands. Side lengths round up, so the realised share is >= fraction.
struct LowFreqRegion {
  int height = 0;    // spectrum height the region was built for
  int width = 0;     // spectrum width the region was built for
  double fraction = 0.0;
  int rows = 0;
  int cols = 0;

  bool contains(const FrequencyBand& band) const {
    return band.u >= 0 && band.u < rows && band.v >= 0 && band.v < cols;
  }
  long long band_count() const {
    return static_cast<long long>(rows) * cols;
  }
};

/// Builds the admissible low-frequency rectangle:
/// rows = ceil(sqrt(fraction) * H), cols = ceil(sqrt(fraction) * W).
/// Requires H, W > 0 and fraction in (0, 1].
LowFreqRegion low_freq_region(int height, int width, double fraction);

/// Orthonormal type-II cosine transform, applied to each channel:
///   D(u,v) = N(u,H) N(v,W) sum_{i,j} x(i,j) cos((2i+1)u pi / 2H)
///                                    cos((2j+1)v pi / 2W)
/// with N(0,L) = sqrt(1/L) and N(k,L) = sqrt(2/L) for k > 0. The transform
/// is an isometry: the l2 norm of the coefficients equals that of the pixels.
Spectrum dct2(const ImageTensor& image);

/// Exact inverse of dct2. Output is not clipped; callers that need valid
/// pixel data clamp to [0, 1] themselves.
ImageTensor idct2(const Spectrum& spectrum);

/// l2 norm of a value sequence.
double l2_norm(std::span<const double> values);

}  // namespace trigopt
