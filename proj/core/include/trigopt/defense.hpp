#pragma once

#include <span>
#include <string>
#include <vector>

#include "trigopt/image.hpp"
#include "trigopt/spectrum.hpp"

namespace trigopt {

/// Mean absolute coefficient per (u, v, channel) across a batch.
Spectrum average_spectrum(std::span<const ImageTensor> images);

/// Radially binned coefficient power: bin k >= 1 collects bands with
/// floor(sqrt(u^2 + v^2)) == k; the DC term is excluded. magnitudes[i] is
/// the mean squared coefficient over that bin's bands, all channels and all
/// images. Empty bins are dropped.
struct RadialProfile {
  std::vector<int> freqs;
  std::vector<double> magnitudes;
};

RadialProfile radial_profile(std::span<const ImageTensor> images);

/// Least-squares slope of log(magnitude) against log(frequency). Natural
/// image batches follow a power law with slope near -2; energy added to
/// high bands makes the slope less negative. Bins with non-positive power
/// are skipped; at least two usable bins are required.
double spectral_slope(const RadialProfile& profile);

struct DetectVerdict {
  double slope = 0.0;
  double threshold = 0.0;
  bool flagged = false;
};

/// Flags a batch whose spectral slope exceeds the threshold.
DetectVerdict detect_anomaly(std::span<const ImageTensor> images,
                             double threshold);

/// Two-column text file: frequency and binned power per line.
void write_profile(const RadialProfile& profile, const std::string& path);

}  // namespace trigopt
