#pragma once

#include "trigopt/image.hpp"
#include "trigopt/spectrum.hpp"

namespace trigopt {

/// Peak signal-to-noise ratio in dB for unit-range images:
/// 10 log10(1 / MSE). Identical inputs give +infinity.
double psnr(const ImageTensor& a, const ImageTensor& b);

/// Mean structural similarity over all fully valid 11x11 windows, Gaussian
/// weighted (sigma 1.5), stabilizers K1 = 0.01 and K2 = 0.03 at unit dynamic
/// range, averaged across channels. Requires both sides >= 11 pixels.
double ssim(const ImageTensor& a, const ImageTensor& b);

/// Element-wise magnitude of the coefficient difference between two images;
/// shows where in the spectrum a perturbation lives.
Spectrum spectral_residual(const ImageTensor& clean,
                           const ImageTensor& modified);

struct StealthReport {
  double l2 = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

StealthReport measure_stealth(const ImageTensor& clean,
                              const ImageTensor& modified);

/// Renders coefficient magnitudes as a single-channel image for export:
/// channel-averaged |coeff| times gain, optionally log(1 + x) compressed,
/// then normalized by the maximum (all-zero input stays black).
ImageTensor spectrum_to_image(const Spectrum& spectrum, double gain,
                              bool log_scale);

}  // namespace trigopt
