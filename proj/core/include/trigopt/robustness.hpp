#pragma once

#include <span>
#include <string>
#include <vector>

#include "trigopt/image.hpp"
#include "trigopt/surrogate.hpp"

namespace trigopt {

/// Separable Gaussian blur with replicate border padding. The window must be
/// odd; sigma follows the usual window-derived rule
/// 0.3 ((w - 1) / 2 - 1) + 0.8.
ImageTensor gaussian_filter(const ImageTensor& image, int window);

/// Normalized 1-D blur kernel used by gaussian_filter, exposed for tests.
std::vector<double> gaussian_kernel(int window);

/// Adaptive local-mean denoiser: windows with variance at or below the image
/// noise floor (the mean local variance) collapse to their mean, windows far
/// above it stay close to the input. Replicate padding; odd window.
ImageTensor wiener_filter(const ImageTensor& image, int window);

/// Multiplies by factor and clips to [0, 1]. factor must be >= 0 and finite.
ImageTensor adjust_brightness(const ImageTensor& image, double factor);

/// Lossy 8x8 block compression modelled on baseline JPEG: per channel,
/// values are scaled to [0, 255], level-shifted by -128, transformed with
/// the orthonormal 8x8 cosine transform, quantized with the standard
/// luminance table scaled by quality in [1, 100], dequantized and inverted.
/// Edge blocks use replicate padding.
ImageTensor jpeg_compress(const ImageTensor& image, int quality);

struct PreprocessOp {
  enum class Kind { identity, gaussian, wiener, brightness, jpeg };

  Kind kind = Kind::identity;
  int window = 3;        // gaussian, wiener
  double factor = 1.0;   // brightness
  int quality = 90;      // jpeg

  /// "identity", "gaussian:3", "wiener:5", "brightness:1.2", "jpeg:90".
  static PreprocessOp parse(const std::string& text);
  std::string name() const;
};

void validate(const PreprocessOp& op);

ImageTensor apply(const PreprocessOp& op, const ImageTensor& image);

struct HarnessRow {
  std::string op;  // "original", an op name, or "average"
  double acc = 0.0;
  double asr = 0.0;
};

/// Measures accuracy and attack success under input preprocessing: first an
/// untouched baseline row, one row per op (applied to clean and poisoned
/// test images alike), then an "average" row holding the arithmetic mean of
/// the per-op rows. The baseline is excluded from the average.
std::vector<HarnessRow> robustness_harness(
    const ClassifierModel& victim, std::span<const LabeledSample> clean_test,
    std::span<const PoisonedSample> poisoned_test,
    std::span<const PreprocessOp> ops);

}  // namespace trigopt
