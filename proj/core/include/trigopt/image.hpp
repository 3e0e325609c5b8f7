#pragma once

#include <cstddef>
#include <vector>

namespace trigopt {

/// Dense H x W x C image with double precision samples, planar layout:
/// element (y, x, c) lives at data[(c * height + y) * width + x].
/// Pixel values are nominally in [0, 1]; intermediates may leave that range.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  static ImageTensor zeros(int height, int width, int channels);

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  std::size_t value_count() const { return data.size(); }
  bool same_shape(const ImageTensor& other) const {
    return height == other.height && width == other.width &&
           channels == other.channels;
  }
};

/// Throws ShapeMismatchError unless both tensors share a shape.
void require_same_shape(const ImageTensor& a, const ImageTensor& b);

/// Clamps every value into [0, 1] in place.
void clip_unit(ImageTensor& image);

struct LabeledSample {
  ImageTensor image;
  int label = 0;
};

/// Sample whose pixels carry a trigger and whose label was reassigned to the
/// attack target. The pre-poisoning label is kept so that success statistics
/// can exclude samples that already belonged to the target class.
struct PoisonedSample {
  ImageTensor image;
  int label = 0;
  int original_label = 0;
};

}  // namespace trigopt
