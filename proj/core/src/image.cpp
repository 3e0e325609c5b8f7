#include "trigopt/image.hpp"

#include <algorithm>

#include "trigopt/errors.hpp"

namespace trigopt {

ImageTensor ImageTensor::zeros(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw ValidationError("ImageTensor: dimensions must be positive");
  }
  ImageTensor out;
  out.height = height;
  out.width = width;
  out.channels = channels;
  out.data.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
  return out;
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeMismatchError("image tensors differ in shape");
  }
}

void clip_unit(ImageTensor& image) {
  for (double& v : image.data) {
    v = std::clamp(v, 0.0, 1.0);
  }
}

}  // namespace trigopt
