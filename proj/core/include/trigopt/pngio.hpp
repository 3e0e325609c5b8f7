#pragma once

#include <string>

#include "trigopt/image.hpp"

namespace trigopt {

/// Writes an 8-bit PNG. Channels must be 1 (grayscale) or 3 (RGB); values
/// are clamped to [0, 1] and quantized with round(v * 255).
void write_png(const std::string& path, const ImageTensor& image);

/// Reads an 8-bit PNG into [0, 1] doubles. Palette and 16-bit inputs are
/// normalized to 8-bit, alpha is dropped; result has 1 or 3 channels.
ImageTensor read_png(const std::string& path);

}  // namespace trigopt
