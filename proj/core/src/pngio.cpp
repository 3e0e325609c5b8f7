#include "trigopt/pngio.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) {
      std::fclose(f);
    }
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const std::string& path, const ImageTensor& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw ValidationError("write_png: channels must be 1 or 3");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) {
    throw DatasetError("write_png: cannot open " + path);
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) {
    throw DatasetError("write_png: png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DatasetError("write_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DatasetError("write_png: libpng error writing " + path);
  }
  png_init_io(png, file.get());
  int color_type =
      image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, image.width, image.height, 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<std::size_t>(image.width) *
                            image.channels);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        double v = std::clamp(image.at(y, x, c), 0.0, 1.0);
        row[static_cast<std::size_t>(x) * image.channels + c] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageTensor read_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) {
    throw DatasetError("read_png: cannot open " + path);
  }
  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 ||
      png_sig_cmp(header, 0, 8) != 0) {
    throw DatasetError("read_png: not a PNG file: " + path);
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) {
    throw DatasetError("read_png: png_create_read_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DatasetError("read_png: png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DatasetError("read_png: libpng error reading " + path);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  int width = static_cast<int>(png_get_image_width(png, info));
  int height = static_cast<int>(png_get_image_height(png, info));
  int channels = static_cast<int>(png_get_channels(png, info));
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DatasetError("read_png: unsupported channel count in " + path);
  }

  std::vector<png_byte> raster(static_cast<std::size_t>(height) * width *
                               channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[y] = raster.data() + static_cast<std::size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ImageTensor out = ImageTensor::zeros(height, width, channels);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        out.at(y, x, c) =
            raster[(static_cast<std::size_t>(y) * width + x) * channels + c] /
            255.0;
      }
    }
  }
  return out;
}

}  // namespace trigopt
