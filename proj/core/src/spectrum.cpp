#include "trigopt/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

// Row u holds N(u,L) cos((2i+1) u pi / 2L) over i; the rows are orthonormal,
// so forward = B x B^T and inverse = B^T X B per channel.
std::vector<double> basis_matrix(int length) {
  std::vector<double> basis(static_cast<std::size_t>(length) * length);
  double norm0 = std::sqrt(1.0 / length);
  double norm = std::sqrt(2.0 / length);
  for (int u = 0; u < length; ++u) {
    for (int i = 0; i < length; ++i) {
      double angle =
          (2.0 * i + 1.0) * u * std::numbers::pi / (2.0 * length);
      basis[static_cast<std::size_t>(u) * length + i] =
          (u == 0 ? norm0 : norm) * std::cos(angle);
    }
  }
  return basis;
}

}  // namespace

Spectrum Spectrum::zeros(int height, int width, int channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw ValidationError("Spectrum: dimensions must be positive");
  }
  Spectrum out;
  out.height = height;
  out.width = width;
  out.channels = channels;
  out.coeffs.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
  return out;
}

double band_norm(const FrequencyBand& band) {
  return std::sqrt(static_cast<double>(band.u) * band.u +
                   static_cast<double>(band.v) * band.v);
}

LowFreqRegion low_freq_region(int height, int width, double fraction) {
  if (height <= 0 || width <= 0) {
    throw ValidationError("low_freq_region: dimensions must be positive");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ValidationError("low_freq_region: fraction must be in (0, 1]");
  }
  LowFreqRegion region;
  region.height = height;
  region.width = width;
  region.fraction = fraction;
  double side = std::sqrt(fraction);
  region.rows = static_cast<int>(std::ceil(side * height));
  region.cols = static_cast<int>(std::ceil(side * width));
  return region;
}

Spectrum dct2(const ImageTensor& image) {
  if (image.height <= 0 || image.width <= 0 || image.channels <= 0) {
    throw ValidationError("dct2: empty image");
  }
  int h = image.height;
  int w = image.width;
  std::vector<double> row_basis = basis_matrix(h);
  std::vector<double> col_basis = basis_matrix(w);

  Spectrum out = Spectrum::zeros(h, w, image.channels);
  std::vector<double> tmp(static_cast<std::size_t>(h) * w);
  for (int c = 0; c < image.channels; ++c) {
    const double* plane =
        image.data.data() + static_cast<std::size_t>(c) * h * w;
    // tmp[u][j] = sum_i B_h[u][i] x[i][j]
    for (int u = 0; u < h; ++u) {
      const double* brow = row_basis.data() + static_cast<std::size_t>(u) * h;
      for (int j = 0; j < w; ++j) {
        tmp[static_cast<std::size_t>(u) * w + j] = 0.0;
      }
      for (int i = 0; i < h; ++i) {
        double weight = brow[i];
        const double* src = plane + static_cast<std::size_t>(i) * w;
        double* dst = tmp.data() + static_cast<std::size_t>(u) * w;
        for (int j = 0; j < w; ++j) {
          dst[j] += weight * src[j];
        }
      }
    }
    // D[u][v] = sum_j tmp[u][j] B_w[v][j]
    double* coeff_plane =
        out.coeffs.data() + static_cast<std::size_t>(c) * h * w;
    for (int u = 0; u < h; ++u) {
      const double* trow = tmp.data() + static_cast<std::size_t>(u) * w;
      for (int v = 0; v < w; ++v) {
        const double* bcol =
            col_basis.data() + static_cast<std::size_t>(v) * w;
        double acc = 0.0;
        for (int j = 0; j < w; ++j) {
          acc += trow[j] * bcol[j];
        }
        coeff_plane[static_cast<std::size_t>(u) * w + v] = acc;
      }
    }
  }
  return out;
}

ImageTensor idct2(const Spectrum& spectrum) {
  if (spectrum.height <= 0 || spectrum.width <= 0 || spectrum.channels <= 0) {
    throw ValidationError("idct2: empty spectrum");
  }
  int h = spectrum.height;
  int w = spectrum.width;
  std::vector<double> row_basis = basis_matrix(h);
  std::vector<double> col_basis = basis_matrix(w);

  ImageTensor out = ImageTensor::zeros(h, w, spectrum.channels);
  std::vector<double> tmp(static_cast<std::size_t>(h) * w);
  for (int c = 0; c < spectrum.channels; ++c) {
    const double* coeff_plane =
        spectrum.coeffs.data() + static_cast<std::size_t>(c) * h * w;
    // tmp[i][v] = sum_u B_h[u][i] D[u][v]
    for (auto& v : tmp) {
      v = 0.0;
    }
    for (int u = 0; u < h; ++u) {
      const double* brow = row_basis.data() + static_cast<std::size_t>(u) * h;
      const double* src = coeff_plane + static_cast<std::size_t>(u) * w;
      for (int i = 0; i < h; ++i) {
        double weight = brow[i];
        double* dst = tmp.data() + static_cast<std::size_t>(i) * w;
        for (int v = 0; v < w; ++v) {
          dst[v] += weight * src[v];
        }
      }
    }
    // x[i][j] = sum_v tmp[i][v] B_w[v][j]
    double* plane = out.data.data() + static_cast<std::size_t>(c) * h * w;
    for (int i = 0; i < h; ++i) {
      const double* trow = tmp.data() + static_cast<std::size_t>(i) * w;
      double* dst = plane + static_cast<std::size_t>(i) * w;
      for (int j = 0; j < w; ++j) {
        dst[j] = 0.0;
      }
      for (int v = 0; v < w; ++v) {
        double weight = trow[v];
        const double* bcol =
            col_basis.data() + static_cast<std::size_t>(v) * w;
        for (int j = 0; j < w; ++j) {
          dst[j] += weight * bcol[j];
        }
      }
    }
  }
  return out;
}

double l2_norm(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) {
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace trigopt
