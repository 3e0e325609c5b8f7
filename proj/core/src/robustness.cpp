#include "trigopt/robustness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

constexpr std::array<int, 64> kLuminanceTable = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

void require_odd_window(int window, const char* who) {
  if (window < 1 || window % 2 == 0) {
    throw ValidationError(std::string(who) + ": window must be odd and >= 1");
  }
}

// Orthonormal 8x8 cosine basis, row u = N(u) cos((2i+1) u pi / 16).
const std::array<double, 64>& block_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    for (int u = 0; u < 8; ++u) {
      double norm = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int i = 0; i < 8; ++i) {
        b[static_cast<std::size_t>(u) * 8 + i] =
            norm * std::cos((2.0 * i + 1.0) * u * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return basis;
}

void block_dct(const double in[64], double out[64]) {
  const auto& b = block_basis();
  double tmp[64];
  for (int u = 0; u < 8; ++u) {
    for (int j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 8; ++i) {
        acc += b[u * 8 + i] * in[i * 8 + j];
      }
      tmp[u * 8 + j] = acc;
    }
  }
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double acc = 0.0;
      for (int j = 0; j < 8; ++j) {
        acc += tmp[u * 8 + j] * b[v * 8 + j];
      }
      out[u * 8 + v] = acc;
    }
  }
}

void block_idct(const double in[64], double out[64]) {
  const auto& b = block_basis();
  double tmp[64];
  for (int i = 0; i < 8; ++i) {
    for (int v = 0; v < 8; ++v) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) {
        acc += b[u * 8 + i] * in[u * 8 + v];
      }
      tmp[i * 8 + v] = acc;
    }
  }
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) {
        acc += tmp[i * 8 + v] * b[v * 8 + j];
      }
      out[i * 8 + j] = acc;
    }
  }
}

}  // namespace

std::vector<double> gaussian_kernel(int window) {
  require_odd_window(window, "gaussian_kernel");
  double sigma = 0.3 * ((window - 1) * 0.5 - 1.0) + 0.8;
  int half = window / 2;
  std::vector<double> kernel(static_cast<std::size_t>(window));
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    double d = i - half;
    kernel[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += kernel[i];
  }
  for (double& k : kernel) {
    k /= sum;
  }
  return kernel;
}

ImageTensor gaussian_filter(const ImageTensor& image, int window) {
  std::vector<double> kernel = gaussian_kernel(window);
  int half = window / 2;
  ImageTensor horizontal = image;
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < window; ++k) {
          acc += kernel[k] *
                 image.at(y, clamp_index(x + k - half, image.width), c);
        }
        horizontal.at(y, x, c) = acc;
      }
    }
  }
  ImageTensor out = horizontal;
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        double acc = 0.0;
        for (int k = 0; k < window; ++k) {
          acc += kernel[k] *
                 horizontal.at(clamp_index(y + k - half, image.height), x, c);
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

ImageTensor wiener_filter(const ImageTensor& image, int window) {
  require_odd_window(window, "wiener_filter");
  int half = window / 2;
  double count = static_cast<double>(window) * window;
  ImageTensor out = image;
  std::vector<double> mean(image.data.size());
  std::vector<double> variance(image.data.size());

  for (int c = 0; c < image.channels; ++c) {
    double noise = 0.0;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int i = -half; i <= half; ++i) {
          for (int j = -half; j <= half; ++j) {
            double v = image.at(clamp_index(y + i, image.height),
                                clamp_index(x + j, image.width), c);
            sum += v;
            sum_sq += v * v;
          }
        }
        double mu = sum / count;
        std::size_t idx =
            (static_cast<std::size_t>(c) * image.height + y) * image.width + x;
        mean[idx] = mu;
        variance[idx] = std::max(0.0, sum_sq / count - mu * mu);
        noise += variance[idx];
      }
    }
    noise /= static_cast<double>(image.height) * image.width;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        std::size_t idx =
            (static_cast<std::size_t>(c) * image.height + y) * image.width + x;
        double local = variance[idx];
        double denom = std::max(local, noise);
        double gain = denom > 0.0 ? std::max(local - noise, 0.0) / denom : 0.0;
        out.at(y, x, c) = mean[idx] + gain * (image.at(y, x, c) - mean[idx]);
      }
    }
  }
  return out;
}

ImageTensor adjust_brightness(const ImageTensor& image, double factor) {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw ValidationError("adjust_brightness: factor must be >= 0");
  }
  ImageTensor out = image;
  for (double& v : out.data) {
    v = std::clamp(v * factor, 0.0, 1.0);
  }
  return out;
}

ImageTensor jpeg_compress(const ImageTensor& image, int quality) {
  if (quality < 1 || quality > 100) {
    throw ValidationError("jpeg_compress: quality must be in [1, 100]");
  }
  double scale = quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality;
  std::array<double, 64> table;
  for (int i = 0; i < 64; ++i) {
    double q = std::floor((kLuminanceTable[i] * scale + 50.0) / 100.0);
    table[i] = std::clamp(q, 1.0, 255.0);
  }

  ImageTensor out = image;
  double block_in[64];
  double coeff[64];
  double block_out[64];
  for (int c = 0; c < image.channels; ++c) {
    for (int by = 0; by < image.height; by += 8) {
      for (int bx = 0; bx < image.width; bx += 8) {
        for (int i = 0; i < 8; ++i) {
          for (int j = 0; j < 8; ++j) {
            double v = image.at(clamp_index(by + i, image.height),
                                clamp_index(bx + j, image.width), c);
            block_in[i * 8 + j] = v * 255.0 - 128.0;
          }
        }
        block_dct(block_in, coeff);
        for (int i = 0; i < 64; ++i) {
          coeff[i] = std::round(coeff[i] / table[i]) * table[i];
        }
        block_idct(coeff, block_out);
        for (int i = 0; i < 8 && by + i < image.height; ++i) {
          for (int j = 0; j < 8 && bx + j < image.width; ++j) {
            out.at(by + i, bx + j, c) =
                std::clamp((block_out[i * 8 + j] + 128.0) / 255.0, 0.0, 1.0);
          }
        }
      }
    }
  }
  return out;
}

PreprocessOp PreprocessOp::parse(const std::string& text) {
  PreprocessOp op;
  std::string kind = text;
  std::string arg;
  std::size_t colon = text.find(':');
  if (colon != std::string::npos) {
    kind = text.substr(0, colon);
    arg = text.substr(colon + 1);
  }
  try {
    if (kind == "identity") {
      if (!arg.empty()) {
        throw ValidationError("identity takes no argument");
      }
      op.kind = Kind::identity;
    } else if (kind == "gaussian") {
      op.kind = Kind::gaussian;
      op.window = std::stoi(arg);
    } else if (kind == "wiener") {
      op.kind = Kind::wiener;
      op.window = std::stoi(arg);
    } else if (kind == "brightness") {
      op.kind = Kind::brightness;
      op.factor = std::stod(arg);
    } else if (kind == "jpeg") {
      op.kind = Kind::jpeg;
      op.quality = std::stoi(arg);
    } else {
      throw ValidationError("unknown preprocessing op: " + text);
    }
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse preprocessing op: " + text);
  }
  validate(op);
  return op;
}

std::string PreprocessOp::name() const {
  char buf[48];
  switch (kind) {
    case Kind::identity:
      return "identity";
    case Kind::gaussian:
      std::snprintf(buf, sizeof(buf), "gaussian:%d", window);
      return buf;
    case Kind::wiener:
      std::snprintf(buf, sizeof(buf), "wiener:%d", window);
      return buf;
    case Kind::brightness:
      std::snprintf(buf, sizeof(buf), "brightness:%g", factor);
      return buf;
    case Kind::jpeg:
      std::snprintf(buf, sizeof(buf), "jpeg:%d", quality);
      return buf;
  }
  throw ValidationError("PreprocessOp: bad kind");
}

void validate(const PreprocessOp& op) {
  switch (op.kind) {
    case PreprocessOp::Kind::identity:
      return;
    case PreprocessOp::Kind::gaussian:
    case PreprocessOp::Kind::wiener:
      require_odd_window(op.window, "PreprocessOp");
      return;
    case PreprocessOp::Kind::brightness:
      if (!(op.factor >= 0.0) || !std::isfinite(op.factor)) {
        throw ValidationError("PreprocessOp: brightness factor must be >= 0");
      }
      return;
    case PreprocessOp::Kind::jpeg:
      if (op.quality < 1 || op.quality > 100) {
        throw ValidationError("PreprocessOp: jpeg quality must be in [1, 100]");
      }
      return;
  }
  throw ValidationError("PreprocessOp: bad kind");
}

ImageTensor apply(const PreprocessOp& op, const ImageTensor& image) {
  validate(op);
  switch (op.kind) {
    case PreprocessOp::Kind::identity:
      return image;
    case PreprocessOp::Kind::gaussian:
      return gaussian_filter(image, op.window);
    case PreprocessOp::Kind::wiener:
      return wiener_filter(image, op.window);
    case PreprocessOp::Kind::brightness:
      return adjust_brightness(image, op.factor);
    case PreprocessOp::Kind::jpeg:
      return jpeg_compress(image, op.quality);
  }
  throw ValidationError("PreprocessOp: bad kind");
}

std::vector<HarnessRow> robustness_harness(
    const ClassifierModel& victim, std::span<const LabeledSample> clean_test,
    std::span<const PoisonedSample> poisoned_test,
    std::span<const PreprocessOp> ops) {
  if (clean_test.empty()) {
    throw ValidationError("robustness_harness: no clean test samples");
  }
  std::vector<HarnessRow> rows;
  EvalReport base = loss_and_metrics(victim, clean_test, poisoned_test);
  rows.push_back({"original", base.acc, base.asr});

  std::vector<LabeledSample> clean_buf(clean_test.begin(), clean_test.end());
  std::vector<PoisonedSample> poisoned_buf(poisoned_test.begin(),
                                           poisoned_test.end());
  double acc_sum = 0.0;
  double asr_sum = 0.0;
  for (const PreprocessOp& op : ops) {
    for (std::size_t i = 0; i < clean_test.size(); ++i) {
      clean_buf[i].image = apply(op, clean_test[i].image);
    }
    for (std::size_t i = 0; i < poisoned_test.size(); ++i) {
      poisoned_buf[i].image = apply(op, poisoned_test[i].image);
    }
    EvalReport report = loss_and_metrics(victim, clean_buf, poisoned_buf);
    rows.push_back({op.name(), report.acc, report.asr});
    acc_sum += report.acc;
    asr_sum += report.asr;
  }
  if (!ops.empty()) {
    rows.push_back({"average", acc_sum / static_cast<double>(ops.size()),
                    asr_sum / static_cast<double>(ops.size())});
  }
  return rows;
}

}  // namespace trigopt
