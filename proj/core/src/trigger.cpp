#include "trigopt/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

constexpr int kManifestVersion = 1;

void require_compatible(const ImageTensor& image, const Trigger& trigger) {
  if (trigger.region().height != image.height ||
      trigger.region().width != image.width) {
    throw ShapeMismatchError("trigger was built for a different image size");
  }
}

}  // namespace

Trigger::Trigger(std::vector<FrequencyBand> bands,
                 std::vector<double> magnitudes, double epsilon,
                 LowFreqRegion region)
    : bands_(std::move(bands)),
      magnitudes_(std::move(magnitudes)),
      epsilon_(epsilon),
      region_(region) {
  if (bands_.empty()) {
    throw ValidationError("Trigger: need at least one band");
  }
  if (bands_.size() != magnitudes_.size()) {
    throw ValidationError("Trigger: bands and magnitudes differ in length");
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw ValidationError("Trigger: epsilon must be positive and finite");
  }
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (!region_.contains(bands_[i])) {
      throw ValidationError("Trigger: band outside admissible region");
    }
    if (!std::isfinite(magnitudes_[i]) ||
        std::abs(magnitudes_[i]) > epsilon_) {
      throw ValidationError("Trigger: magnitude exceeds epsilon");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (bands_[i] == bands_[j]) {
        throw ValidationError("Trigger: duplicate band");
      }
    }
  }
}

Trigger random_trigger(const LowFreqRegion& region, int n_bands,
                       double epsilon, Rng& rng) {
  if (n_bands <= 0) {
    throw ValidationError("random_trigger: n_bands must be positive");
  }
  if (static_cast<long long>(n_bands) > region.band_count()) {
    throw ValidationError("random_trigger: more bands than region slots");
  }
  std::vector<FrequencyBand> bands;
  bands.reserve(static_cast<std::size_t>(n_bands));
  while (static_cast<int>(bands.size()) < n_bands) {
    FrequencyBand candidate{
        static_cast<int>(rng.uniform_int(0, region.rows - 1)),
        static_cast<int>(rng.uniform_int(0, region.cols - 1))};
    if (std::find(bands.begin(), bands.end(), candidate) == bands.end()) {
      bands.push_back(candidate);
    }
  }
  std::vector<double> magnitudes(static_cast<std::size_t>(n_bands));
  for (double& m : magnitudes) {
    m = rng.uniform(-epsilon, epsilon);
  }
  return Trigger(std::move(bands), std::move(magnitudes), epsilon, region);
}

ImageTensor inject_unclipped(const ImageTensor& image, const Trigger& trigger) {
  require_compatible(image, trigger);
  Spectrum spec = dct2(image);
  for (int c = 0; c < spec.channels; ++c) {
    for (int k = 0; k < trigger.band_count(); ++k) {
      const FrequencyBand& band = trigger.bands()[k];
      spec.at(band.u, band.v, c) += trigger.magnitudes()[k];
    }
  }
  return idct2(spec);
}

ImageTensor inject(const ImageTensor& image, const Trigger& trigger) {
  ImageTensor out = inject_unclipped(image, trigger);
  clip_unit(out);
  return out;
}

void validate(const PoisonSpec& spec) {
  if (!(spec.ratio > 0.0) || spec.ratio > 1.0) {
    throw ValidationError("PoisonSpec: ratio must be in (0, 1]");
  }
  if (spec.target_label < 0) {
    throw ValidationError("PoisonSpec: target label must be non-negative");
  }
}

PoisonSplit poison_dataset(const std::vector<LabeledSample>& samples,
                           const PoisonSpec& spec, const Trigger& trigger,
                           Rng& rng) {
  validate(spec);
  if (samples.empty()) {
    throw ValidationError("poison_dataset: empty dataset");
  }
  std::size_t count = static_cast<std::size_t>(
      std::ceil(spec.ratio * static_cast<double>(samples.size())));
  count = std::min(count, samples.size());

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::size_t> chosen(order.begin(),
                                  order.begin() + static_cast<long>(count));
  std::sort(chosen.begin(), chosen.end());

  PoisonSplit split;
  split.chosen = chosen;
  split.poisoned.reserve(count);
  split.clean.reserve(samples.size() - count);
  std::size_t next = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (next < chosen.size() && chosen[next] == i) {
      PoisonedSample p;
      p.image = inject(samples[i].image, trigger);
      p.label = spec.target_label;
      p.original_label = samples[i].label;
      split.poisoned.push_back(std::move(p));
      ++next;
    } else {
      split.clean.push_back(samples[i]);
    }
  }
  return split;
}

double objective_stealth(const Trigger& trigger) {
  return l2_norm(trigger.magnitudes());
}

double objective_lowfreq(const Trigger& trigger) {
  double acc = 0.0;
  for (const FrequencyBand& band : trigger.bands()) {
    acc += band_norm(band);
  }
  return acc;
}

double spatial_disparity(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::string trigger_manifest_json(const TriggerManifest& manifest) {
  nlohmann::json doc;
  doc["format_version"] = kManifestVersion;
  doc["height"] = manifest.trigger.region().height;
  doc["width"] = manifest.trigger.region().width;
  doc["channels"] = manifest.channels;
  doc["region_fraction"] = manifest.trigger.region().fraction;
  doc["epsilon"] = manifest.trigger.epsilon();
  nlohmann::json bands = nlohmann::json::array();
  for (const FrequencyBand& band : manifest.trigger.bands()) {
    bands.push_back({band.u, band.v});
  }
  doc["bands"] = bands;
  doc["magnitudes"] = manifest.trigger.magnitudes();
  return doc.dump(2) + "\n";
}

void save_trigger_manifest(const TriggerManifest& manifest,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("save_trigger_manifest: cannot open " + path);
  }
  out << trigger_manifest_json(manifest);
  if (!out) {
    throw DatasetError("save_trigger_manifest: write failed for " + path);
  }
}

TriggerManifest load_trigger_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("load_trigger_manifest: cannot open " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("load_trigger_manifest: bad JSON in " + path + ": " +
                       e.what());
  }
  static const char* const kKeys[] = {
      "format_version", "height",  "width",     "channels",
      "region_fraction", "epsilon", "bands",     "magnitudes"};
  for (const char* key : kKeys) {
    if (!doc.contains(key)) {
      throw DatasetError(std::string("load_trigger_manifest: missing key ") +
                         key);
    }
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) {
          return it.key() == k;
        }) == std::end(kKeys)) {
      throw DatasetError("load_trigger_manifest: unknown key " + it.key());
    }
  }
  if (doc["format_version"].get<int>() != kManifestVersion) {
    throw DatasetError("load_trigger_manifest: unsupported format version");
  }
  int height = doc["height"].get<int>();
  int width = doc["width"].get<int>();
  int channels = doc["channels"].get<int>();
  double fraction = doc["region_fraction"].get<double>();
  double epsilon = doc["epsilon"].get<double>();
  if (channels <= 0) {
    throw DatasetError("load_trigger_manifest: channels must be positive");
  }
  std::vector<FrequencyBand> bands;
  for (const auto& entry : doc["bands"]) {
    if (!entry.is_array() || entry.size() != 2) {
      throw DatasetError("load_trigger_manifest: band must be a [u, v] pair");
    }
    bands.push_back({entry[0].get<int>(), entry[1].get<int>()});
  }
  std::vector<double> magnitudes = doc["magnitudes"].get<std::vector<double>>();
  LowFreqRegion region = low_freq_region(height, width, fraction);
  try {
    Trigger trigger(std::move(bands), std::move(magnitudes), epsilon, region);
    return TriggerManifest{std::move(trigger), channels};
  } catch (const ValidationError& e) {
    throw DatasetError(std::string("load_trigger_manifest: ") + e.what());
  }
}

}  // namespace trigopt
