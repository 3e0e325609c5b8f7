#include "trigopt/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/pngio.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/spectrum.hpp"

namespace fs = std::filesystem;

namespace trigopt {

namespace {

constexpr int kManifestVersion = 1;
constexpr std::uint64_t kSignatureTag = 0x5160;
constexpr std::uint64_t kSampleTag = 0x5a3e;

struct ClassSignature {
  std::vector<FrequencyBand> bands;
  std::vector<double> amplitudes;  // bands.size() * channels, band-major
};

// Signatures live in the lower quarter of the grid (u, v < L/2, DC excluded)
// so classes differ in bands the classifier can separate cleanly.
std::vector<ClassSignature> draw_signatures(const SynthSpec& spec) {
  Rng rng(derive_seed(spec.seed, {kSignatureTag}));
  int u_lim = std::max(2, spec.height / 2);
  int v_lim = std::max(2, spec.width / 2);
  std::vector<ClassSignature> signatures;
  signatures.reserve(static_cast<std::size_t>(spec.classes));
  for (int k = 0; k < spec.classes; ++k) {
    ClassSignature sig;
    while (static_cast<int>(sig.bands.size()) < spec.signal_bands) {
      FrequencyBand band{static_cast<int>(rng.uniform_int(0, u_lim - 1)),
                         static_cast<int>(rng.uniform_int(0, v_lim - 1))};
      if (band.u == 0 && band.v == 0) {
        continue;
      }
      if (std::find(sig.bands.begin(), sig.bands.end(), band) !=
          sig.bands.end()) {
        continue;
      }
      sig.bands.push_back(band);
    }
    for (int b = 0; b < spec.signal_bands; ++b) {
      for (int c = 0; c < spec.channels; ++c) {
        double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        sig.amplitudes.push_back(sign * spec.signal_amplitude *
                                 rng.uniform(0.5, 1.0));
      }
    }
    signatures.push_back(std::move(sig));
  }
  return signatures;
}

ImageTensor synth_sample(const SynthSpec& spec, const ClassSignature& sig,
                         std::uint64_t sample_seed) {
  Rng rng(sample_seed);
  Spectrum spectrum =
      Spectrum::zeros(spec.height, spec.width, spec.channels);
  double dc = 0.5 * std::sqrt(static_cast<double>(spec.height) * spec.width);
  for (int c = 0; c < spec.channels; ++c) {
    spectrum.at(0, 0, c) = dc;
    for (std::size_t b = 0; b < sig.bands.size(); ++b) {
      spectrum.at(sig.bands[b].u, sig.bands[b].v, c) +=
          sig.amplitudes[b * static_cast<std::size_t>(spec.channels) +
                         static_cast<std::size_t>(c)];
    }
  }
  if (spec.noise_sigma > 0.0) {
    for (int c = 0; c < spec.channels; ++c) {
      for (int u = 0; u < spec.height; ++u) {
        for (int v = 0; v < spec.width; ++v) {
          if (u == 0 && v == 0) {
            continue;
          }
          double freq = std::sqrt(static_cast<double>(u) * u +
                                  static_cast<double>(v) * v);
          spectrum.at(u, v, c) +=
              rng.normal(0.0, spec.noise_sigma / std::max(1.0, freq));
        }
      }
    }
  }
  ImageTensor image = idct2(spectrum);
  clip_unit(image);
  return image;
}

void write_split(const SynthSpec& spec,
                 const std::vector<ClassSignature>& signatures,
                 const std::string& out_dir, const std::string& split,
                 int per_class, std::uint64_t split_tag,
                 const std::string& manifest_path) {
  DatasetManifest manifest;
  manifest.split = split;
  manifest.classes = spec.classes;
  manifest.height = spec.height;
  manifest.width = spec.width;
  manifest.channels = spec.channels;

  char name[64];
  for (int k = 0; k < spec.classes; ++k) {
    fs::path class_dir =
        fs::path(out_dir) / split / ("class_" + std::to_string(k));
    fs::create_directories(class_dir);
    for (int i = 0; i < per_class; ++i) {
      std::uint64_t sample_seed = derive_seed(
          spec.seed, {kSampleTag, split_tag, static_cast<std::uint64_t>(k),
                      static_cast<std::uint64_t>(i)});
      ImageTensor image = synth_sample(spec, signatures[k], sample_seed);
      std::snprintf(name, sizeof(name), "img_%05d.png", i);
      fs::path file = class_dir / name;
      write_png(file.string(), image);
      manifest.entries.push_back(
          {(fs::path(split) / ("class_" + std::to_string(k)) / name)
               .generic_string(),
           k});
    }
  }
  save_manifest(manifest, manifest_path);
}

}  // namespace

void validate(const DatasetManifest& manifest) {
  if (manifest.format_version != kManifestVersion) {
    throw DatasetError("manifest: unsupported format version");
  }
  if (manifest.classes < 2) {
    throw DatasetError("manifest: need at least two classes");
  }
  if (manifest.height <= 0 || manifest.width <= 0 || manifest.channels <= 0) {
    throw DatasetError("manifest: dimensions must be positive");
  }
  if (manifest.entries.empty()) {
    throw DatasetError("manifest: no entries");
  }
  for (const ManifestEntry& entry : manifest.entries) {
    if (entry.label < 0 || entry.label >= manifest.classes) {
      throw DatasetError("manifest: label out of range for " + entry.path);
    }
  }
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = manifest.format_version;
  doc["split"] = manifest.split;
  doc["classes"] = manifest.classes;
  doc["height"] = manifest.height;
  doc["width"] = manifest.width;
  doc["channels"] = manifest.channels;
  nlohmann::json entries = nlohmann::json::array();
  for (const ManifestEntry& entry : manifest.entries) {
    entries.push_back({{"path", entry.path}, {"label", entry.label}});
  }
  doc["entries"] = std::move(entries);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("save_manifest: cannot open " + path);
  }
  out << doc.dump(2) << "\n";
  if (!out) {
    throw DatasetError("save_manifest: write failed for " + path);
  }
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("load_manifest: cannot open " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("load_manifest: bad JSON in " + path + ": " + e.what());
  }
  static const char* const kKeys[] = {"format_version", "split",  "classes",
                                      "height",         "width",  "channels",
                                      "entries"};
  for (const char* key : kKeys) {
    if (!doc.contains(key)) {
      throw DatasetError(std::string("load_manifest: missing key ") + key);
    }
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find_if(std::begin(kKeys), std::end(kKeys), [&](const char* k) {
          return it.key() == k;
        }) == std::end(kKeys)) {
      throw DatasetError("load_manifest: unknown key " + it.key());
    }
  }
  DatasetManifest manifest;
  manifest.format_version = doc["format_version"].get<int>();
  manifest.split = doc["split"].get<std::string>();
  manifest.classes = doc["classes"].get<int>();
  manifest.height = doc["height"].get<int>();
  manifest.width = doc["width"].get<int>();
  manifest.channels = doc["channels"].get<int>();
  for (const auto& entry : doc["entries"]) {
    if (!entry.contains("path") || !entry.contains("label") ||
        entry.size() != 2) {
      throw DatasetError("load_manifest: entry must hold path and label");
    }
    manifest.entries.push_back(
        {entry["path"].get<std::string>(), entry["label"].get<int>()});
  }
  validate(manifest);
  return manifest;
}

void validate(const SynthSpec& spec) {
  if (spec.classes < 2) {
    throw ValidationError("SynthSpec: need at least two classes");
  }
  if (spec.height < 4 || spec.width < 4 || spec.channels < 1) {
    throw ValidationError("SynthSpec: dimensions too small");
  }
  if (spec.train_per_class < 1 || spec.test_per_class < 1) {
    throw ValidationError("SynthSpec: per-class counts must be positive");
  }
  long long slots = static_cast<long long>(std::max(2, spec.height / 2)) *
                        std::max(2, spec.width / 2) - 1;
  if (spec.signal_bands < 1 || spec.signal_bands > slots) {
    throw ValidationError("SynthSpec: signal_bands outside the signature area");
  }
  if (!(spec.signal_amplitude >= 0.0) || !(spec.noise_sigma >= 0.0)) {
    throw ValidationError("SynthSpec: amplitudes must be non-negative");
  }
}

GeneratedDataset generate_synthetic(const SynthSpec& spec,
                                    const std::string& out_dir) {
  validate(spec);
  fs::create_directories(out_dir);
  std::vector<ClassSignature> signatures = draw_signatures(spec);

  GeneratedDataset result;
  result.train_manifest =
      (fs::path(out_dir) / "train_manifest.json").string();
  result.test_manifest = (fs::path(out_dir) / "test_manifest.json").string();
  write_split(spec, signatures, out_dir, "train", spec.train_per_class, 1,
              result.train_manifest);
  write_split(spec, signatures, out_dir, "test", spec.test_per_class, 2,
              result.test_manifest);
  return result;
}

LoadedDataset load_dataset(const std::string& manifest_path) {
  LoadedDataset loaded;
  loaded.manifest = load_manifest(manifest_path);
  fs::path base = fs::path(manifest_path).parent_path();
  loaded.samples.reserve(loaded.manifest.entries.size());
  for (const ManifestEntry& entry : loaded.manifest.entries) {
    fs::path file = base / entry.path;
    ImageTensor image = read_png(file.string());
    if (image.height != loaded.manifest.height ||
        image.width != loaded.manifest.width ||
        image.channels != loaded.manifest.channels) {
      throw DatasetError("load_dataset: shape mismatch in " + file.string());
    }
    loaded.samples.push_back({std::move(image), entry.label});
  }
  return loaded;
}

std::string save_dataset(std::span<const LabeledSample> samples, int classes,
                         const std::string& dir, const std::string& split) {
  if (samples.empty()) {
    throw ValidationError("save_dataset: no samples");
  }
  DatasetManifest manifest;
  manifest.split = split;
  manifest.classes = classes;
  manifest.height = samples.front().image.height;
  manifest.width = samples.front().image.width;
  manifest.channels = samples.front().image.channels;

  char name[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const LabeledSample& sample = samples[i];
    if (sample.label < 0 || sample.label >= classes) {
      throw ValidationError("save_dataset: label out of range");
    }
    if (!sample.image.same_shape(samples.front().image)) {
      throw ShapeMismatchError("save_dataset: samples differ in shape");
    }
    fs::path class_dir =
        fs::path(dir) / split / ("class_" + std::to_string(sample.label));
    fs::create_directories(class_dir);
    std::snprintf(name, sizeof(name), "img_%05zu.png", i);
    write_png((class_dir / name).string(), sample.image);
    manifest.entries.push_back(
        {(fs::path(split) / ("class_" + std::to_string(sample.label)) / name)
             .generic_string(),
         sample.label});
  }
  std::string manifest_path =
      (fs::path(dir) / (split + "_manifest.json")).string();
  save_manifest(manifest, manifest_path);
  return manifest_path;
}

DatasetManifest manifest_from_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw DatasetError("manifest_from_directory: not a directory: " + dir);
  }
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      class_dirs.push_back(entry.path());
    }
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.size() < 2) {
    throw DatasetError("manifest_from_directory: need two class directories");
  }

  DatasetManifest manifest;
  manifest.split = fs::path(dir).filename().string();
  manifest.classes = static_cast<int>(class_dirs.size());
  for (std::size_t label = 0; label < class_dirs.size(); ++label) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[label])) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      if (manifest.height == 0) {
        ImageTensor probe = read_png(file.string());
        manifest.height = probe.height;
        manifest.width = probe.width;
        manifest.channels = probe.channels;
      }
      manifest.entries.push_back(
          {fs::relative(file, dir).generic_string(),
           static_cast<int>(label)});
    }
  }
  validate(manifest);
  return manifest;
}

}  // namespace trigopt
