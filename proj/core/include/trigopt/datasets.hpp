#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trigopt/image.hpp"

namespace trigopt {

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  int label = 0;
};

struct DatasetManifest {
  int format_version = 1;
  std::string split;
  int classes = 0;
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<ManifestEntry> entries;
};

void validate(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

/// Parameters of the synthetic classification task. Every class gets a
/// fixed random signature of low/mid-band coefficients on a mid-gray
/// background; each sample adds spectral noise whose standard deviation
/// falls off as 1/f, so the batch power spectrum follows a 1/f^2 law.
struct SynthSpec {
  int classes = 4;
  int height = 16;
  int width = 16;
  int channels = 3;
  int train_per_class = 500;
  int test_per_class = 100;
  int signal_bands = 5;           // signature bands per class
  double signal_amplitude = 0.9;  // magnitude scale of signature bands
  double noise_sigma = 0.1;       // spectral noise scale at frequency 1
  std::uint64_t seed = 1;
};

void validate(const SynthSpec& spec);

struct GeneratedDataset {
  std::string train_manifest;
  std::string test_manifest;
};

/// Writes a train and a test split (PNG files plus manifests) under out_dir.
/// Bitwise reproducible: the same spec yields identical files.
GeneratedDataset generate_synthetic(const SynthSpec& spec,
                                    const std::string& out_dir);

struct LoadedDataset {
  DatasetManifest manifest;
  std::vector<LabeledSample> samples;  // manifest order
};

/// Reads every entry of a manifest; fails with the offending path on missing
/// files, shape mismatches or out-of-range labels.
LoadedDataset load_dataset(const std::string& manifest_path);

/// Writes samples as PNGs under dir/<split>/class_<label>/ plus a manifest
/// at dir/<split>_manifest.json; returns the manifest path.
std::string save_dataset(std::span<const LabeledSample> samples, int classes,
                         const std::string& dir, const std::string& split);

/// Scans a tree with one subdirectory per class (sorted name order defines
/// the label) and builds a manifest of the PNGs found there. Paths are kept
/// relative to `dir`; image dimensions are probed from the first file.
DatasetManifest manifest_from_directory(const std::string& dir);

}  // namespace trigopt
