#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trigopt/config.hpp"
#include "trigopt/datasets.hpp"
#include "trigopt/robustness.hpp"

namespace trigopt {

/// Creates a fresh <root>/<name>_<UTC timestamp>_s<seed> directory, adding a
/// numeric suffix instead of ever reusing an existing one.
std::filesystem::path make_run_dir(const std::string& root,
                                   const std::string& name,
                                   std::uint64_t seed);

/// Writes a synthetic dataset into out_dir (which must not already hold
/// files) and prints a one-line summary. Returns out_dir.
std::filesystem::path cmd_gen_data(const SynthSpec& spec,
                                   const std::string& out_dir);

struct OptimizeOptions {
  std::string out_root = "runs";
  bool plot = false;
};

/// Full attack run: pretrains the surrogate, runs the evolutionary search,
/// persists per-generation populations, the winning trigger, a victim model
/// trained on the poisoned data and a summary. Returns the run directory.
std::filesystem::path cmd_optimize(const RunConfig& cfg,
                                   const OptimizeOptions& opts);

struct PoisonArgs {
  std::string train_manifest;
  std::string trigger_path;
  std::string out_root = "runs";
  double ratio = 0.05;
  int target_label = 0;
  std::uint64_t seed = 1;
};

/// Writes the poisoned copy of a dataset plus a log of what was replaced.
std::filesystem::path cmd_poison(const PoisonArgs& args);

/// Trains a victim on a poisoned copy of the training split and reports
/// accuracy and attack success on the test split. Saves the victim model.
std::filesystem::path cmd_eval(const RunConfig& cfg,
                               const std::string& trigger_path,
                               const std::string& out_root);

struct RobustnessArgs {
  std::string victim_checkpoint;
  std::string test_manifest;
  std::string trigger_path;
  std::string out_root = "runs";
  int target_label = 0;
  std::vector<PreprocessOp> ops;
};

/// Measures a trained victim under input preprocessing; writes the op table.
std::filesystem::path cmd_robustness(const RobustnessArgs& args);

struct InspectArgs {
  std::string data_manifest;
  std::string trigger_path;
  std::string out_root = "runs";
  int samples = 16;
  double gain = 5.0;
};

/// Renders averaged clean/poisoned spectra and the residual map for the
/// first --samples images, plus numeric stealth metrics.
std::filesystem::path cmd_inspect(const InspectArgs& args);

struct DetectArgs {
  std::string data_manifest;
  std::string out_root = "runs";
  double threshold = -1.5;
};

/// Spectral-slope anomaly check over a whole split.
std::filesystem::path cmd_detect(const DetectArgs& args);

struct SweepArgs {
  std::vector<double> alphas;  // empty = 0.0, 0.1, ..., 1.0
  int repeats = 5;
  std::string out_root = "runs";
};

/// Scalarized single-objective baseline sweep over the weight alpha;
/// records the failure-rate / perturbation-size trade-off per repeat.
std::filesystem::path cmd_baseline_sweep(const RunConfig& cfg,
                                         const SweepArgs& args);

}  // namespace trigopt
