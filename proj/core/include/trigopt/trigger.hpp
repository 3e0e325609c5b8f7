#pragma once

#include <string>
#include <utility>
#include <vector>

#include "trigopt/image.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/spectrum.hpp"

namespace trigopt {

/// Additive frequency-domain perturbation: n distinct bands inside an
/// admissible low-frequency region, one signed magnitude per band. All
/// invariants (distinct bands, containment, |magnitude| <= epsilon) are
/// checked at construction, so a Trigger instance is always well formed.
class Trigger {
 public:
  Trigger(std::vector<FrequencyBand> bands, std::vector<double> magnitudes,
          double epsilon, LowFreqRegion region);

  const std::vector<FrequencyBand>& bands() const { return bands_; }
  const std::vector<double>& magnitudes() const { return magnitudes_; }
  double epsilon() const { return epsilon_; }
  const LowFreqRegion& region() const { return region_; }
  int band_count() const { return static_cast<int>(bands_.size()); }

 private:
  std::vector<FrequencyBand> bands_;
  std::vector<double> magnitudes_;
  double epsilon_ = 0.0;
  LowFreqRegion region_;
};

/// Draws a trigger with n distinct uniform bands and magnitudes uniform in
/// [-epsilon, epsilon].
Trigger random_trigger(const LowFreqRegion& region, int n_bands,
                       double epsilon, Rng& rng);

/// Adds magnitude k at band k on every channel of the image's spectrum and
/// inverts. Result is clamped to [0, 1].
ImageTensor inject(const ImageTensor& image, const Trigger& trigger);

/// Same as inject but without the final clamp; used where exact linearity
/// of the pipeline matters.
ImageTensor inject_unclipped(const ImageTensor& image, const Trigger& trigger);

/// Poisoning policy: fraction of samples to convert and the label they all
/// receive.
struct PoisonSpec {
  double ratio = 0.05;
  int target_label = 0;
};

void validate(const PoisonSpec& spec);

struct PoisonSplit {
  std::vector<LabeledSample> clean;      // untouched remainder, input order
  std::vector<PoisonedSample> poisoned;  // ascending original index
  std::vector<std::size_t> chosen;       // original indices of poisoned
};

/// Selects ceil(N * ratio) distinct samples uniformly at random, injects the
/// trigger into each and relabels them to the target class. Requires a
/// non-empty dataset; ratio in (0, 1] guarantees at least one pick.
PoisonSplit poison_dataset(const std::vector<LabeledSample>& samples,
                           const PoisonSpec& spec, const Trigger& trigger,
                           Rng& rng);

/// l2 norm of the magnitude vector; the perturbation-size objective.
double objective_stealth(const Trigger& trigger);

/// Sum of per-band distances from the spectrum origin; the frequency
/// placement objective. Low values concentrate energy near DC.
double objective_lowfreq(const Trigger& trigger);

/// l2 distance between two equally shaped images in pixel space. Equals the
/// magnitude-vector norm of an injected trigger as long as nothing clips.
double spatial_disparity(const ImageTensor& a, const ImageTensor& b);

/// Trigger plus the channel count of the images it was built for; the pair
/// is what gets serialized.
struct TriggerManifest {
  Trigger trigger;
  int channels = 3;
};

void save_trigger_manifest(const TriggerManifest& manifest,
                           const std::string& path);
TriggerManifest load_trigger_manifest(const std::string& path);

/// JSON text of a manifest, stable key order; file content of save().
std::string trigger_manifest_json(const TriggerManifest& manifest);

}  // namespace trigopt
