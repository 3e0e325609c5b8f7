#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trigopt/image.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/trigger.hpp"

namespace trigopt {

enum class Architecture { logistic, mlp };

Architecture architecture_from_string(const std::string& name);
std::string to_string(Architecture arch);

/// Softmax classifier over flattened pixels. Two shapes: a plain linear
/// layer, or one ReLU hidden layer followed by a linear layer. Weights are
/// Glorot-uniform (limit sqrt(6 / (fan_in + fan_out))), biases zero.
/// Parameters live in one flat vector so optimizers and finite-difference
/// checks can treat the model as a point in R^n.
class ClassifierModel {
 public:
  static ClassifierModel logistic(int input_dim, int classes,
                                  std::uint64_t seed);
  static ClassifierModel mlp(int input_dim, int hidden, int classes,
                             std::uint64_t seed);

  Architecture architecture() const { return arch_; }
  int input_dim() const { return input_dim_; }
  int classes() const { return classes_; }
  int hidden_units() const { return hidden_; }

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  /// Raw class scores for one image (flattened in planar order).
  std::vector<double> logits(const ImageTensor& image) const;

  /// Argmax of logits; ties resolve to the lowest class index.
  int predict(const ImageTensor& image) const;

 private:
  ClassifierModel() = default;

  Architecture arch_ = Architecture::logistic;
  int input_dim_ = 0;
  int hidden_ = 0;
  int classes_ = 0;
  std::vector<double> params_;
};

/// Non-owning (image, label) pair used as training input, so clean and
/// poisoned samples can be mixed without copying pixels.
struct Example {
  const ImageTensor* image = nullptr;
  int label = 0;
};

std::vector<Example> make_examples(std::span<const LabeledSample> clean,
                                   std::span<const PoisonedSample> poisoned);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 20;
  int batch_size = 64;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& cfg);

/// Mean cross-entropy over the batch plus its gradient with respect to the
/// flat parameter vector. This is the training step's inner kernel; tests
/// compare the gradient against central finite differences.
double loss_and_gradient(const ClassifierModel& model,
                         std::span<const Example> batch,
                         std::vector<double>& gradient);

double mean_loss(const ClassifierModel& model, std::span<const Example> data);

/// Mini-batch SGD on mean cross-entropy. Epoch shuffling and batch order
/// come from cfg.seed only. Throws DivergenceError naming the epoch if the
/// epoch's mean loss stops being finite.
ClassifierModel train(ClassifierModel model, std::span<const Example> data,
                      const TrainConfig& cfg);
ClassifierModel train(ClassifierModel model,
                      const std::vector<LabeledSample>& data,
                      const TrainConfig& cfg);

/// acc and asr are percentages in [0, 100]; loss is mean cross-entropy over
/// clean + poisoned. acc is measured on clean samples only (error when there
/// are none). asr counts poisoned samples classified as their assigned
/// target, excluding samples whose original label already was the target;
/// with no eligible samples asr is 0.
struct EvalReport {
  double acc = 0.0;
  double asr = 0.0;
  double loss = 0.0;
};

EvalReport loss_and_metrics(const ClassifierModel& model,
                            std::span<const LabeledSample> clean,
                            std::span<const PoisonedSample> poisoned);

/// Which samples the effectiveness objective averages over after the
/// fine-tune: the whole poisoned training set, or its poisoned part only.
enum class LossSupport { union_set, poisoned_only };

struct EvalOutcome {
  double o1 = 0.0;
  EvalReport report;
};

/// Measures a trigger against a pretrained model without mutating it: poison
/// ceil(N * ratio) of the samples, fine-tune a copy, return the mean
/// cross-entropy objective and the copy's metrics on the same samples.
/// Poison selection and fine-tune shuffling derive from `seed` alone.
EvalOutcome evaluate_trigger(const ClassifierModel& base,
                             const std::vector<LabeledSample>& samples,
                             const PoisonSpec& spec, const Trigger& trigger,
                             const TrainConfig& tune, LossSupport support,
                             std::uint64_t seed);

/// Binary checkpoint: magic, architecture tag, dimensions, little-endian
/// doubles. Refuses files whose magic or sizes disagree.
void save_checkpoint(const ClassifierModel& model, const std::string& path);
ClassifierModel load_checkpoint(const std::string& path);

}  // namespace trigopt
