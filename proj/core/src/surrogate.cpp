#include "trigopt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "trigopt/errors.hpp"

namespace trigopt {

namespace {

constexpr char kCheckpointMagic[8] = {'T', 'O', 'C', 'K', 'P', 'T', '0', '1'};

double glorot_limit(int fan_in, int fan_out) {
  return std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
}

void fill_glorot(std::span<double> block, int fan_in, int fan_out, Rng& rng) {
  double limit = glorot_limit(fan_in, fan_out);
  for (double& w : block) {
    w = rng.uniform(-limit, limit);
  }
}

// log(sum(exp(logits))) with the max factored out for stability.
double log_sum_exp(std::span<const double> logits) {
  double max = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double l : logits) {
    acc += std::exp(l - max);
  }
  return max + std::log(acc);
}

void require_example(const ClassifierModel& model, const Example& example) {
  if (example.image == nullptr) {
    throw ValidationError("example without image");
  }
  if (static_cast<int>(example.image->value_count()) != model.input_dim()) {
    throw ShapeMismatchError("example size does not match model input");
  }
  if (example.label < 0 || example.label >= model.classes()) {
    throw ValidationError("example label outside class range");
  }
}

struct Layout {
  // logistic: [W (K x D), b (K)]
  // mlp:      [W1 (H x D), b1 (H), W2 (K x H), b2 (K)]
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;
};

Layout layout_of(Architecture arch, int input_dim, int hidden, int classes) {
  Layout l;
  if (arch == Architecture::logistic) {
    l.w1 = 0;
    l.b1 = static_cast<std::size_t>(classes) * input_dim;
    l.total = l.b1 + classes;
  } else {
    l.w1 = 0;
    l.b1 = static_cast<std::size_t>(hidden) * input_dim;
    l.w2 = l.b1 + hidden;
    l.b2 = l.w2 + static_cast<std::size_t>(classes) * hidden;
    l.total = l.b2 + classes;
  }
  return l;
}

}  // namespace

Architecture architecture_from_string(const std::string& name) {
  if (name == "logistic") {
    return Architecture::logistic;
  }
  if (name == "mlp") {
    return Architecture::mlp;
  }
  throw ValidationError("unknown architecture: " + name);
}

std::string to_string(Architecture arch) {
  return arch == Architecture::logistic ? "logistic" : "mlp";
}

ClassifierModel ClassifierModel::logistic(int input_dim, int classes,
                                          std::uint64_t seed) {
  if (input_dim <= 0 || classes < 2) {
    throw ValidationError("logistic: need input_dim > 0 and classes >= 2");
  }
  ClassifierModel m;
  m.arch_ = Architecture::logistic;
  m.input_dim_ = input_dim;
  m.classes_ = classes;
  m.hidden_ = 0;
  Layout l = layout_of(m.arch_, input_dim, 0, classes);
  m.params_.assign(l.total, 0.0);
  Rng rng(seed);
  fill_glorot(std::span<double>(m.params_.data(), l.b1), input_dim, classes,
              rng);
  return m;
}

ClassifierModel ClassifierModel::mlp(int input_dim, int hidden, int classes,
                                     std::uint64_t seed) {
  if (input_dim <= 0 || hidden <= 0 || classes < 2) {
    throw ValidationError("mlp: need positive dims and classes >= 2");
  }
  ClassifierModel m;
  m.arch_ = Architecture::mlp;
  m.input_dim_ = input_dim;
  m.classes_ = classes;
  m.hidden_ = hidden;
  Layout l = layout_of(m.arch_, input_dim, hidden, classes);
  m.params_.assign(l.total, 0.0);
  Rng rng(seed);
  fill_glorot(std::span<double>(m.params_.data(), l.b1), input_dim, hidden,
              rng);
  fill_glorot(std::span<double>(m.params_.data() + l.w2,
                                static_cast<std::size_t>(classes) * hidden),
              hidden, classes, rng);
  return m;
}

std::vector<double> ClassifierModel::logits(const ImageTensor& image) const {
  if (static_cast<int>(image.value_count()) != input_dim_) {
    throw ShapeMismatchError("logits: image size does not match model input");
  }
  const double* x = image.data.data();
  Layout l = layout_of(arch_, input_dim_, hidden_, classes_);
  std::vector<double> out(static_cast<std::size_t>(classes_));
  if (arch_ == Architecture::logistic) {
    for (int k = 0; k < classes_; ++k) {
      const double* row =
          params_.data() + static_cast<std::size_t>(k) * input_dim_;
      double acc = params_[l.b1 + k];
      for (int d = 0; d < input_dim_; ++d) {
        acc += row[d] * x[d];
      }
      out[k] = acc;
    }
    return out;
  }
  std::vector<double> hidden(static_cast<std::size_t>(hidden_));
  for (int j = 0; j < hidden_; ++j) {
    const double* row =
        params_.data() + static_cast<std::size_t>(j) * input_dim_;
    double acc = params_[l.b1 + j];
    for (int d = 0; d < input_dim_; ++d) {
      acc += row[d] * x[d];
    }
    hidden[j] = acc > 0.0 ? acc : 0.0;
  }
  for (int k = 0; k < classes_; ++k) {
    const double* row =
        params_.data() + l.w2 + static_cast<std::size_t>(k) * hidden_;
    double acc = params_[l.b2 + k];
    for (int j = 0; j < hidden_; ++j) {
      acc += row[j] * hidden[j];
    }
    out[k] = acc;
  }
  return out;
}

int ClassifierModel::predict(const ImageTensor& image) const {
  std::vector<double> scores = logits(image);
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) -
                          scores.begin());
}

std::vector<Example> make_examples(std::span<const LabeledSample> clean,
                                   std::span<const PoisonedSample> poisoned) {
  std::vector<Example> out;
  out.reserve(clean.size() + poisoned.size());
  for (const LabeledSample& s : clean) {
    out.push_back({&s.image, s.label});
  }
  for (const PoisonedSample& s : poisoned) {
    out.push_back({&s.image, s.label});
  }
  return out;
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ValidationError("TrainConfig: learning_rate must be positive");
  }
  if (cfg.epochs < 0) {
    throw ValidationError("TrainConfig: epochs must be non-negative");
  }
  if (cfg.batch_size < 1) {
    throw ValidationError("TrainConfig: batch_size must be at least 1");
  }
}

double loss_and_gradient(const ClassifierModel& model,
                         std::span<const Example> batch,
                         std::vector<double>& gradient) {
  if (batch.empty()) {
    throw ValidationError("loss_and_gradient: empty batch");
  }
  int input_dim = model.input_dim();
  int classes = model.classes();
  int hidden = model.hidden_units();
  Layout l = layout_of(model.architecture(), input_dim, hidden, classes);
  const std::vector<double>& params = model.parameters();
  gradient.assign(params.size(), 0.0);

  double loss_acc = 0.0;
  std::vector<double> logits(static_cast<std::size_t>(classes));
  std::vector<double> probs(static_cast<std::size_t>(classes));
  std::vector<double> pre(static_cast<std::size_t>(std::max(hidden, 1)));
  std::vector<double> act(static_cast<std::size_t>(std::max(hidden, 1)));
  std::vector<double> dpre(static_cast<std::size_t>(std::max(hidden, 1)));

  for (const Example& example : batch) {
    require_example(model, example);
    const double* x = example.image->data.data();

    if (model.architecture() == Architecture::logistic) {
      for (int k = 0; k < classes; ++k) {
        const double* row =
            params.data() + static_cast<std::size_t>(k) * input_dim;
        double acc = params[l.b1 + k];
        for (int d = 0; d < input_dim; ++d) {
          acc += row[d] * x[d];
        }
        logits[k] = acc;
      }
    } else {
      for (int j = 0; j < hidden; ++j) {
        const double* row =
            params.data() + static_cast<std::size_t>(j) * input_dim;
        double acc = params[l.b1 + j];
        for (int d = 0; d < input_dim; ++d) {
          acc += row[d] * x[d];
        }
        pre[j] = acc;
        act[j] = acc > 0.0 ? acc : 0.0;
      }
      for (int k = 0; k < classes; ++k) {
        const double* row =
            params.data() + l.w2 + static_cast<std::size_t>(k) * hidden;
        double acc = params[l.b2 + k];
        for (int j = 0; j < hidden; ++j) {
          acc += row[j] * act[j];
        }
        logits[k] = acc;
      }
    }

    double lse = log_sum_exp(logits);
    loss_acc += lse - logits[example.label];
    for (int k = 0; k < classes; ++k) {
      probs[k] = std::exp(logits[k] - lse);
    }
    probs[example.label] -= 1.0;  // d(loss)/d(logit)

    if (model.architecture() == Architecture::logistic) {
      for (int k = 0; k < classes; ++k) {
        double g = probs[k];
        double* row =
            gradient.data() + static_cast<std::size_t>(k) * input_dim;
        for (int d = 0; d < input_dim; ++d) {
          row[d] += g * x[d];
        }
        gradient[l.b1 + k] += g;
      }
    } else {
      for (int j = 0; j < hidden; ++j) {
        dpre[j] = 0.0;
      }
      for (int k = 0; k < classes; ++k) {
        double g = probs[k];
        const double* w_row =
            params.data() + l.w2 + static_cast<std::size_t>(k) * hidden;
        double* g_row =
            gradient.data() + l.w2 + static_cast<std::size_t>(k) * hidden;
        for (int j = 0; j < hidden; ++j) {
          g_row[j] += g * act[j];
          dpre[j] += g * w_row[j];
        }
        gradient[l.b2 + k] += g;
      }
      for (int j = 0; j < hidden; ++j) {
        if (pre[j] <= 0.0) {
          continue;
        }
        double g = dpre[j];
        double* row =
            gradient.data() + static_cast<std::size_t>(j) * input_dim;
        for (int d = 0; d < input_dim; ++d) {
          row[d] += g * x[d];
        }
        gradient[l.b1 + j] += g;
      }
    }
  }

  double scale = 1.0 / static_cast<double>(batch.size());
  for (double& g : gradient) {
    g *= scale;
  }
  return loss_acc * scale;
}

double mean_loss(const ClassifierModel& model, std::span<const Example> data) {
  if (data.empty()) {
    throw ValidationError("mean_loss: empty data");
  }
  double acc = 0.0;
  for (const Example& example : data) {
    require_example(model, example);
    std::vector<double> logits = model.logits(*example.image);
    acc += log_sum_exp(logits) - logits[example.label];
  }
  return acc / static_cast<double>(data.size());
}

ClassifierModel train(ClassifierModel model, std::span<const Example> data,
                      const TrainConfig& cfg) {
  validate(cfg);
  if (data.empty()) {
    throw ValidationError("train: empty dataset");
  }
  for (const Example& example : data) {
    require_example(model, example);
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Example> batch;
  std::vector<double> gradient;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(data[order[i]]);
      }
      double loss = loss_and_gradient(model, batch, gradient);
      epoch_loss += loss;
      ++batches;
      std::vector<double>& params = model.parameters();
      for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= cfg.learning_rate * gradient[i];
      }
    }
    epoch_loss /= static_cast<double>(batches);
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError("training diverged at epoch " +
                            std::to_string(epoch));
    }
  }
  return model;
}

ClassifierModel train(ClassifierModel model,
                      const std::vector<LabeledSample>& data,
                      const TrainConfig& cfg) {
  std::vector<Example> examples =
      make_examples(data, std::span<const PoisonedSample>());
  return train(std::move(model), examples, cfg);
}

EvalReport loss_and_metrics(const ClassifierModel& model,
                            std::span<const LabeledSample> clean,
                            std::span<const PoisonedSample> poisoned) {
  if (clean.empty()) {
    throw ValidationError("loss_and_metrics: no clean samples");
  }
  EvalReport report;
  std::size_t clean_hits = 0;
  for (const LabeledSample& s : clean) {
    if (model.predict(s.image) == s.label) {
      ++clean_hits;
    }
  }
  report.acc = 100.0 * static_cast<double>(clean_hits) /
               static_cast<double>(clean.size());

  std::size_t eligible = 0;
  std::size_t fooled = 0;
  for (const PoisonedSample& s : poisoned) {
    if (s.original_label == s.label) {
      continue;  // already the target class; excluded from the rate
    }
    ++eligible;
    if (model.predict(s.image) == s.label) {
      ++fooled;
    }
  }
  report.asr = eligible == 0 ? 0.0
                             : 100.0 * static_cast<double>(fooled) /
                                   static_cast<double>(eligible);

  std::vector<Example> all = make_examples(clean, poisoned);
  report.loss = mean_loss(model, all);
  return report;
}

EvalOutcome evaluate_trigger(const ClassifierModel& base,
                             const std::vector<LabeledSample>& samples,
                             const PoisonSpec& spec, const Trigger& trigger,
                             const TrainConfig& tune, LossSupport support,
                             std::uint64_t seed) {
  Rng poison_rng(derive_seed(seed, {0x9001}));
  PoisonSplit split = poison_dataset(samples, spec, trigger, poison_rng);

  TrainConfig cfg = tune;
  cfg.seed = derive_seed(seed, {0x9002});
  std::vector<Example> training = make_examples(split.clean, split.poisoned);
  ClassifierModel tuned = train(base, training, cfg);

  EvalOutcome outcome;
  outcome.report = loss_and_metrics(tuned, split.clean, split.poisoned);
  if (support == LossSupport::union_set) {
    outcome.o1 = outcome.report.loss;
  } else {
    std::vector<Example> poisoned_only =
        make_examples(std::span<const LabeledSample>(), split.poisoned);
    outcome.o1 = mean_loss(tuned, poisoned_only);
  }
  return outcome;
}

void save_checkpoint(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("save_checkpoint: cannot open " + path);
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  std::uint32_t header[4] = {
      model.architecture() == Architecture::logistic ? 0u : 1u,
      static_cast<std::uint32_t>(model.input_dim()),
      static_cast<std::uint32_t>(model.hidden_units()),
      static_cast<std::uint32_t>(model.classes())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::uint64_t count = model.parameters().size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(model.parameters().data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) {
    throw DatasetError("save_checkpoint: write failed for " + path);
  }
}

ClassifierModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("load_checkpoint: cannot open " + path);
  }
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw DatasetError("load_checkpoint: bad magic in " + path);
  }
  std::uint32_t header[4];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in) {
    throw DatasetError("load_checkpoint: truncated header in " + path);
  }
  int input_dim = static_cast<int>(header[1]);
  int hidden = static_cast<int>(header[2]);
  int classes = static_cast<int>(header[3]);
  ClassifierModel model =
      header[0] == 0
          ? ClassifierModel::logistic(input_dim, classes, 0)
          : ClassifierModel::mlp(input_dim, hidden, classes, 0);
  if (count != model.parameters().size()) {
    throw DatasetError("load_checkpoint: parameter count mismatch in " + path);
  }
  in.read(reinterpret_cast<char*>(model.parameters().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) {
    throw DatasetError("load_checkpoint: truncated parameters in " + path);
  }
  return model;
}

}  // namespace trigopt
