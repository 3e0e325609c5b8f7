#include "trigopt/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>

#include "json.hpp"
#include "trigopt/defense.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/metrics.hpp"
#include "trigopt/pngio.hpp"
#include "trigopt/stats.hpp"

namespace fs = std::filesystem;

namespace trigopt {

namespace {

constexpr std::uint64_t kPretrainTag = 0xB0;
constexpr std::uint64_t kVictimInitTag = 0xB1;
constexpr std::uint64_t kVictimPoisonTag = 0xB2;
constexpr std::uint64_t kSweepRepeatTag = 0xB3;

std::string timestamp_utc() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("cannot open " + path.string());
  }
  out << text;
  if (!out) {
    throw DatasetError("write failed for " + path.string());
  }
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::string format_bands(const Trigger& trigger) {
  std::string text;
  char buf[48];
  for (const FrequencyBand& band : trigger.bands()) {
    std::snprintf(buf, sizeof(buf), "(%d;%d)", band.u, band.v);
    text += buf;
  }
  return text;
}

std::string format_magnitudes(const Trigger& trigger) {
  std::string text;
  char buf[48];
  for (std::size_t i = 0; i < trigger.magnitudes().size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%.17g" : ";%.17g",
                  trigger.magnitudes()[i]);
    text += buf;
  }
  return text;
}

void write_population_csv(const fs::path& path, const Population& pop,
                          const PreferenceRegion& pref) {
  std::string text =
      "generation,member,o1,o2,o3,asr,acc,pref_distance,bands,magnitudes\n";
  char buf[256];
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    const Member& m = pop.members[i];
    std::snprintf(buf, sizeof(buf),
                  "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", pop.generation,
                  i, m.objectives.o1, m.objectives.o2, m.objectives.o3, m.asr,
                  m.acc, pref_distance(m.objectives, pref));
    text += buf;
    text += format_bands(m.trigger);
    text += ",";
    text += format_magnitudes(m.trigger);
    text += "\n";
  }
  write_text(path, text);
}

std::vector<PoisonedSample> inject_all(const std::vector<LabeledSample>& data,
                                       const Trigger& trigger,
                                       int target_label) {
  std::vector<PoisonedSample> out;
  out.reserve(data.size());
  for (const LabeledSample& s : data) {
    out.push_back({inject(s.image, trigger), target_label, s.label});
  }
  return out;
}

LoadedDataset load_split(const std::string& manifest_path, const char* what) {
  if (manifest_path.empty()) {
    throw ValidationError(std::string(what) + " manifest not set");
  }
  return load_dataset(manifest_path);
}

void require_matching_splits(const DatasetManifest& train,
                             const DatasetManifest& test) {
  if (train.classes != test.classes || train.height != test.height ||
      train.width != test.width || train.channels != test.channels) {
    throw ValidationError("train and test manifests disagree on shape");
  }
}

void require_trigger_fits(const TriggerManifest& trigger,
                          const DatasetManifest& data) {
  if (trigger.trigger.region().height != data.height ||
      trigger.trigger.region().width != data.width ||
      trigger.channels != data.channels) {
    throw ValidationError("trigger manifest does not match dataset shape");
  }
}

nlohmann::json json_number_or_null(double v) {
  if (std::isfinite(v)) {
    return v;
  }
  return nullptr;
}

/// Rank correlation for trend reporting; a constant column has no defined
/// trend, so it yields NaN (serialized as null) instead of failing the run.
double trend_rho(const std::vector<double>& x, const std::vector<double>& y) {
  auto constant = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(),
                              std::not_equal_to<double>()) == v.end();
  };
  if (x.size() < 2 || constant(x) || constant(y)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return spearman(x, y);
}

void write_pareto_svg(const fs::path& path, const Population& pop,
                      const PreferenceRegion& pref) {
  double min_x = pref.o2_bound, max_x = pref.o2_bound;
  double min_y = 0.0, max_y = pref.o1_bound;
  for (const Member& m : pop.members) {
    min_x = std::min(min_x, m.objectives.o2);
    max_x = std::max(max_x, m.objectives.o2);
    max_y = std::max(max_y, m.objectives.o1);
  }
  min_x = std::min(min_x, 0.0);
  double span_x = std::max(max_x - min_x, 1e-12);
  double span_y = std::max(max_y - min_y, 1e-12);
  auto px = [&](double x) { return 40.0 + 340.0 * (x - min_x) / span_x; };
  auto py = [&](double y) { return 260.0 - 230.0 * (y - min_y) / span_y; };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" "
      "height=\"300\" viewBox=\"0 0 400 300\">\n"
      "<rect width=\"400\" height=\"300\" fill=\"white\"/>\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                "fill=\"#e8f4e8\" stroke=\"#7a7\"/>\n",
                px(0.0), py(pref.o1_bound), px(pref.o2_bound) - px(0.0),
                py(0.0) - py(pref.o1_bound));
  svg += buf;
  svg +=
      "<line x1=\"40\" y1=\"260\" x2=\"380\" y2=\"260\" stroke=\"black\"/>\n"
      "<line x1=\"40\" y1=\"30\" x2=\"40\" y2=\"260\" stroke=\"black\"/>\n"
      "<text x=\"210\" y=\"290\" font-size=\"12\" "
      "text-anchor=\"middle\">perturbation norm</text>\n"
      "<text x=\"14\" y=\"145\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 14 145)\">loss</text>\n";
  for (const Member& m : pop.members) {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#36c\" "
                  "fill-opacity=\"0.8\"/>\n",
                  px(m.objectives.o2), py(m.objectives.o1));
    svg += buf;
  }
  svg += "</svg>\n";
  write_text(path, svg);
}

}  // namespace

std::filesystem::path make_run_dir(const std::string& root,
                                   const std::string& name,
                                   std::uint64_t seed) {
  fs::create_directories(root);
  std::string base = name + "_" + timestamp_utc() + "_s" + std::to_string(seed);
  fs::path candidate = fs::path(root) / base;
  int suffix = 2;
  while (fs::exists(candidate)) {
    candidate = fs::path(root) / (base + "-" + std::to_string(suffix));
    ++suffix;
  }
  fs::create_directories(candidate);
  return candidate;
}

std::filesystem::path cmd_gen_data(const SynthSpec& spec,
                                   const std::string& out_dir) {
  validate(spec);
  if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
    throw ValidationError("gen-data: refusing to write into non-empty " +
                          out_dir);
  }
  GeneratedDataset result = generate_synthetic(spec, out_dir);
  std::printf(
      "gen-data: classes=%d size=%dx%dx%d train=%d/class test=%d/class "
      "-> %s\n",
      spec.classes, spec.height, spec.width, spec.channels,
      spec.train_per_class, spec.test_per_class, out_dir.c_str());
  return out_dir;
}

std::filesystem::path cmd_optimize(const RunConfig& cfg,
                                   const OptimizeOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  LoadedDataset train_set = load_split(cfg.train_manifest, "train");
  LoadedDataset test = load_split(cfg.test_manifest, "test");
  require_matching_splits(train_set.manifest, test.manifest);
  validate_against(cfg, train_set.manifest);

  fs::path run_dir = make_run_dir(opts.out_root, "optimize", cfg.seed);
  save_run_config(cfg, (run_dir / "config_used.json").string());

  int input_dim =
      train_set.manifest.height * train_set.manifest.width * train_set.manifest.channels;
  LowFreqRegion region = low_freq_region(
      train_set.manifest.height, train_set.manifest.width, cfg.region_fraction);
  PreferenceRegion pref = preference_region(cfg, train_set.manifest.height);

  ClassifierModel base =
      make_surrogate(cfg, input_dim, train_set.manifest.classes,
                     derive_seed(cfg.seed, {kPretrainTag}));
  base = train(std::move(base), train_set.samples, pretrain_config(cfg));
  EvalReport surrogate_clean =
      loss_and_metrics(base, test.samples, std::vector<PoisonedSample>());

  OptimizeResult result =
      optimize(train_set.samples, poison_spec(cfg), base, region, ea_config(cfg),
               retrain_config(cfg), pref, cfg.o1_support, cfg.threads);

  fs::create_directories(run_dir / "populations");
  char name[64];
  for (const Population& pop : result.history) {
    std::snprintf(name, sizeof(name), "gen_%03d.csv", pop.generation);
    write_population_csv(run_dir / "populations" / name, pop, pref);
  }
  save_trigger_manifest(
      TriggerManifest{result.best.trigger, train_set.manifest.channels},
      (run_dir / "best_trigger.json").string());

  // Victim side: the winning trigger against a fresh model, plus a clean
  // twin trained from the same initialization for the accuracy delta.
  Rng victim_poison_rng(derive_seed(cfg.seed, {kVictimPoisonTag}));
  PoisonSplit split = poison_dataset(train_set.samples, poison_spec(cfg),
                                     result.best.trigger, victim_poison_rng);
  ClassifierModel victim_init =
      make_victim(cfg, input_dim, train_set.manifest.classes,
                  derive_seed(cfg.seed, {kVictimInitTag}));
  std::vector<Example> poisoned_examples =
      make_examples(split.clean, split.poisoned);
  ClassifierModel victim =
      train(victim_init, poisoned_examples, victim_config(cfg));
  ClassifierModel clean_victim =
      train(victim_init, train_set.samples, victim_config(cfg));

  std::vector<PoisonedSample> test_poisoned =
      inject_all(test.samples, result.best.trigger, cfg.target_label);
  EvalReport victim_report =
      loss_and_metrics(victim, test.samples, test_poisoned);
  EvalReport clean_report = loss_and_metrics(
      clean_victim, test.samples, std::vector<PoisonedSample>());
  save_checkpoint(victim, (run_dir / "victim.ckpt").string());

  if (opts.plot) {
    write_pareto_svg(run_dir / "pareto.svg", result.history.back(), pref);
  }

  double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  nlohmann::json summary;
  summary["seed"] = cfg.seed;
  summary["threads"] = cfg.threads;
  summary["generations"] = cfg.generations;
  summary["population"] = cfg.population;
  summary["best"] = {{"o1", result.best.objectives.o1},
                     {"o2", result.best.objectives.o2},
                     {"o3", result.best.objectives.o3},
                     {"asr", result.best.asr},
                     {"acc", result.best.acc},
                     {"index", result.best_index},
                     {"pref_distance",
                      pref_distance(result.best.objectives, pref)}};
  summary["surrogate"] = {{"clean_test_acc", surrogate_clean.acc}};
  summary["victim"] = {{"test_acc", victim_report.acc},
                       {"test_asr", victim_report.asr},
                       {"test_loss", victim_report.loss}};
  summary["victim_clean"] = {{"test_acc", clean_report.acc}};
  summary["wall_seconds"] = wall_seconds;
  write_json(run_dir / "summary.json", summary);

  std::printf(
      "optimize: best o1=%.4f o2=%.4f o3=%.2f victim_asr=%.2f "
      "victim_acc=%.2f clean_acc=%.2f (%.1fs) -> %s\n",
      result.best.objectives.o1, result.best.objectives.o2,
      result.best.objectives.o3, victim_report.asr, victim_report.acc,
      clean_report.acc, wall_seconds, run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_poison(const PoisonArgs& args) {
  LoadedDataset data = load_split(args.train_manifest, "train");
  TriggerManifest trigger = load_trigger_manifest(args.trigger_path);
  require_trigger_fits(trigger, data.manifest);
  PoisonSpec spec{args.ratio, args.target_label};
  validate(spec);
  if (args.target_label >= data.manifest.classes) {
    throw ValidationError("poison: target label outside dataset classes");
  }

  fs::path run_dir = make_run_dir(args.out_root, "poison", args.seed);
  Rng rng(derive_seed(args.seed, {0xA7}));
  PoisonSplit split = poison_dataset(data.samples, spec, trigger.trigger, rng);

  std::vector<LabeledSample> merged = data.samples;
  nlohmann::json original_labels = nlohmann::json::array();
  for (std::size_t i = 0; i < split.chosen.size(); ++i) {
    std::size_t idx = split.chosen[i];
    original_labels.push_back(merged[idx].label);
    merged[idx].image = split.poisoned[i].image;
    merged[idx].label = split.poisoned[i].label;
  }
  std::string manifest_path = save_dataset(merged, data.manifest.classes,
                                           run_dir.string(), "poisoned");

  nlohmann::json log;
  log["ratio"] = args.ratio;
  log["target_label"] = args.target_label;
  log["seed"] = args.seed;
  log["count"] = split.chosen.size();
  log["indices"] = split.chosen;
  log["original_labels"] = original_labels;
  log["manifest"] = fs::path(manifest_path).filename().string();
  write_json(run_dir / "poison_log.json", log);

  std::printf("poison: %zu of %zu samples -> %s\n", split.chosen.size(),
              data.samples.size(), run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_eval(const RunConfig& cfg,
                               const std::string& trigger_path,
                               const std::string& out_root) {
  LoadedDataset train_set = load_split(cfg.train_manifest, "train");
  LoadedDataset test = load_split(cfg.test_manifest, "test");
  require_matching_splits(train_set.manifest, test.manifest);
  validate_against(cfg, train_set.manifest);
  TriggerManifest trigger = load_trigger_manifest(trigger_path);
  require_trigger_fits(trigger, train_set.manifest);

  fs::path run_dir = make_run_dir(out_root, "eval", cfg.seed);
  int input_dim =
      train_set.manifest.height * train_set.manifest.width * train_set.manifest.channels;

  Rng rng(derive_seed(cfg.seed, {kVictimPoisonTag}));
  PoisonSplit split =
      poison_dataset(train_set.samples, poison_spec(cfg), trigger.trigger, rng);
  ClassifierModel victim_init =
      make_victim(cfg, input_dim, train_set.manifest.classes,
                  derive_seed(cfg.seed, {kVictimInitTag}));
  std::vector<Example> poisoned_examples =
      make_examples(split.clean, split.poisoned);
  ClassifierModel victim =
      train(victim_init, poisoned_examples, victim_config(cfg));
  ClassifierModel clean_victim =
      train(victim_init, train_set.samples, victim_config(cfg));

  std::vector<PoisonedSample> test_poisoned =
      inject_all(test.samples, trigger.trigger, cfg.target_label);
  EvalReport report = loss_and_metrics(victim, test.samples, test_poisoned);
  EvalReport clean_report = loss_and_metrics(
      clean_victim, test.samples, std::vector<PoisonedSample>());
  save_checkpoint(victim, (run_dir / "victim.ckpt").string());

  nlohmann::json doc;
  doc["seed"] = cfg.seed;
  doc["victim"] = {{"arch", cfg.victim_arch},
                   {"test_acc", report.acc},
                   {"test_asr", report.asr},
                   {"test_loss", report.loss}};
  doc["victim_clean"] = {{"test_acc", clean_report.acc}};
  doc["poisoned_train_count"] = split.chosen.size();
  write_json(run_dir / "report.json", doc);

  std::printf("eval: victim_asr=%.2f victim_acc=%.2f clean_acc=%.2f -> %s\n",
              report.asr, report.acc, clean_report.acc,
              run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_robustness(const RobustnessArgs& args) {
  ClassifierModel victim = load_checkpoint(args.victim_checkpoint);
  LoadedDataset test = load_split(args.test_manifest, "test");
  TriggerManifest trigger = load_trigger_manifest(args.trigger_path);
  require_trigger_fits(trigger, test.manifest);
  if (args.target_label < 0 || args.target_label >= test.manifest.classes) {
    throw ValidationError("robustness: target label outside dataset classes");
  }
  int input_dim =
      test.manifest.height * test.manifest.width * test.manifest.channels;
  if (victim.input_dim() != input_dim ||
      victim.classes() != test.manifest.classes) {
    throw ValidationError("robustness: checkpoint does not fit the dataset");
  }

  fs::path run_dir =
      make_run_dir(args.out_root, "robustness",
                   static_cast<std::uint64_t>(args.target_label));
  std::vector<PoisonedSample> poisoned =
      inject_all(test.samples, trigger.trigger, args.target_label);
  std::vector<HarnessRow> rows =
      robustness_harness(victim, test.samples, poisoned, args.ops);

  std::string csv = "op,acc,asr\n";
  char buf[160];
  for (const HarnessRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", row.op.c_str(),
                  row.acc, row.asr);
    csv += buf;
  }
  write_text(run_dir / "robustness.csv", csv);

  const HarnessRow& last = rows.back();
  std::printf("robustness: ops=%zu %s acc=%.2f asr=%.2f -> %s\n",
              args.ops.size(), last.op.c_str(), last.acc, last.asr,
              run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_inspect(const InspectArgs& args) {
  if (args.samples < 1) {
    throw ValidationError("inspect: samples must be positive");
  }
  if (!(args.gain > 0.0) || !std::isfinite(args.gain)) {
    throw ValidationError("inspect: gain must be positive");
  }
  LoadedDataset data = load_split(args.data_manifest, "data");
  TriggerManifest trigger = load_trigger_manifest(args.trigger_path);
  require_trigger_fits(trigger, data.manifest);

  fs::path run_dir = make_run_dir(args.out_root, "inspect", 0);
  std::size_t n = std::min(static_cast<std::size_t>(args.samples),
                           data.samples.size());

  std::vector<ImageTensor> clean;
  std::vector<ImageTensor> poisoned;
  clean.reserve(n);
  poisoned.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    clean.push_back(data.samples[i].image);
    poisoned.push_back(inject(data.samples[i].image, trigger.trigger));
  }

  Spectrum clean_avg = average_spectrum(clean);
  Spectrum poisoned_avg = average_spectrum(poisoned);
  write_png((run_dir / "clean_spectrum.png").string(),
            spectrum_to_image(clean_avg, 1.0, true));
  write_png((run_dir / "poisoned_spectrum.png").string(),
            spectrum_to_image(poisoned_avg, 1.0, true));

  Spectrum residual = Spectrum::zeros(
      data.manifest.height, data.manifest.width, data.manifest.channels);
  double l2_sum = 0.0;
  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  bool has_ssim = data.manifest.height >= 11 && data.manifest.width >= 11;
  for (std::size_t i = 0; i < n; ++i) {
    Spectrum r = spectral_residual(clean[i], poisoned[i]);
    for (std::size_t j = 0; j < residual.coeffs.size(); ++j) {
      residual.coeffs[j] += r.coeffs[j];
    }
    l2_sum += spatial_disparity(clean[i], poisoned[i]);
    psnr_sum += psnr(clean[i], poisoned[i]);
    if (has_ssim) {
      ssim_sum += ssim(clean[i], poisoned[i]);
    }
  }
  for (double& v : residual.coeffs) {
    v /= static_cast<double>(n);
  }
  write_png((run_dir / "residual.png").string(),
            spectrum_to_image(residual, args.gain, false));

  std::string grid;
  char buf[64];
  for (int u = 0; u < residual.height; ++u) {
    for (int v = 0; v < residual.width; ++v) {
      double acc = 0.0;
      for (int c = 0; c < residual.channels; ++c) {
        acc += residual.at(u, v, c);
      }
      std::snprintf(buf, sizeof(buf), v == 0 ? "%.17g" : ",%.17g",
                    acc / residual.channels);
      grid += buf;
    }
    grid += "\n";
  }
  write_text(run_dir / "residual.csv", grid);

  double count = static_cast<double>(n);
  nlohmann::json doc;
  doc["samples"] = n;
  doc["gain"] = args.gain;
  doc["l2"] = l2_sum / count;
  doc["psnr_db"] = json_number_or_null(psnr_sum / count);
  doc["ssim"] = has_ssim ? nlohmann::json(ssim_sum / count)
                         : nlohmann::json(nullptr);
  write_json(run_dir / "stealth.json", doc);

  std::printf("inspect: samples=%zu l2=%.4f psnr=%.2f -> %s\n", n,
              l2_sum / count, psnr_sum / count, run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_detect(const DetectArgs& args) {
  if (!std::isfinite(args.threshold)) {
    throw ValidationError("detect: threshold must be finite");
  }
  LoadedDataset data = load_split(args.data_manifest, "data");
  std::vector<ImageTensor> images;
  images.reserve(data.samples.size());
  for (const LabeledSample& s : data.samples) {
    images.push_back(s.image);
  }

  fs::path run_dir = make_run_dir(args.out_root, "detect", 0);
  RadialProfile profile = radial_profile(images);
  write_profile(profile, (run_dir / "profile.txt").string());
  DetectVerdict verdict;
  verdict.threshold = args.threshold;
  verdict.slope = spectral_slope(profile);
  verdict.flagged = verdict.slope > args.threshold;

  nlohmann::json doc;
  doc["slope"] = verdict.slope;
  doc["threshold"] = verdict.threshold;
  doc["flagged"] = verdict.flagged;
  doc["samples"] = data.samples.size();
  write_json(run_dir / "verdict.json", doc);

  std::printf("detect: slope=%.4f threshold=%.4f flagged=%s -> %s\n",
              verdict.slope, verdict.threshold,
              verdict.flagged ? "yes" : "no", run_dir.string().c_str());
  return run_dir;
}

std::filesystem::path cmd_baseline_sweep(const RunConfig& cfg,
                                         const SweepArgs& args) {
  if (args.repeats < 1) {
    throw ValidationError("sweep: repeats must be positive");
  }
  std::vector<double> alphas = args.alphas;
  if (alphas.empty()) {
    for (int i = 0; i <= 10; ++i) {
      alphas.push_back(0.1 * i);
    }
  }
  LoadedDataset train_set = load_split(cfg.train_manifest, "train");
  validate_against(cfg, train_set.manifest);

  fs::path run_dir = make_run_dir(args.out_root, "sweep", cfg.seed);
  save_run_config(cfg, (run_dir / "config_used.json").string());

  int input_dim =
      train_set.manifest.height * train_set.manifest.width * train_set.manifest.channels;
  LowFreqRegion region = low_freq_region(
      train_set.manifest.height, train_set.manifest.width, cfg.region_fraction);
  ClassifierModel base =
      make_surrogate(cfg, input_dim, train_set.manifest.classes,
                     derive_seed(cfg.seed, {kPretrainTag}));
  base = train(std::move(base), train_set.samples, pretrain_config(cfg));

  std::string csv = "alpha,repeat,o1,l2,asr,acc,afr\n";
  char buf[256];
  std::vector<double> alpha_col;
  std::vector<double> afr_col;
  std::vector<double> l2_col;
  for (int r = 0; r < args.repeats; ++r) {
    EAConfig ea = ea_config(cfg);
    ea.master_seed = derive_seed(
        cfg.seed, {kSweepRepeatTag, static_cast<std::uint64_t>(r)});
    std::vector<SweepPoint> table =
        scalarized_baseline(train_set.samples, poison_spec(cfg), base, region,
                            alphas, ea, retrain_config(cfg), cfg.o1_support,
                            cfg.threads);
    for (const SweepPoint& point : table) {
      std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    point.alpha, r, point.o1, point.l2, point.asr, point.acc,
                    point.afr);
      csv += buf;
      alpha_col.push_back(point.alpha);
      afr_col.push_back(point.afr);
      l2_col.push_back(point.l2);
    }
  }
  write_text(run_dir / "sweep.csv", csv);

  double rho_afr = trend_rho(alpha_col, afr_col);
  double rho_l2 = trend_rho(alpha_col, l2_col);
  nlohmann::json doc;
  doc["spearman_alpha_afr"] = json_number_or_null(rho_afr);
  doc["spearman_alpha_l2"] = json_number_or_null(rho_l2);
  doc["repeats"] = args.repeats;
  doc["alphas"] = alphas;
  write_json(run_dir / "trend.json", doc);

  std::printf("sweep: spearman_afr=%.3f spearman_l2=%.3f -> %s\n", rho_afr,
              rho_l2, run_dir.string().c_str());
  return run_dir;
}

}  // namespace trigopt
