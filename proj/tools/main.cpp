// Command line front-end. Exit status: 0 success, 2 invalid arguments or
// config, 1 runtime failure (unreadable data, diverged training, IO).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trigopt/commands.hpp"
#include "trigopt/errors.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

std::vector<trigopt::PreprocessOp> parse_ops(const std::string& text) {
  std::vector<trigopt::PreprocessOp> ops;
  for (const std::string& part : split_list(text)) {
    if (!part.empty()) {
      ops.push_back(trigopt::PreprocessOp::parse(part));
    }
  }
  if (ops.empty()) {
    throw trigopt::ValidationError("no preprocessing ops given");
  }
  return ops;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> alphas;
  for (const std::string& part : split_list(text)) {
    if (part.empty()) {
      continue;
    }
    try {
      alphas.push_back(std::stod(part));
    } catch (const std::logic_error&) {
      throw trigopt::ValidationError("cannot parse alpha: " + part);
    }
  }
  return alphas;
}

struct ConfigOverrides {
  std::string config_path;
  std::string train_manifest;
  std::string test_manifest;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  int generations = -1;
  int population = -1;
};

trigopt::RunConfig resolve_config(const ConfigOverrides& o) {
  trigopt::RunConfig cfg;
  if (!o.config_path.empty()) {
    cfg = trigopt::load_run_config(o.config_path);
  }
  if (!o.train_manifest.empty()) {
    cfg.train_manifest = o.train_manifest;
  }
  if (!o.test_manifest.empty()) {
    cfg.test_manifest = o.test_manifest;
  }
  if (o.seed_set) {
    cfg.seed = o.seed;
  }
  if (o.threads > 0) {
    cfg.threads = o.threads;
  }
  if (o.generations >= 0) {
    cfg.generations = o.generations;
  }
  if (o.population >= 0) {
    cfg.population = o.population;
  }
  trigopt::validate(cfg);
  return cfg;
}

void add_override_flags(CLI::App* cmd, ConfigOverrides& o, bool with_search) {
  cmd->add_option("--config", o.config_path, "Run configuration JSON");
  cmd->add_option("--train", o.train_manifest, "Training split manifest");
  cmd->add_option("--test", o.test_manifest, "Test split manifest");
  cmd->add_option("--seed", o.seed, "Master seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--threads", o.threads, "Worker threads for evaluation");
  if (with_search) {
    cmd->add_option("--generations", o.generations, "Search generations");
    cmd->add_option("--population", o.population, "Population size");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain trigger search and analysis toolkit"};
  app.require_subcommand(1);

  // gen-data
  trigopt::SynthSpec synth;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--classes", synth.classes, "Number of classes");
  gen->add_option("--height", synth.height, "Image height");
  gen->add_option("--width", synth.width, "Image width");
  gen->add_option("--channels", synth.channels, "Image channels");
  gen->add_option("--train-per-class", synth.train_per_class,
                  "Training samples per class");
  gen->add_option("--test-per-class", synth.test_per_class,
                  "Test samples per class");
  gen->add_option("--signal-bands", synth.signal_bands,
                  "Signature bands per class");
  gen->add_option("--signal-amplitude", synth.signal_amplitude,
                  "Signature magnitude scale");
  gen->add_option("--noise-sigma", synth.noise_sigma,
                  "Spectral noise scale at frequency 1");
  gen->callback([&] { trigopt::cmd_gen_data(synth, gen_out); });

  // optimize
  ConfigOverrides opt_overrides;
  trigopt::OptimizeOptions opt_options;
  CLI::App* opt = app.add_subcommand("optimize", "Run the trigger search");
  add_override_flags(opt, opt_overrides, true);
  opt->add_option("--out", opt_options.out_root, "Run directory root");
  opt->add_flag("--plot", opt_options.plot, "Write an SVG objective scatter");
  opt->callback([&] {
    trigopt::cmd_optimize(resolve_config(opt_overrides), opt_options);
  });

  // poison
  trigopt::PoisonArgs poison;
  CLI::App* poi = app.add_subcommand("poison", "Write a poisoned dataset copy");
  poi->add_option("--data", poison.train_manifest, "Dataset manifest")
      ->required();
  poi->add_option("--trigger", poison.trigger_path, "Trigger manifest")
      ->required();
  poi->add_option("--ratio", poison.ratio, "Poisoning ratio");
  poi->add_option("--target", poison.target_label, "Target label")->required();
  poi->add_option("--seed", poison.seed, "Selection seed");
  poi->add_option("--out", poison.out_root, "Run directory root");
  poi->callback([&] { trigopt::cmd_poison(poison); });

  // eval
  ConfigOverrides eval_overrides;
  std::string eval_trigger;
  std::string eval_out = "runs";
  std::string eval_victim_arch;
  int eval_victim_epochs = -1;
  CLI::App* eva = app.add_subcommand(
      "eval", "Train a victim on poisoned data and measure it");
  add_override_flags(eva, eval_overrides, false);
  eva->add_option("--trigger", eval_trigger, "Trigger manifest")->required();
  eva->add_option("--victim-arch", eval_victim_arch,
                  "Victim architecture (logistic or mlp)");
  eva->add_option("--victim-epochs", eval_victim_epochs,
                  "Victim training epochs");
  eva->add_option("--out", eval_out, "Run directory root");
  eva->callback([&] {
    trigopt::RunConfig cfg = resolve_config(eval_overrides);
    if (!eval_victim_arch.empty()) {
      cfg.victim_arch = eval_victim_arch;
    }
    if (eval_victim_epochs >= 0) {
      cfg.victim_epochs = eval_victim_epochs;
    }
    trigopt::validate(cfg);
    trigopt::cmd_eval(cfg, eval_trigger, eval_out);
  });

  // robustness
  trigopt::RobustnessArgs robust;
  std::string robust_ops = "gaussian:3,wiener:3,brightness:1.2,jpeg:90";
  CLI::App* rob = app.add_subcommand(
      "robustness", "Victim metrics under input preprocessing");
  rob->add_option("--victim", robust.victim_checkpoint, "Victim checkpoint")
      ->required();
  rob->add_option("--test", robust.test_manifest, "Test split manifest")
      ->required();
  rob->add_option("--trigger", robust.trigger_path, "Trigger manifest")
      ->required();
  rob->add_option("--target", robust.target_label, "Target label")->required();
  rob->add_option("--ops", robust_ops, "Comma list of preprocessing ops");
  rob->add_option("--out", robust.out_root, "Run directory root");
  rob->callback([&] {
    robust.ops = parse_ops(robust_ops);
    trigopt::cmd_robustness(robust);
  });

  // inspect
  trigopt::InspectArgs inspect;
  CLI::App* ins = app.add_subcommand(
      "inspect", "Spectra, residual map and stealth metrics for a trigger");
  ins->add_option("--data", inspect.data_manifest, "Dataset manifest")
      ->required();
  ins->add_option("--trigger", inspect.trigger_path, "Trigger manifest")
      ->required();
  ins->add_option("--samples", inspect.samples, "Images to average over");
  ins->add_option("--gain", inspect.gain, "Residual export gain");
  ins->add_option("--out", inspect.out_root, "Run directory root");
  ins->callback([&] { trigopt::cmd_inspect(inspect); });

  // detect
  trigopt::DetectArgs detect;
  CLI::App* det =
      app.add_subcommand("detect", "Spectral-slope anomaly check on a split");
  det->add_option("--data", detect.data_manifest, "Dataset manifest")
      ->required();
  // No default: clean-slope ranges overlap across ensembles, so the cutoff
  // must be calibrated on held-out clean data for the task at hand.
  det->add_option("--threshold", detect.threshold, "Slope threshold")
      ->required();
  det->add_option("--out", detect.out_root, "Run directory root");
  det->callback([&] { trigopt::cmd_detect(detect); });

  // sweep
  ConfigOverrides sweep_overrides;
  trigopt::SweepArgs sweep;
  std::string sweep_alphas;
  CLI::App* swe = app.add_subcommand(
      "sweep", "Scalarized single-objective baseline over alpha");
  add_override_flags(swe, sweep_overrides, true);
  swe->add_option("--alphas", sweep_alphas,
                  "Comma list of weights (default 0,0.1,...,1)");
  swe->add_option("--repeats", sweep.repeats, "Repeats per alpha");
  swe->add_option("--out", sweep.out_root, "Run directory root");
  swe->callback([&] {
    if (!sweep_alphas.empty()) {
      sweep.alphas = parse_alphas(sweep_alphas);
    }
    trigopt::RunConfig cfg = resolve_config(sweep_overrides);
    if (sweep_overrides.generations >= 0) {
      cfg.generations = sweep_overrides.generations;
    }
    trigopt::cmd_baseline_sweep(cfg, sweep);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const trigopt::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
