#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "trigopt/config.hpp"
#include "trigopt/errors.hpp"

using namespace trigopt;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir() {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "trigopt_config_tests" /
                 std::to_string(counter++);
  fs::create_directories(dir);
  return dir;
}

fs::path write_json(const nlohmann::json& doc) {
  fs::path p = fresh_dir() / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

}  // namespace

TEST_CASE("defaults form a valid configuration") {
  RunConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  CHECK(cfg.population == 10);
  CHECK(cfg.generations == 20);
  CHECK(cfg.n_bands == 3);
  CHECK(cfg.epsilon == 0.5);
  CHECK(cfg.poison_ratio == 0.05);
  CHECK(cfg.region_fraction == doctest::Approx(0.183));
  // effectiveness bound equals -ln(0.9): loss of a 90%-confident prediction
  CHECK(cfg.pref_o1 == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(cfg.pref_o2 == 0.4);
}

TEST_CASE("auto fields resolve from band count and image height") {
  RunConfig cfg;
  CHECK(cfg.mutation_prob == -1.0);
  CHECK(resolved_mutation_prob(cfg) == doctest::Approx(1.0 / 6.0));
  cfg.n_bands = 5;
  CHECK(resolved_mutation_prob(cfg) == doctest::Approx(0.1));
  cfg.mutation_prob = 0.25;
  CHECK(resolved_mutation_prob(cfg) == 0.25);

  RunConfig pref;
  CHECK(pref.pref_o3 == -1.0);
  CHECK(resolved_pref_o3(pref, 32) == doctest::Approx(8.0));
  CHECK(resolved_pref_o3(pref, 16) == doctest::Approx(4.0));
  pref.pref_o3 = 3.5;
  CHECK(resolved_pref_o3(pref, 32) == 3.5);
}

TEST_CASE("validation rejects each out-of-range field") {
  auto reject = [](auto mutate) {
    RunConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(validate(cfg), ValidationError);
  };
  reject([](RunConfig& c) { c.threads = 0; });
  reject([](RunConfig& c) { c.target_label = -1; });
  reject([](RunConfig& c) { c.poison_ratio = 0.0; });
  reject([](RunConfig& c) { c.poison_ratio = 1.5; });
  reject([](RunConfig& c) { c.n_bands = 0; });
  reject([](RunConfig& c) { c.epsilon = -0.1; });
  reject([](RunConfig& c) { c.region_fraction = 0.0; });
  reject([](RunConfig& c) { c.region_fraction = 1.1; });
  reject([](RunConfig& c) { c.population = 1; });
  reject([](RunConfig& c) { c.generations = -1; });
  reject([](RunConfig& c) { c.sbx_eta = 0.0; });
  reject([](RunConfig& c) { c.crossover_prob = 2.0; });
  reject([](RunConfig& c) { c.mutation_prob = 1.5; });
  reject([](RunConfig& c) { c.mutation_prob = -0.5; });
  reject([](RunConfig& c) { c.band_shift_rate = 0.0; });
  reject([](RunConfig& c) { c.pref_o1 = 0.0; });
  reject([](RunConfig& c) { c.pref_o3 = 0.0; });
  reject([](RunConfig& c) { c.surrogate_arch = "transformer"; });
  reject([](RunConfig& c) { c.victim_hidden = 0; });
  reject([](RunConfig& c) { c.pretrain_lr = 0.0; });
  reject([](RunConfig& c) { c.victim_epochs = -1; });
  reject([](RunConfig& c) { c.surrogate_batch = 0; });
}

TEST_CASE("config files round-trip") {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.threads = 2;
  cfg.train_manifest = "data/train_manifest.json";
  cfg.test_manifest = "data/test_manifest.json";
  cfg.target_label = 3;
  cfg.poison_ratio = 0.1;
  cfg.n_bands = 4;
  cfg.epsilon = 0.3;
  cfg.o1_support = LossSupport::poisoned_only;
  cfg.population = 12;
  cfg.generations = 5;
  cfg.mutation_prob = 0.2;
  cfg.pref_o3 = 6.0;
  cfg.surrogate_arch = "mlp";
  cfg.surrogate_hidden = 48;
  cfg.victim_arch = "logistic";
  cfg.victim_epochs = 17;

  fs::path p = fresh_dir() / "roundtrip.json";
  save_run_config(cfg, p.string());
  RunConfig loaded = load_run_config(p.string());

  CHECK(loaded.seed == 99);
  CHECK(loaded.threads == 2);
  CHECK(loaded.train_manifest == cfg.train_manifest);
  CHECK(loaded.test_manifest == cfg.test_manifest);
  CHECK(loaded.target_label == 3);
  CHECK(loaded.poison_ratio == doctest::Approx(0.1));
  CHECK(loaded.n_bands == 4);
  CHECK(loaded.epsilon == doctest::Approx(0.3));
  CHECK(loaded.o1_support == LossSupport::poisoned_only);
  CHECK(loaded.population == 12);
  CHECK(loaded.generations == 5);
  CHECK(loaded.mutation_prob == doctest::Approx(0.2));
  CHECK(loaded.pref_o3 == doctest::Approx(6.0));
  CHECK(loaded.surrogate_arch == "mlp");
  CHECK(loaded.surrogate_hidden == 48);
  CHECK(loaded.victim_arch == "logistic");
  CHECK(loaded.victim_epochs == 17);
}

TEST_CASE("an empty object loads pure defaults") {
  fs::path p = write_json(nlohmann::json::object());
  RunConfig loaded = load_run_config(p.string());
  RunConfig defaults;
  CHECK(loaded.seed == defaults.seed);
  CHECK(loaded.population == defaults.population);
  CHECK(loaded.pref_o1 == defaults.pref_o1);
  CHECK(loaded.o1_support == LossSupport::union_set);
}

TEST_CASE("loading is strict about keys, values and version") {
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"),
                  ValidationError);

  fs::path garbage = fresh_dir() / "garbage.json";
  std::ofstream(garbage) << "{ nope";
  CHECK_THROWS_AS(load_run_config(garbage.string()), ValidationError);

  CHECK_THROWS_AS(
      load_run_config(write_json({{"surprise", 1}}).string()),
      ValidationError);
  CHECK_THROWS_AS(
      load_run_config(write_json({{"attack", {{"ratio", 0.1}}}}).string()),
      ValidationError);
  CHECK_THROWS_AS(
      load_run_config(write_json({{"format_version", 2}}).string()),
      ValidationError);
  CHECK_THROWS_AS(
      load_run_config(write_json({{"seed", "abc"}}).string()),
      ValidationError);
  CHECK_THROWS_AS(
      load_run_config(
          write_json({{"attack", {{"o1_support", "everything"}}}}).string()),
      ValidationError);
  CHECK_THROWS_AS(
      load_run_config(
          write_json({{"search", {{"population", 1}}}}).string()),
      ValidationError);

  // partial sections override only their own fields
  RunConfig partial = load_run_config(
      write_json({{"search", {{"population", 6}}},
                  {"attack", {{"epsilon", 0.25}}}})
          .string());
  CHECK(partial.population == 6);
  CHECK(partial.generations == 20);
  CHECK(partial.epsilon == doctest::Approx(0.25));
  CHECK(partial.poison_ratio == doctest::Approx(0.05));
}

TEST_CASE("dataset cross-checks") {
  DatasetManifest manifest;
  manifest.split = "train";
  manifest.classes = 4;
  manifest.height = 16;
  manifest.width = 16;
  manifest.channels = 3;
  manifest.entries = {{"x.png", 0}};

  RunConfig cfg;
  CHECK_NOTHROW(validate_against(cfg, manifest));

  RunConfig bad_label = cfg;
  bad_label.target_label = 4;
  CHECK_THROWS_AS(validate_against(bad_label, manifest), ValidationError);

  RunConfig too_many = cfg;
  too_many.n_bands = 100;  // a 16 x 16 region fraction holds 49 slots
  CHECK_THROWS_AS(validate_against(too_many, manifest), ValidationError);
}

TEST_CASE("builders project the config onto the subsystem structs") {
  RunConfig cfg;
  cfg.seed = 5;
  cfg.poison_ratio = 0.2;
  cfg.target_label = 1;
  cfg.n_bands = 2;
  cfg.pref_o3 = -1.0;

  PoisonSpec spec = poison_spec(cfg);
  CHECK(spec.ratio == doctest::Approx(0.2));
  CHECK(spec.target_label == 1);

  EAConfig ea = ea_config(cfg);
  CHECK(ea.population == cfg.population);
  CHECK(ea.n_bands == 2);
  CHECK(ea.mutation_prob == doctest::Approx(0.25));  // 1 / (2 * 2)
  CHECK(ea.master_seed == 5);

  PreferenceRegion pref = preference_region(cfg, 32);
  CHECK(pref.o1_bound == doctest::Approx(cfg.pref_o1));
  CHECK(pref.o3_bound == doctest::Approx(8.0));

  TrainConfig pre = pretrain_config(cfg);
  CHECK(pre.learning_rate == cfg.pretrain_lr);
  CHECK(pre.epochs == cfg.pretrain_epochs);
  TrainConfig re = retrain_config(cfg);
  CHECK(re.epochs == cfg.retrain_epochs);
  // the retrain seed is a placeholder: each evaluation overrides it
  CHECK(re.seed == 0);
  TrainConfig vic = victim_config(cfg);
  CHECK(vic.learning_rate == cfg.victim_lr);
  CHECK(pre.seed != vic.seed);

  ClassifierModel surrogate = make_surrogate(cfg, 48, 4, 1);
  CHECK(surrogate.architecture() == Architecture::logistic);
  CHECK(surrogate.input_dim() == 48);
  CHECK(surrogate.classes() == 4);
  ClassifierModel victim = make_victim(cfg, 48, 4, 1);
  CHECK(victim.architecture() == Architecture::mlp);
  CHECK(victim.hidden_units() == cfg.victim_hidden);
}
