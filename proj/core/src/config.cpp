#include "trigopt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include "json.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/spectrum.hpp"

namespace trigopt {

namespace {

constexpr int kConfigVersion = 1;

void check_keys(const nlohmann::json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ValidationError("config: " + where + " must be an object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      throw ValidationError("config: unknown key " + where + "." + it.key());
    }
  }
}

template <typename T>
void take(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(std::string("config: bad value for ") + key);
    }
  }
}

LossSupport support_from_string(const std::string& name) {
  if (name == "union") {
    return LossSupport::union_set;
  }
  if (name == "poisoned") {
    return LossSupport::poisoned_only;
  }
  throw ValidationError("config: o1_support must be 'union' or 'poisoned'");
}

std::string to_string(LossSupport support) {
  return support == LossSupport::union_set ? "union" : "poisoned";
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.threads < 1) {
    throw ValidationError("config: threads must be at least 1");
  }
  if (cfg.target_label < 0) {
    throw ValidationError("config: target_label must be non-negative");
  }
  if (!(cfg.poison_ratio > 0.0) || cfg.poison_ratio > 1.0) {
    throw ValidationError("config: poison_ratio must be in (0, 1]");
  }
  if (cfg.n_bands < 1) {
    throw ValidationError("config: n_bands must be positive");
  }
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ValidationError("config: epsilon must be positive");
  }
  if (!(cfg.region_fraction > 0.0) || cfg.region_fraction > 1.0) {
    throw ValidationError("config: region_fraction must be in (0, 1]");
  }
  if (cfg.population < 2) {
    throw ValidationError("config: population must be at least 2");
  }
  if (cfg.generations < 0) {
    throw ValidationError("config: generations must be non-negative");
  }
  if (!(cfg.sbx_eta > 0.0) || !(cfg.pm_eta > 0.0)) {
    throw ValidationError("config: distribution indices must be positive");
  }
  if (cfg.crossover_prob < 0.0 || cfg.crossover_prob > 1.0) {
    throw ValidationError("config: crossover_prob must lie in [0, 1]");
  }
  if (cfg.mutation_prob != -1.0 &&
      (cfg.mutation_prob < 0.0 || cfg.mutation_prob > 1.0)) {
    throw ValidationError("config: mutation_prob must be -1 (auto) or in [0, 1]");
  }
  if (!(cfg.band_shift_rate > 0.0)) {
    throw ValidationError("config: band_shift_rate must be positive");
  }
  if (!(cfg.pref_o1 > 0.0) || !(cfg.pref_o2 > 0.0)) {
    throw ValidationError("config: preference bounds must be positive");
  }
  if (cfg.pref_o3 != -1.0 && !(cfg.pref_o3 > 0.0)) {
    throw ValidationError("config: preference.o3 must be -1 (auto) or positive");
  }
  architecture_from_string(cfg.surrogate_arch);
  architecture_from_string(cfg.victim_arch);
  if (cfg.surrogate_hidden < 1 || cfg.victim_hidden < 1) {
    throw ValidationError("config: hidden sizes must be positive");
  }
  for (double lr : {cfg.pretrain_lr, cfg.retrain_lr, cfg.victim_lr}) {
    if (!(lr > 0.0) || !std::isfinite(lr)) {
      throw ValidationError("config: learning rates must be positive");
    }
  }
  if (cfg.pretrain_epochs < 0 || cfg.retrain_epochs < 0 ||
      cfg.victim_epochs < 0) {
    throw ValidationError("config: epoch counts must be non-negative");
  }
  if (cfg.surrogate_batch < 1 || cfg.victim_batch < 1) {
    throw ValidationError("config: batch sizes must be positive");
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("config: cannot open " + path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: bad JSON in " + path + ": " + e.what());
  }
  check_keys(doc, "root",
             {"format_version", "seed", "threads", "data", "attack", "search",
              "preference", "surrogate", "victim"});
  RunConfig cfg;
  int version = kConfigVersion;
  take(doc, "format_version", version);
  if (version != kConfigVersion) {
    throw ValidationError("config: unsupported format version");
  }
  take(doc, "seed", cfg.seed);
  take(doc, "threads", cfg.threads);

  if (doc.contains("data")) {
    const auto& data = doc["data"];
    check_keys(data, "data", {"train_manifest", "test_manifest"});
    take(data, "train_manifest", cfg.train_manifest);
    take(data, "test_manifest", cfg.test_manifest);
  }
  if (doc.contains("attack")) {
    const auto& attack = doc["attack"];
    check_keys(attack, "attack",
               {"target_label", "poison_ratio", "n_bands", "epsilon",
                "region_fraction", "o1_support"});
    take(attack, "target_label", cfg.target_label);
    take(attack, "poison_ratio", cfg.poison_ratio);
    take(attack, "n_bands", cfg.n_bands);
    take(attack, "epsilon", cfg.epsilon);
    take(attack, "region_fraction", cfg.region_fraction);
    if (attack.contains("o1_support")) {
      cfg.o1_support =
          support_from_string(attack["o1_support"].get<std::string>());
    }
  }
  if (doc.contains("search")) {
    const auto& search = doc["search"];
    check_keys(search, "search",
               {"population", "generations", "sbx_eta", "pm_eta",
                "crossover_prob", "mutation_prob", "band_shift_rate"});
    take(search, "population", cfg.population);
    take(search, "generations", cfg.generations);
    take(search, "sbx_eta", cfg.sbx_eta);
    take(search, "pm_eta", cfg.pm_eta);
    take(search, "crossover_prob", cfg.crossover_prob);
    take(search, "mutation_prob", cfg.mutation_prob);
    take(search, "band_shift_rate", cfg.band_shift_rate);
  }
  if (doc.contains("preference")) {
    const auto& pref = doc["preference"];
    check_keys(pref, "preference", {"o1", "o2", "o3"});
    take(pref, "o1", cfg.pref_o1);
    take(pref, "o2", cfg.pref_o2);
    take(pref, "o3", cfg.pref_o3);
  }
  if (doc.contains("surrogate")) {
    const auto& surrogate = doc["surrogate"];
    check_keys(surrogate, "surrogate",
               {"arch", "hidden", "pretrain_lr", "pretrain_epochs",
                "retrain_lr", "retrain_epochs", "batch_size"});
    take(surrogate, "arch", cfg.surrogate_arch);
    take(surrogate, "hidden", cfg.surrogate_hidden);
    take(surrogate, "pretrain_lr", cfg.pretrain_lr);
    take(surrogate, "pretrain_epochs", cfg.pretrain_epochs);
    take(surrogate, "retrain_lr", cfg.retrain_lr);
    take(surrogate, "retrain_epochs", cfg.retrain_epochs);
    take(surrogate, "batch_size", cfg.surrogate_batch);
  }
  if (doc.contains("victim")) {
    const auto& victim = doc["victim"];
    check_keys(victim, "victim", {"arch", "hidden", "lr", "epochs",
                                  "batch_size"});
    take(victim, "arch", cfg.victim_arch);
    take(victim, "hidden", cfg.victim_hidden);
    take(victim, "lr", cfg.victim_lr);
    take(victim, "epochs", cfg.victim_epochs);
    take(victim, "batch_size", cfg.victim_batch);
  }
  validate(cfg);
  return cfg;
}

std::string run_config_json(const RunConfig& cfg) {
  nlohmann::json doc;
  doc["format_version"] = kConfigVersion;
  doc["seed"] = cfg.seed;
  doc["threads"] = cfg.threads;
  doc["data"] = {{"train_manifest", cfg.train_manifest},
                 {"test_manifest", cfg.test_manifest}};
  doc["attack"] = {{"target_label", cfg.target_label},
                   {"poison_ratio", cfg.poison_ratio},
                   {"n_bands", cfg.n_bands},
                   {"epsilon", cfg.epsilon},
                   {"region_fraction", cfg.region_fraction},
                   {"o1_support", to_string(cfg.o1_support)}};
  doc["search"] = {{"population", cfg.population},
                   {"generations", cfg.generations},
                   {"sbx_eta", cfg.sbx_eta},
                   {"pm_eta", cfg.pm_eta},
                   {"crossover_prob", cfg.crossover_prob},
                   {"mutation_prob", cfg.mutation_prob},
                   {"band_shift_rate", cfg.band_shift_rate}};
  doc["preference"] = {
      {"o1", cfg.pref_o1}, {"o2", cfg.pref_o2}, {"o3", cfg.pref_o3}};
  doc["surrogate"] = {{"arch", cfg.surrogate_arch},
                      {"hidden", cfg.surrogate_hidden},
                      {"pretrain_lr", cfg.pretrain_lr},
                      {"pretrain_epochs", cfg.pretrain_epochs},
                      {"retrain_lr", cfg.retrain_lr},
                      {"retrain_epochs", cfg.retrain_epochs},
                      {"batch_size", cfg.surrogate_batch}};
  doc["victim"] = {{"arch", cfg.victim_arch},
                   {"hidden", cfg.victim_hidden},
                   {"lr", cfg.victim_lr},
                   {"epochs", cfg.victim_epochs},
                   {"batch_size", cfg.victim_batch}};
  return doc.dump(2) + "\n";
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError("save_run_config: cannot open " + path);
  }
  out << run_config_json(cfg);
  if (!out) {
    throw DatasetError("save_run_config: write failed for " + path);
  }
}

double resolved_mutation_prob(const RunConfig& cfg) {
  if (cfg.mutation_prob >= 0.0) {
    return cfg.mutation_prob;
  }
  return 1.0 / (2.0 * static_cast<double>(cfg.n_bands));
}

double resolved_pref_o3(const RunConfig& cfg, int height) {
  if (cfg.pref_o3 > 0.0) {
    return cfg.pref_o3;
  }
  return static_cast<double>(height) / 4.0;
}

void validate_against(const RunConfig& cfg, const DatasetManifest& manifest) {
  validate(cfg);
  if (cfg.target_label >= manifest.classes) {
    throw ValidationError("config: target_label outside dataset classes");
  }
  LowFreqRegion region =
      low_freq_region(manifest.height, manifest.width, cfg.region_fraction);
  if (static_cast<long long>(cfg.n_bands) > region.band_count()) {
    throw ValidationError("config: region too small for n_bands");
  }
}

PoisonSpec poison_spec(const RunConfig& cfg) {
  return PoisonSpec{cfg.poison_ratio, cfg.target_label};
}

EAConfig ea_config(const RunConfig& cfg) {
  EAConfig ea;
  ea.population = cfg.population;
  ea.generations = cfg.generations;
  ea.n_bands = cfg.n_bands;
  ea.epsilon = cfg.epsilon;
  ea.sbx_eta = cfg.sbx_eta;
  ea.pm_eta = cfg.pm_eta;
  ea.crossover_prob = cfg.crossover_prob;
  ea.mutation_prob = resolved_mutation_prob(cfg);
  ea.band_shift_rate = cfg.band_shift_rate;
  ea.master_seed = cfg.seed;
  return ea;
}

PreferenceRegion preference_region(const RunConfig& cfg, int height) {
  return PreferenceRegion{cfg.pref_o1, cfg.pref_o2,
                          resolved_pref_o3(cfg, height)};
}

TrainConfig pretrain_config(const RunConfig& cfg) {
  return TrainConfig{cfg.pretrain_lr, cfg.pretrain_epochs, cfg.surrogate_batch,
                     derive_seed(cfg.seed, {0xF1})};
}

TrainConfig retrain_config(const RunConfig& cfg) {
  return TrainConfig{cfg.retrain_lr, cfg.retrain_epochs, cfg.surrogate_batch,
                     0};
}

TrainConfig victim_config(const RunConfig& cfg) {
  return TrainConfig{cfg.victim_lr, cfg.victim_epochs, cfg.victim_batch,
                     derive_seed(cfg.seed, {0xF2})};
}

ClassifierModel make_surrogate(const RunConfig& cfg, int input_dim,
                               int classes, std::uint64_t seed) {
  if (architecture_from_string(cfg.surrogate_arch) == Architecture::logistic) {
    return ClassifierModel::logistic(input_dim, classes, seed);
  }
  return ClassifierModel::mlp(input_dim, cfg.surrogate_hidden, classes, seed);
}

ClassifierModel make_victim(const RunConfig& cfg, int input_dim, int classes,
                            std::uint64_t seed) {
  if (architecture_from_string(cfg.victim_arch) == Architecture::logistic) {
    return ClassifierModel::logistic(input_dim, classes, seed);
  }
  return ClassifierModel::mlp(input_dim, cfg.victim_hidden, classes, seed);
}

}  // namespace trigopt
