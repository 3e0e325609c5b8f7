#pragma once

#include <cstdint>
#include <string>

#include "trigopt/datasets.hpp"
#include "trigopt/moea.hpp"
#include "trigopt/surrogate.hpp"
#include "trigopt/trigger.hpp"

namespace trigopt {

/// Everything an attack run needs. Loaded from JSON with strict key
/// checking; absent keys keep their defaults. Fields documented as "auto"
/// accept -1 and are resolved once the dataset dimensions are known.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 1;

  std::string train_manifest;
  std::string test_manifest;

  // attack
  int target_label = 0;
  double poison_ratio = 0.05;
  int n_bands = 3;
  double epsilon = 0.5;
  double region_fraction = 0.183;
  LossSupport o1_support = LossSupport::union_set;

  // search
  int population = 10;
  int generations = 20;
  double sbx_eta = 15.0;
  double pm_eta = 20.0;
  double crossover_prob = 0.9;
  double mutation_prob = -1.0;  // auto: 1 / (2 n_bands)
  double band_shift_rate = 1.0;

  // preference bounds (upper limits per objective)
  double pref_o1 = 0.10536051565782631;  // -ln(0.9)
  double pref_o2 = 0.4;
  double pref_o3 = -1.0;  // auto: height / 4

  // surrogate used inside the search. The retrain rate is deliberately hot:
  // at 20 fine-tune epochs a cooler rate cannot fit small in-preference
  // triggers, and the effectiveness objective then rewards triggers the
  // surrogate ignores instead of triggers it learns.
  std::string surrogate_arch = "logistic";
  int surrogate_hidden = 64;
  double pretrain_lr = 0.2;
  int pretrain_epochs = 30;
  double retrain_lr = 0.5;
  int retrain_epochs = 20;
  int surrogate_batch = 64;

  // victim trained on the poisoned dataset for reporting. Trained to
  // convergence on its whole training set, poisons included; a hotter rate
  // destabilizes the hidden layer on samples that resist fitting.
  std::string victim_arch = "mlp";
  int victim_hidden = 64;
  double victim_lr = 0.03;
  int victim_epochs = 120;
  int victim_batch = 32;
};

void validate(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);
std::string run_config_json(const RunConfig& cfg);

double resolved_mutation_prob(const RunConfig& cfg);
double resolved_pref_o3(const RunConfig& cfg, int height);

/// Checks config against dataset facts (target label within class range,
/// region large enough for n_bands) and throws ValidationError otherwise.
void validate_against(const RunConfig& cfg, const DatasetManifest& manifest);

PoisonSpec poison_spec(const RunConfig& cfg);
EAConfig ea_config(const RunConfig& cfg);
PreferenceRegion preference_region(const RunConfig& cfg, int height);
TrainConfig pretrain_config(const RunConfig& cfg);
TrainConfig retrain_config(const RunConfig& cfg);
TrainConfig victim_config(const RunConfig& cfg);

ClassifierModel make_surrogate(const RunConfig& cfg, int input_dim,
                               int classes, std::uint64_t seed);
ClassifierModel make_victim(const RunConfig& cfg, int input_dim, int classes,
                            std::uint64_t seed);

}  // namespace trigopt
