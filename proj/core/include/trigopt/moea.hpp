#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "trigopt/surrogate.hpp"
#include "trigopt/trigger.hpp"

namespace trigopt {

/// One point in objective space; every component is minimized.
/// o1 effectiveness loss, o2 perturbation norm, o3 frequency placement.
struct ObjectiveVector {
  double o1 = 0.0;
  double o2 = 0.0;
  double o3 = 0.0;
};

/// a dominates b: no component worse, at least one strictly better.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Fronts of non-dominated rank, best first. Indices within each front keep
/// ascending input order. Duplicated points land in the same front.
std::vector<std::vector<int>> nd_sort(std::span<const ObjectiveVector> points);

/// Crowding estimate for one front: boundary points get +infinity, interior
/// points the sum over objectives of neighbour gaps normalized by the
/// objective's range (degenerate ranges contribute nothing).
std::vector<double> sparsity(std::span<const ObjectiveVector> front);

/// Axis-aligned target box [0, bound] per objective. A point inside the box
/// satisfies every preference.
struct PreferenceRegion {
  double o1_bound = 0.0;
  double o2_bound = 0.0;
  double o3_bound = 0.0;
};

void validate(const PreferenceRegion& pref);

/// Euclidean distance from the point to the preference box; zero inside.
double pref_distance(const ObjectiveVector& point, const PreferenceRegion& pref);

/// Preference-steered environmental selection. Whole non-dominated fronts
/// are admitted while they fit the capacity; the remainder of the last
/// partial front and all worse ranks compete by ascending distance to the
/// preference box, ties resolved by input index. Returns selected indices
/// in admission order.
std::vector<int> rnd_sort_select_indices(std::span<const ObjectiveVector> points,
                                         int capacity,
                                         const PreferenceRegion& pref);

struct Member {
  Trigger trigger;
  ObjectiveVector objectives;
  double asr = 0.0;
  double acc = 0.0;
};

struct Population {
  std::vector<Member> members;
  int generation = 0;
};

std::vector<Member> rnd_sort_select(std::vector<Member> combined, int capacity,
                                    const PreferenceRegion& pref);

/// Spread factor of simulated binary crossover for a uniform draw u and
/// distribution index eta. u = 0.5 gives exactly 1 (children = parents).
double sbx_spread(double u, double eta);

/// Child pair for one coordinate; c1 + c2 == p1 + p2 for any spread.
std::pair<double, double> sbx_children(double p1, double p2, double spread);

/// Polynomial-mutation update of y in [lo, hi] for a uniform draw u and
/// distribution index eta. Stays inside the bounds by construction.
double pm_perturbed(double y, double lo, double hi, double u, double eta);

struct EAConfig {
  int population = 10;
  int generations = 20;
  int n_bands = 3;
  double epsilon = 0.5;
  double sbx_eta = 15.0;
  double pm_eta = 20.0;
  double crossover_prob = 0.9;
  double mutation_prob = 1.0 / 6.0;  // per gene; 1 / (2 n_bands) by default
  double band_shift_rate = 1.0;      // rate of the exponential step length
  std::uint64_t master_seed = 1;
};

void validate(const EAConfig& cfg);

/// SBX on magnitudes plus uniform band exchange. With probability
/// 1 - crossover_prob the children are plain copies. Children are repaired
/// to distinct bands and clamped to [-epsilon, epsilon].
std::pair<Trigger, Trigger> sbx_crossover(const Trigger& a, const Trigger& b,
                                          const EAConfig& cfg, Rng& rng);

/// Polynomial mutation on magnitudes; bands take integer shifts of
/// exponentially distributed length with uniform signs, clamped to the
/// region. Duplicate bands are redrawn uniformly.
Trigger pm_mutation(const Trigger& trigger, const EAConfig& cfg, Rng& rng);

/// One generation of offspring: parents are shuffle-paired, crossed and
/// mutated. Output size equals the parent count.
std::vector<Trigger> make_offspring(std::span<const Member> parents,
                                    const EAConfig& cfg, Rng& rng);

struct Evaluation {
  ObjectiveVector objectives;
  double asr = 0.0;
  double acc = 0.0;
};

/// Computes the objective vector of a candidate. Must be safe to call from
/// several threads at once; (generation, index) identify the call so the
/// evaluator can derive a private random stream.
using TriggerEvaluator =
    std::function<Evaluation(const Trigger&, int generation, int index)>;

struct OptimizeResult {
  std::vector<Population> history;  // index = generation, 0 .. generations
  Member best;                      // from the final population
  int best_index = -1;              // position of best within it
};

/// Generational loop: random initial population, then per generation
/// variation, evaluation of the offspring and preference-steered selection
/// over parents plus offspring. The returned best member minimizes the
/// normalized Euclidean distance to the final population's ideal point.
/// Results are identical for any thread count.
OptimizeResult evolve(const TriggerEvaluator& evaluator,
                      const LowFreqRegion& region, const EAConfig& cfg,
                      const PreferenceRegion& pref, int threads);

/// evolve() wired to surrogate-based trigger evaluation: each candidate is
/// scored by poisoning `data`, fine-tuning a copy of `base` and reading the
/// resulting loss, perturbation norm and band placement.
OptimizeResult optimize(const std::vector<LabeledSample>& data,
                        const PoisonSpec& spec, const ClassifierModel& base,
                        const LowFreqRegion& region, const EAConfig& cfg,
                        const TrainConfig& tune, const PreferenceRegion& pref,
                        LossSupport support, int threads);

/// Weighted single-objective baseline: same variation operators, selection
/// by the scalar score alpha * o1_hat + (1 - alpha) * o2_hat where the hats
/// are min-max normalizations over the current parent + offspring pool.
struct SweepPoint {
  double alpha = 0.0;
  double o1 = 0.0;
  double l2 = 0.0;   // o2 of the winner
  double asr = 0.0;  // percent
  double acc = 0.0;  // percent
  double afr = 0.0;  // 1 - asr / 100
};

std::vector<SweepPoint> scalarized_baseline(
    const std::vector<LabeledSample>& data, const PoisonSpec& spec,
    const ClassifierModel& base, const LowFreqRegion& region,
    std::span<const double> alphas, const EAConfig& cfg,
    const TrainConfig& tune, LossSupport support, int threads);

}  // namespace trigopt
