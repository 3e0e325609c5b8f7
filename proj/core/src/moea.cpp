#include "trigopt/moea.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "trigopt/errors.hpp"
#include "trigopt/threading.hpp"

namespace trigopt {

namespace {

// Fixed tags keep every random stream of a run distinct.
constexpr std::uint64_t kInitTag = 0xA001;
constexpr std::uint64_t kVariationTag = 0xB002;
constexpr std::uint64_t kEvalTag = 0xC003;
constexpr std::uint64_t kSweepTag = 0xD004;

void require_compatible(const Trigger& a, const Trigger& b) {
  if (a.band_count() != b.band_count() ||
      a.region().height != b.region().height ||
      a.region().width != b.region().width ||
      a.region().rows != b.region().rows ||
      a.region().cols != b.region().cols || a.epsilon() != b.epsilon()) {
    throw ValidationError("sbx_crossover: parents are incompatible");
  }
}

FrequencyBand random_band(const LowFreqRegion& region, Rng& rng) {
  return {static_cast<int>(rng.uniform_int(0, region.rows - 1)),
          static_cast<int>(rng.uniform_int(0, region.cols - 1))};
}

// Redraws any band equal to an earlier one; result is pairwise distinct.
void repair_duplicates(std::vector<FrequencyBand>& bands,
                       const LowFreqRegion& region, Rng& rng) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    bool clash = true;
    while (clash) {
      clash = false;
      for (std::size_t j = 0; j < i; ++j) {
        if (bands[j] == bands[i]) {
          clash = true;
          bands[i] = random_band(region, rng);
          break;
        }
      }
    }
  }
}

std::vector<ObjectiveVector> objectives_of(std::span<const Member> members) {
  std::vector<ObjectiveVector> points;
  points.reserve(members.size());
  for (const Member& m : members) {
    points.push_back(m.objectives);
  }
  return points;
}

int pick_best_normalized(const Population& pop) {
  const auto& members = pop.members;
  double mins[3] = {std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  double maxs[3] = {-std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity()};
  for (const Member& m : members) {
    double o[3] = {m.objectives.o1, m.objectives.o2, m.objectives.o3};
    for (int k = 0; k < 3; ++k) {
      mins[k] = std::min(mins[k], o[k]);
      maxs[k] = std::max(maxs[k], o[k]);
    }
  }
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    double o[3] = {members[i].objectives.o1, members[i].objectives.o2,
                   members[i].objectives.o3};
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      double range = maxs[k] - mins[k];
      if (range > 0.0) {
        double z = (o[k] - mins[k]) / range;
        acc += z * z;
      }
    }
    double dist = std::sqrt(acc);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<Member> evaluate_all(const std::vector<Trigger>& triggers,
                                 const TriggerEvaluator& evaluator,
                                 int generation, int threads) {
  std::vector<Evaluation> evals(triggers.size());
  parallel_for(triggers.size(), threads, [&](std::size_t i) {
    evals[i] = evaluator(triggers[i], generation, static_cast<int>(i));
  });
  std::vector<Member> members;
  members.reserve(triggers.size());
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    members.push_back(
        {triggers[i], evals[i].objectives, evals[i].asr, evals[i].acc});
  }
  return members;
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool no_worse =
      a.o1 <= b.o1 && a.o2 <= b.o2 && a.o3 <= b.o3;
  bool better = a.o1 < b.o1 || a.o2 < b.o2 || a.o3 < b.o3;
  return no_worse && better;
}

std::vector<std::vector<int>> nd_sort(std::span<const ObjectiveVector> points) {
  int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
  std::vector<int> dominator_count(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dominates(points[i], points[j])) {
        dominated[i].push_back(j);
        ++dominator_count[j];
      } else if (dominates(points[j], points[i])) {
        dominated[j].push_back(i);
        ++dominator_count[i];
      }
    }
  }
  std::vector<std::vector<int>> fronts;
  std::vector<int> current;
  for (int i = 0; i < n; ++i) {
    if (dominator_count[i] == 0) {
      current.push_back(i);
    }
  }
  while (!current.empty()) {
    std::vector<int> next;
    for (int i : current) {
      for (int j : dominated[i]) {
        if (--dominator_count[j] == 0) {
          next.push_back(j);
        }
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> sparsity(std::span<const ObjectiveVector> front) {
  std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n == 0) {
    return distance;
  }
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(),
              std::numeric_limits<double>::infinity());
    return distance;
  }
  auto component = [&](std::size_t i, int m) {
    return m == 0 ? front[i].o1 : (m == 1 ? front[i].o2 : front[i].o3);
  };
  std::vector<std::size_t> order(n);
  for (int m = 0; m < 3; ++m) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return component(a, m) < component(b, m);
                     });
    distance[order.front()] = std::numeric_limits<double>::infinity();
    distance[order.back()] = std::numeric_limits<double>::infinity();
    double range = component(order.back(), m) - component(order.front(), m);
    if (range <= 0.0) {
      continue;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      distance[order[k]] +=
          (component(order[k + 1], m) - component(order[k - 1], m)) / range;
    }
  }
  return distance;
}

void validate(const PreferenceRegion& pref) {
  for (double b : {pref.o1_bound, pref.o2_bound, pref.o3_bound}) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw ValidationError("PreferenceRegion: bounds must be positive");
    }
  }
}

double pref_distance(const ObjectiveVector& point,
                     const PreferenceRegion& pref) {
  double d1 = std::max(0.0, point.o1 - pref.o1_bound);
  double d2 = std::max(0.0, point.o2 - pref.o2_bound);
  double d3 = std::max(0.0, point.o3 - pref.o3_bound);
  return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

std::vector<int> rnd_sort_select_indices(
    std::span<const ObjectiveVector> points, int capacity,
    const PreferenceRegion& pref) {
  validate(pref);
  if (capacity < 1) {
    throw ValidationError("rnd_sort_select: capacity must be positive");
  }
  std::vector<std::vector<int>> fronts = nd_sort(points);
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(capacity));
  std::size_t fi = 0;
  while (fi < fronts.size() &&
         selected.size() + fronts[fi].size() <=
             static_cast<std::size_t>(capacity)) {
    selected.insert(selected.end(), fronts[fi].begin(), fronts[fi].end());
    ++fi;
  }
  if (selected.size() < static_cast<std::size_t>(capacity) &&
      fi < fronts.size()) {
    std::vector<int> rest;
    for (std::size_t f = fi; f < fronts.size(); ++f) {
      rest.insert(rest.end(), fronts[f].begin(), fronts[f].end());
    }
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
      double da = pref_distance(points[a], pref);
      double db = pref_distance(points[b], pref);
      if (da != db) {
        return da < db;
      }
      return a < b;
    });
    std::size_t need = static_cast<std::size_t>(capacity) - selected.size();
    selected.insert(selected.end(), rest.begin(),
                    rest.begin() + static_cast<long>(std::min(need, rest.size())));
  }
  return selected;
}

std::vector<Member> rnd_sort_select(std::vector<Member> combined, int capacity,
                                    const PreferenceRegion& pref) {
  std::vector<ObjectiveVector> points = objectives_of(combined);
  std::vector<int> keep = rnd_sort_select_indices(points, capacity, pref);
  std::vector<Member> out;
  out.reserve(keep.size());
  for (int i : keep) {
    out.push_back(std::move(combined[static_cast<std::size_t>(i)]));
  }
  return out;
}

double sbx_spread(double u, double eta) {
  double exponent = 1.0 / (eta + 1.0);
  if (u <= 0.5) {
    return std::pow(2.0 * u, exponent);
  }
  return std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

std::pair<double, double> sbx_children(double p1, double p2, double spread) {
  double c1 = 0.5 * ((1.0 + spread) * p1 + (1.0 - spread) * p2);
  double c2 = 0.5 * ((1.0 - spread) * p1 + (1.0 + spread) * p2);
  return {c1, c2};
}

double pm_perturbed(double y, double lo, double hi, double u, double eta) {
  if (!(lo < hi)) {
    throw ValidationError("pm_perturbed: require lo < hi");
  }
  double range = hi - lo;
  double d1 = (y - lo) / range;
  double d2 = (hi - y) / range;
  double mut_pow = 1.0 / (eta + 1.0);
  double dq;
  if (u < 0.5) {
    double xy = 1.0 - d1;
    double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
    dq = std::pow(val, mut_pow) - 1.0;
  } else {
    double xy = 1.0 - d2;
    double val =
        2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
    dq = 1.0 - std::pow(val, mut_pow);
  }
  return std::clamp(y + dq * range, lo, hi);
}

void validate(const EAConfig& cfg) {
  if (cfg.population < 2) {
    throw ValidationError("EAConfig: population must be at least 2");
  }
  if (cfg.generations < 0) {
    throw ValidationError("EAConfig: generations must be non-negative");
  }
  if (cfg.n_bands < 1) {
    throw ValidationError("EAConfig: n_bands must be positive");
  }
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw ValidationError("EAConfig: epsilon must be positive");
  }
  if (!(cfg.sbx_eta > 0.0) || !(cfg.pm_eta > 0.0)) {
    throw ValidationError("EAConfig: distribution indices must be positive");
  }
  if (cfg.crossover_prob < 0.0 || cfg.crossover_prob > 1.0 ||
      cfg.mutation_prob < 0.0 || cfg.mutation_prob > 1.0) {
    throw ValidationError("EAConfig: probabilities must lie in [0, 1]");
  }
  if (!(cfg.band_shift_rate > 0.0)) {
    throw ValidationError("EAConfig: band_shift_rate must be positive");
  }
}

std::pair<Trigger, Trigger> sbx_crossover(const Trigger& a, const Trigger& b,
                                          const EAConfig& cfg, Rng& rng) {
  require_compatible(a, b);
  std::vector<double> m1 = a.magnitudes();
  std::vector<double> m2 = b.magnitudes();
  std::vector<FrequencyBand> b1 = a.bands();
  std::vector<FrequencyBand> b2 = b.bands();
  double eps = a.epsilon();

  if (rng.uniform() < cfg.crossover_prob) {
    for (std::size_t k = 0; k < m1.size(); ++k) {
      if (rng.uniform() < 0.5) {
        double spread = sbx_spread(rng.uniform(), cfg.sbx_eta);
        auto [c1, c2] = sbx_children(m1[k], m2[k], spread);
        m1[k] = std::clamp(c1, -eps, eps);
        m2[k] = std::clamp(c2, -eps, eps);
      }
    }
    for (std::size_t k = 0; k < b1.size(); ++k) {
      if (rng.uniform() < 0.5) {
        std::swap(b1[k], b2[k]);
      }
    }
  }
  repair_duplicates(b1, a.region(), rng);
  repair_duplicates(b2, a.region(), rng);
  return {Trigger(std::move(b1), std::move(m1), eps, a.region()),
          Trigger(std::move(b2), std::move(m2), eps, a.region())};
}

Trigger pm_mutation(const Trigger& trigger, const EAConfig& cfg, Rng& rng) {
  std::vector<double> mags = trigger.magnitudes();
  std::vector<FrequencyBand> bands = trigger.bands();
  const LowFreqRegion& region = trigger.region();
  double eps = trigger.epsilon();

  for (double& m : mags) {
    if (rng.uniform() < cfg.mutation_prob) {
      m = pm_perturbed(m, -eps, eps, rng.uniform(), cfg.pm_eta);
    }
  }
  for (FrequencyBand& band : bands) {
    if (rng.uniform() < cfg.mutation_prob) {
      long du = std::lround(rng.exponential(cfg.band_shift_rate));
      int su = rng.uniform() < 0.5 ? -1 : 1;
      long dv = std::lround(rng.exponential(cfg.band_shift_rate));
      int sv = rng.uniform() < 0.5 ? -1 : 1;
      band.u = std::clamp(band.u + static_cast<int>(su * du), 0,
                          region.rows - 1);
      band.v = std::clamp(band.v + static_cast<int>(sv * dv), 0,
                          region.cols - 1);
    }
  }
  repair_duplicates(bands, region, rng);
  return Trigger(std::move(bands), std::move(mags), eps, region);
}

std::vector<Trigger> make_offspring(std::span<const Member> parents,
                                    const EAConfig& cfg, Rng& rng) {
  if (parents.size() < 2) {
    throw ValidationError("make_offspring: need at least two parents");
  }
  std::vector<std::size_t> order(parents.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<Trigger> offspring;
  offspring.reserve(parents.size());
  std::size_t i = 0;
  for (; i + 1 < order.size(); i += 2) {
    auto [c1, c2] = sbx_crossover(parents[order[i]].trigger,
                                  parents[order[i + 1]].trigger, cfg, rng);
    offspring.push_back(pm_mutation(c1, cfg, rng));
    if (offspring.size() < parents.size()) {
      offspring.push_back(pm_mutation(c2, cfg, rng));
    }
  }
  if (offspring.size() < parents.size()) {
    // odd parent count: cross the leftover with the first of the shuffle
    auto [c1, c2] = sbx_crossover(parents[order.back()].trigger,
                                  parents[order.front()].trigger, cfg, rng);
    offspring.push_back(pm_mutation(c1, cfg, rng));
  }
  return offspring;
}

OptimizeResult evolve(const TriggerEvaluator& evaluator,
                      const LowFreqRegion& region, const EAConfig& cfg,
                      const PreferenceRegion& pref, int threads) {
  validate(cfg);
  validate(pref);
  if (static_cast<long long>(cfg.n_bands) > region.band_count()) {
    throw ValidationError("evolve: region too small for n_bands");
  }

  Rng init_rng(derive_seed(cfg.master_seed, {kInitTag}));
  std::vector<Trigger> triggers;
  triggers.reserve(static_cast<std::size_t>(cfg.population));
  for (int i = 0; i < cfg.population; ++i) {
    triggers.push_back(
        random_trigger(region, cfg.n_bands, cfg.epsilon, init_rng));
  }

  Population pop{evaluate_all(triggers, evaluator, 0, threads), 0};
  std::vector<Population> history;
  history.push_back(pop);

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    Rng var_rng(derive_seed(cfg.master_seed, {kVariationTag,
                                              static_cast<std::uint64_t>(gen)}));
    std::vector<Trigger> children = make_offspring(pop.members, cfg, var_rng);
    std::vector<Member> offspring =
        evaluate_all(children, evaluator, gen, threads);

    std::vector<Member> combined = pop.members;
    combined.insert(combined.end(),
                    std::make_move_iterator(offspring.begin()),
                    std::make_move_iterator(offspring.end()));
    pop.members = rnd_sort_select(std::move(combined), cfg.population, pref);
    pop.generation = gen;
    history.push_back(pop);
  }

  int best_index = pick_best_normalized(pop);
  Member best = pop.members[static_cast<std::size_t>(best_index)];
  return OptimizeResult{std::move(history), std::move(best), best_index};
}

OptimizeResult optimize(const std::vector<LabeledSample>& data,
                        const PoisonSpec& spec, const ClassifierModel& base,
                        const LowFreqRegion& region, const EAConfig& cfg,
                        const TrainConfig& tune, const PreferenceRegion& pref,
                        LossSupport support, int threads) {
  TriggerEvaluator evaluator = [&](const Trigger& trigger, int generation,
                                   int index) {
    std::uint64_t seed = derive_seed(
        cfg.master_seed, {kEvalTag, static_cast<std::uint64_t>(generation),
                          static_cast<std::uint64_t>(index)});
    EvalOutcome out =
        evaluate_trigger(base, data, spec, trigger, tune, support, seed);
    return Evaluation{{out.o1, objective_stealth(trigger),
                       objective_lowfreq(trigger)},
                      out.report.asr, out.report.acc};
  };
  return evolve(evaluator, region, cfg, pref, threads);
}

std::vector<SweepPoint> scalarized_baseline(
    const std::vector<LabeledSample>& data, const PoisonSpec& spec,
    const ClassifierModel& base, const LowFreqRegion& region,
    std::span<const double> alphas, const EAConfig& cfg,
    const TrainConfig& tune, LossSupport support, int threads) {
  validate(cfg);
  if (alphas.empty()) {
    throw ValidationError("scalarized_baseline: no alphas given");
  }
  for (double a : alphas) {
    if (a < 0.0 || a > 1.0 || !std::isfinite(a)) {
      throw ValidationError("scalarized_baseline: alpha must lie in [0, 1]");
    }
  }

  // Scores are computed on min-max normalized objectives; a degenerate
  // range normalizes to zero.
  auto scores_of = [](std::span<const Member> members, double alpha) {
    double min1 = std::numeric_limits<double>::infinity(), max1 = -min1;
    double min2 = std::numeric_limits<double>::infinity(), max2 = -min2;
    for (const Member& m : members) {
      min1 = std::min(min1, m.objectives.o1);
      max1 = std::max(max1, m.objectives.o1);
      min2 = std::min(min2, m.objectives.o2);
      max2 = std::max(max2, m.objectives.o2);
    }
    std::vector<double> scores(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      double h1 = max1 > min1
                      ? (members[i].objectives.o1 - min1) / (max1 - min1)
                      : 0.0;
      double h2 = max2 > min2
                      ? (members[i].objectives.o2 - min2) / (max2 - min2)
                      : 0.0;
      scores[i] = alpha * h1 + (1.0 - alpha) * h2;
    }
    return scores;
  };

  std::vector<SweepPoint> table;
  table.reserve(alphas.size());
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    double alpha = alphas[ai];
    std::uint64_t run_seed =
        derive_seed(cfg.master_seed, {kSweepTag, static_cast<std::uint64_t>(ai)});
    EAConfig run_cfg = cfg;
    run_cfg.master_seed = run_seed;

    TriggerEvaluator evaluator = [&](const Trigger& trigger, int generation,
                                     int index) {
      std::uint64_t seed = derive_seed(
          run_seed, {kEvalTag, static_cast<std::uint64_t>(generation),
                     static_cast<std::uint64_t>(index)});
      EvalOutcome out =
          evaluate_trigger(base, data, spec, trigger, tune, support, seed);
      return Evaluation{{out.o1, objective_stealth(trigger),
                         objective_lowfreq(trigger)},
                        out.report.asr, out.report.acc};
    };

    Rng init_rng(derive_seed(run_seed, {kInitTag}));
    std::vector<Trigger> triggers;
    for (int i = 0; i < run_cfg.population; ++i) {
      triggers.push_back(
          random_trigger(region, run_cfg.n_bands, run_cfg.epsilon, init_rng));
    }
    std::vector<Member> pop = evaluate_all(triggers, evaluator, 0, threads);

    for (int gen = 1; gen <= run_cfg.generations; ++gen) {
      Rng var_rng(derive_seed(run_seed, {kVariationTag,
                                         static_cast<std::uint64_t>(gen)}));
      std::vector<Trigger> children = make_offspring(pop, run_cfg, var_rng);
      std::vector<Member> offspring =
          evaluate_all(children, evaluator, gen, threads);
      std::vector<Member> combined = std::move(pop);
      combined.insert(combined.end(),
                      std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
      std::vector<double> scores = scores_of(combined, alpha);
      std::vector<std::size_t> order(combined.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return scores[a] < scores[b];
                       });
      std::vector<Member> survivors;
      survivors.reserve(static_cast<std::size_t>(run_cfg.population));
      for (int i = 0; i < run_cfg.population; ++i) {
        survivors.push_back(std::move(combined[order[static_cast<std::size_t>(i)]]));
      }
      pop = std::move(survivors);
    }

    std::vector<double> final_scores = scores_of(pop, alpha);
    std::size_t winner = static_cast<std::size_t>(
        std::min_element(final_scores.begin(), final_scores.end()) -
        final_scores.begin());
    const Member& m = pop[winner];
    table.push_back({alpha, m.objectives.o1, m.objectives.o2, m.asr, m.acc,
                     1.0 - m.asr / 100.0});
  }
  return table;
}

}  // namespace trigopt
