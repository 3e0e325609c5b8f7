#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "trigopt/errors.hpp"
#include "trigopt/rng.hpp"
#include "trigopt/trigger.hpp"

using namespace trigopt;

namespace {

ImageTensor gray_image(int h, int w, int c, double value) {
  ImageTensor img = ImageTensor::zeros(h, w, c);
  std::fill(img.data.begin(), img.data.end(), value);
  return img;
}

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
  Rng rng(seed);
  ImageTensor img = ImageTensor::zeros(h, w, c);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

std::filesystem::path temp_file(const char* stem) {
  auto dir = std::filesystem::temp_directory_path() / "trigopt_trigger_tests";
  std::filesystem::create_directories(dir);
  return dir / stem;
}

}  // namespace

TEST_CASE("trigger constructor enforces every invariant") {
  LowFreqRegion region = low_freq_region(16, 16, 0.183);  // 7 x 7

  CHECK_NOTHROW(Trigger({{0, 0}, {1, 2}}, {0.1, -0.2}, 0.5, region));

  CHECK_THROWS_AS(Trigger({}, {}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 0}}, {0.1, 0.2}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 0}}, {0.1}, 0.0, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 0}}, {0.1}, -1.0, region), ValidationError);
  // band (7, 0) is the first row outside a 7 x 7 region
  CHECK_THROWS_AS(Trigger({{7, 0}}, {0.1}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 7}}, {0.1}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{-1, 0}}, {0.1}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 0}}, {0.6}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{0, 0}}, {-0.6}, 0.5, region), ValidationError);
  CHECK_THROWS_AS(Trigger({{1, 1}, {1, 1}}, {0.1, 0.1}, 0.5, region),
                  ValidationError);

  // boundary magnitude |m| == epsilon is admissible
  CHECK_NOTHROW(Trigger({{0, 0}}, {0.5}, 0.5, region));
  CHECK_NOTHROW(Trigger({{6, 6}}, {-0.5}, 0.5, region));
}

TEST_CASE("random_trigger draws distinct in-region bands") {
  LowFreqRegion region = low_freq_region(32, 32, 0.183);  // 14 x 14
  Rng rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    Trigger t = random_trigger(region, 5, 0.5, rng);
    REQUIRE(t.band_count() == 5);
    std::set<std::pair<int, int>> seen;
    for (const FrequencyBand& b : t.bands()) {
      CHECK(region.contains(b));
      seen.insert({b.u, b.v});
    }
    CHECK(seen.size() == 5);
    for (double m : t.magnitudes()) CHECK(std::abs(m) <= 0.5);
  }

  Rng a(123), b(123);
  Trigger ta = random_trigger(region, 3, 0.4, a);
  Trigger tb = random_trigger(region, 3, 0.4, b);
  CHECK(ta.bands() == tb.bands());
  CHECK(ta.magnitudes() == tb.magnitudes());

  Rng c(5);
  CHECK_THROWS_AS(random_trigger(region, 0, 0.5, c), ValidationError);
  LowFreqRegion tiny = low_freq_region(2, 2, 0.25);  // 1 x 1
  CHECK_THROWS_AS(random_trigger(tiny, 2, 0.5, c), ValidationError);
}

TEST_CASE("injection adds exactly the coefficient deltas on each channel") {
  // [DERIVED] expected spectra computed with the quadruple-loop transform.
  LowFreqRegion region = low_freq_region(8, 8, 0.25);  // 4 x 4
  Trigger t({{0, 1}, {3, 2}, {1, 0}}, {0.3, -0.25, 0.12}, 0.5, region);
  ImageTensor img = random_image(8, 8, 3, 404);

  ImageTensor poisoned = inject_unclipped(img, t);
  auto before = oracle::dct2_direct(img);
  auto after = oracle::dct2_direct(poisoned);

  for (int c = 0; c < 3; ++c) {
    for (int u = 0; u < 8; ++u) {
      for (int v = 0; v < 8; ++v) {
        double expected = before.at(u, v, c);
        if (u == 0 && v == 1) expected += 0.3;
        if (u == 3 && v == 2) expected += -0.25;
        if (u == 1 && v == 0) expected += 0.12;
        CHECK(after.at(u, v, c) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("injection equals adding the inverse transform of the delta") {
  LowFreqRegion region = low_freq_region(16, 12, 0.183);
  Rng rng(99);
  Trigger t = random_trigger(region, 3, 0.5, rng);
  ImageTensor img = random_image(16, 12, 1, 11);

  Spectrum delta = Spectrum::zeros(16, 12, 1);
  for (int k = 0; k < t.band_count(); ++k) {
    delta.at(t.bands()[k].u, t.bands()[k].v, 0) = t.magnitudes()[k];
  }
  ImageTensor pattern = oracle::idct2_direct(delta);

  ImageTensor poisoned = inject_unclipped(img, t);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    CHECK(poisoned.data[i] ==
          doctest::Approx(img.data[i] + pattern.data[i]).epsilon(1e-10));
  }
}

TEST_CASE("inject clamps to the unit range, inject_unclipped does not") {
  LowFreqRegion region = low_freq_region(8, 8, 0.25);
  // A large DC magnitude pushes every pixel of a bright image past 1.
  Trigger t({{0, 0}}, {3.0}, 3.0, region);
  ImageTensor img = gray_image(8, 8, 1, 0.9);

  ImageTensor raw = inject_unclipped(img, t);
  ImageTensor clipped = inject(img, t);
  bool any_above = false;
  for (double v : raw.data) any_above = any_above || v > 1.0;
  CHECK(any_above);
  for (double v : clipped.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    CHECK(clipped.data[i] == doctest::Approx(std::clamp(raw.data[i], 0.0, 1.0)));
  }
}

TEST_CASE("inject rejects mismatched image shapes") {
  LowFreqRegion region = low_freq_region(16, 16, 0.183);
  Rng rng(3);
  Trigger t = random_trigger(region, 3, 0.5, rng);
  ImageTensor wrong = gray_image(8, 8, 3, 0.5);
  CHECK_THROWS_AS(inject(wrong, t), ShapeMismatchError);
}

TEST_CASE("poison_dataset converts ceil(N r) samples and keeps the rest") {
  LowFreqRegion region = low_freq_region(8, 8, 0.25);
  Rng trng(8);
  Trigger t = random_trigger(region, 2, 0.3, trng);

  std::vector<LabeledSample> data;
  for (int i = 0; i < 41; ++i) {
    data.push_back({random_image(8, 8, 1, 1000 + i), i % 4});
  }

  PoisonSpec spec{0.1, 2};
  Rng rng(55);
  PoisonSplit split = poison_dataset(data, spec, t, rng);

  // ceil(41 * 0.1) = 5
  REQUIRE(split.poisoned.size() == 5);
  REQUIRE(split.chosen.size() == 5);
  CHECK(split.clean.size() == 36);
  CHECK(std::is_sorted(split.chosen.begin(), split.chosen.end()));
  CHECK(std::adjacent_find(split.chosen.begin(), split.chosen.end()) ==
        split.chosen.end());

  for (std::size_t k = 0; k < split.chosen.size(); ++k) {
    std::size_t idx = split.chosen[k];
    const PoisonedSample& p = split.poisoned[k];
    CHECK(p.label == 2);
    CHECK(p.original_label == data[idx].label);
    ImageTensor expected = inject(data[idx].image, t);
    CHECK(spatial_disparity(p.image, expected) == doctest::Approx(0.0));
  }

  // the clean side is the complement, in input order
  std::size_t next = 0, ci = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (next < split.chosen.size() && split.chosen[next] == i) {
      ++next;
      continue;
    }
    REQUIRE(ci < split.clean.size());
    CHECK(split.clean[ci].label == data[i].label);
    CHECK(spatial_disparity(split.clean[ci].image, data[i].image) ==
          doctest::Approx(0.0));
    ++ci;
  }

  // identical seed, identical choice
  Rng rng2(55);
  PoisonSplit again = poison_dataset(data, spec, t, rng2);
  CHECK(again.chosen == split.chosen);

  // ratio 1 poisons everything
  Rng rng3(7);
  PoisonSplit all = poison_dataset(data, PoisonSpec{1.0, 0}, t, rng3);
  CHECK(all.poisoned.size() == data.size());
  CHECK(all.clean.empty());

  CHECK_THROWS_AS(poison_dataset({}, spec, t, rng), ValidationError);
  CHECK_THROWS_AS(poison_dataset(data, PoisonSpec{0.0, 0}, t, rng),
                  ValidationError);
  CHECK_THROWS_AS(poison_dataset(data, PoisonSpec{1.5, 0}, t, rng),
                  ValidationError);
  CHECK_THROWS_AS(poison_dataset(data, PoisonSpec{0.1, -1}, t, rng),
                  ValidationError);
}

TEST_CASE("objectives reduce to the documented closed forms") {
  LowFreqRegion region = low_freq_region(16, 16, 0.183);
  Trigger t({{0, 0}, {3, 4}, {1, 1}}, {0.3, -0.4, 0.12}, 0.5, region);

  // [TRIVIAL] l2 of (0.3, -0.4, 0.12) and sum of band norms
  double expect_stealth = std::sqrt(0.3 * 0.3 + 0.4 * 0.4 + 0.12 * 0.12);
  CHECK(objective_stealth(t) == doctest::Approx(expect_stealth).epsilon(1e-12));
  double expect_lowfreq = 0.0 + 5.0 + std::sqrt(2.0);
  CHECK(objective_lowfreq(t) == doctest::Approx(expect_lowfreq).epsilon(1e-12));
}

TEST_CASE("unclipped injection moves the image by the magnitude norm") {
  // The transform is an isometry, so as long as nothing clips the pixel-space
  // displacement equals the coefficient displacement.
  LowFreqRegion region = low_freq_region(16, 16, 0.183);
  Rng rng(21);
  Trigger t = random_trigger(region, 3, 0.1, rng);
  ImageTensor img = gray_image(16, 16, 1, 0.5);
  ImageTensor poisoned = inject_unclipped(img, t);
  CHECK(spatial_disparity(img, poisoned) ==
        doctest::Approx(objective_stealth(t)).epsilon(1e-10));
}

TEST_CASE("spatial_disparity hand value") {
  ImageTensor a = gray_image(2, 2, 1, 0.0);
  ImageTensor b = gray_image(2, 2, 1, 0.0);
  b.at(0, 0, 0) = 3.0;
  b.at(1, 1, 0) = 4.0;
  CHECK(spatial_disparity(a, b) == doctest::Approx(5.0));  // [TRIVIAL]
  CHECK_THROWS_AS(spatial_disparity(a, gray_image(2, 3, 1, 0.0)),
                  ShapeMismatchError);
}

TEST_CASE("trigger manifest round-trips through disk") {
  LowFreqRegion region = low_freq_region(32, 32, 0.183);
  Trigger t({{2, 3}, {0, 0}, {13, 13}}, {0.25, -0.5, 1e-3}, 0.5, region);
  TriggerManifest manifest{t, 3};

  auto path = temp_file("roundtrip.json");
  save_trigger_manifest(manifest, path.string());
  TriggerManifest loaded = load_trigger_manifest(path.string());

  CHECK(loaded.channels == 3);
  CHECK(loaded.trigger.bands() == t.bands());
  CHECK(loaded.trigger.magnitudes() == t.magnitudes());
  CHECK(loaded.trigger.epsilon() == t.epsilon());
  CHECK(loaded.trigger.region().rows == region.rows);
  CHECK(loaded.trigger.region().cols == region.cols);
  CHECK(loaded.trigger.region().fraction == doctest::Approx(region.fraction));

  // stable key set in the serialized form
  nlohmann::json doc = nlohmann::json::parse(trigger_manifest_json(manifest));
  for (const char* key : {"format_version", "height", "width", "channels",
                          "region_fraction", "epsilon", "bands", "magnitudes"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc.size() == 8);
  CHECK(doc["bands"].size() == 3);
}

TEST_CASE("trigger manifest loading is strict") {
  auto write = [](const std::filesystem::path& p, const nlohmann::json& doc) {
    std::ofstream out(p);
    out << doc.dump(2);
  };
  nlohmann::json good = {
      {"format_version", 1},   {"height", 16},
      {"width", 16},           {"channels", 3},
      {"region_fraction", 0.183}, {"epsilon", 0.5},
      {"bands", {{0, 1}, {2, 2}}}, {"magnitudes", {0.1, -0.2}}};

  auto p = temp_file("strict.json");
  write(p, good);
  CHECK_NOTHROW(load_trigger_manifest(p.string()));

  nlohmann::json missing = good;
  missing.erase("epsilon");
  write(p, missing);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  nlohmann::json extra = good;
  extra["surprise"] = 1;
  write(p, extra);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  nlohmann::json bad_version = good;
  bad_version["format_version"] = 9;
  write(p, bad_version);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  nlohmann::json bad_magnitude = good;
  bad_magnitude["magnitudes"] = {0.1, 0.9};  // above epsilon
  write(p, bad_magnitude);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  nlohmann::json dup_bands = good;
  dup_bands["bands"] = {{0, 1}, {0, 1}};
  write(p, dup_bands);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  nlohmann::json bad_band = good;
  bad_band["bands"] = {{0, 1}, {2}};
  write(p, bad_band);
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  std::ofstream(p) << "not json";
  CHECK_THROWS_AS(load_trigger_manifest(p.string()), DatasetError);

  CHECK_THROWS_AS(load_trigger_manifest("/nonexistent/trigger.json"),
                  DatasetError);
}
