#pragma once

// Seeded synthetic benchmark data: per-cluster recipes of level, trend,
// sinusoidal seasonality and Gaussian noise, observed through a randomly
// offset window so that members of one cluster are out of phase by up to
// `shift_range` steps.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tastic/clustering.hpp"
#include "tastic/error.hpp"
#include "tastic/series.hpp"

namespace tastic {

struct ClusterRecipe {
  std::size_t count = 1;
  double level = 0.0;
  /// Slope per time step.
  double trend = 0.0;
  double amplitude = 0.0;
  /// Seasonal period in time steps.
  double period = 12.0;
  double phase = 0.0;
  double noise_sd = 0.0;
  /// Per-series standard deviation of the level offset.
  double level_jitter = 0.0;
  /// Per-series standard deviation of the slope offset.
  double trend_jitter = 0.0;
};

struct GeneratorSpec {
  /// Benchmark class 1, 2 or 3 (informational).
  int benchmark_class = 3;
  std::vector<ClusterRecipe> recipes;
  std::size_t length = 12;
  /// Largest window offset; each series starts at a uniform offset in
  /// {0, ..., shift_range} of a length + shift_range long signal.
  std::size_t shift_range = 3;
  std::uint64_t seed = 1;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : recipes) n += r.count;
    return n;
  }

  void validate() const {
    if (benchmark_class < 1 || benchmark_class > 3) throw invalid_input("class must be 1, 2 or 3");
    if (recipes.empty()) throw invalid_input("generator needs at least one cluster recipe");
    if (length < 2) throw invalid_input("series length must be >= 2");
    if (shift_range >= length) throw invalid_input("shift range must be smaller than the length");
    for (const auto& r : recipes) {
      if (r.count < 1) throw invalid_input("cluster count must be >= 1");
      if (!(r.period > 0.0)) throw invalid_input("period must be > 0");
      if (!(r.amplitude >= 0.0) || !(r.noise_sd >= 0.0) || !(r.level_jitter >= 0.0) ||
          !(r.trend_jitter >= 0.0)) {
        throw invalid_input("amplitude, noise and jitter must be >= 0");
      }
      for (double v : {r.level, r.trend, r.amplitude, r.period, r.phase, r.noise_sd,
                       r.level_jitter, r.trend_jitter}) {
        if (!std::isfinite(v)) throw invalid_input("recipe values must be finite");
      }
    }
  }
};

struct GeneratedData {
  Dataset data;
  ClusterLabels truth;
};

/// Series i of cluster j: value at window position t is
///   level_i + trend_i * s + amplitude * sin(2 pi (s + phase) / period) + noise
/// with s = t + offset_i. Draw order per series: offset, level offset, slope
/// offset, then one noise value per position.
inline GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> offset_dist(0, spec.shift_range);
  std::normal_distribution<double> std_normal(0.0, 1.0);

  const std::size_t n = spec.total();
  const std::size_t width = std::to_string(n).size();
  GeneratedData out;
  out.data.reserve(n);
  std::vector<int> raw;
  raw.reserve(n);

  for (std::size_t j = 0; j < spec.recipes.size(); ++j) {
    const auto& r = spec.recipes[j];
    for (std::size_t m = 0; m < r.count; ++m) {
      const std::size_t offset = offset_dist(rng);
      const double level = r.level + r.level_jitter * std_normal(rng);
      const double trend = r.trend + r.trend_jitter * std_normal(rng);
      TimeSeries s;
      std::string num = std::to_string(out.data.size() + 1);
      s.id = "s" + std::string(width - num.size(), '0') + num;
      s.values.resize(spec.length);
      for (std::size_t t = 0; t < spec.length; ++t) {
        const double at = static_cast<double>(t + offset);
        s.values[t] = level + trend * at +
                      r.amplitude * std::sin(2.0 * std::numbers::pi * (at + r.phase) / r.period) +
                      r.noise_sd * std_normal(rng);
      }
      out.data.push_back(std::move(s));
      raw.push_back(static_cast<int>(j + 1));
    }
  }
  out.truth = ClusterLabels::from_raw(raw);
  return out;
}

namespace detail {

inline std::vector<std::size_t> split_counts(std::size_t n, std::size_t k) {
  std::vector<std::size_t> counts(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++counts[i];
  return counts;
}

// Shapes shared by the presets.
struct Shape {
  double trend = 0.0;
  double amplitude = 0.0;
  double period = 12.0;
  double phase = 0.0;
};

inline constexpr Shape kFlatWave{0.0, 0.4, 6.0, 0.0};
inline constexpr Shape kRising{0.1, 0.0, 12.0, 0.0};
inline constexpr Shape kFalling{-0.1, 0.0, 12.0, 0.0};
inline constexpr Shape kPeak{0.0, 0.8, 12.0, 0.0};
inline constexpr Shape kTrough{0.0, 0.8, 12.0, 6.0};

inline GeneratorSpec make_spec(int cls, std::size_t n,
                               const std::vector<std::pair<double, Shape>>& clusters,
                               double noise, double level_jitter, double trend_jitter) {
  GeneratorSpec spec;
  spec.benchmark_class = cls;
  const auto counts = split_counts(n, clusters.size());
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    const auto& [level, shape] = clusters[j];
    spec.recipes.push_back({counts[j], level, shape.trend, shape.amplitude, shape.period,
                            shape.phase, noise, level_jitter, trend_jitter});
  }
  return spec;
}

// Class 1: one shared mild wave; clusters differ in level only.
inline GeneratorSpec class1(std::size_t n, std::vector<double> levels) {
  std::vector<std::pair<double, Shape>> clusters;
  for (double l : levels) clusters.push_back({l, kFlatWave});
  return make_spec(1, n, clusters, 0.25, 0.15, 0.0);
}

// Class 2: overlapping levels; clusters differ in trend sign, period or phase.
inline GeneratorSpec class2(std::size_t n, std::size_t k) {
  static const std::vector<Shape> shapes{
      {0.2, 0.0, 12.0, 0.0},  {-0.2, 0.0, 12.0, 0.0}, {0.0, 1.0, 6.0, 0.0},
      {0.0, 1.0, 12.0, 0.0},  {0.0, 1.0, 12.0, 6.0},  {0.0, 1.0, 4.0, 0.0},
      {0.15, 0.7, 6.0, 0.0},  {-0.15, 0.7, 6.0, 0.0}, {0.0, 1.0, 8.0, 2.0},
  };
  std::vector<std::pair<double, Shape>> clusters;
  for (std::size_t j = 0; j < k; ++j) clusters.push_back({8.0, shapes[j]});
  return make_spec(2, n, clusters, 0.2, 0.8, 0.0);
}

}  // namespace detail

/// Names of the built-in benchmark presets.
inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"G1_1", "G1_2", "G1_3", "G2_1", "G2_2",
                                              "G2_3", "G3_1", "G3_2", "G3_3"};
  return names;
}

/// Built-in preset by name, with the given seed. Sizes and cluster counts:
/// G1_1 30/3, G1_2 45/4, G1_3 75/7, G2_1 30/3, G2_2 50/5, G2_3 90/9,
/// G3_1 90/7, G3_2 60/5, G3_3 40/4. Length 12, window offsets up to 3.
inline std::optional<GeneratorSpec> preset(std::string_view name, std::uint64_t seed = 1) {
  using namespace detail;
  std::optional<GeneratorSpec> spec;
  if (name == "G1_1") spec = class1(30, {6.5, 8.5, 10.5});
  else if (name == "G1_2") spec = class1(45, {6.0, 7.5, 9.0, 10.5});
  else if (name == "G1_3") spec = class1(75, {5.5, 6.5, 7.5, 8.5, 9.5, 10.5, 11.5});
  else if (name == "G2_1") spec = class2(30, 3);
  else if (name == "G2_2") spec = class2(50, 5);
  else if (name == "G2_3") spec = class2(90, 9);
  // Class 3: two level bands, each holding several shapes, and each shape
  // recurring in both bands. Level jitter is large enough that raw distance
  // confuses shapes within a band.
  else if (name == "G3_1")
    spec = make_spec(3, 90,
                     {{7.0, kRising}, {7.0, kFalling}, {7.0, kPeak}, {7.0, kTrough},
                      {11.0, kRising}, {11.0, kFalling}, {11.0, kPeak}},
                     0.08, 0.6, 0.01);
  else if (name == "G3_2")
    spec = make_spec(3, 60,
                     {{7.0, kRising}, {7.0, kFalling}, {7.0, kPeak}, {11.0, kRising}, {11.0, kPeak}},
                     0.08, 0.6, 0.01);
  else if (name == "G3_3")
    spec = make_spec(3, 40, {{7.0, kRising}, {7.0, kFalling}, {11.0, kRising}, {11.0, kFalling}},
                     0.08, 0.6, 0.01);
  if (spec) spec->seed = seed;
  return spec;
}

}  // namespace tastic
