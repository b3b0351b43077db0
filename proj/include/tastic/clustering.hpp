#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tastic/error.hpp"
#include "tastic/matrix.hpp"
#include "tastic/series.hpp"

namespace tastic {

enum class Linkage { single, complete, average };

inline constexpr std::string_view linkage_name(Linkage l) {
  switch (l) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
  }
  return "?";
}

inline std::optional<Linkage> parse_linkage(std::string_view name) {
  if (name == "single") return Linkage::single;
  if (name == "complete") return Linkage::complete;
  if (name == "average") return Linkage::average;
  return std::nullopt;
}

/// One agglomeration step. Leaves are 0..n-1; the cluster created by merge m
/// (0-based) has id n + m. Always a < b.
struct Merge {
  std::size_t a;
  std::size_t b;
  double height;
  std::size_t id;
};

struct Dendrogram {
  std::size_t n = 0;
  std::vector<Merge> merges;

  /// True when merge heights never decrease (no inversions).
  bool monotone() const {
    for (std::size_t m = 1; m < merges.size(); ++m) {
      if (merges[m].height < merges[m - 1].height) return false;
    }
    return true;
  }
};

/// Flat cluster assignment with labels 1..k, every label used.
struct ClusterLabels {
  std::vector<int> assignments;
  int k = 0;

  std::size_t size() const noexcept { return assignments.size(); }

  /// Relabels arbitrary integer labels to 1..k in order of first appearance.
  static ClusterLabels from_raw(const std::vector<int>& raw) {
    ClusterLabels out;
    out.assignments.reserve(raw.size());
    std::unordered_map<int, int> seen;
    for (int r : raw) {
      auto [it, inserted] = seen.try_emplace(r, out.k + 1);
      if (inserted) ++out.k;
      out.assignments.push_back(it->second);
    }
    return out;
  }

  void validate() const {
    if (assignments.empty() || k < 1) throw contract_error("labels are empty");
    std::vector<char> used(static_cast<std::size_t>(k), 0);
    for (int a : assignments) {
      if (a < 1 || a > k) throw contract_error("label out of range 1..k");
      used[static_cast<std::size_t>(a - 1)] = 1;
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
      throw contract_error("every label 1..k must have a member");
    }
  }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignments) ++sizes[static_cast<std::size_t>(a - 1)];
    return sizes;
  }
};

/// Agglomerative hierarchical clustering over a dissimilarity matrix.
///
/// Inter-cluster distances follow the Lance-Williams updates for the chosen
/// linkage. At each step the pair minimizing (distance, smaller id, larger id)
/// is merged. A per-slot nearest-neighbour cache keeps the typical cost at
/// O(n^2).
inline Dendrogram agglomerate(const DissimilarityMatrix& matrix, Linkage linkage) {
  validate_matrix(matrix);
  const std::size_t n = matrix.n;
  if (n == 0) throw insufficient_data("cannot cluster an empty matrix");

  Dendrogram out;
  out.n = n;
  if (n == 1) return out;
  out.merges.reserve(n - 1);

  std::vector<double> d = matrix.entries;
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), std::size_t{0});
  std::vector<std::size_t> members(n, 1);
  std::vector<char> active(n, 1);
  std::vector<std::size_t> nn(n, 0);

  auto key = [&](std::size_t i, std::size_t j) {
    return std::tuple{d[i * n + j], std::min(id[i], id[j]), std::max(id[i], id[j])};
  };
  auto refresh = [&](std::size_t i) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (best == n || key(i, j) < key(i, best)) best = j;
    }
    nn[i] = best;
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t i = n;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      if (i == n || key(s, nn[s]) < key(i, nn[i])) i = s;
    }
    const std::size_t j = nn[i];
    const std::size_t lo = std::min(i, j);
    const std::size_t hi = std::max(i, j);
    const double height = d[i * n + j];
    const std::size_t new_id = n + step;
    out.merges.push_back({std::min(id[i], id[j]), std::max(id[i], id[j]), height, new_id});

    const double wl = static_cast<double>(members[lo]);
    const double wh = static_cast<double>(members[hi]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == lo || k == hi) continue;
      const double dl = d[k * n + lo];
      const double dh = d[k * n + hi];
      double merged = 0.0;
      switch (linkage) {
        case Linkage::single: merged = std::min(dl, dh); break;
        case Linkage::complete: merged = std::max(dl, dh); break;
        case Linkage::average: merged = (wl * dl + wh * dh) / (wl + wh); break;
      }
      d[k * n + lo] = merged;
      d[lo * n + k] = merged;
    }
    active[hi] = 0;
    id[lo] = new_id;
    members[lo] += members[hi];

    if (step + 2 == n) break;
    refresh(lo);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == lo) continue;
      if (nn[k] == lo || nn[k] == hi) {
        refresh(k);
      } else if (key(k, lo) < key(k, nn[k])) {
        nn[k] = lo;
      }
    }
  }
  return out;
}

/// Flat clustering with k clusters: the last k - 1 merges are undone. Labels
/// are numbered 1..k in order of first member appearance.
inline ClusterLabels cut(const Dendrogram& tree, std::size_t k) {
  const std::size_t n = tree.n;
  if (k < 1 || k > n) {
    throw bad_range("cluster count k=" + std::to_string(k) + " must lie in [1, " +
                    std::to_string(n) + "]");
  }
  if (tree.merges.size() + 1 != n) throw contract_error("dendrogram must hold n - 1 merges");

  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t m = 0; m + k < n; ++m) {
    const auto& mg = tree.merges[m];
    parent[find(mg.a)] = mg.id;
    parent[find(mg.b)] = mg.id;
  }
  std::vector<int> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<int>(find(i));
  return ClusterLabels::from_raw(raw);
}

struct KMeansResult {
  ClusterLabels labels;
  /// Sum of squared Euclidean distances to the assigned centroids.
  double objective = 0.0;
  std::vector<std::vector<double>> centroids;
  std::size_t iterations = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

inline KMeansResult lloyd(const Dataset& data, std::size_t k, std::mt19937_64& rng,
                          std::size_t max_iterations) {
  const std::size_t n = data.size();
  const std::size_t dim = data.front().size();

  // k distinct starting points: partial Fisher-Yates.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t c = 0; c < k; ++c) {
    std::uniform_int_distribution<std::size_t> pick(c, n - 1);
    std::swap(order[c], order[pick(rng)]);
  }
  std::vector<std::vector<double>> centroids(k);
  for (std::size_t c = 0; c < k; ++c) centroids[c] = data[order[c]].values;

  std::vector<std::size_t> assign(n, k);
  std::size_t iter = 0;
  for (; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(data[i].values, centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dc = squared_distance(data[i].values, centroids[c]);
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    // Empty clusters take the point farthest from its current centroid.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assign) ++counts[a];
    std::vector<char> moved(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (moved[i] || counts[assign[i]] < 2) continue;
        const double di = squared_distance(data[i].values, centroids[assign[i]]);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      moved[far] = 1;
    }

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = centroids[assign[i]];
      for (std::size_t t = 0; t < dim; ++t) c[t] += data[i].values[t];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }
  }

  KMeansResult r;
  r.iterations = iter;
  for (std::size_t i = 0; i < n; ++i) {
    r.objective += squared_distance(data[i].values, centroids[assign[i]]);
  }
  std::vector<int> raw(assign.begin(), assign.end());
  r.labels = ClusterLabels::from_raw(raw);
  // Reorder centroids to match the relabeling.
  r.centroids.resize(k);
  for (std::size_t i = 0; i < n; ++i) {
    r.centroids[static_cast<std::size_t>(r.labels.assignments[i] - 1)] = centroids[assign[i]];
  }
  return r;
}

}  // namespace detail

/// Lloyd's k-means on raw series, best of `restarts` seeded runs by objective
/// (ties go to the lower restart index). Each run starts from k distinct data
/// points drawn uniformly and stops when assignments no longer change or after
/// `max_iterations` sweeps.
inline KMeansResult kmeans(const Dataset& data, std::size_t k, std::uint64_t seed,
                           std::size_t restarts = 10, std::size_t max_iterations = 300) {
  validate_dataset(data);
  if (k < 1 || k > data.size()) {
    throw bad_range("cluster count k=" + std::to_string(k) + " must lie in [1, " +
                    std::to_string(data.size()) + "]");
  }
  if (restarts < 1) throw invalid_input("restarts must be >= 1");

  std::optional<KMeansResult> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    auto run = detail::lloyd(data, k, rng, max_iterations);
    if (!best || run.objective < best->objective) best = std::move(run);
  }
  return *best;
}

}  // namespace tastic
