#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tastic/clustering.hpp"
#include "tastic/dissimilarity.hpp"
#include "tastic/error.hpp"
#include "tastic/matrix.hpp"
#include "tastic/series.hpp"

namespace tastic {

/// Counts |A_i ∩ C_j| for predicted clusters A (rows) and true classes C (cols).
struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t n = 0;

  std::size_t operator()(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

inline ContingencyTable contingency(const ClusterLabels& pred, const ClusterLabels& truth) {
  if (pred.size() != truth.size()) {
    throw shape_error("label vectors differ in length (" + std::to_string(pred.size()) +
                      " vs " + std::to_string(truth.size()) + ")");
  }
  pred.validate();
  truth.validate();
  ContingencyTable t;
  t.rows = static_cast<std::size_t>(pred.k);
  t.cols = static_cast<std::size_t>(truth.k);
  t.n = pred.size();
  t.counts.assign(t.rows * t.cols, 0);
  t.row_sums.assign(t.rows, 0);
  t.col_sums.assign(t.cols, 0);
  for (std::size_t p = 0; p < t.n; ++p) {
    const auto i = static_cast<std::size_t>(pred.assignments[p] - 1);
    const auto j = static_cast<std::size_t>(truth.assignments[p] - 1);
    ++t.counts[i * t.cols + j];
    ++t.row_sums[i];
    ++t.col_sums[j];
  }
  return t;
}

namespace detail {

inline double choose2(std::size_t m) {
  const auto x = static_cast<double>(m);
  return x * (x - 1.0) / 2.0;
}

// Each row and each column of the table has exactly one nonzero cell.
inline bool same_partition(const ContingencyTable& t) {
  if (t.rows != t.cols) return false;
  for (std::size_t i = 0; i < t.rows; ++i) {
    std::size_t nz = 0;
    for (std::size_t j = 0; j < t.cols; ++j) nz += t(i, j) != 0;
    if (nz != 1) return false;
  }
  for (std::size_t j = 0; j < t.cols; ++j) {
    std::size_t nz = 0;
    for (std::size_t i = 0; i < t.rows; ++i) nz += t(i, j) != 0;
    if (nz != 1) return false;
  }
  return true;
}

// Hungarian method (shortest augmenting paths), square cost matrix, minimizing.
// Returns the column assigned to each row.
inline std::vector<std::size_t> hungarian_min(const std::vector<double>& cost, std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(m);
  for (std::size_t j = 1; j <= m; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Adjusted Rand index. When the chance-corrected denominator vanishes the
/// result is 1 for identical partitions and 0 otherwise.
inline double ari(const ClusterLabels& pred, const ClusterLabels& truth) {
  const auto t = contingency(pred, truth);
  double index = 0.0;
  for (std::size_t c : t.counts) index += detail::choose2(c);
  double sum_a = 0.0, sum_c = 0.0;
  for (std::size_t r : t.row_sums) sum_a += detail::choose2(r);
  for (std::size_t c : t.col_sums) sum_c += detail::choose2(c);
  const double pairs = detail::choose2(t.n);
  if (pairs == 0.0) return 1.0;
  const double expected = sum_a * sum_c / pairs;
  const double max_index = 0.5 * (sum_a + sum_c);
  const double den = max_index - expected;
  if (den == 0.0) return detail::same_partition(t) ? 1.0 : 0.0;
  return (index - expected) / den;
}

/// Largest fraction of points that agree under a one-to-one matching of
/// predicted clusters to true classes (unmatched clusters count as wrong).
inline double accuracy(const ClusterLabels& pred, const ClusterLabels& truth) {
  const auto t = contingency(pred, truth);
  const std::size_t m = std::max(t.rows, t.cols);
  std::size_t top = 0;
  for (std::size_t c : t.counts) top = std::max(top, c);
  std::vector<double> cost(m * m, static_cast<double>(top));
  for (std::size_t i = 0; i < t.rows; ++i) {
    for (std::size_t j = 0; j < t.cols; ++j) {
      cost[i * m + j] = static_cast<double>(top - t(i, j));
    }
  }
  const auto match = detail::hungarian_min(cost, m);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    if (match[i] < t.cols) agree += t(i, match[i]);
  }
  return static_cast<double>(agree) / static_cast<double>(t.n);
}

/// Within-cluster dissimilarity: the sum over clusters of all pairwise
/// dissimilarities inside the cluster (each unordered pair once).
inline double wcd(const DissimilarityMatrix& matrix, const ClusterLabels& labels) {
  if (labels.size() != matrix.n) {
    throw shape_error("labels have " + std::to_string(labels.size()) +
                      " entries but the matrix has " + std::to_string(matrix.n));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (std::size_t j = i + 1; j < matrix.n; ++j) {
      if (labels.assignments[i] == labels.assignments[j]) total += matrix(i, j);
    }
  }
  return total;
}

struct ElbowPoint {
  std::size_t k;
  double wcd;
};

struct ElbowCurve {
  std::vector<ElbowPoint> points;

  /// k at which wcd drops the most relative to k - 1; nullopt for fewer than
  /// two points.
  std::optional<std::size_t> largest_drop() const {
    std::optional<std::size_t> best;
    double best_drop = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double drop = points[i - 1].wcd - points[i].wcd;
      if (drop > best_drop) {
        best_drop = drop;
        best = points[i].k;
      }
    }
    return best;
  }
};

/// wcd at every cut k in [kmin, kmax] of a single dendrogram.
inline ElbowCurve elbow_curve(const Dendrogram& tree, const DissimilarityMatrix& matrix,
                              std::size_t kmin, std::size_t kmax) {
  if (kmin < 1 || kmin > kmax || kmax > matrix.n) {
    throw bad_range("k-range [" + std::to_string(kmin) + ", " + std::to_string(kmax) +
                    "] must satisfy 1 <= kmin <= kmax <= n=" + std::to_string(matrix.n));
  }
  ElbowCurve curve;
  for (std::size_t k = kmin; k <= kmax; ++k) {
    curve.points.push_back({k, wcd(matrix, cut(tree, k))});
  }
  return curve;
}

inline ElbowCurve elbow_curve(const DissimilarityMatrix& matrix, Linkage linkage,
                              std::size_t kmin, std::size_t kmax) {
  if (kmin < 1 || kmin > kmax || kmax > matrix.n) {
    throw bad_range("k-range [" + std::to_string(kmin) + ", " + std::to_string(kmax) +
                    "] must satisfy 1 <= kmin <= kmax <= n=" + std::to_string(matrix.n));
  }
  return elbow_curve(agglomerate(matrix, linkage), matrix, kmin, kmax);
}

// --- group profiles ---------------------------------------------------------

struct ProfileOptions {
  /// Visit-count thresholds (count of values >= threshold).
  std::vector<double> thresholds{6.5, 7.0, 10.0};
  /// Interior bin edges e_1 < ... < e_m, giving bins (-inf, e_1), [e_1, e_2),
  /// ..., [e_m, inf).
  std::vector<double> bin_edges{6.5, 7.0, 8.0, 9.0, 10.0};
  /// Tilts for the within-cluster trend-traveled correlation.
  std::vector<double> tilts{-0.075, 0.0, 0.075};
  /// Pairs with correlation at or above this level are counted.
  double corr_level = 0.5;

  void validate() const {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
      throw invalid_input("thresholds must be sorted");
    }
    if (std::adjacent_find(bin_edges.begin(), bin_edges.end(),
                           [](double a, double b) { return !(a < b); }) != bin_edges.end()) {
      throw invalid_input("bin edges must be strictly increasing");
    }
    if (tilts.empty()) throw invalid_input("tilt set is empty");
  }
};

struct GroupProfile {
  int group = 0;
  std::size_t size = 0;
  /// Mean over members of the mean of the last three values.
  double mean_last3 = 0.0;
  double mean_max = 0.0;
  /// Mean 1-based position of each member's maximum (earliest on ties).
  double mean_argmax = 0.0;
  /// Per threshold, mean number of values >= threshold.
  std::vector<double> mean_count_at_least;
  std::vector<std::size_t> max_histogram;
  std::vector<std::size_t> last3_histogram;
  std::size_t pairs = 0;
  /// Unset for single-member groups.
  std::optional<double> mean_within_corr;
  std::optional<double> frac_corr_at_least;
};

namespace detail {

inline std::size_t bin_of(double v, const std::vector<double>& edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                  edges.begin());
}

}  // namespace detail

inline std::vector<GroupProfile> profile(const Dataset& data, const ClusterLabels& labels,
                                         const ProfileOptions& opts = {}) {
  const std::size_t length = validate_dataset(data);
  labels.validate();
  opts.validate();
  if (labels.size() != data.size()) {
    throw shape_error("labels have " + std::to_string(labels.size()) +
                      " entries but the dataset has " + std::to_string(data.size()));
  }
  const std::size_t k = static_cast<std::size_t>(labels.k);
  const std::size_t tail = std::min<std::size_t>(3, length);
  const std::size_t bins = opts.bin_edges.size() + 1;

  std::vector<GroupProfile> out(k);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    members[static_cast<std::size_t>(labels.assignments[i] - 1)].push_back(i);
  }

  for (std::size_t g = 0; g < k; ++g) {
    auto& p = out[g];
    p.group = static_cast<int>(g + 1);
    p.size = members[g].size();
    p.mean_count_at_least.assign(opts.thresholds.size(), 0.0);
    p.max_histogram.assign(bins, 0);
    p.last3_histogram.assign(bins, 0);

    for (std::size_t i : members[g]) {
      const auto& v = data[i].values;
      double last3 = 0.0;
      for (std::size_t t = length - tail; t < length; ++t) last3 += v[t];
      last3 /= static_cast<double>(tail);
      const auto top = std::max_element(v.begin(), v.end());
      p.mean_last3 += last3;
      p.mean_max += *top;
      p.mean_argmax += static_cast<double>(top - v.begin() + 1);
      for (std::size_t h = 0; h < opts.thresholds.size(); ++h) {
        p.mean_count_at_least[h] += static_cast<double>(
            std::count_if(v.begin(), v.end(), [&](double x) { return x >= opts.thresholds[h]; }));
      }
      ++p.max_histogram[detail::bin_of(*top, opts.bin_edges)];
      ++p.last3_histogram[detail::bin_of(last3, opts.bin_edges)];
    }
    const auto sz = static_cast<double>(p.size);
    p.mean_last3 /= sz;
    p.mean_max /= sz;
    p.mean_argmax /= sz;
    for (double& c : p.mean_count_at_least) c /= sz;

    double corr_sum = 0.0;
    std::size_t high = 0;
    for (std::size_t a = 0; a < members[g].size(); ++a) {
      for (std::size_t b = a + 1; b < members[g].size(); ++b) {
        const double c = best_trend_corr(data[members[g][a]].values,
                                         data[members[g][b]].values, opts.tilts);
        corr_sum += c;
        high += c >= opts.corr_level;
        ++p.pairs;
      }
    }
    if (p.pairs > 0) {
      p.mean_within_corr = corr_sum / static_cast<double>(p.pairs);
      p.frac_corr_at_least = static_cast<double>(high) / static_cast<double>(p.pairs);
    }
  }
  return out;
}

// --- method comparison ------------------------------------------------------

enum class Method {
  kmeans,
  euclidean,
  euclidean_tt,
  pearson,
  pearson_tt,
  pearson_tt_trend,
  tastic_time,  ///< blended measure, time traveling only (E = {0})
  tastic,       ///< blended measure, time and trend traveling
};

inline constexpr std::string_view method_name(Method m) {
  switch (m) {
    case Method::kmeans: return "kmeans";
    case Method::euclidean: return "euclidean";
    case Method::euclidean_tt: return "euclidean_tt";
    case Method::pearson: return "pearson";
    case Method::pearson_tt: return "pearson_tt";
    case Method::pearson_tt_trend: return "pearson_tt_trend";
    case Method::tastic_time: return "tastic_time";
    case Method::tastic: return "tastic";
  }
  return "?";
}

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{
      Method::kmeans,     Method::euclidean,        Method::euclidean_tt, Method::pearson,
      Method::pearson_tt, Method::pearson_tt_trend, Method::tastic_time,  Method::tastic};
  return methods;
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  if (name == "cross_correlation") return Method::pearson_tt;
  return std::nullopt;
}

struct CompareConfig {
  /// L, E and C; the weight is taken from `alpha`.
  TravelParams travel;
  AlphaSpec alpha = AlphaSpec::from_percentile(0.09);
  Linkage linkage = Linkage::average;
  std::uint64_t seed = 1;
  std::size_t restarts = 10;
  unsigned threads = 1;
};

struct MethodScore {
  Method method;
  double accuracy;
  double ari;
};

/// Clusters `data` with each method at k = number of true classes.
inline ClusterLabels run_method(Method method, const Dataset& data, std::size_t k,
                                const CompareConfig& cfg, double alpha) {
  if (method == Method::kmeans) return kmeans(data, k, cfg.seed, cfg.restarts).labels;
  TravelParams p = cfg.travel;
  p.corr_weight = alpha;
  Measure measure = Measure::tastic;
  switch (method) {
    case Method::euclidean: measure = Measure::euclidean; break;
    case Method::euclidean_tt: measure = Measure::euclidean_tt; break;
    case Method::pearson: measure = Measure::pearson; break;
    case Method::pearson_tt: measure = Measure::pearson_tt; break;
    case Method::pearson_tt_trend: measure = Measure::pearson_tt_trend; break;
    case Method::tastic_time: p.tilts = {0.0}; break;
    default: break;
  }
  const auto m = dissim_matrix(data, measure, p, cfg.threads);
  return cut(agglomerate(m, cfg.linkage), k);
}

inline std::vector<MethodScore> compare_methods(const Dataset& data, const ClusterLabels& truth,
                                                const std::vector<Method>& methods,
                                                const CompareConfig& cfg) {
  validate_dataset(data);
  truth.validate();
  if (truth.size() != data.size()) throw shape_error("truth labels do not match the dataset");
  const auto k = static_cast<std::size_t>(truth.k);
  const bool needs_alpha =
      std::any_of(methods.begin(), methods.end(),
                  [](Method m) { return m == Method::tastic || m == Method::tastic_time; });
  const double alpha = needs_alpha && data.size() >= 2 ? resolve_alpha(cfg.alpha, data) : 1.0;

  std::vector<MethodScore> out;
  out.reserve(methods.size());
  for (Method m : methods) {
    ClusterLabels pred;
    if (data.size() == 1) {
      pred = ClusterLabels::from_raw({1});
    } else {
      pred = run_method(m, data, k, cfg, alpha);
    }
    out.push_back({m, accuracy(pred, truth), ari(pred, truth)});
  }
  return out;
}

}  // namespace tastic
