#pragma once

// Shift/tilt operators and the time- and trend-traveling dissimilarities.
//
// Conventions used throughout:
//   * A window of a length-T series at lag l has length T - l. "Forward"
//     keeps the first T - l values, "backward" drops the first l values.
//   * Tilting by eps adds eps * t to the t-th value of a window, t = 0, 1, ...
//   * Correlations are sample Pearson correlations. A pair of constant
//     windows correlates 1 when equal and 0 otherwise; a constant window
//     against a varying one correlates 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tastic/error.hpp"
#include "tastic/series.hpp"

namespace tastic {

enum class Shift { forward, backward };

/// Which series is windowed backward at a given lag. The other one is
/// windowed forward.
enum class Alignment { x_backward_y_forward, x_forward_y_backward };

/// Search space and blend weights of the traveled dissimilarity.
struct TravelParams {
  /// Largest lag tried (L).
  std::size_t max_shift = 3;
  /// Tilt slopes tried (E). Must contain 0.
  std::vector<double> tilts{-0.075, 0.0, 0.075};
  /// Tilt penalty coefficient (C); the correlation is scaled by exp(-C|eps|).
  double tilt_penalty = 0.0;
  /// Weight of the correlation term (alpha); 1 - alpha goes to the RMS term.
  double corr_weight = 1.0;

  /// Tilt set {-eps, 0, eps}, or {0} when eps == 0.
  static std::vector<double> symmetric_tilts(double eps) {
    if (eps == 0.0) return {0.0};
    return {-eps, 0.0, eps};
  }

  void validate() const {
    if (tilts.empty()) throw invalid_input("tilt set is empty");
    bool has_zero = false;
    for (double e : tilts) {
      if (!std::isfinite(e)) throw invalid_input("tilt values must be finite");
      has_zero = has_zero || e == 0.0;
    }
    if (!has_zero) throw invalid_input("tilt set must contain 0");
    if (!(tilt_penalty >= 0.0) || !std::isfinite(tilt_penalty)) {
      throw invalid_input("tilt penalty must be a finite value >= 0");
    }
    if (!(corr_weight >= 0.0 && corr_weight <= 1.0)) {
      throw invalid_input("correlation weight alpha must lie in [0, 1]");
    }
  }

  void validate(std::size_t length) const {
    validate();
    if (max_shift >= length) {
      throw invalid_shift("max shift L=" + std::to_string(max_shift) +
                          " must be smaller than the series length " +
                          std::to_string(length));
    }
  }
};

/// How alpha is chosen: a fixed value, or the data-dependent default
/// computed from the p-th percentile of pairwise correlation dissimilarities.
struct AlphaSpec {
  enum class Mode { fixed, percentile };

  Mode mode = Mode::percentile;
  double value = 0.09;

  static AlphaSpec fixed(double alpha) { return {Mode::fixed, alpha}; }
  static AlphaSpec from_percentile(double p) { return {Mode::percentile, p}; }

  void validate() const {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw invalid_input(mode == Mode::fixed ? "alpha must lie in [0, 1]"
                                              : "percentile p must lie in [0, 1]");
    }
  }
};

namespace detail {

inline void require_same_length(std::span<const double> x,
                                std::span<const double> y,
                                std::size_t min_length) {
  if (x.size() != y.size()) {
    throw shape_error("sequence lengths differ (" + std::to_string(x.size()) +
                      " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < min_length) {
    throw shape_error("sequences need at least " + std::to_string(min_length) +
                      " values");
  }
}

inline std::span<const double> window(std::span<const double> x,
                                      std::size_t lag, Shift dir) {
  const std::size_t len = x.size() - lag;
  return dir == Shift::forward ? x.first(len) : x.subspan(lag, len);
}

struct WindowPair {
  std::span<const double> x;
  std::span<const double> y;
};

inline WindowPair align(std::span<const double> x, std::span<const double> y,
                        std::size_t lag, Alignment how) {
  if (how == Alignment::x_backward_y_forward) {
    return {window(x, lag, Shift::backward), window(y, lag, Shift::forward)};
  }
  return {window(x, lag, Shift::forward), window(y, lag, Shift::backward)};
}

// Pearson correlation of a against b tilted by eps. Sums are taken on values
// offset by the first element, which keeps the raw-moment formula well
// conditioned (condition number at most n + 1) and exact on small-integer data.
// Symmetric in its two arguments when eps == 0, bit for bit.
inline double correlation(std::span<const double> a, std::span<const double> b,
                          double eps) {
  const std::size_t n = a.size();
  const double a0 = a[0];
  const double b0 = b[0];
  double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
  bool a_const = true, b_const = true;
  for (std::size_t t = 0; t < n; ++t) {
    const double da = a[t] - a0;
    const double db = (b[t] + static_cast<double>(t) * eps) - b0;
    a_const = a_const && da == 0.0;
    b_const = b_const && db == 0.0;
    sa += da;
    sb += db;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (a_const && b_const) return a0 == b0 ? 1.0 : 0.0;
  if (a_const || b_const) return 0.0;
  const double nn = static_cast<double>(n);
  const double sxx = nn * saa - sa * sa;
  const double syy = nn * sbb - sb * sb;
  const double sxy = nn * sab - sa * sb;
  const double den = sxx * syy;
  if (!(den > 0.0)) return 0.0;
  return std::clamp(sxy / std::sqrt(den), -1.0, 1.0);
}

inline double rms_difference(std::span<const double> a,
                             std::span<const double> b) {
  double ss = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.size()));
}

inline double penalty_factor(double c, double eps) {
  return std::exp(-c * std::abs(eps));
}

inline double blend(double alpha, double penalty, double corr, double rms) {
  return alpha * (1.0 - penalty * corr) + (1.0 - alpha) * rms;
}

}  // namespace detail

/// Window of `x` at lag `lag`, tilted by `eps`: value t of the result is
/// x[t'] + t * eps where t' = t (forward) or t + lag (backward).
inline std::vector<double> shift_tilt(std::span<const double> x,
                                      std::size_t lag, Shift dir, double eps) {
  if (lag >= x.size()) {
    throw invalid_shift("lag " + std::to_string(lag) +
                        " must be smaller than the series length " +
                        std::to_string(x.size()));
  }
  const auto w = detail::window(x, lag, dir);
  std::vector<double> out(w.size());
  for (std::size_t t = 0; t < w.size(); ++t) {
    out[t] = w[t] + static_cast<double>(t) * eps;
  }
  return out;
}

/// Sample Pearson correlation with the constant-series convention above.
inline double pearson_corr(std::span<const double> x,
                           std::span<const double> y) {
  detail::require_same_length(x, y, 1);
  return detail::correlation(x, y, 0.0);
}

/// 1 - Corr(x, y), in [0, 2].
inline double pearson_dissim(std::span<const double> x,
                             std::span<const double> y) {
  detail::require_same_length(x, y, 2);
  return 1.0 - detail::correlation(x, y, 0.0);
}

/// Root-mean-square difference sqrt(sum (x_t - y_t)^2 / T').
inline double weighted_euclidean(std::span<const double> x,
                                 std::span<const double> y) {
  detail::require_same_length(x, y, 1);
  return detail::rms_difference(x, y);
}

/// Plain Euclidean distance.
inline double euclidean(std::span<const double> x, std::span<const double> y) {
  detail::require_same_length(x, y, 1);
  double ss = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double d = x[t] - y[t];
    ss += d * d;
  }
  return std::sqrt(ss);
}

/// Blended dissimilarity at a single alignment: the windows of x and y at
/// lag `lag`, with y tilted by `eps` in the correlation term only.
inline double base_dissim(std::span<const double> x, std::span<const double> y,
                          std::size_t lag, Alignment how, double eps,
                          const TravelParams& params) {
  detail::require_same_length(x, y, 2);
  if (lag >= x.size()) {
    throw invalid_shift("lag " + std::to_string(lag) +
                        " must be smaller than the series length " +
                        std::to_string(x.size()));
  }
  const auto w = detail::align(x, y, lag, how);
  const double rms = detail::rms_difference(w.x, w.y);
  const double corr = detail::correlation(w.x, w.y, eps);
  return detail::blend(params.corr_weight,
                       detail::penalty_factor(params.tilt_penalty, eps), corr,
                       rms);
}

/// Time- and trend-traveling dissimilarity: the minimum of base_dissim over
/// every lag 0..L, both alignments, every tilt in E, and both choices of
/// which series is tilted. Tilting either series (rather than y only) makes
/// the result symmetric in (x, y) bit for bit.
///
/// Candidates are visited in a fixed order (lag, alignment, tilt, y-tilted
/// before x-tilted); l = 0 is visited once since both alignments coincide.
inline double tastic_dissim(std::span<const double> x, std::span<const double> y,
                            const TravelParams& params) {
  detail::require_same_length(x, y, 2);
  params.validate(x.size());

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag <= params.max_shift; ++lag) {
    for (Alignment how :
         {Alignment::x_backward_y_forward, Alignment::x_forward_y_backward}) {
      if (lag == 0 && how == Alignment::x_forward_y_backward) continue;
      const auto w = detail::align(x, y, lag, how);
      const double rms = detail::rms_difference(w.x, w.y);
      for (double eps : params.tilts) {
        const double pen = detail::penalty_factor(params.tilt_penalty, eps);
        best = std::min(best, detail::blend(params.corr_weight, pen,
                                            detail::correlation(w.x, w.y, eps),
                                            rms));
        if (eps != 0.0) {
          best = std::min(best, detail::blend(params.corr_weight, pen,
                                              detail::correlation(w.y, w.x, eps),
                                              rms));
        }
      }
    }
  }
  return best;
}

enum class BaseMeasure { euclidean, pearson };

/// Minimum of the base measure over lags 0..L and both alignments, no tilt.
/// With BaseMeasure::pearson this is the cross-correlation dissimilarity.
inline double time_travel_dissim(std::span<const double> x,
                                 std::span<const double> y,
                                 std::size_t max_shift, BaseMeasure base) {
  detail::require_same_length(x, y, 2);
  if (max_shift >= x.size()) {
    throw invalid_shift("max shift L=" + std::to_string(max_shift) +
                        " must be smaller than the series length " +
                        std::to_string(x.size()));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag <= max_shift; ++lag) {
    for (Alignment how :
         {Alignment::x_backward_y_forward, Alignment::x_forward_y_backward}) {
      if (lag == 0 && how == Alignment::x_forward_y_backward) continue;
      const auto w = detail::align(x, y, lag, how);
      const double d = base == BaseMeasure::euclidean
                           ? detail::rms_difference(w.x, w.y)
                           : 1.0 - detail::correlation(w.x, w.y, 0.0);
      best = std::min(best, d);
    }
  }
  return best;
}

/// min over eps in E of 1 - exp(-C|eps|) Corr(x, y tilted by eps).
inline double trend_travel_dissim(std::span<const double> x,
                                  std::span<const double> y,
                                  std::span<const double> tilts,
                                  double tilt_penalty) {
  detail::require_same_length(x, y, 2);
  if (tilts.empty()) throw invalid_input("tilt set is empty");
  double best = std::numeric_limits<double>::infinity();
  for (double eps : tilts) {
    best = std::min(best, 1.0 - detail::penalty_factor(tilt_penalty, eps) *
                                    detail::correlation(x, y, eps));
  }
  return best;
}

/// max over eps in E of Corr(x, y tilted by eps), without penalty.
inline double best_trend_corr(std::span<const double> x,
                              std::span<const double> y,
                              std::span<const double> tilts) {
  detail::require_same_length(x, y, 2);
  if (tilts.empty()) throw invalid_input("tilt set is empty");
  double best = -std::numeric_limits<double>::infinity();
  for (double eps : tilts) best = std::max(best, detail::correlation(x, y, eps));
  return best;
}

/// p-th percentile (p in [0, 1]) with linear interpolation between order
/// statistics: h = (m - 1) p, Q = v[floor h] + (h - floor h)(v[floor h + 1] - v[floor h]).
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw insufficient_data("percentile of an empty set");
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("percentile p must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

/// Data-dependent correlation weight
///   max d / (Q_p{1 - Corr} + max d)
/// over all unordered pairs of full-length series, where d is the same
/// root-mean-square distance used in the blend (plain Euclidean distance
/// would be sqrt(T) times larger and swamp the correlation term). Returns 1
/// when both terms vanish (all series identical).
inline double default_alpha(const Dataset& data, double p) {
  if (data.size() < 2) throw insufficient_data("default alpha needs at least 2 series");
  validate_dataset(data);
  if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("percentile p must lie in [0, 1]");
  double max_d = 0.0;
  std::vector<double> corr_dissims;
  corr_dissims.reserve(data.size() * (data.size() - 1) / 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = i + 1; j < data.size(); ++j) {
      max_d = std::max(max_d, weighted_euclidean(data[i].values, data[j].values));
      corr_dissims.push_back(
          1.0 - detail::correlation(data[i].values, data[j].values, 0.0));
    }
  }
  const double q = percentile(std::move(corr_dissims), p);
  const double den = q + max_d;
  if (den == 0.0) return 1.0;
  return max_d / den;
}

/// Resolves an AlphaSpec against a dataset.
inline double resolve_alpha(const AlphaSpec& spec, const Dataset& data) {
  spec.validate();
  return spec.mode == AlphaSpec::Mode::fixed ? spec.value
                                             : default_alpha(data, spec.value);
}

}  // namespace tastic
