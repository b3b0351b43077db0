#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tastic/dissimilarity.hpp"
#include "tastic/error.hpp"
#include "tastic/series.hpp"

namespace tastic {

/// Shortest decimal form that reads back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Dense symmetric n x n matrix, row-major, both triangles stored.
struct DissimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> entries;
  std::vector<std::string> ids;
  /// Measure and parameters the entries were computed with.
  std::string method;

  DissimilarityMatrix() = default;
  explicit DissimilarityMatrix(std::size_t size)
      : n(size), entries(size * size, 0.0) {}

  double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries[i * n + j]; }
};

/// Throws contract_error unless the matrix is square, exactly symmetric,
/// has a zero diagonal and finite nonnegative entries.
inline void validate_matrix(const DissimilarityMatrix& m) {
  if (m.entries.size() != m.n * m.n) throw contract_error("matrix storage is not n x n");
  if (!m.ids.empty() && m.ids.size() != m.n) throw contract_error("matrix id count differs from n");
  for (std::size_t i = 0; i < m.n; ++i) {
    if (m(i, i) != 0.0) throw contract_error("matrix diagonal must be zero");
    for (std::size_t j = i + 1; j < m.n; ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw contract_error("matrix entries must be finite and nonnegative");
      }
      if (v != m(j, i)) throw contract_error("matrix must be symmetric");
    }
  }
}

enum class Measure {
  tastic,            ///< blended, time and trend traveling
  euclidean,         ///< RMS difference, no shifts
  euclidean_tt,      ///< RMS difference with time traveling
  pearson,           ///< 1 - Corr, no shifts
  pearson_tt,        ///< cross-correlation dissimilarity (time traveling)
  pearson_tt_trend,  ///< penalized correlation, time and trend traveling (alpha = 1)
};

inline constexpr std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::tastic: return "tastic";
    case Measure::euclidean: return "euclidean";
    case Measure::euclidean_tt: return "euclidean_tt";
    case Measure::pearson: return "pearson";
    case Measure::pearson_tt: return "pearson_tt";
    case Measure::pearson_tt_trend: return "pearson_tt_trend";
  }
  return "?";
}

inline std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : {Measure::tastic, Measure::euclidean, Measure::euclidean_tt,
                    Measure::pearson, Measure::pearson_tt, Measure::pearson_tt_trend}) {
    if (measure_name(m) == name) return m;
  }
  if (name == "cross_correlation") return Measure::pearson_tt;
  return std::nullopt;
}

/// Dissimilarity of one pair under `measure`. Only the parameters relevant to
/// the measure are read.
inline double pair_dissim(Measure measure, std::span<const double> x,
                          std::span<const double> y, const TravelParams& params) {
  switch (measure) {
    case Measure::tastic:
      return tastic_dissim(x, y, params);
    case Measure::euclidean:
      return weighted_euclidean(x, y);
    case Measure::euclidean_tt:
      return time_travel_dissim(x, y, params.max_shift, BaseMeasure::euclidean);
    case Measure::pearson:
      return pearson_dissim(x, y);
    case Measure::pearson_tt:
      return time_travel_dissim(x, y, params.max_shift, BaseMeasure::pearson);
    case Measure::pearson_tt_trend: {
      TravelParams p = params;
      p.corr_weight = 1.0;
      return tastic_dissim(x, y, p);
    }
  }
  throw invalid_input("unknown measure");
}

inline std::string describe_measure(Measure measure, const TravelParams& p) {
  std::ostringstream os;
  os << measure_name(measure);
  switch (measure) {
    case Measure::euclidean:
    case Measure::pearson:
      break;
    case Measure::euclidean_tt:
    case Measure::pearson_tt:
      os << "(L=" << p.max_shift << ")";
      break;
    case Measure::tastic:
    case Measure::pearson_tt_trend: {
      os << "(";
      if (measure == Measure::tastic) os << "alpha=" << format_real(p.corr_weight) << ",";
      os << "L=" << p.max_shift << ",E={";
      for (std::size_t i = 0; i < p.tilts.size(); ++i) {
        os << (i ? ";" : "") << format_real(p.tilts[i]);
      }
      os << "},C=" << format_real(p.tilt_penalty) << ")";
      break;
    }
  }
  return os.str();
}

/// Fills a matrix from an arbitrary pair function. Rows are handed out to
/// `threads` workers; every cell is written by exactly one worker, so the
/// result does not depend on the worker count.
template <class PairFn>
DissimilarityMatrix build_pairwise(const Dataset& data, PairFn&& pair_fn,
                                   unsigned threads = 1) {
  const std::size_t n = data.size();
  DissimilarityMatrix m(n);
  m.ids.reserve(n);
  for (const auto& s : data) m.ids.push_back(s.id);
  if (n < 2) return m;

  std::atomic<std::size_t> next_row{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t i = next_row.fetch_add(1); i + 1 < n; i = next_row.fetch_add(1)) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double d = pair_fn(data[i].view(), data[j].view());
          m(i, j) = d;
          m(j, i) = d;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_row.store(n);
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, n - 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

/// Pairwise dissimilarity matrix of `data` under `measure`.
inline DissimilarityMatrix dissim_matrix(const Dataset& data, Measure measure,
                                         const TravelParams& params,
                                         unsigned threads = 1) {
  if (data.size() < 2) throw insufficient_data("need at least 2 series");
  const std::size_t length = validate_dataset(data);
  switch (measure) {
    case Measure::tastic:
    case Measure::pearson_tt_trend:
      params.validate(length);
      break;
    case Measure::euclidean_tt:
    case Measure::pearson_tt:
      if (params.max_shift >= length) {
        throw invalid_shift("max shift L=" + std::to_string(params.max_shift) +
                            " must be smaller than the series length " +
                            std::to_string(length));
      }
      break;
    default:
      break;
  }
  auto m = build_pairwise(
      data,
      [&](std::span<const double> x, std::span<const double> y) {
        return pair_dissim(measure, x, y, params);
      },
      threads);
  m.method = describe_measure(measure, params);
  return m;
}

}  // namespace tastic
