#pragma once

// Seeded generators and independent reference implementations for the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tastic/tastic.hpp"

namespace testing_support {

using namespace tastic;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin() { return index(0, 1) == 1; }

  std::vector<double> series(std::size_t t, double lo = 5.0, double hi = 12.0) {
    std::vector<double> v(t);
    for (auto& x : v) x = real(lo, hi);
    return v;
  }

  // Multiples of 1/64 in [0, 16): sums and tilts by dyadic steps stay exact.
  std::vector<double> dyadic_series(std::size_t t) {
    std::vector<double> v(t);
    for (auto& x : v) x = static_cast<double>(index(0, 1023)) / 64.0;
    return v;
  }

  Dataset dataset(std::size_t n, std::size_t t) {
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) d.push_back({"r" + std::to_string(i), series(t)});
    return d;
  }

  // Symmetric tilt set of size 1, 3 or 5.
  std::vector<double> symmetric_tilts(std::size_t size) {
    std::vector<double> e{0.0};
    while (e.size() < size) {
      const double v = real(0.01, 0.3);
      e.push_back(-v);
      e.push_back(v);
    }
    std::sort(e.begin(), e.end());
    return e;
  }

  std::vector<int> labels(std::size_t n, int k) {
    std::vector<int> v(n);
    for (auto& x : v) x = static_cast<int>(index(1, static_cast<std::size_t>(k)));
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Two-pass textbook Pearson correlation.
inline double naive_corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double naive_rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Exhaustive search over lag, alignment, tilt and which series is tilted,
// built from base_dissim calls.
inline double enumerate_tastic(const std::vector<double>& x, const std::vector<double>& y,
                               const TravelParams& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l <= p.max_shift; ++l) {
    for (auto dir : {Alignment::x_backward_y_forward, Alignment::x_forward_y_backward}) {
      for (double e : p.tilts) {
        best = std::min(best, base_dissim(x, y, l, dir, e, p));
        const auto mirrored = dir == Alignment::x_backward_y_forward
                                  ? Alignment::x_forward_y_backward
                                  : Alignment::x_backward_y_forward;
        best = std::min(best, base_dissim(y, x, l, mirrored, e, p));
      }
    }
  }
  return best;
}

struct NaiveMerge {
  std::size_t a, b;
  double height;
};

// Agglomeration that recomputes every inter-cluster distance from the point
// distances at each step.
inline std::vector<NaiveMerge> naive_agglomerate(const DissimilarityMatrix& m, Linkage linkage) {
  const std::size_t n = m.n;
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    ids[i] = i;
  }
  auto dist = [&](const std::vector<std::size_t>& A, const std::vector<std::size_t>& B) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0, sum = 0;
    for (auto i : A) {
      for (auto j : B) {
        lo = std::min(lo, m(i, j));
        hi = std::max(hi, m(i, j));
        sum += m(i, j);
      }
    }
    switch (linkage) {
      case Linkage::single: return lo;
      case Linkage::complete: return hi;
      case Linkage::average: return sum / static_cast<double>(A.size() * B.size());
    }
    return 0.0;
  };
  std::vector<NaiveMerge> out;
  std::size_t next = n;
  while (members.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const double d = dist(members[i], members[j]);
        const auto key = std::tuple{d, std::min(ids[i], ids[j]), std::max(ids[i], ids[j])};
        const auto best = std::tuple{bd, std::min(ids[bi], ids[bj]), std::max(ids[bi], ids[bj])};
        if (key < best) {
          bd = d;
          bi = i;
          bj = j;
        }
      }
    }
    out.push_back({std::min(ids[bi], ids[bj]), std::max(ids[bi], ids[bj]), bd});
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    ids[bi] = next++;
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bj));
    ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return out;
}

// Prim's algorithm; returns sorted MST edge weights.
inline std::vector<double> mst_weights(const DissimilarityMatrix& m) {
  const std::size_t n = m.n;
  std::vector<char> in(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  best[0] = 0;
  std::vector<double> w;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in[i] && (u == n || best[i] < best[u])) u = i;
    }
    in[u] = 1;
    if (step > 0) w.push_back(best[u]);
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v]) best[v] = std::min(best[v], m(u, v));
    }
  }
  std::sort(w.begin(), w.end());
  return w;
}

// ARI by counting agreements over all point pairs.
inline double pair_count_ari(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  double both = 0, in_a = 0, in_b = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      both += sa && sb;
      in_a += sa;
      in_b += sb;
      pairs += 1;
    }
  }
  const double expected = in_a * in_b / pairs;
  return (both - expected) / (0.5 * (in_a + in_b) - expected);
}

// Best agreement over every injective map from the smaller label set into
// the larger one.
inline double factorial_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const int kp = *std::max_element(pred.begin(), pred.end());
  const int kt = *std::max_element(truth.begin(), truth.end());
  const int m = std::max(kp, kt);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 1);
  std::size_t best = 0;
  do {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      agree += perm[static_cast<std::size_t>(pred[i] - 1)] == truth[i];
    }
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

inline DissimilarityMatrix random_matrix(Gen& g, std::size_t n) {
  DissimilarityMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = m(j, i) = g.real(0.0, 10.0);
    }
  }
  return m;
}

inline std::vector<double> ramp(std::size_t t, double eps) {
  std::vector<double> r(t);
  for (std::size_t i = 0; i < t; ++i) r[i] = static_cast<double>(i) * eps;
  return r;
}

}  // namespace testing_support
