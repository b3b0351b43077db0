#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tastic/error.hpp"

namespace tastic {

/// One observation sequence with an identifier.
struct TimeSeries {
  std::string id;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }
};

using Dataset = std::vector<TimeSeries>;

/// Checks the dataset invariants (common length >= 2, finite values) and
/// returns the common length.
inline std::size_t validate_dataset(const Dataset& data) {
  if (data.empty()) throw insufficient_data("dataset is empty");
  const std::size_t length = data.front().size();
  if (length < 2) throw shape_error("series must have at least 2 values");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != length) {
      throw shape_error("series " + std::to_string(i + 1) + " ('" + data[i].id +
                        "') has " + std::to_string(data[i].size()) +
                        " values, expected " + std::to_string(length));
    }
    for (double v : data[i].values) {
      if (!std::isfinite(v)) {
        throw shape_error("series '" + data[i].id + "' has a non-finite value");
      }
    }
  }
  return length;
}

}  // namespace tastic
