#pragma once

// CSV formats.
//
// Dataset:  header `id[,label],<time columns...>`, one series per row.
// Labels:   header `id,label`.
// Matrix:   header `id,<id_1>,...,<id_n>`, then one row per series.
// Reals are written in shortest round-trip form, so write -> read is exact.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

#include "tastic/clustering.hpp"
#include "tastic/error.hpp"
#include "tastic/evaluation.hpp"
#include "tastic/matrix.hpp"
#include "tastic/series.hpp"

namespace tastic::io {

using tastic::format_real;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline double parse_real(std::string_view cell, std::size_t row, std::size_t col) {
  if (cell.empty()) throw parse_error("empty cell", row, col);
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (r.ec != std::errc() || r.ptr != cell.data() + cell.size()) {
    throw parse_error("not a number: '" + std::string(cell) + "'", row, col);
  }
  if (!std::isfinite(v)) throw parse_error("non-finite value", row, col);
  return v;
}

inline bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace detail

struct LoadedDataset {
  Dataset data;
  /// Present when the file has a `label` column.
  std::optional<ClusterLabels> truth;
  std::vector<std::string> raw_labels;
};

/// Maps label strings to 1..k in order of first appearance.
inline ClusterLabels labels_from_strings(const std::vector<std::string>& raw) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> codes;
  codes.reserve(raw.size());
  for (const auto& r : raw) {
    auto [it, inserted] = ids.try_emplace(r, static_cast<int>(ids.size()) + 1);
    codes.push_back(it->second);
  }
  return ClusterLabels::from_raw(codes);
}

inline LoadedDataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!detail::blank(line)) break;
  }
  if (detail::blank(line)) throw parse_error("missing header", 0, 0);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split(line);
  if (header.empty() || header[0] != "id") throw parse_error("first column must be 'id'", row, 1);
  const bool has_label = header.size() > 1 && header[1] == "label";
  const std::size_t first_value = has_label ? 2 : 1;
  if (header.size() < first_value + 2) {
    throw parse_error("need at least 2 time columns", row, 0);
  }
  const std::size_t columns = header.size();

  LoadedDataset out;
  while (std::getline(in, line)) {
    ++row;
    if (detail::blank(line)) continue;
    const auto cells = detail::split(line);
    if (cells.size() != columns) {
      throw parse_error("row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(columns),
                        row, 0);
    }
    if (cells[0].empty()) throw parse_error("empty id", row, 1);
    TimeSeries s;
    s.id = std::string(cells[0]);
    s.values.reserve(columns - first_value);
    for (std::size_t c = first_value; c < columns; ++c) {
      s.values.push_back(detail::parse_real(cells[c], row, c + 1));
    }
    if (has_label) {
      if (cells[1].empty()) throw parse_error("empty label", row, 2);
      out.raw_labels.emplace_back(cells[1]);
    }
    out.data.push_back(std::move(s));
  }
  if (out.data.empty()) throw parse_error("no data rows", row, 0);
  if (has_label) out.truth = labels_from_strings(out.raw_labels);
  return out;
}

inline LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");
  return read_dataset(in);
}

inline void write_dataset(std::ostream& out, const Dataset& data,
                          const ClusterLabels* labels = nullptr) {
  const std::size_t length = data.empty() ? 0 : data.front().size();
  out << "id";
  if (labels) out << ",label";
  for (std::size_t t = 1; t <= length; ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data[i].id;
    if (labels) out << ',' << labels->assignments[i];
    for (double v : data[i].values) out << ',' << format_real(v);
    out << '\n';
  }
}

struct LoadedLabels {
  std::vector<std::string> ids;
  std::vector<std::string> raw;
  ClusterLabels labels;
};

/// Reads `id` and `label` columns from any CSV that has them (a labels file
/// or a dataset file with a label column).
inline LoadedLabels read_labels(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!detail::blank(line)) break;
  }
  if (detail::blank(line)) throw parse_error("missing header", 0, 0);
  const auto header = detail::split(line);
  const auto id_col = std::find(header.begin(), header.end(), "id") - header.begin();
  const auto label_col = std::find(header.begin(), header.end(), "label") - header.begin();
  if (static_cast<std::size_t>(label_col) == header.size()) {
    throw parse_error("no 'label' column", row, 0);
  }
  LoadedLabels out;
  while (std::getline(in, line)) {
    ++row;
    if (detail::blank(line)) continue;
    const auto cells = detail::split(line);
    if (cells.size() != header.size()) {
      throw parse_error("row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()),
                        row, 0);
    }
    const auto& lab = cells[static_cast<std::size_t>(label_col)];
    if (lab.empty()) throw parse_error("empty label", row, static_cast<std::size_t>(label_col) + 1);
    out.raw.emplace_back(lab);
    if (static_cast<std::size_t>(id_col) < header.size()) {
      out.ids.emplace_back(cells[static_cast<std::size_t>(id_col)]);
    } else {
      out.ids.push_back(std::to_string(out.raw.size()));
    }
  }
  if (out.raw.empty()) throw parse_error("no label rows", row, 0);
  out.labels = labels_from_strings(out.raw);
  return out;
}

inline LoadedLabels load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");
  return read_labels(in);
}

inline void write_labels(std::ostream& out, const Dataset& data, const ClusterLabels& labels) {
  out << "id,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data[i].id << ',' << labels.assignments[i] << '\n';
  }
}

inline void write_matrix(std::ostream& out, const DissimilarityMatrix& m) {
  auto id = [&](std::size_t i) { return m.ids.empty() ? std::to_string(i + 1) : m.ids[i]; };
  out << "id";
  for (std::size_t j = 0; j < m.n; ++j) out << ',' << id(j);
  out << '\n';
  for (std::size_t i = 0; i < m.n; ++i) {
    out << id(i);
    for (std::size_t j = 0; j < m.n; ++j) out << ',' << format_real(m(i, j));
    out << '\n';
  }
}

inline DissimilarityMatrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!detail::blank(line)) break;
  }
  if (detail::blank(line)) throw parse_error("missing header", 0, 0);
  const auto header = detail::split(line);
  if (header.size() < 2 || header[0] != "id") throw parse_error("first column must be 'id'", row, 1);
  DissimilarityMatrix m(header.size() - 1);
  for (std::size_t j = 1; j < header.size(); ++j) m.ids.emplace_back(header[j]);
  std::size_t i = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::blank(line)) continue;
    const auto cells = detail::split(line);
    if (i >= m.n) throw parse_error("more rows than columns", row, 0);
    if (cells.size() != header.size()) throw parse_error("row length differs from header", row, 0);
    for (std::size_t j = 0; j < m.n; ++j) m(i, j) = detail::parse_real(cells[j + 1], row, j + 2);
    ++i;
  }
  if (i != m.n) throw parse_error("matrix is not square", row, 0);
  return m;
}

inline void write_elbow(std::ostream& out, const ElbowCurve& curve) {
  out << "k,wcd\n";
  for (const auto& p : curve.points) out << p.k << ',' << format_real(p.wcd) << '\n';
}

}  // namespace tastic::io
