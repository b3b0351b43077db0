#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tastic {

/// Base for errors caused by bad input data, parameters or configuration.
/// The command-line tool reports these with exit code 2.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A shift of `lag` steps was requested on a series that is too short.
class invalid_shift : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

/// Sequences whose lengths do not agree, or are too short for the operation.
class shape_error : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

class insufficient_data : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

/// A value violates a documented precondition (matrix not symmetric,
/// labels out of range, ...).
class contract_error : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

/// A cluster count or k-range outside the admissible interval.
class bad_range : public invalid_input {
 public:
  using invalid_input::invalid_input;
};

/// Malformed input file. Row and column are 1-based, 0 when unknown.
class parse_error : public invalid_input {
 public:
  parse_error(const std::string& what, std::size_t row, std::size_t col)
      : invalid_input(describe(what, row, col)), row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  static std::string describe(const std::string& what, std::size_t row,
                              std::size_t col) {
    std::string out = what;
    if (row != 0) out += " (row " + std::to_string(row);
    if (row != 0 && col != 0) out += ", column " + std::to_string(col);
    if (row != 0) out += ")";
    return out;
  }

  std::size_t row_;
  std::size_t col_;
};

/// Numerical failure at run time (non-finite intermediate values and the like).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tastic
