#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace gconv {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range or inconsistent parameter (|r| >= 1, bad probability, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotSymmetricError : public Error {
 public:
  NotSymmetricError(double asymmetry);
  double asymmetry() const noexcept { return asymmetry_; }

 private:
  double asymmetry_;
};

class NotPositiveDefiniteError : public Error {
 public:
  explicit NotPositiveDefiniteError(std::ptrdiff_t pivot);
  std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

class IsolatedNodeError : public Error {
 public:
  explicit IsolatedNodeError(int node);
  int node() const noexcept { return node_; }

 private:
  int node_;
};

// Malformed input file; carries the file and the 1-based line number (0 when
// the problem is not tied to a line).
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what);
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

inline NotSymmetricError::NotSymmetricError(double asymmetry)
    : Error("matrix is not symmetric (max |M - M^T| = " + std::to_string(asymmetry) + ")"),
      asymmetry_(asymmetry) {}

inline NotPositiveDefiniteError::NotPositiveDefiniteError(std::ptrdiff_t pivot)
    : Error("not positive definite: non-positive pivot at index " + std::to_string(pivot)),
      pivot_(pivot) {}

inline IsolatedNodeError::IsolatedNodeError(int node)
    : Error("node " + std::to_string(node) +
            " is isolated; symmetric normalization needs degree >= 1"),
      node_(node) {}

inline ParseError::ParseError(std::string file, std::size_t line, const std::string& what)
    : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(std::move(file)),
      line_(line) {}

}  // namespace gconv
