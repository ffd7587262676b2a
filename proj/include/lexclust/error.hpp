#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexclust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A vertex of the affinity graph has zero degree.
class DisconnectedVertexError : public Error {
 public:
  explicit DisconnectedVertexError(std::size_t vertex)
      : Error("vertex " + std::to_string(vertex) + " has zero degree (isolated row in the affinity matrix)"),
        vertex_(vertex) {}

  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

/// Eigensolver failed to reach the requested residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (achieved residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace lexclust
