#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace meshpoc {

/// Base class for every runtime failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Raised when a generated or loaded graph is not connected to its gateways.
class DisconnectedError : public TopologyError {
 public:
  DisconnectedError(const std::string& what, std::vector<std::vector<int>> components)
      : TopologyError(what), components_(std::move(components)) {}

  const std::vector<std::vector<int>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<int>> components_;
};

/// Malformed input file. `line()` is 1-based, 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class AssignmentError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle refused to run because the instance exceeds its guardrail.
class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class NoFeasiblePath : public Error {
 public:
  using Error::Error;
};

class CapacityExhausted : public Error {
 public:
  CapacityExhausted(const std::string& what, int source, std::vector<int> saturated_links)
      : Error(what), source_(source), saturated_(std::move(saturated_links)) {}

  int source() const noexcept { return source_; }
  const std::vector<int>& saturated_links() const noexcept { return saturated_; }

 private:
  int source_;
  std::vector<int> saturated_;
};

}  // namespace meshpoc
