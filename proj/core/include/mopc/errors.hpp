#pragma once

#include <stdexcept>
#include <string>

namespace mopc {

// Raised when loaded or constructed data violates a type invariant. `field()`
// names the offending item, e.g. "nodes[3].reliability".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A consecutive pair on a path has no link in the graph.
class MissingLinkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mopc
