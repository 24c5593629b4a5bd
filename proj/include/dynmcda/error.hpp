#pragma once

#include <stdexcept>
#include <string>

namespace dynmcda {

// Raised when an input violates a documented invariant. `field` carries a
// dotted path ("criteria.weights", "vtg.entries[1].probability") so callers
// can point at the offending value.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Failure while executing a stage of the analysis (I/O, missing data, ...).
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(std::string stage, const std::string& message)
      : std::runtime_error(stage.empty() ? message : stage + ": " + message),
        stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace dynmcda
