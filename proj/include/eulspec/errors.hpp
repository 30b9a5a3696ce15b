#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eulspec {

/// Invalid grid, solver or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (wrong class, empty series, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite data encountered inside a pointwise kernel.
class ComputationError : public std::runtime_error {
 public:
  ComputationError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " at grid index " + std::to_string(index)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Snapshot or spectra file does not match the binary format.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& field, const std::string& detail)
      : std::runtime_error("format error in '" + field + "': " + detail), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// File system failure (unwritable directory, short write, missing file).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eulspec
