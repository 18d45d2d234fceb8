#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pbntune {

enum class ErrorKind {
  ZeroEntry,
  UnsupportedMultiEntryRow,
  NotWellFormed,
  UnboundParameter,
  UnsupportedDegree,
  UnsupportedStructure,
  BadOrder,
  EvidenceImpossible,
  TooLarge,
  BadRegion,
  UnsupportedForCD,
  EmptyInput,
  CoverageUnreachable,
  Parse,
  RowSum,
  UnknownVariable,
  UnknownValue,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `kind()` identifies the failure class so callers
/// (and tests) can branch on it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pbntune
