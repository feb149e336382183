#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kanids {

enum class ErrorKind {
  InvalidArgument,
  DomainViolation,
  LengthMismatch,
  ShapeMismatch,
  LabelOutOfRange,
  EmptyDataset,
  NonFinite,
  Ingestion,
  InsufficientSamples,
  ClassTooSmall,
  Config,
  Io,
  Format,
};

// Coarse grouping used for process exit codes.
enum class ErrorCategory { Config, Ingestion, Numeric, Other };

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DomainViolation: return "domain-violation";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::LabelOutOfRange: return "label-out-of-range";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::Ingestion: return "ingestion";
    case ErrorKind::InsufficientSamples: return "insufficient-samples";
    case ErrorKind::ClassTooSmall: return "class-too-small";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

inline ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
      return ErrorCategory::Config;
    case ErrorKind::Ingestion:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::InsufficientSamples:
    case ErrorKind::ClassTooSmall:
    case ErrorKind::Io:
    case ErrorKind::Format:
      return ErrorCategory::Ingestion;
    case ErrorKind::NonFinite:
    case ErrorKind::DomainViolation:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Other;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kanids
