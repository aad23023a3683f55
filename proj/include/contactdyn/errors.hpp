#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace contactdyn {

enum class ErrorKind {
  DomainError,
  PoleSingularity,
  PoleCrossing,
  StepExplosion,
  ParseError,
  UnknownIdentifier,
  SingularSystem,
  NotContact,
  ManifoldMismatch,
  FlowQueryFailure,
  NotInvertible,
  NotMonotone,
  ResolutionTooCoarse,
  CutoffTooTight,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, const std::string& what, std::size_t position)
      : Error(kind, what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::PoleCrossing: return "PoleCrossing";
    case ErrorKind::StepExplosion: return "StepExplosion";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NotContact: return "NotContact";
    case ErrorKind::ManifoldMismatch: return "ManifoldMismatch";
    case ErrorKind::FlowQueryFailure: return "FlowQueryFailure";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::CutoffTooTight: return "CutoffTooTight";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace contactdyn
