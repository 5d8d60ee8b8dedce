#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finsler {

enum class ErrorKind {
  ZeroVector,
  OutsideDomain,
  OutsideBall,
  AtOrigin,
  LeftDomain,
  NoConvergence,
  DegenerateFlag,
  MissingDensity,
  NoAdmissibleRoot,
  QuadratureFailure,
  DomainError,
  InvalidParams,
  InsufficientData,
  NonpositiveValue,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::OutsideBall: return "OutsideBall";
    case ErrorKind::AtOrigin: return "AtOrigin";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateFlag: return "DegenerateFlag";
    case ErrorKind::MissingDensity: return "MissingDensity";
    case ErrorKind::NoAdmissibleRoot: return "NoAdmissibleRoot";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonpositiveValue: return "NonpositiveValue";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace finsler
