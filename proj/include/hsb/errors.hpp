#pragma once

#include <stdexcept>
#include <string>

namespace hsb {

/** @brief Failure categories raised by the library. */
enum class ErrorKind {
  InvalidClassData,
  NotAFusionRing,
  InvalidRing,
  DegenerateSpectrum,
  NotAGroupTable,
  NotRigid,
  InconsistentEmbedding,
  EmptyIrrep,
  BadSpec,
  BadOperator,
  BadPlateauData,
  EmptyInput,
  DimensionMismatch,
  NoSolution,
  ConfigError,
  IoError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidClassData: return "InvalidClassData";
    case ErrorKind::NotAFusionRing: return "NotAFusionRing";
    case ErrorKind::InvalidRing: return "InvalidRing";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NotAGroupTable: return "NotAGroupTable";
    case ErrorKind::NotRigid: return "NotRigid";
    case ErrorKind::InconsistentEmbedding: return "InconsistentEmbedding";
    case ErrorKind::EmptyIrrep: return "EmptyIrrep";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::BadOperator: return "BadOperator";
    case ErrorKind::BadPlateauData: return "BadPlateauData";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/** @brief Exception carrying an ErrorKind tag. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hsb
