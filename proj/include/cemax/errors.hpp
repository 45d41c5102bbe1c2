#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cemax {

enum class Errc {
  NonPositiveParameter,
  GainMatrixShapeMismatch,
  EmptyUserSet,
  ZeroDimension,
  IndexOutOfRange,
  NonBinaryMode,
  DegenerateDual,
  InfeasibleInstance,
  MaxItersExceeded,
  InstanceTooLarge,
  ConfigParseError,
  ZeroPower,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveParameter: return "NonPositiveParameter";
    case Errc::GainMatrixShapeMismatch: return "GainMatrixShapeMismatch";
    case Errc::EmptyUserSet: return "EmptyUserSet";
    case Errc::ZeroDimension: return "ZeroDimension";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonBinaryMode: return "NonBinaryMode";
    case Errc::DegenerateDual: return "DegenerateDual";
    case Errc::InfeasibleInstance: return "InfeasibleInstance";
    case Errc::MaxItersExceeded: return "MaxItersExceeded";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ConfigParseError: return "ConfigParseError";
    case Errc::ZeroPower: return "ZeroPower";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// One violated invariant found by validation. Validation reports all of
/// them, not just the first.
struct Violation {
  Errc code;
  std::string field;
  std::string message;
};

inline std::string join_violations(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    if (!out.empty()) out += "; ";
    out += std::string(errc_name(v.code)) + " at " + v.field + ": " + v.message;
  }
  return out;
}

}  // namespace cemax
