#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace magzak {

enum class Errc {
  NonZeroMean,
  NonFinite,
  GridMismatch,
  ImaginaryResidue,
  DomainError,
  QuadratureUnderflow,
  NonContraction,
  MaxIterExceeded,
  NoConvergence,
  BoundaryContamination,
  ExponentMismatch,
  BlowUp,
  ParseError,
  ValidationError,
  UnknownGenerator,
  SnapshotVersionMismatch,
  IoError,
  UsageError,
};

std::string_view errc_name(Errc code);

// Compact %g formatting for messages.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Failures caused by the dynamics or the numerics rather than by the caller's
// input. The CLI maps these to exit code 2.
bool is_physics_failure(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace magzak
