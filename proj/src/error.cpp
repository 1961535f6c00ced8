#include "magzak/error.hpp"

namespace magzak {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::NonZeroMean: return "NonZeroMean";
    case Errc::NonFinite: return "NonFinite";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::ImaginaryResidue: return "ImaginaryResidue";
    case Errc::DomainError: return "DomainError";
    case Errc::QuadratureUnderflow: return "QuadratureUnderflow";
    case Errc::NonContraction: return "NonContraction";
    case Errc::MaxIterExceeded: return "MaxIterExceeded";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::BoundaryContamination: return "BoundaryContamination";
    case Errc::ExponentMismatch: return "ExponentMismatch";
    case Errc::BlowUp: return "BlowUp";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::UnknownGenerator: return "UnknownGenerator";
    case Errc::SnapshotVersionMismatch: return "SnapshotVersionMismatch";
    case Errc::IoError: return "IoError";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

bool is_physics_failure(Errc code) {
  switch (code) {
    case Errc::NonFinite:
    case Errc::ImaginaryResidue:
    case Errc::NonContraction:
    case Errc::MaxIterExceeded:
    case Errc::NoConvergence:
    case Errc::BoundaryContamination:
    case Errc::BlowUp:
      return true;
    default:
      return false;
  }
}

}  // namespace magzak
