#include "nlfb/errors.hpp"

namespace nlfb {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonNormalizable: return "NonNormalizable";
    case Errc::NegativeTableValue: return "NegativeTableValue";
    case Errc::InvalidLambda: return "InvalidLambda";
    case Errc::OutOfCone: return "OutOfCone";
    case Errc::AboveCeiling: return "AboveCeiling";
    case Errc::NoPositiveRoot: return "NoPositiveRoot";
    case Errc::MeshTooCoarse: return "MeshTooCoarse";
    case Errc::Instability: return "Instability";
    case Errc::InvalidLevel: return "InvalidLevel";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::J1Violated: return "J1Violated";
    case Errc::BracketNotFound: return "BracketNotFound";
    case Errc::ThresholdNotBracketed: return "ThresholdNotBracketed";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace nlfb
