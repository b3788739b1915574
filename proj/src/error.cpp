#include "manybody/error.hpp"

namespace manybody {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroTensor: return "ZeroTensor";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::InvalidEta: return "InvalidEta";
    case Errc::ZeroEntry: return "ZeroEntry";
    case Errc::Overflow: return "Overflow";
    case Errc::BadOrder: return "BadOrder";
    case Errc::BadModes: return "BadModes";
    case Errc::ParseError: return "ParseError";
    case Errc::ModeOutOfRange: return "ModeOutOfRange";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NotConverged: return "NotConverged";
    case Errc::OffModel: return "OffModel";
    case Errc::NotCyclic: return "NotCyclic";
    case Errc::EmptyObservation: return "EmptyObservation";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace manybody
