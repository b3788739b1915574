#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace manybody {

enum class Errc {
  ZeroTensor,
  ShapeMismatch,
  SupportViolation,
  EmptyMask,
  SizeMismatch,
  NotNormalized,
  InvalidEta,
  ZeroEntry,
  Overflow,
  BadOrder,
  BadModes,
  ParseError,
  ModeOutOfRange,
  SingularSystem,
  NotConverged,
  OffModel,
  NotCyclic,
  EmptyObservation,
  InvalidArgument,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library; `code()` distinguishes failure kinds.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

/// Thrown by the interaction-spec parser; carries the 0-based offset of the
/// offending character.
class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string& what)
      : Error(Errc::ParseError, "at position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

}  // namespace manybody
