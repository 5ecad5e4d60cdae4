#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace nlfb {

enum class Errc {
  InvalidArgument,
  NonNormalizable,
  NegativeTableValue,
  InvalidLambda,
  OutOfCone,
  AboveCeiling,
  NoPositiveRoot,
  MeshTooCoarse,
  Instability,
  InvalidLevel,
  NoConvergence,
  J1Violated,
  BracketNotFound,
  ThresholdNotBracketed,
  InsufficientData,
  GridMismatch,
  ConfigError,
  ParseError,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the simulators; carries the time at which the state went bad.
class InstabilityError : public Error {
 public:
  InstabilityError(double t, const std::string& what) : Error(Errc::Instability, what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Scenario validation failure; `pointer()` is a JSON pointer to the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(Errc::ConfigError, pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace nlfb
