#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace softcover {

enum class Errc {
  NegativeWeight,
  ZeroMass,
  NotNormalized,
  AlphabetMismatch,
  LengthMismatch,
  InvalidArgument,
  UndefinedDensity,
  SupportViolation,
  DomainError,
  RateTooLow,
  ZeroDispersion,
  InvalidRate,
  SizeOverflow,
  SpaceTooLarge,
  ZeroTargetMass,
  DegenerateFit,
};

std::string_view errc_name(Errc code) noexcept;

/// True for errors caused by a configured resource cap rather than bad input.
constexpr bool is_resource_cap(Errc code) noexcept {
  return code == Errc::SizeOverflow || code == Errc::SpaceTooLarge;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace softcover
