#pragma once

#include <stdexcept>
#include <string>

namespace linfty {

enum class ErrorCode {
  PolynomialEntries,
  NotAComplex,
  NotSurjective,
  NotInjective,
  NotInvertible,
  UnknownVariable,
  SpaceMismatch,
  DegreeRuleViolation,
  NotClassical,
  NoConvergence,
  ContractionInvalid,
  HypothesisFailed,
  NotSurjectiveOnKernel,
  NonConstantKernel,
  RegularityFails,
  NotVanishingOnY,
  NotEulerForm,
  ChartBase,
  NotAMorphism,
  MissingEtaTilde,
  SchemaError,
  NonCanonicalWord,
  UnknownCommand,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the
/// message names the offending degree, word, point or document path.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace linfty
