#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kernelcat {

enum class ErrorCode {
  DuplicateAtom,
  EmptySpace,
  UnknownAtom,
  BadLabel,
  IncompleteMap,
  DomainMismatch,
  BadFactor,
  InvalidDistribution,
  NotAbsolutelyContinuous,
  ZeroMassEvent,
  SpaceTooLarge,
  InvalidGaussian,
  SingularBlock,
  DegenerateGram,
  DegenerateUpdate,
  BadVariance,
  SingularPrior,
  DependentBasis,
  BadInterval,
  OutOfOrder,
  ParseError,
  ValidationError,
  UnknownExample,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a measurement puts mass on data atoms the evidence gives zero mass.
class NotAbsolutelyContinuousError : public Error {
 public:
  NotAbsolutelyContinuousError(std::vector<std::string> atoms, const std::string& message)
      : Error(ErrorCode::NotAbsolutelyContinuous, message), atoms_(std::move(atoms)) {}

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<std::string> atoms_;
};

}  // namespace kernelcat
