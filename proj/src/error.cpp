#include "kernelcat/error.hpp"

namespace kernelcat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateAtom: return "DuplicateAtom";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::UnknownAtom: return "UnknownAtom";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::IncompleteMap: return "IncompleteMap";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::BadFactor: return "BadFactor";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
    case ErrorCode::ZeroMassEvent: return "ZeroMassEvent";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::InvalidGaussian: return "InvalidGaussian";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::DegenerateGram: return "DegenerateGram";
    case ErrorCode::DegenerateUpdate: return "DegenerateUpdate";
    case ErrorCode::BadVariance: return "BadVariance";
    case ErrorCode::SingularPrior: return "SingularPrior";
    case ErrorCode::DependentBasis: return "DependentBasis";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownExample: return "UnknownExample";
  }
  return "Unknown";
}

}  // namespace kernelcat
