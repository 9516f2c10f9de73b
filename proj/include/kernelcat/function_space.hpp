#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "kernelcat/finite.hpp"

namespace kernelcat {

inline constexpr std::size_t kDefaultFunctionSpaceCap = 1'000'000;

/// The finite function space Y^X. Each atom is a total table X -> Y, labelled
/// "(y_1,...,y_n)" in base-atom order; the first base atom varies slowest.
class FunctionSpace {
 public:
  const FiniteSpace& base() const { return base_; }
  const FiniteSpace& target() const { return target_; }
  const FiniteSpace& space() const { return space_; }

  /// Image indices (into target) of the function with the given atom index.
  const std::vector<std::size_t>& table(std::size_t function) const { return tables_.at(function); }
  std::size_t index_of_table(const std::vector<std::size_t>& table) const;

 private:
  friend FunctionSpace function_space(const FiniteSpace&, const FiniteSpace&, std::size_t);
  FunctionSpace(FiniteSpace base, FiniteSpace target, FiniteSpace space,
                std::vector<std::vector<std::size_t>> tables)
      : base_(std::move(base)), target_(std::move(target)), space_(std::move(space)),
        tables_(std::move(tables)) {}

  FiniteSpace base_;
  FiniteSpace target_;
  FiniteSpace space_;
  std::vector<std::vector<std::size_t>> tables_;
};

/// Throws Error(SpaceTooLarge) when |Y|^|X| exceeds cap.
FunctionSpace function_space(const FiniteSpace& x, const FiniteSpace& y,
                             std::size_t cap = kDefaultFunctionSpaceCap);

/// delta_{ev_x}: Y^X -> Y.
Kernel eval_kernel(const FunctionSpace& fs, std::string_view x);

/// P-bar(B|x) = P(ev_x^{-1}(B)).
Kernel process_to_conditional(const FunctionSpace& fs, const Dist& process);

/// P(f) = prod_x c(f(x)|x).
Dist independent_process_from_conditional(const FunctionSpace& fs, const Kernel& conditional);

}  // namespace kernelcat
