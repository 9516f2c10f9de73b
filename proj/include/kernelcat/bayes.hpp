#pragma once

#include <string>
#include <vector>

#include "kernelcat/finite.hpp"

namespace kernelcat {

/// Prior P_H on hypotheses and sampling distribution S: H -> D.
class BayesModel {
 public:
  /// Throws Error(DomainMismatch) unless sampling.domain() == prior.space().
  BayesModel(Dist prior, Kernel sampling);

  const FiniteSpace& hypothesis() const { return prior_.space(); }
  const FiniteSpace& data() const { return sampling_.codomain(); }
  const Dist& prior() const { return prior_; }
  const Kernel& sampling() const { return sampling_; }

 private:
  Dist prior_;
  Kernel sampling_;
};

/// How inference rows are filled at data atoms of zero evidence, where any row
/// satisfies the product rule.
enum class ZeroMassPolicy { Uniform, CopyPrior };

struct InferenceResult {
  Kernel inference;                         // I: D -> H
  Dist evidence;                            // P_D = S o P_H
  std::vector<std::string> zero_mass_atoms; // data atoms with P_D = 0
  ZeroMassPolicy policy = ZeroMassPolicy::Uniform;
};

/// Bayesian inverse of the sampling distribution: I(a|b) P_D(b) = S(b|a) P_H(a).
InferenceResult infer(const BayesModel& model, ZeroMassPolicy policy = ZeroMassPolicy::Uniform);

/// I o measurement. Throws NotAbsolutelyContinuousError when the measurement puts
/// mass on a zero-evidence atom.
Dist posterior(const InferenceResult& result, const Dist& measurement);

/// K(w,z) = joint(w) next(z|w), on joint.space x next.codomain.
Dist extend_joint(const Dist& joint, const Kernel& next);

/// mass(given and target) / mass(given). Throws Error(ZeroMassEvent) if mass(given) == 0.
Rational conditional_query(const Dist& joint, const Event& given, const Event& target);

/// max over (a,b) of |I(a|b) P_D(b) - S(b|a) P_H(a)|.
Rational verify_product_rule(const BayesModel& model, const Kernel& inference);

}  // namespace kernelcat
