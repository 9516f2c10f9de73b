#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kernelcat/bayes.hpp"
#include "kernelcat/finite.hpp"
#include "kernelcat/gaussian.hpp"

namespace kernelcat {

/// A Markov transformation on a finite, totally ordered set of times: one state
/// space per time and a kernel between each adjacent pair.
class MarkovChain {
 public:
  /// Throws Error(DomainMismatch) when transitions do not chain the spaces,
  /// Error(DuplicateAtom) on repeated time labels.
  MarkovChain(std::vector<std::string> times, std::vector<FiniteSpace> spaces,
              std::vector<Kernel> transitions);

  const std::vector<std::string>& times() const { return times_; }
  const std::vector<FiniteSpace>& spaces() const { return spaces_; }
  const std::vector<Kernel>& transitions() const { return transitions_; }
  std::size_t length() const { return times_.size(); }
  std::size_t time_index(const std::string& label) const;

 private:
  std::vector<std::string> times_;
  std::vector<FiniteSpace> spaces_;
  std::vector<Kernel> transitions_;
};

/// F(t_i -> t_j) by Chapman-Kolmogorov; the identity when i == j.
/// Throws Error(BadInterval) for i > j or an index past the end.
Kernel chain_compose(const MarkovChain& chain, std::size_t i, std::size_t j);

/// Checks that the per-time kernels `eta` commute with two chains on the same
/// times: eta_{k+1} o F_k == G_k o eta_k for every adjacent pair.
bool is_natural_transformation(const MarkovChain& from, const MarkovChain& to,
                               const std::vector<Kernel>& eta);

struct HmmSpec {
  MarkovChain chain;
  std::vector<Kernel> sensors;  // F(t_i) -> Y_{t_i}
  Dist initial;                 // on F(t_1)

  /// Throws Error(DomainMismatch) on inconsistent sensors or initial.
  void validate() const;
};

struct FilterStep {
  Dist posterior;
  std::optional<Dist> next_prior;
};

/// posterior = I o measurement for the model (prior, sensor); next_prior pushes
/// the posterior through the transition when one is given.
FilterStep hmm_filter_step(const Dist& prior, const Kernel& sensor, const Dist& measurement,
                           const Kernel* transition);

/// Filters measurements[k] at time k. Throws Error(BadInterval) when there are
/// more measurements than times.
std::vector<Dist> run_filter(const HmmSpec& spec, const std::vector<Dist>& measurements);

/// x' = A x + w, w ~ N(0, Q); y = Hm x + v, v ~ N(0, R).
struct LinearGaussianModel {
  Eigen::MatrixXd transition;   // A
  Eigen::MatrixXd process_cov;  // Q
  Eigen::MatrixXd observation;  // Hm
  Eigen::MatrixXd observation_cov;  // R
  Gaussian initial;

  /// Throws Error(InvalidGaussian) on inconsistent dimensions or non-PSD Q, R.
  void validate() const;
};

/// Predict with (A, Q), then condition the joint of (observation, state) on y.
Gaussian kalman_step(const Gaussian& state, const LinearGaussianModel& model,
                     const Eigen::VectorXd& y, Diagnostics* diagnostics = nullptr);

/// The predicted joint N((Hm m, m), [[Hm P Hm^T + R, Hm P], [P Hm^T, P]]) with
/// (m, P) the one-step prediction from `state`.
Gaussian kalman_joint(const Gaussian& state, const LinearGaussianModel& model);

std::vector<Gaussian> run_filter(const LinearGaussianModel& model,
                                 const std::vector<Eigen::VectorXd>& measurements,
                                 Diagnostics* diagnostics = nullptr);

}  // namespace kernelcat
