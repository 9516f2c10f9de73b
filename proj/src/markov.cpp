#include "kernelcat/markov.hpp"

#include <set>

#include "kernelcat/error.hpp"

namespace kernelcat {

MarkovChain::MarkovChain(std::vector<std::string> times, std::vector<FiniteSpace> spaces,
                         std::vector<Kernel> transitions)
    : times_(std::move(times)), spaces_(std::move(spaces)), transitions_(std::move(transitions)) {
  if (times_.empty()) {
    throw Error(ErrorCode::EmptySpace, "Markov chain needs at least one time");
  }
  if (spaces_.size() != times_.size() || transitions_.size() + 1 != times_.size()) {
    throw Error(ErrorCode::DomainMismatch, "chain with " + std::to_string(times_.size()) +
                                               " times needs as many spaces and one fewer "
                                               "transitions");
  }
  std::set<std::string> seen;
  for (const auto& t : times_) {
    if (!seen.insert(t).second) {
      throw Error(ErrorCode::DuplicateAtom, "duplicate time label '" + t + "'");
    }
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (!(transitions_[i].domain() == spaces_[i]) || !(transitions_[i].codomain() == spaces_[i + 1])) {
      throw Error(ErrorCode::DomainMismatch, "transition " + times_[i] + " -> " + times_[i + 1] +
                                                 " does not map '" + spaces_[i].name() +
                                                 "' to '" + spaces_[i + 1].name() + "'");
    }
  }
}

std::size_t MarkovChain::time_index(const std::string& label) const {
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (times_[i] == label) return i;
  }
  throw Error(ErrorCode::UnknownAtom, "unknown time label '" + label + "'");
}

Kernel chain_compose(const MarkovChain& chain, std::size_t i, std::size_t j) {
  if (i > j || j >= chain.length()) {
    throw Error(ErrorCode::BadInterval, "cannot compose from time index " + std::to_string(i) +
                                            " to " + std::to_string(j));
  }
  Kernel result = identity_kernel(chain.spaces()[i]);
  for (std::size_t k = i; k < j; ++k) result = compose(chain.transitions()[k], result);
  return result;
}

bool is_natural_transformation(const MarkovChain& from, const MarkovChain& to,
                               const std::vector<Kernel>& eta) {
  if (from.length() != to.length() || eta.size() != from.length()) return false;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (!(eta[k].domain() == from.spaces()[k]) || !(eta[k].codomain() == to.spaces()[k])) {
      return false;
    }
  }
  for (std::size_t k = 0; k + 1 < eta.size(); ++k) {
    if (!(compose(eta[k + 1], from.transitions()[k]) == compose(to.transitions()[k], eta[k]))) {
      return false;
    }
  }
  return true;
}

void HmmSpec::validate() const {
  if (sensors.size() != chain.length()) {
    throw Error(ErrorCode::DomainMismatch, "HMM needs one sensor per time");
  }
  for (std::size_t k = 0; k < sensors.size(); ++k) {
    if (!(sensors[k].domain() == chain.spaces()[k])) {
      throw Error(ErrorCode::DomainMismatch,
                  "sensor at time '" + chain.times()[k] + "' does not read the state space");
    }
  }
  if (!(initial.space() == chain.spaces().front())) {
    throw Error(ErrorCode::DomainMismatch, "initial distribution is not on the first state space");
  }
}

FilterStep hmm_filter_step(const Dist& prior, const Kernel& sensor, const Dist& measurement,
                           const Kernel* transition) {
  const auto result = infer(BayesModel(prior, sensor));
  auto post = posterior(result, measurement);
  std::optional<Dist> next;
  if (transition != nullptr) next = pushforward(post, *transition);
  return FilterStep{std::move(post), std::move(next)};
}

std::vector<Dist> run_filter(const HmmSpec& spec, const std::vector<Dist>& measurements) {
  spec.validate();
  if (measurements.size() > spec.chain.length()) {
    throw Error(ErrorCode::BadInterval, std::to_string(measurements.size()) +
                                            " measurements for a chain of " +
                                            std::to_string(spec.chain.length()) + " times");
  }
  std::vector<Dist> out;
  Dist prior = spec.initial;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const bool more = k + 1 < measurements.size();
    auto step = hmm_filter_step(prior, spec.sensors[k], measurements[k],
                                more ? &spec.chain.transitions()[k] : nullptr);
    out.push_back(step.posterior);
    if (more) prior = *step.next_prior;
  }
  return out;
}

void LinearGaussianModel::validate() const {
  const auto n = initial.dim();
  const auto m = observation.rows();
  if (transition.rows() != n || transition.cols() != n || process_cov.rows() != n ||
      process_cov.cols() != n || observation.cols() != n || observation_cov.rows() != m ||
      observation_cov.cols() != m) {
    throw Error(ErrorCode::InvalidGaussian, "linear-Gaussian model dimensions are inconsistent");
  }
  // Reuse the Gaussian covariance checks for Q and R.
  Gaussian(Eigen::VectorXd::Zero(n), process_cov);
  Gaussian(Eigen::VectorXd::Zero(m), observation_cov);
}

Gaussian kalman_joint(const Gaussian& state, const LinearGaussianModel& model) {
  const auto& a = model.transition;
  const auto& h = model.observation;
  const Eigen::VectorXd m = a * state.mean();
  const Eigen::MatrixXd p = symmetrize(a * state.cov() * a.transpose() + model.process_cov);
  const auto n = m.size();
  const auto k = h.rows();
  Eigen::VectorXd mean(k + n);
  mean << h * m, m;
  Eigen::MatrixXd cov(k + n, k + n);
  cov.topLeftCorner(k, k) = h * p * h.transpose() + model.observation_cov;
  cov.topRightCorner(k, n) = h * p;
  cov.bottomLeftCorner(n, k) = p * h.transpose();
  cov.bottomRightCorner(n, n) = p;
  return Gaussian(std::move(mean), symmetrize(cov));
}

Gaussian kalman_step(const Gaussian& state, const LinearGaussianModel& model,
                     const Eigen::VectorXd& y, Diagnostics* diagnostics) {
  if (y.size() != model.observation.rows()) {
    throw Error(ErrorCode::DomainMismatch, "observation has dimension " +
                                               std::to_string(y.size()) + ", expected " +
                                               std::to_string(model.observation.rows()));
  }
  return gaussian_condition(kalman_joint(state, model), y, diagnostics);
}

std::vector<Gaussian> run_filter(const LinearGaussianModel& model,
                                 const std::vector<Eigen::VectorXd>& measurements,
                                 Diagnostics* diagnostics) {
  model.validate();
  std::vector<Gaussian> out;
  Gaussian state = model.initial;
  for (const auto& y : measurements) {
    state = kalman_step(state, model, y, diagnostics);
    out.push_back(state);
  }
  return out;
}

}  // namespace kernelcat
