#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <variant>
#include <vector>

#include "kernelcat/gaussian.hpp"

namespace kernelcat {

using Input = Eigen::VectorXd;

struct Observation {
  Input x;
  double y = 0.0;
};

/// Product of the listed input coordinates; no coordinates is the constant 1.
struct Monomial {
  std::vector<std::size_t> coords;

  double operator()(const Input& x) const;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// x_1, ..., x_n, 1.
std::vector<Monomial> affine_basis(std::size_t dim);
/// x_1..x_n, then x_j x_k for j <= k (row-major), then 1. The x_j x_k / x_k x_j
/// duplicates are merged so the basis stays linearly independent.
std::vector<Monomial> elliptic_basis(std::size_t dim);

/// (f_1(x), ..., f_p(x)).
Eigen::VectorXd features(const std::vector<Monomial>& basis, const Input& x);

struct ZeroMean {
  friend bool operator==(const ZeroMean&, const ZeroMean&) = default;
};
struct ConstantMean {
  double value = 0.0;
  friend bool operator==(const ConstantMean&, const ConstantMean&) = default;
};
struct LinearMean {
  Eigen::VectorXd weights;
  double bias = 0.0;
  friend bool operator==(const LinearMean& a, const LinearMean& b) {
    return a.bias == b.bias && a.weights.size() == b.weights.size() && a.weights == b.weights;
  }
};
/// sum_j coeffs_j f_j(x): the mean i_m pushed through a parametric map.
struct BasisMean {
  std::vector<Monomial> basis;
  Eigen::VectorXd coeffs;
  friend bool operator==(const BasisMean& a, const BasisMean& b) {
    return a.basis == b.basis && a.coeffs.size() == b.coeffs.size() && a.coeffs == b.coeffs;
  }
};

struct MeanFn {
  std::variant<ZeroMean, ConstantMean, LinearMean, BasisMean> form;

  double operator()(const Input& x) const;
  friend bool operator==(const MeanFn&, const MeanFn&) = default;
};

struct SquaredExponential {
  double variance = 1.0;     // sigma_f^2
  double lengthscale = 1.0;  // l
  friend bool operator==(const SquaredExponential&, const SquaredExponential&) = default;
};
/// phi(x)^T Sigma_p phi(z) with phi the basis evaluations.
struct DotProduct {
  std::vector<Monomial> basis;
  Eigen::MatrixXd weight_cov;
  friend bool operator==(const DotProduct& a, const DotProduct& b) {
    return a.basis == b.basis && a.weight_cov.rows() == b.weight_cov.rows() &&
           a.weight_cov.cols() == b.weight_cov.cols() && a.weight_cov == b.weight_cov;
  }
};
struct ConstantCov {
  double value = 0.0;
  friend bool operator==(const ConstantCov&, const ConstantCov&) = default;
};
/// sigma^2 when the two inputs coincide (distance <= 1e-12), else 0.
struct WhiteNoise {
  double variance = 0.0;
  friend bool operator==(const WhiteNoise&, const WhiteNoise&) = default;
};
struct CovFn;
struct SumCov {
  std::vector<CovFn> terms;
  friend bool operator==(const SumCov&, const SumCov&);
};

struct CovFn {
  std::variant<SquaredExponential, DotProduct, ConstantCov, WhiteNoise, SumCov> form;

  double operator()(const Input& x, const Input& z) const;
  /// Throws Error(BadVariance) on nonpositive scales or a non-PSD weight covariance.
  void validate() const;
  friend bool operator==(const CovFn&, const CovFn&) = default;
};

inline bool operator==(const SumCov& a, const SumCov& b) { return a.terms == b.terms; }

/// k + white-noise(sigma^2). Throws Error(BadVariance) for sigma^2 < 0.
CovFn add_noise(const CovFn& cov, double noise_var);

/// Gram matrix K(A, B).
Eigen::MatrixXd gram(const CovFn& cov, const std::vector<Input>& a, const std::vector<Input>& b);

/// A GP prior GP(m, k) with i.i.d. Gaussian observation noise sigma^2 and the
/// measurements absorbed so far.
///
/// Updates are recursive: each absorbed measurement stores the rank-one
/// correction it makes to the running mean and covariance functions, so the
/// posterior
///   m^i(z)   = m^{i-1}(z) + kappa^{i-1}(z,x_i) / kappa^{i-1}(x_i,x_i) (y_i - m^{i-1}(x_i))
///   k^i(w,z) = k^{i-1}(w,z) - kappa^{i-1}(w,x_i) kappa^{i-1}(x_i,z) / kappa^{i-1}(x_i,x_i)
/// can be evaluated at any point without refactoring the whole Gram matrix.
/// kappa adds sigma^2 only on the diagonal of a single measurement.
class GpState {
 public:
  /// Throws Error(BadVariance) for noise_var < 0, or on an invalid covariance function.
  GpState(MeanFn mean, CovFn cov, double noise_var = 0.0);

  const MeanFn& mean() const { return mean_; }
  const CovFn& cov() const { return cov_; }
  double noise_var() const { return noise_var_; }
  const std::vector<Observation>& data() const { return data_; }

  /// Posterior mean and latent covariance at the query points via the recursion.
  Gaussian recursive_posterior(const std::vector<Input>& query) const;

 private:
  friend GpState gp_update_one(const GpState&, const Input&, double);

  struct Step {
    Eigen::VectorXd earlier;  // u_j(x_i) for j < i
    double pivot = 0.0;       // sqrt(kappa^{i-1}(x_i, x_i))
    double scaled_residual = 0.0;  // (y_i - m^{i-1}(x_i)) / pivot
  };
  /// u_i(z) = kappa^{i-1}(z, x_i) / pivot_i for every absorbed step i.
  Eigen::VectorXd directions(const Input& z) const;

  MeanFn mean_;
  CovFn cov_;
  double noise_var_;
  std::vector<Observation> data_;
  std::vector<Step> steps_;
};

/// N(m|X0, k|X0 + sigma^2 I) at the given points (prior, ignoring absorbed data).
/// Coincident points with sigma^2 = 0 get the jitter if allowed, else DegenerateGram.
Gaussian gp_prior_marginal(const GpState& gp, const std::vector<Input>& points,
                           bool allow_jitter = true, Diagnostics* diagnostics = nullptr);

/// Absorbs one measurement. Throws Error(DegenerateUpdate) when the effective
/// variance kappa^{i-1}(x,x) <= 1e-12.
GpState gp_update_one(const GpState& gp, const Input& x, double y);

/// Absorbs measurements in order.
GpState gp_update_all(const GpState& gp, const std::vector<Observation>& data);

/// Closed-form batch posterior from gp.data():
///   mean = m(z) + K(z,X0)(K(X0,X0)+sigma^2 I)^{-1}(y - m(X0))
///   cov  = k(w,z) - K(w,X0)(K(X0,X0)+sigma^2 I)^{-1}K(X0,z)
/// Throws Error(DegenerateGram) when the Gram matrix is not PD after jitter.
Gaussian gp_posterior_batch(const GpState& gp, const std::vector<Input>& query,
                            Diagnostics* diagnostics = nullptr);

struct CurvePoint {
  double z = 0.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// (z, mean, mean - 2 sigma, mean + 2 sigma) for 1D inputs.
std::vector<CurvePoint> gp_curve(const Gaussian& marginal, const std::vector<double>& z);

/// Weight-space model: f(x) = sum_j a_j f_j(x) with a ~ prior, observed with
/// i.i.d. N(0, noise_var) noise.
class ParametricModel {
 public:
  /// Throws Error(DependentBasis) if the basis is rank-deficient on the probe
  /// grid, Error(BadVariance) for noise_var < 0, Error(InvalidGaussian) on a
  /// prior of the wrong dimension.
  ParametricModel(std::size_t input_dim, std::vector<Monomial> basis, Gaussian prior,
                  double noise_var);

  std::size_t input_dim() const { return input_dim_; }
  const std::vector<Monomial>& basis() const { return basis_; }
  const Gaussian& prior() const { return prior_; }
  double noise_var() const { return noise_var_; }
  std::size_t parameter_count() const { return basis_.size(); }

 private:
  std::size_t input_dim_;
  std::vector<Monomial> basis_;
  Gaussian prior_;
  double noise_var_;
};

/// GP(i_m, phi^T Sigma phi) induced on functions by the prior on weights.
GpState parametric_pushforward(const ParametricModel& model);

/// Single-measurement update of the weight distribution (dual-basis pullback of
/// the function-space update).
Gaussian parametric_update_one(const ParametricModel& model, const Gaussian& weights,
                               const Input& x, double y);

/// Posterior on weights given all data, in closed form.
/// With noise: cov = (S0^{-1} + Phi^T Phi / s^2)^{-1}, mean = cov (S0^{-1} m0 + Phi^T y / s^2).
/// Noise-free data use the covariance form and require Phi S0 Phi^T to be PD.
Gaussian parametric_posterior(const ParametricModel& model, const std::vector<Observation>& data,
                              Diagnostics* diagnostics = nullptr);

/// Distribution of (f(z_1), ..., f(z_q)) under a weight distribution.
Gaussian parametric_predictive(const ParametricModel& model, const Gaussian& weights,
                               const std::vector<Input>& query);

}  // namespace kernelcat
