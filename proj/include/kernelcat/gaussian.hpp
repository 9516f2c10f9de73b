#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>

namespace kernelcat {

/// Records numerical interventions made while answering a query.
struct Diagnostics {
  bool jitter_applied = false;
  double jitter = 0.0;
};

/// Multivariate normal N(mean, cov). The covariance is validated to be symmetric
/// (1e-12 relative) and positive semidefinite (eigenvalues >= -1e-10 * spectral norm).
class Gaussian {
 public:
  /// Throws Error(InvalidGaussian).
  Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }

  /// Marginal on coordinates [start, start + count).
  Gaussian block(Eigen::Index start, Eigen::Index count) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

/// Cholesky factorization with the jitter policy: if the matrix is not safely
/// positive definite (failed factorization or estimated condition number above
/// 1e12), 1e-10 * trace / n is added to the diagonal once. ok() is false when
/// that retry also fails or jitter is not allowed.
class JitteredCholesky {
 public:
  explicit JitteredCholesky(const Eigen::MatrixXd& matrix, bool allow_jitter = true);

  bool ok() const { return ok_; }
  bool jitter_applied() const { return jitter_ > 0.0; }
  double jitter() const { return jitter_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const { return llt_.solve(rhs); }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool ok_ = false;
  double jitter_ = 0.0;
};

/// Conditions a joint N(mu, Sigma) partitioned as (block 1 = first n1 coordinates,
/// block 2 = the rest) on block 1 == observed:
///   mean = mu2 + S21 S11^{-1} (x - mu1),  cov = S22 - S21 S11^{-1} S12.
/// Throws Error(SingularBlock) when S11 stays singular after jitter.
Gaussian gaussian_condition(const Gaussian& joint, const Eigen::VectorXd& observed,
                            Diagnostics* diagnostics = nullptr);

/// Symmetric part (A + A^T) / 2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

}  // namespace kernelcat
