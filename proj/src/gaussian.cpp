#include "kernelcat/gaussian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "kernelcat/error.hpp"

namespace kernelcat {
namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;
constexpr double kAbsoluteFloor = 1e-12;
constexpr double kJitterScale = 1e-10;
constexpr double kMaxCondition = 1e12;

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const Eigen::ArrayXd diag = llt.matrixLLT().diagonal().array();
  if (diag.size() == 0) return true;
  if (!(diag > 0.0).all() || !diag.allFinite()) return false;
  // Pivot ratio squared bounds the condition number from below.
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  return ratio * ratio * kMaxCondition >= 1.0;
}

}  // namespace

Gaussian::Gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw Error(ErrorCode::InvalidGaussian,
                "covariance must be " + std::to_string(mean_.size()) + "x" +
                    std::to_string(mean_.size()));
  }
  if (!mean_.allFinite() || !cov_.allFinite()) {
    throw Error(ErrorCode::InvalidGaussian, "non-finite mean or covariance entry");
  }
  if (mean_.size() == 0) return;
  const double scale = std::max(cov_.cwiseAbs().maxCoeff(), 1e-300);
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::InvalidGaussian, "covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double spectral = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  // Absolute floor so round-off on an exactly-zero covariance is not rejected.
  if (ev.minCoeff() < -(kPsdTolerance * spectral + kAbsoluteFloor)) {
    throw Error(ErrorCode::InvalidGaussian, "covariance is not positive semidefinite");
  }
}

Gaussian Gaussian::block(Eigen::Index start, Eigen::Index count) const {
  return Gaussian(mean_.segment(start, count), cov_.block(start, start, count, count));
}

JitteredCholesky::JitteredCholesky(const Eigen::MatrixXd& matrix, bool allow_jitter) {
  llt_.compute(matrix);
  if (factor_ok(llt_)) {
    ok_ = true;
    return;
  }
  if (!allow_jitter) return;
  const auto n = matrix.rows();
  jitter_ = n > 0 ? kJitterScale * std::abs(matrix.trace()) / static_cast<double>(n) : 0.0;
  if (jitter_ <= 0.0) return;
  Eigen::MatrixXd bumped = matrix;
  bumped.diagonal().array() += jitter_;
  llt_.compute(bumped);
  ok_ = factor_ok(llt_);
}

Gaussian gaussian_condition(const Gaussian& joint, const Eigen::VectorXd& observed,
                            Diagnostics* diagnostics) {
  const auto n1 = observed.size();
  const auto n = joint.dim();
  if (n1 <= 0 || n1 > n) {
    throw Error(ErrorCode::SingularBlock, "observed block size " + std::to_string(n1) +
                                              " is not within the joint dimension " +
                                              std::to_string(n));
  }
  const auto n2 = n - n1;
  const auto& mu = joint.mean();
  const auto& s = joint.cov();
  const Eigen::MatrixXd s11 = s.topLeftCorner(n1, n1);
  const Eigen::MatrixXd s12 = s.topRightCorner(n1, n2);
  const Eigen::MatrixXd s22 = s.bottomRightCorner(n2, n2);

  JitteredCholesky chol(s11);
  if (!chol.ok()) {
    throw Error(ErrorCode::SingularBlock, "conditioning block is singular");
  }
  if (diagnostics != nullptr && chol.jitter_applied()) {
    diagnostics->jitter_applied = true;
    diagnostics->jitter = chol.jitter();
  }
  const Eigen::MatrixXd gain_t = chol.solve(s12);  // S11^{-1} S12
  Eigen::VectorXd mean = mu.tail(n2) + gain_t.transpose() * (observed - mu.head(n1));
  Eigen::MatrixXd cov = symmetrize(s22 - s12.transpose() * gain_t);
  return Gaussian(std::move(mean), std::move(cov));
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace kernelcat
