#include "kernelcat/gp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

#include "kernelcat/error.hpp"

namespace kernelcat {
namespace {

constexpr double kCoincident = 1e-12;
constexpr double kMinEffectiveVariance = 1e-12;
constexpr double kBasisRankTolerance = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_input_dim(const Input& x, std::size_t coord) {
  if (coord >= static_cast<std::size_t>(x.size())) {
    throw Error(ErrorCode::DomainMismatch, "basis uses input coordinate " + std::to_string(coord) +
                                               " but the input has dimension " +
                                               std::to_string(x.size()));
  }
}

Eigen::MatrixXd design_matrix(const std::vector<Monomial>& basis, const std::vector<Input>& xs) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) phi.row(static_cast<Eigen::Index>(i)) = features(basis, xs[i]).transpose();
  return phi;
}

}  // namespace

double Monomial::operator()(const Input& x) const {
  double v = 1.0;
  for (auto c : coords) {
    check_input_dim(x, c);
    v *= x[static_cast<Eigen::Index>(c)];
  }
  return v;
}

std::vector<Monomial> affine_basis(std::size_t dim) {
  std::vector<Monomial> basis;
  for (std::size_t j = 0; j < dim; ++j) basis.push_back({{j}});
  basis.push_back({});
  return basis;
}

std::vector<Monomial> elliptic_basis(std::size_t dim) {
  std::vector<Monomial> basis;
  for (std::size_t j = 0; j < dim; ++j) basis.push_back({{j}});
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j; k < dim; ++k) basis.push_back({{j, k}});
  }
  basis.push_back({});
  return basis;
}

Eigen::VectorXd features(const std::vector<Monomial>& basis, const Input& x) {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) phi[static_cast<Eigen::Index>(j)] = basis[j](x);
  return phi;
}

double MeanFn::operator()(const Input& x) const {
  return std::visit(
      overloaded{
          [](const ZeroMean&) { return 0.0; },
          [](const ConstantMean& m) { return m.value; },
          [&](const LinearMean& m) {
            if (m.weights.size() != x.size()) {
              throw Error(ErrorCode::DomainMismatch, "linear mean has " +
                                                         std::to_string(m.weights.size()) +
                                                         " weights for an input of dimension " +
                                                         std::to_string(x.size()));
            }
            return m.weights.dot(x) + m.bias;
          },
          [&](const BasisMean& m) { return features(m.basis, x).dot(m.coeffs); },
      },
      form);
}

double CovFn::operator()(const Input& x, const Input& z) const {
  return std::visit(
      overloaded{
          [&](const SquaredExponential& k) {
            const double d2 = (x - z).squaredNorm();
            return k.variance * std::exp(-0.5 * d2 / (k.lengthscale * k.lengthscale));
          },
          [&](const DotProduct& k) {
            return features(k.basis, x).dot(k.weight_cov * features(k.basis, z));
          },
          [](const ConstantCov& k) { return k.value; },
          [&](const WhiteNoise& k) { return (x - z).norm() <= kCoincident ? k.variance : 0.0; },
          [&](const SumCov& k) {
            double v = 0.0;
            for (const auto& t : k.terms) v += t(x, z);
            return v;
          },
      },
      form);
}

void CovFn::validate() const {
  std::visit(overloaded{
                 [](const SquaredExponential& k) {
                   if (!(k.variance > 0.0) || !(k.lengthscale > 0.0)) {
                     throw Error(ErrorCode::BadVariance,
                                 "squared-exponential variance and lengthscale must be > 0");
                   }
                 },
                 [](const DotProduct& k) {
                   const auto p = static_cast<Eigen::Index>(k.basis.size());
                   if (k.weight_cov.rows() != p || k.weight_cov.cols() != p) {
                     throw Error(ErrorCode::BadVariance,
                                 "dot-product weight covariance must be " + std::to_string(p) +
                                     "x" + std::to_string(p));
                   }
                   try {
                     Gaussian(Eigen::VectorXd::Zero(p), k.weight_cov);
                   } catch (const Error& e) {
                     throw Error(ErrorCode::BadVariance,
                                 std::string("dot-product weight covariance: ") + e.what());
                   }
                 },
                 [](const ConstantCov& k) {
                   if (!(k.value >= 0.0)) {
                     throw Error(ErrorCode::BadVariance, "constant covariance must be >= 0");
                   }
                 },
                 [](const WhiteNoise& k) {
                   if (!(k.variance >= 0.0)) {
                     throw Error(ErrorCode::BadVariance, "white-noise variance must be >= 0");
                   }
                 },
                 [](const SumCov& k) {
                   for (const auto& t : k.terms) t.validate();
                 },
             },
             form);
}

CovFn add_noise(const CovFn& cov, double noise_var) {
  if (!(noise_var >= 0.0)) {
    throw Error(ErrorCode::BadVariance, "noise variance must be >= 0");
  }
  return CovFn{SumCov{{cov, CovFn{WhiteNoise{noise_var}}}}};
}

Eigen::MatrixXd gram(const CovFn& cov, const std::vector<Input>& a, const std::vector<Input>& b) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(a[i], b[j]);
    }
  }
  return k;
}

GpState::GpState(MeanFn mean, CovFn cov, double noise_var)
    : mean_(std::move(mean)), cov_(std::move(cov)), noise_var_(noise_var) {
  if (!(noise_var_ >= 0.0)) {
    throw Error(ErrorCode::BadVariance, "noise variance must be >= 0");
  }
  cov_.validate();
}

Eigen::VectorXd GpState::directions(const Input& z) const {
  Eigen::VectorXd u(static_cast<Eigen::Index>(steps_.size()));
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double cross = cov_(z, data_[i].x) - u.head(ii).dot(steps_[i].earlier);
    u[ii] = cross / steps_[i].pivot;
  }
  return u;
}

Gaussian GpState::recursive_posterior(const std::vector<Input>& query) const {
  const auto q = static_cast<Eigen::Index>(query.size());
  Eigen::MatrixXd u(static_cast<Eigen::Index>(steps_.size()), q);
  Eigen::VectorXd residuals(static_cast<Eigen::Index>(steps_.size()));
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    residuals[static_cast<Eigen::Index>(i)] = steps_[i].scaled_residual;
  }
  Eigen::VectorXd mean(q);
  for (Eigen::Index c = 0; c < q; ++c) {
    u.col(c) = directions(query[static_cast<std::size_t>(c)]);
    mean[c] = mean_(query[static_cast<std::size_t>(c)]) + u.col(c).dot(residuals);
  }
  Eigen::MatrixXd cov = gram(cov_, query, query) - u.transpose() * u;
  return Gaussian(std::move(mean), symmetrize(cov));
}

Gaussian gp_prior_marginal(const GpState& gp, const std::vector<Input>& points, bool allow_jitter,
                           Diagnostics* diagnostics) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean[i] = gp.mean()(points[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd cov = gram(gp.cov(), points, points);
  cov.diagonal().array() += gp.noise_var();

  bool coincident = false;
  for (std::size_t i = 0; i < points.size() && !coincident; ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if ((points[i] - points[j]).norm() <= kCoincident) {
        coincident = true;
        break;
      }
    }
  }
  if (coincident && gp.noise_var() == 0.0) {
    if (!allow_jitter) {
      throw Error(ErrorCode::DegenerateGram, "coincident points with zero noise variance");
    }
    const double jitter = 1e-10 * std::abs(cov.trace()) / static_cast<double>(n);
    cov.diagonal().array() += jitter;
    if (diagnostics != nullptr) {
      diagnostics->jitter_applied = true;
      diagnostics->jitter = jitter;
    }
  }
  return Gaussian(std::move(mean), symmetrize(cov));
}

GpState gp_update_one(const GpState& gp, const Input& x, double y) {
  GpState next = gp;
  const Eigen::VectorXd earlier = gp.directions(x);
  const double effective = gp.cov_(x, x) + gp.noise_var_ - earlier.squaredNorm();
  if (!(effective > kMinEffectiveVariance)) {
    throw Error(ErrorCode::DegenerateUpdate,
                "effective variance " + std::to_string(effective) + " at the update point is not positive");
  }
  double predicted = gp.mean_(x);
  for (std::size_t j = 0; j < gp.steps_.size(); ++j) {
    predicted += earlier[static_cast<Eigen::Index>(j)] * gp.steps_[j].scaled_residual;
  }
  const double pivot = std::sqrt(effective);
  next.steps_.push_back(GpState::Step{earlier, pivot, (y - predicted) / pivot});
  next.data_.push_back(Observation{x, y});
  return next;
}

GpState gp_update_all(const GpState& gp, const std::vector<Observation>& data) {
  GpState state = gp;
  for (const auto& obs : data) state = gp_update_one(state, obs.x, obs.y);
  return state;
}

Gaussian gp_posterior_batch(const GpState& gp, const std::vector<Input>& query,
                            Diagnostics* diagnostics) {
  const auto q = static_cast<Eigen::Index>(query.size());
  Eigen::VectorXd prior_mean(q);
  for (Eigen::Index i = 0; i < q; ++i) prior_mean[i] = gp.mean()(query[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd prior_cov = gram(gp.cov(), query, query);
  if (gp.data().empty()) return Gaussian(std::move(prior_mean), symmetrize(prior_cov));

  std::vector<Input> xs;
  Eigen::VectorXd residual(static_cast<Eigen::Index>(gp.data().size()));
  for (std::size_t i = 0; i < gp.data().size(); ++i) {
    xs.push_back(gp.data()[i].x);
    residual[static_cast<Eigen::Index>(i)] = gp.data()[i].y - gp.mean()(gp.data()[i].x);
  }
  Eigen::MatrixXd k00 = gram(gp.cov(), xs, xs);
  k00.diagonal().array() += gp.noise_var();
  JitteredCholesky chol(k00);
  if (!chol.ok()) {
    throw Error(ErrorCode::DegenerateGram, "Gram matrix K(X0,X0) + sigma^2 I is not positive definite");
  }
  if (diagnostics != nullptr && chol.jitter_applied()) {
    diagnostics->jitter_applied = true;
    diagnostics->jitter = chol.jitter();
  }
  const Eigen::MatrixXd k0q = gram(gp.cov(), xs, query);
  Eigen::VectorXd mean = prior_mean + k0q.transpose() * chol.solve(residual);
  Eigen::MatrixXd cov = prior_cov - k0q.transpose() * chol.solve(k0q);
  return Gaussian(std::move(mean), symmetrize(cov));
}

std::vector<CurvePoint> gp_curve(const Gaussian& marginal, const std::vector<double>& z) {
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double sd = std::sqrt(std::max(marginal.cov()(ii, ii), 0.0));
    const double m = marginal.mean()[ii];
    out.push_back({z[i], m, m - 2.0 * sd, m + 2.0 * sd});
  }
  return out;
}

ParametricModel::ParametricModel(std::size_t input_dim, std::vector<Monomial> basis,
                                 Gaussian prior, double noise_var)
    : input_dim_(input_dim), basis_(std::move(basis)), prior_(std::move(prior)),
      noise_var_(noise_var) {
  if (!(noise_var_ >= 0.0)) {
    throw Error(ErrorCode::BadVariance, "noise variance must be >= 0");
  }
  const auto p = static_cast<Eigen::Index>(basis_.size());
  if (p == 0 || prior_.dim() != p) {
    throw Error(ErrorCode::InvalidGaussian, "prior dimension " + std::to_string(prior_.dim()) +
                                                " does not match " + std::to_string(p) +
                                                " basis functions");
  }
  for (const auto& f : basis_) {
    for (auto c : f.coords) {
      if (c >= input_dim_) {
        throw Error(ErrorCode::DependentBasis, "basis function uses coordinate " +
                                                   std::to_string(c) + " of a " +
                                                   std::to_string(input_dim_) + "-dim input");
      }
    }
  }
  // Probe grid: fixed pseudo-random points in [-2, 2]^n.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::vector<Input> probes(static_cast<std::size_t>(4 * p + 8), Input(static_cast<Eigen::Index>(input_dim_)));
  for (auto& x : probes) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = coord(rng);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_matrix(basis_, probes));
  qr.setThreshold(kBasisRankTolerance);
  if (qr.rank() != p) {
    throw Error(ErrorCode::DependentBasis, "basis functions are linearly dependent (rank " +
                                               std::to_string(qr.rank()) + " < " +
                                               std::to_string(p) + ")");
  }
}

GpState parametric_pushforward(const ParametricModel& model) {
  return GpState(MeanFn{BasisMean{model.basis(), model.prior().mean()}},
                 CovFn{DotProduct{model.basis(), model.prior().cov()}}, model.noise_var());
}

Gaussian parametric_update_one(const ParametricModel& model, const Gaussian& weights,
                               const Input& x, double y) {
  const Eigen::VectorXd phi = features(model.basis(), x);
  const Eigen::VectorXd s_phi = weights.cov() * phi;
  const double effective = phi.dot(s_phi) + model.noise_var();
  if (!(effective > kMinEffectiveVariance)) {
    throw Error(ErrorCode::DegenerateUpdate, "effective variance at the update point is not positive");
  }
  Eigen::VectorXd mean = weights.mean() + s_phi * ((y - weights.mean().dot(phi)) / effective);
  Eigen::MatrixXd cov = weights.cov() - s_phi * s_phi.transpose() / effective;
  return Gaussian(std::move(mean), symmetrize(cov));
}

Gaussian parametric_posterior(const ParametricModel& model, const std::vector<Observation>& data,
                              Diagnostics* diagnostics) {
  const auto& prior = model.prior();
  if (data.empty()) return prior;
  const auto p = static_cast<Eigen::Index>(model.parameter_count());
  const auto n = static_cast<Eigen::Index>(data.size());

  JitteredCholesky prior_chol(prior.cov(), /*allow_jitter=*/false);
  if (!prior_chol.ok()) {
    throw Error(ErrorCode::SingularPrior, "prior covariance on weights is singular");
  }

  std::vector<Input> xs;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.push_back(data[static_cast<std::size_t>(i)].x);
    y[i] = data[static_cast<std::size_t>(i)].y;
  }
  const Eigen::MatrixXd phi = design_matrix(model.basis(), xs);

  if (model.noise_var() > 0.0) {
    const double s2 = model.noise_var();
    const Eigen::MatrixXd prior_precision = prior_chol.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p)));
    const Eigen::MatrixXd precision =
        symmetrize(prior_precision + phi.transpose() * phi / s2);
    JitteredCholesky post(precision);
    if (!post.ok()) {
      throw Error(ErrorCode::DegenerateUpdate, "posterior precision is singular");
    }
    if (diagnostics != nullptr && post.jitter_applied()) {
      diagnostics->jitter_applied = true;
      diagnostics->jitter = post.jitter();
    }
    Eigen::MatrixXd cov = post.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p)));
    Eigen::VectorXd mean =
        post.solve(Eigen::VectorXd(prior_precision * prior.mean() + phi.transpose() * y / s2));
    return Gaussian(std::move(mean), symmetrize(cov));
  }

  if (n > p) {
    throw Error(ErrorCode::DegenerateUpdate, "noise-free data with more measurements (" +
                                                 std::to_string(n) + ") than parameters (" +
                                                 std::to_string(p) + ")");
  }
  const Eigen::MatrixXd s_phi_t = prior.cov() * phi.transpose();
  JitteredCholesky innovation(symmetrize(phi * s_phi_t), /*allow_jitter=*/false);
  if (!innovation.ok()) {
    throw Error(ErrorCode::DegenerateUpdate, "noise-free measurements are not independent");
  }
  Eigen::VectorXd mean = prior.mean() + s_phi_t * innovation.solve(Eigen::VectorXd(y - phi * prior.mean()));
  Eigen::MatrixXd cov = prior.cov() - s_phi_t * innovation.solve(Eigen::MatrixXd(s_phi_t.transpose()));
  return Gaussian(std::move(mean), symmetrize(cov));
}

Gaussian parametric_predictive(const ParametricModel& model, const Gaussian& weights,
                               const std::vector<Input>& query) {
  const Eigen::MatrixXd phi = design_matrix(model.basis(), query);
  return Gaussian(phi * weights.mean(), symmetrize(phi * weights.cov() * phi.transpose()));
}

}  // namespace kernelcat
