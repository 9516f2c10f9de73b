#include <gtest/gtest.h>

#include <cmath>

#include "kernelcat/error.hpp"
#include "kernelcat/gp.hpp"
#include "support.hpp"

namespace kernelcat {
namespace {

using testing::Rng;

Input pt(double x) { return Input::Constant(1, x); }

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

GpState se_gp(double noise = 0.0) {
  return GpState(MeanFn{ZeroMean{}}, CovFn{SquaredExponential{1.0, 1.0}}, noise);
}

/// Sorted 1D inputs with gaps in [0.75, 2] lengthscales.
std::vector<Observation> spread_data(Rng& rng, std::size_t n, double ell) {
  std::vector<Observation> data;
  double x = testing::uniform_real(rng, -4.0, -2.0);
  for (std::size_t i = 0; i < n; ++i) {
    data.push_back({pt(x), testing::uniform_real(rng, -2.0, 2.0)});
    x += ell * testing::uniform_real(rng, 0.75, 2.0);
  }
  return data;
}

TEST(Kernel, SquaredExponentialAndNoise) {
  const CovFn se{SquaredExponential{2.5, 0.7}};
  EXPECT_EQ(se(pt(1.3), pt(1.3)), 2.5);
  EXPECT_NEAR(se(pt(0.0), pt(0.7)), 2.5 * std::exp(-0.5), 1e-15);
  const auto noisy = add_noise(CovFn{SquaredExponential{1.0, 1.0}}, 0.25);
  EXPECT_EQ(noisy(pt(0.4), pt(0.4)), 1.25);
  EXPECT_EQ(noisy(pt(0.4), pt(1.4)), se_gp().cov()(pt(0.4), pt(1.4)));
  const auto same = add_noise(CovFn{SquaredExponential{1.0, 1.0}}, 0.0);
  EXPECT_EQ(same(pt(0.4), pt(0.4)), 1.0);
  EXPECT_THROW(add_noise(se, -1.0), Error);
  const CovFn negative{SquaredExponential{-1.0, 1.0}};
  EXPECT_THROW(negative.validate(), Error);
}

TEST(PriorMarginal, SinglePointAndNoise) {
  const GpState gp(MeanFn{ConstantMean{0.5}}, CovFn{SquaredExponential{2.0, 1.0}}, 0.3);
  const auto one = gp_prior_marginal(gp, {pt(1.0)});
  EXPECT_EQ(one.mean()[0], 0.5);
  EXPECT_NEAR(one.cov()(0, 0), 2.3, 1e-15);
  EXPECT_EQ(gp_prior_marginal(se_gp(), {pt(0.0), pt(1.0)}).mean(), Eigen::Vector2d::Zero());

  const std::vector<Input> xs{pt(-1.0), pt(0.2), pt(1.5)};
  const auto noisy = gp_prior_marginal(GpState(MeanFn{ZeroMean{}}, CovFn{SquaredExponential{1.0, 1.0}}, 0.3), xs);
  const auto clean = gp_prior_marginal(se_gp(), xs);
  EXPECT_LE(max_abs(noisy.cov() - clean.cov() - 0.3 * Eigen::MatrixXd::Identity(3, 3)), 1e-15);
}

TEST(PriorMarginal, CoincidentNoiseFreePoints) {
  Diagnostics diag;
  EXPECT_NO_THROW(gp_prior_marginal(se_gp(), {pt(1.0), pt(1.0)}, true, &diag));
  EXPECT_TRUE(diag.jitter_applied);
  try {
    gp_prior_marginal(se_gp(), {pt(1.0), pt(1.0)}, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateGram);
  }
}

TEST(UpdateOne, ObservingTheMeanCollapsesVariance) {
  const GpState gp(MeanFn{ConstantMean{0.7}}, CovFn{SquaredExponential{1.0, 1.0}});
  const auto post = gp_update_one(gp, pt(2.0), 0.7).recursive_posterior({pt(2.0)});
  EXPECT_NEAR(post.mean()[0], 0.7, 1e-15);
  EXPECT_NEAR(post.cov()(0, 0), 0.0, 1e-15);
}

TEST(UpdateOne, FarQueriesKeepThePrior) {
  const auto post = gp_update_one(se_gp(), pt(0.0), 1.5).recursive_posterior({pt(50.0)});
  EXPECT_NEAR(post.mean()[0], 0.0, 1e-8);
  EXPECT_NEAR(post.cov()(0, 0), 1.0, 1e-8);
}

TEST(UpdateOne, RepeatedNoiseFreeInputIsDegenerate) {
  const auto once = gp_update_one(se_gp(), pt(1.0), 0.2);
  try {
    gp_update_one(once, pt(1.0), 0.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateUpdate);
  }
  EXPECT_NO_THROW(gp_update_one(gp_update_one(se_gp(0.1), pt(1.0), 0.2), pt(1.0), 0.3));
}

TEST(Batch, TwoSequentialUpdatesMatchTwoPointFormula) {
  const std::vector<Input> query{pt(-0.5), pt(0.4), pt(2.2)};
  const auto gp = gp_update_one(gp_update_one(se_gp(0.1), pt(0.0), 1.0), pt(1.0), -0.5);
  // Hand-expanded two-point formulas.
  const auto& k = gp.cov();
  Eigen::Matrix2d kxx;
  kxx << k(pt(0.0), pt(0.0)) + 0.1, k(pt(0.0), pt(1.0)), k(pt(1.0), pt(0.0)), k(pt(1.0), pt(1.0)) + 0.1;
  const Eigen::Vector2d y(1.0, -0.5);
  Eigen::MatrixXd kzx(3, 2), kzz(3, 3);
  for (int i = 0; i < 3; ++i) {
    kzx(i, 0) = k(query[i], pt(0.0));
    kzx(i, 1) = k(query[i], pt(1.0));
    for (int j = 0; j < 3; ++j) kzz(i, j) = k(query[i], query[j]);
  }
  const Eigen::VectorXd mean = kzx * kxx.inverse() * y;
  const Eigen::MatrixXd cov = kzz - kzx * kxx.inverse() * kzx.transpose();
  const auto rec = gp.recursive_posterior(query);
  const auto batch = gp_posterior_batch(gp, query);
  EXPECT_LE(max_abs(rec.mean() - mean), 1e-8);
  EXPECT_LE(max_abs(rec.cov() - cov), 1e-8);
  EXPECT_LE(max_abs(batch.mean() - mean), 1e-8);
  EXPECT_LE(max_abs(batch.cov() - cov), 1e-8);
}

TEST(Batch, NoDataIsThePrior) {
  const std::vector<Input> query{pt(0.0), pt(0.3), pt(2.0)};
  const auto batch = gp_posterior_batch(se_gp(), query);
  const auto prior = gp_prior_marginal(se_gp(), query);
  EXPECT_EQ(batch.mean(), prior.mean());
  EXPECT_LE(max_abs(batch.cov() - prior.cov()), 0.0);
}

TEST(Batch, SingleMeasurementClosedForm) {
  const GpState gp = gp_update_one(se_gp(0.2), pt(0.5), 1.2);
  const Input z = pt(1.1);
  const double kxz = std::exp(-0.5 * 0.36);
  const auto batch = gp_posterior_batch(gp, {z});
  EXPECT_NEAR(batch.mean()[0], kxz / 1.2 * 1.2, 1e-12);
  EXPECT_NEAR(batch.cov()(0, 0), 1.0 - kxz * kxz / 1.2, 1e-12);
}

TEST(Batch, RandomDatasetsMatchTheRecursion) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const double ell = testing::uniform_real(rng, 0.5, 2.0);
    const double noise = trial % 2 == 0 ? 0.0 : 0.1;
    const GpState prior(MeanFn{LinearMean{Eigen::VectorXd::Constant(1, 0.3), -0.2}},
                        CovFn{SquaredExponential{testing::uniform_real(rng, 0.5, 2.0), ell}}, noise);
    const auto data = spread_data(rng, testing::pick(rng, 1, 10), ell);
    const auto gp = gp_update_all(prior, data);
    std::vector<Input> query;
    for (int i = 0; i < 20; ++i) query.push_back(pt(testing::uniform_real(rng, -6.0, 20.0)));
    const auto rec = gp.recursive_posterior(query);
    const auto batch = gp_posterior_batch(gp, query);
    EXPECT_LE(max_abs(rec.mean() - batch.mean()), 1e-8);
    EXPECT_LE(max_abs(rec.cov() - batch.cov()), 1e-8);
  }
}

TEST(Curve, BandIsTwoStandardDeviations) {
  const auto marginal = gp_posterior_batch(gp_update_one(se_gp(), pt(0.0), 1.0), {pt(0.0), pt(1.0)});
  const auto curve = gp_curve(marginal, {0.0, 1.0});
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_NEAR(curve[0].upper - curve[0].lower, 0.0, 1e-7);
  const double sd = std::sqrt(marginal.cov()(1, 1));
  EXPECT_NEAR(curve[1].upper - curve[1].mean, 2.0 * sd, 1e-15);
  EXPECT_NEAR(curve[1].mean - curve[1].lower, 2.0 * sd, 1e-15);
}

TEST(Basis, AffineAndElliptic) {
  EXPECT_EQ(affine_basis(2).size(), 3u);
  EXPECT_EQ(elliptic_basis(1).size(), 3u);
  EXPECT_EQ(elliptic_basis(2).size(), 6u);
  const Eigen::Vector2d x(2.0, 3.0);
  const auto f = features(elliptic_basis(2), x);
  Eigen::VectorXd expected(6);
  expected << 2.0, 3.0, 4.0, 6.0, 9.0, 1.0;
  EXPECT_EQ(f, expected);
}

TEST(Parametric, AffinePushforwardCovariance) {
  const ParametricModel model(1, affine_basis(1), Gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()), 0.0);
  const auto gp = parametric_pushforward(model);
  EXPECT_NEAR(gp.cov()(pt(1.5), pt(-2.0)), 1.5 * -2.0 + 1.0, 1e-15);
  EXPECT_EQ(gp.mean()(pt(3.0)), 0.0);

  // Monte-Carlo covariance of sampled affine functions a x + b.
  Rng rng(8);
  std::normal_distribution<double> normal;
  const double x = 1.5, z = -2.0;
  const int samples = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double a = normal(rng), b = normal(rng);
    const double prod = (a * x + b) * (a * z + b);
    sum += prod;
    sum2 += prod * prod;
  }
  const double mc = sum / samples;
  const double se = std::sqrt((sum2 / samples - mc * mc) / samples);
  EXPECT_NEAR(mc, -2.0, 3.0 * se);
}

TEST(Parametric, ZeroPriorCovarianceIsDeterministic) {
  Eigen::Vector2d m(0.5, -1.0);
  const ParametricModel model(1, affine_basis(1), Gaussian(m, Eigen::Matrix2d::Zero()), 0.0);
  const auto gp = parametric_pushforward(model);
  EXPECT_EQ(gp.cov()(pt(1.0), pt(2.0)), 0.0);
  EXPECT_EQ(gp.mean()(pt(2.0)), 0.0);
}

TEST(Parametric, ConjugateScalarUpdate) {
  const ParametricModel model(1, {Monomial{{0}}}, Gaussian(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)), 1.0);
  const auto post = parametric_posterior(model, {{pt(1.0), 2.0}});
  EXPECT_NEAR(post.mean()[0], 1.0, 1e-14);
  EXPECT_NEAR(post.cov()(0, 0), 0.5, 1e-14);

  // Quadrature of N(a; 0, 1) N(2; a, 1) over a.
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double a = -10.0 + 20.0 * i / 20000.0;
    const double w = std::exp(-0.5 * a * a - 0.5 * (2.0 - a) * (2.0 - a));
    z += w;
    m1 += w * a;
    m2 += w * a * a;
  }
  EXPECT_NEAR(post.mean()[0], m1 / z, 1e-6);
  EXPECT_NEAR(post.cov()(0, 0), m2 / z - (m1 / z) * (m1 / z), 1e-6);

  EXPECT_EQ(parametric_posterior(model, {}).mean(), model.prior().mean());
  const auto seq = parametric_update_one(model, model.prior(), pt(1.0), 2.0);
  EXPECT_NEAR(seq.mean()[0], 1.0, 1e-14);
}

TEST(Parametric, RejectsDependentBasisAndBadPrior) {
  try {
    ParametricModel(1, {Monomial{{0}}, Monomial{{0}}}, Gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DependentBasis);
  }
  EXPECT_THROW(ParametricModel(1, affine_basis(1), Gaussian(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()), 0.1), Error);
  EXPECT_THROW(ParametricModel(1, affine_basis(1), Gaussian(Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()), -0.1), Error);
}

TEST(Parametric, WeightSpaceMatchesFunctionSpace) {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    const bool elliptic = trial % 2 == 1;
    const std::size_t dim = elliptic ? testing::pick(rng, 1, 2) : testing::pick(rng, 1, 6);
    const auto basis = elliptic ? elliptic_basis(dim) : affine_basis(dim);
    const auto p = static_cast<Eigen::Index>(basis.size());
    const ParametricModel model(dim, basis, Gaussian(testing::random_vector(rng, p), testing::random_spd(rng, p, 0.5)), 0.2);
    std::vector<Observation> data;
    for (std::size_t i = 0, n = testing::pick(rng, 0, 20); i < n; ++i) {
      data.push_back({testing::random_vector(rng, static_cast<Eigen::Index>(dim), -2.0, 2.0), testing::uniform_real(rng, -2.0, 2.0)});
    }
    std::vector<Input> query;
    for (int i = 0; i < 10; ++i) query.push_back(testing::random_vector(rng, static_cast<Eigen::Index>(dim), -2.0, 2.0));
    const auto ws = parametric_predictive(model, parametric_posterior(model, data), query);
    const auto fs = gp_posterior_batch(gp_update_all(parametric_pushforward(model), data), query);
    EXPECT_LE(max_abs(ws.mean() - fs.mean()), 1e-8);
    EXPECT_LE(max_abs(ws.cov() - fs.cov()), 1e-8);
  }
}

}  // namespace
}  // namespace kernelcat
