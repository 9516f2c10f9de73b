#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kernelcat/finite.hpp"

namespace kernelcat::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline FiniteSpace random_space(Rng& rng, const std::string& name, std::size_t max_size) {
  const auto n = pick(rng, 1, max_size);
  std::vector<std::string> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(name + std::to_string(i));
  return FiniteSpace(name, atoms);
}

/// Integer weights in [0, 6], some zero, normalised. Never all zero.
inline std::vector<Rational> random_weights(Rng& rng, std::size_t n) {
  std::vector<Rational> w(n);
  Rational total = 0;
  for (auto& x : w) {
    x = pick(rng, 0, 3) == 0 ? 0 : static_cast<long>(pick(rng, 1, 6));
    total += x;
  }
  if (total == 0) {
    w[pick(rng, 0, n - 1)] = 1;
    total = 1;
  }
  for (auto& x : w) x /= total;
  return w;
}

inline Dist random_dist(Rng& rng, const FiniteSpace& space) {
  return Dist(space, random_weights(rng, space.size()));
}

inline Kernel random_kernel(Rng& rng, const FiniteSpace& from, const FiniteSpace& to) {
  Kernel::Matrix rows;
  for (std::size_t i = 0; i < from.size(); ++i) rows.push_back(random_weights(rng, to.size()));
  return Kernel(from, to, rows);
}

/// (second o first) by the double sum, written against raw matrices.
inline Kernel::Matrix compose_oracle(const Kernel::Matrix& second, const Kernel::Matrix& first) {
  const auto nx = first.size();
  const auto ny = second.size();
  const auto nz = second.empty() ? 0 : second[0].size();
  Kernel::Matrix out(nx, std::vector<Rational>(nz, Rational(0)));
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t z = 0; z < nz; ++z) {
      for (std::size_t y = 0; y < ny; ++y) out[x][z] += second[y][z] * first[x][y];
    }
  }
  return out;
}

/// A * A^T + eps I with A uniform in [-1, 1]: symmetric positive definite.
inline Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index n, double eps = 0.1) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uniform_real(rng, -1.0, 1.0);
  }
  return a * a.transpose() + eps * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform_real(rng, lo, hi);
  return v;
}

/// Discrete HMM filtering by enumerating every state path up to each time and
/// conditioning the full joint on the observed labels. Arguments are raw tables:
/// initial[s], transitions[t][s][s'], sensors[t][s][o].
inline std::vector<std::vector<Rational>> exhaustive_hmm_filter(
    const std::vector<Rational>& initial, const std::vector<Kernel::Matrix>& transitions,
    const std::vector<Kernel::Matrix>& sensors, const std::vector<std::size_t>& observed) {
  std::vector<std::vector<Rational>> out;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    const auto states_k = sensors[k].size();
    std::vector<Rational> w(states_k, Rational(0));
    std::vector<std::size_t> path(k + 1, 0);
    std::function<void(std::size_t, const Rational&)> walk = [&](std::size_t t, const Rational& p) {
      if (t == k + 1) {
        w[path[k]] += p;
        return;
      }
      for (std::size_t s = 0; s < sensors[t].size(); ++s) {
        path[t] = s;
        const Rational step = t == 0 ? initial[s] : transitions[t - 1][path[t - 1]][s];
        walk(t + 1, p * step * sensors[t][s][observed[t]]);
      }
    };
    walk(0, Rational(1));
    Rational total = 0;
    for (const auto& x : w) total += x;
    for (auto& x : w) x /= total;
    out.push_back(std::move(w));
  }
  return out;
}

struct TextbookStep {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Predict / gain / update, written out the way most filtering references do.
inline std::vector<TextbookStep> textbook_kalman(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q,
                                                 const Eigen::MatrixXd& h, const Eigen::MatrixXd& r,
                                                 Eigen::VectorXd x, Eigen::MatrixXd p,
                                                 const std::vector<Eigen::VectorXd>& ys) {
  std::vector<TextbookStep> out;
  const auto n = x.size();
  for (const auto& y : ys) {
    x = a * x;
    p = a * p * a.transpose() + q;
    const Eigen::MatrixXd s = h * p * h.transpose() + r;
    const Eigen::MatrixXd k = p * h.transpose() * s.inverse();
    x = x + k * (y - h * x);
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(n, n) - k * h;
    p = ikh * p * ikh.transpose() + k * r * k.transpose();  // Joseph form
    out.push_back({x, p});
  }
  return out;
}

/// Mean and variance of x2 | x1 = a for a bivariate normal by trapezoidal
/// quadrature of the joint density along x2.
inline std::pair<double, double> grid_conditional_2d(const Eigen::Vector2d& mu, const Eigen::Matrix2d& cov,
                                                     double a, int points = 4001) {
  const Eigen::Matrix2d prec = cov.inverse();
  const double sd = std::sqrt(cov(1, 1));
  const double lo = mu[1] - 10.0 * sd;
  const double hi = mu[1] + 10.0 * sd;
  const double step = (hi - lo) / (points - 1);
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x2 = lo + step * i;
    const Eigen::Vector2d d(a - mu[0], x2 - mu[1]);
    const double dens = std::exp(-0.5 * d.dot(prec * d));
    const double wt = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    z += wt * dens;
    m1 += wt * dens * x2;
    m2 += wt * dens * x2 * x2;
  }
  const double mean = m1 / z;
  return {mean, m2 / z - mean * mean};
}

}  // namespace kernelcat::testing
