#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "bridgelab/quadrature.hpp"

namespace oracle {

using std::numbers::pi;

double bessel_i(double nu, double z) { return std::cyl_bessel_i(nu, z); }

double bessel_i_scaled_half_integer(double nu, double z) {
  const double c = std::sqrt(1.0 / (2.0 * pi * z));
  // e^{-z} sinh z and e^{-z} cosh z
  const double sh = c * (1.0 - std::exp(-2.0 * z));
  const double ch = c * (1.0 + std::exp(-2.0 * z));
  if (nu == -0.5) return ch;
  if (nu == 0.5) return sh;
  if (nu == 1.5) return ch - sh / z;
  if (nu == 2.5) return (1.0 + 3.0 / (z * z)) * sh - 3.0 / z * ch;
  throw std::invalid_argument("unsupported half-integer order");
}

Matrix matrix_exp(const Matrix& a, double t) {
  const Matrix ta = t * a;
  return ta.exp();
}

Matrix gramian_quadrature(const Matrix& a, const Matrix& sigma, double t) {
  const Matrix q = sigma * sigma.transpose();
  const auto n = a.rows();
  Matrix v(n, n);
  bridgelab::QuadratureConfig quad;
  quad.abs_tol = 1e-14;
  quad.rel_tol = 1e-12;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      auto f = [&](double u) {
        const Matrix e = matrix_exp(a, u);
        return (e * q * e.transpose())(i, j);
      };
      v(i, j) = v(j, i) = bridgelab::integrate(f, 0.0, t, quad).value;
    }
  }
  return v;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double ball_limit_bridge_density(const bridgelab::BridgeSpec& spec, double s, double t,
                                 const std::vector<double>& x,
                                 const std::vector<double>& y, double eps, int n,
                                 std::uint64_t seed) {
  const auto d = spec.end.size();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const auto late = spec.base.at(spec.horizon - t);
  const auto early = spec.base.at(spec.horizon - s);
  double num = 0.0;
  double den = 0.0;
  std::vector<double> z(d);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (auto& c : z) {
      c = normal(gen);
      norm2 += c * c;
    }
    const double r = eps * std::pow(unif(gen), 1.0 / static_cast<double>(d)) / std::sqrt(norm2);
    for (std::size_t k = 0; k < d; ++k) z[k] = spec.end[k] + r * z[k];
    num += late.density(y, z);
    den += early.density(x, z);
  }
  return spec.base.at(t - s).density(x, y) * num / den;
}

double radial_epsilon_limit(const bridgelab::ProcessModel& base, double horizon, double s,
                            double t, double x, double y, double h) {
  const auto late = base.at(horizon - t);
  const auto early = base.at(horizon - s);
  auto ratio = [&](double eps) {
    return std::exp(late.log_density(y, eps) - early.log_density(x, eps));
  };
  const double r0 = ratio(h);
  const double r1 = ratio(h / 2);
  const double r2 = ratio(h / 4);
  const double a0 = (4.0 * r1 - r0) / 3.0;
  const double a1 = (4.0 * r2 - r1) / 3.0;
  return base.at(t - s).density(x, y) * (16.0 * a1 - a0) / 15.0;
}

double brownian_bridge_density(double horizon, double s, double t, double x, double y,
                               double b) {
  const double mean = x + (t - s) / (horizon - s) * (b - x);
  const double var = (t - s) * (horizon - t) / (horizon - s);
  return std::exp(-(y - mean) * (y - mean) / (2.0 * var)) / std::sqrt(2.0 * pi * var);
}

double noncentral_chi_cdf(int d, double m, double k, double r) {
  // ||N||^2 / k is noncentral chi-square with d degrees of freedom and
  // noncentrality lambda = m^2/k: a Poisson(lambda/2) mixture of central ones.
  const double lambda = m * m / k;
  const double q = r * r / k;
  double total = 0.0;
  const double half = lambda / 2.0;
  for (int j = 0; j < 2000; ++j) {
    const double logw = -half + (j > 0 ? j * std::log(half) : 0.0) - std::lgamma(j + 1.0);
    const double a = d / 2.0 + j;
    // Regularized lower incomplete gamma P(a, q/2) by its series.
    const double x = q / 2.0;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    const double p = std::exp(a * std::log(x) - x - std::lgamma(a)) * sum;
    const double w = std::exp(logw);
    total += w * p;
    if (j > half && w < 1e-18) break;
  }
  return total;
}

}  // namespace oracle
