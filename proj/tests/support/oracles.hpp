#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/linalg.hpp"
#include "bridgelab/models.hpp"

namespace oracle {

using bridgelab::linalg::Matrix;

// libstdc++ special functions.
double bessel_i(double nu, double z);

// e^{-z} I_nu(z) for nu in {-1/2, 1/2, 3/2, 5/2} from the elementary closed forms.
double bessel_i_scaled_half_integer(double nu, double z);

// Eigen's MatrixFunctions module.
Matrix matrix_exp(const Matrix& a, double t);

// V_t entry by entry with the adaptive quadrature, e^{vA} from matrix_exp above.
Matrix gramian_quadrature(const Matrix& a, const Matrix& sigma, double t);

// Composite Simpson with n (even) panels.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n);

// p_{t-s}(x, y) m_{T-t}(y) / m_{T-s}(x), m_u(w) the mass of p_u(w, .) on the ball
// of radius eps around b, both masses estimated with the same n uniform points.
double ball_limit_bridge_density(const bridgelab::BridgeSpec& spec, double s, double t,
                                 const std::vector<double>& x,
                                 const std::vector<double>& y, double eps, int n,
                                 std::uint64_t seed);

// p_{t-s}(x, y) p_{T-t}(y, eps) / p_{T-s}(x, eps) at eps = h, h/2, h/4, combined
// by two Richardson steps (the ratio is even in eps up to O(eps^2) corrections).
double radial_epsilon_limit(const bridgelab::ProcessModel& base, double horizon, double s,
                            double t, double x, double y, double h = 1.0 / 64);

// Brownian bridge marginal from the textbook mean/variance formula, d = 1.
double brownian_bridge_density(double horizon, double s, double t, double x, double y,
                               double b);

// P(||N(m e_1, k I_d)|| <= r) through the noncentral chi-square series.
double noncentral_chi_cdf(int d, double m, double k, double r);

}  // namespace oracle
