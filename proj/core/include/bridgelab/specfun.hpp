#pragma once

#include "bridgelab/quadrature.hpp"

namespace bridgelab {

/// Order of the modified Bessel function attached to a radial process in
/// dimension d: nu = d/2 - 1. Orders below -1/2 are rejected.
class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  static BesselOrder from_dimension(int d);

  double value() const noexcept { return nu_; }

 private:
  double nu_;
};

/// Gamma function for x > 0; DomainError otherwise.
double gamma(double x);

/// Modified Bessel function of the first kind I_nu(z), z >= 0.
///
/// Below the crossover z* = max(20, 2 nu^2) the power series is summed until
/// the term drops under 1e-17 of the partial sum; above it the large-argument
/// expansion of e^{-z} I_nu(z) is used. Overflows to +inf for very large z;
/// use the scaled or log variants in density code.
double bessel_i(BesselOrder nu, double z);

/// e^{-z} I_nu(z).
double bessel_i_scaled(BesselOrder nu, double z);

/// log I_nu(z); -inf at z = 0 for nu > 0.
double log_bessel_i(BesselOrder nu, double z);

/// log(e^{-z} z^{-nu} I_nu(z)), finite on [0, inf) for every order. At z = 0
/// it equals -log(2^nu Gamma(nu + 1)), the small-argument limit.
double log_bessel_i_normalized(BesselOrder nu, double z);

/// Crossover between the series and the asymptotic regime.
double bessel_crossover(BesselOrder nu);

namespace detail {
// Both regimes evaluated unconditionally, for continuity checks at z*.
double bessel_i_scaled_series(BesselOrder nu, double z);
double bessel_i_scaled_asymptotic(BesselOrder nu, double z);
}  // namespace detail

/// k!! with the convention 0!! = (-1)!! = 1.
double double_factorial(int k);

/// Integral of sin^k over [0, pi], i.e. c_k (k-1)!!/k!! with c_k = pi for even
/// k and 2 for odd k. k = 0 gives pi.
double sine_power_integral(int k);

struct Gr8431Result {
  double residual = 0.0;
  double lhs = 0.0;  // both sides scaled by e^{-c}
  double rhs = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Checks the angular integral behind the radial densities,
///   int_0^pi sin^{2 nu} t e^{c cos t} dt = Gamma(nu+1/2) Gamma(1/2) (c/2)^{-nu} I_nu(c),
/// by adaptive quadrature of the left side. Non-convergence is reported in
/// the result rather than thrown.
Gr8431Result gr8431_check(BesselOrder nu, double c, const QuadratureConfig& quad);

}  // namespace bridgelab
