#include "bridgelab/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bridgelab/errors.hpp"

namespace bridgelab {

namespace {

constexpr double kSeriesCutoff = 1e-17;
constexpr double kRescale = 1e280;
const double kLogRescale = std::log(kRescale);

void require_nonnegative(double z) {
  if (!(z >= 0.0)) {
    throw DomainError("modified Bessel function: argument must be >= 0, got " +
                      std::to_string(z));
  }
}

// log of sum_{m>=0} (z^2/4)^m Gamma(nu+1) / (m! Gamma(nu+m+1)), i.e. the
// series with its leading factor (z/2)^nu / Gamma(nu+1) removed.
double log_series_sum(double nu, double z) {
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int m = 1; m < 100000; ++m) {
    const double ratio = q / (static_cast<double>(m) * (nu + m));
    term *= ratio;
    sum += term;
    if (sum > kRescale) {
      sum /= kRescale;
      term /= kRescale;
      log_scale += kLogRescale;
    }
    if (ratio < 1.0 && term < kSeriesCutoff * sum) break;
  }
  return std::log(sum) + log_scale;
}

// Large-argument expansion of e^{-z} I_nu(z), truncated at the smallest term.
double asymptotic_scaled(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double sum = 1.0;
  double term = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    if (next == 0.0) break;
    if (std::abs(next) >= previous) break;
    sum += next;
    previous = std::abs(next);
    term = next;
    if (std::abs(next) < kSeriesCutoff * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace

BesselOrder::BesselOrder(double nu) : nu_(nu) {
  if (!(nu >= -0.5) || !std::isfinite(nu)) {
    throw DomainError("Bessel order must be finite and >= -1/2, got " +
                      std::to_string(nu));
  }
}

BesselOrder BesselOrder::from_dimension(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  return BesselOrder(0.5 * d - 1.0);
}

double gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("gamma: argument must be positive, got " +
                      std::to_string(x));
  }
  return std::tgamma(x);
}

double bessel_crossover(BesselOrder nu) {
  const double v = nu.value();
  return std::max(20.0, 2.0 * v * v);
}

namespace detail {

double bessel_i_scaled_series(BesselOrder nu, double z) {
  require_nonnegative(z);
  const double v = nu.value();
  if (z == 0.0) {
    if (v == 0.0) return 1.0;
    return v > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(v * std::log(0.5 * z) - std::lgamma(v + 1.0) +
                  log_series_sum(v, z) - z);
}

double bessel_i_scaled_asymptotic(BesselOrder nu, double z) {
  if (!(z > 0.0)) throw DomainError("asymptotic expansion needs z > 0");
  return asymptotic_scaled(nu.value(), z);
}

}  // namespace detail

double bessel_i_scaled(BesselOrder nu, double z) {
  require_nonnegative(z);
  if (z >= bessel_crossover(nu)) return asymptotic_scaled(nu.value(), z);
  return detail::bessel_i_scaled_series(nu, z);
}

double log_bessel_i(BesselOrder nu, double z) {
  require_nonnegative(z);
  const double v = nu.value();
  if (z == 0.0) {
    if (v == 0.0) return 0.0;
    return v > 0.0 ? -std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::infinity();
  }
  if (z >= bessel_crossover(nu)) return std::log(asymptotic_scaled(v, z)) + z;
  return v * std::log(0.5 * z) - std::lgamma(v + 1.0) + log_series_sum(v, z);
}

double bessel_i(BesselOrder nu, double z) { return std::exp(log_bessel_i(nu, z)); }

double log_bessel_i_normalized(BesselOrder nu, double z) {
  require_nonnegative(z);
  const double v = nu.value();
  if (z >= bessel_crossover(nu)) {
    return std::log(asymptotic_scaled(v, z)) - v * std::log(z);
  }
  return -v * std::numbers::ln2 - std::lgamma(v + 1.0) + log_series_sum(v, z) - z;
}

double double_factorial(int k) {
  if (k < -1) throw DomainError("double_factorial: k must be >= -1");
  double out = 1.0;
  for (int j = k; j > 1; j -= 2) out *= j;
  return out;
}

double sine_power_integral(int k) {
  if (k < 0) throw DomainError("sine_power_integral: k must be >= 0");
  if (k == 0) return std::numbers::pi;
  // (k-1)!!/k!! as a running product to stay clear of overflow.
  double ratio = 1.0;
  if (k % 2 == 0) {
    for (int i = 1; i <= k / 2; ++i) ratio *= (2.0 * i - 1.0) / (2.0 * i);
    return std::numbers::pi * ratio;
  }
  for (int i = 1; i <= k / 2; ++i) ratio *= (2.0 * i) / (2.0 * i + 1.0);
  return 2.0 * ratio;
}

Gr8431Result gr8431_check(BesselOrder nu, double c, const QuadratureConfig& quad) {
  if (!(c > 0.0)) throw DomainError("gr8431_check: c must be positive");
  const double v = nu.value();
  if (v < 0.0) throw DomainError("gr8431_check: needs d >= 2 (nu >= 0)");
  const double power = 2.0 * v;
  auto integrand = [=](double theta) {
    const double s = std::sin(theta);
    const double weight = power == 0.0 ? 1.0 : std::pow(s, power);
    return weight * std::exp(c * (std::cos(theta) - 1.0));
  };
  // The integrand concentrates at theta = 0 with width ~ 1/sqrt(c).
  const double w = 1.0 / std::sqrt(c);
  const double breaks[] = {0.5 * w, w, 2.0 * w, 4.0 * w, 8.0 * w};

  Gr8431Result out;
  out.rhs = std::tgamma(v + 0.5) * std::sqrt(std::numbers::pi) *
            std::pow(0.5 * c, -v) * bessel_i_scaled(nu, c);
  try {
    const QuadratureResult r =
        integrate(integrand, 0.0, std::numbers::pi, quad, breaks);
    out.lhs = r.value;
    out.error_estimate = r.error_estimate;
  } catch (const QuadratureError& e) {
    out.lhs = e.partial().value;
    out.error_estimate = e.partial().error_estimate;
    out.converged = false;
  }
  out.residual = std::abs(out.lhs - out.rhs) / out.rhs;
  return out;
}

}  // namespace bridgelab
