#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgelab {

/// Tolerances and limits shared by every numerical integral in the library.
///
/// `truncation_radius` is measured in standard deviations of the dominating
/// Gaussian factor of the integrand; callers translate it into an absolute
/// radius using their own scale.
struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
  double truncation_radius = 12.0;

  void validate() const;
  QuadratureConfig tightened(double factor) const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
  bool converged = true;
  // Magnitude of the last half-line extension piece (zero on finite intervals).
  double tail_estimate = 0.0;
};

// Thrown when adaptive subdivision is exhausted; carries the partial result.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadratureResult partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadratureResult& partial() const noexcept { return partial_; }

 private:
  QuadratureResult partial_;
};

using ScalarFunction = std::function<double(double)>;

/// Globally adaptive 10/21-point Gauss-Kronrod integration over [lo, hi].
///
/// `breakpoints` (any order, values outside the interval are ignored) seed the
/// initial partition so narrow peaks are not missed. Throws QuadratureError
/// when `max_subdivisions` is exhausted before the error estimate meets
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const ScalarFunction& f, double lo, double hi,
                           const QuadratureConfig& quad,
                           std::span<const double> breakpoints = {});

/// Integral over [0, inf).
///
/// The bulk [0, R] with R = center + truncation_radius * width is integrated
/// adaptively with breakpoints around `center`; the tail is then covered by
/// doubling pieces [R, 2R], [2R, 4R], ... until a piece falls below the
/// tolerance. That last piece is reported as `tail_estimate`.
QuadratureResult integrate_halfline(const ScalarFunction& f,
                                    const QuadratureConfig& quad,
                                    double center = 0.0, double width = 1.0);

/// One coordinate of a tensor-product integration window.
struct WindowAxis {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breakpoints;
};

using VectorFunction = std::function<double(std::span<const double>)>;

/// Nested adaptive integration over a box, one WindowAxis per coordinate.
/// Inner integrals run at a tenth of the outer relative tolerance.
QuadratureResult integrate_box(const VectorFunction& f,
                               std::span<const WindowAxis> axes,
                               const QuadratureConfig& quad);

// Fixed 15-point Gauss-Kronrod rule without error control, for the many tiny
// panels of CDF tables.
double gauss_kronrod15(const ScalarFunction& f, double lo, double hi);

}  // namespace bridgelab
