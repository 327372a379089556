#pragma once

#include <functional>
#include <vector>

#include "bridgelab/models.hpp"

namespace bridgelab {

/// Base process conditioned to start at `start` at time 0 and end at `end`
/// at time `horizon`.
struct BridgeSpec {
  ProcessModel base;
  std::vector<double> start;
  std::vector<double> end;
  double horizon = 1.0;

  /// Bridge from 0 to 0 over [0, T].
  static BridgeSpec zero_endpoints(ProcessModel base, double horizon);

  void validate() const;
  bool ends_at_zero() const;
};

enum class Construction {
  // p_{t-s}(x,y) p_{T-t}(y,b) / p_{T-s}(x,b)
  Ratio,
  // Shrinking balls around b; evaluated only through a test oracle.
  BallLimit,
  // One-sided epsilon -> 0 limit on [0, inf) with b = 0, taken analytically.
  RadialLimit,
  // The explicit bridge kernels (Wiener, OU, OU matrix, radial), b = 0.
  ClosedForm,
};

const char* to_string(Construction c);

/// Bridge kernel p_{s,t}(x, .) frozen at a pair of times 0 <= s < t < T.
class BridgeStep {
 public:
  using LogKernel = std::function<double(State, State)>;
  BridgeStep(double s, double t, LogKernel kernel)
      : s_(s), t_(t), kernel_(std::move(kernel)) {}

  double s() const noexcept { return s_; }
  double t() const noexcept { return t_; }
  double log_density(State x, State y) const { return kernel_(x, y); }
  double density(State x, State y) const;
  double density(double x, double y) const;

 private:
  double s_;
  double t_;
  LogKernel kernel_;
};

/// A bridge spec together with the construction used to evaluate it.
class BridgeDensity {
 public:
  /// Throws InapplicableConstruction when `construction` cannot be used for
  /// `spec` (BallLimit always; RadialLimit off the half-line or with b != 0;
  /// ClosedForm with b != 0).
  BridgeDensity(BridgeSpec spec, Construction construction);

  const BridgeSpec& spec() const noexcept { return spec_; }
  Construction construction() const noexcept { return construction_; }

  BridgeStep at(double s, double t) const;
  double density(double s, double t, State x, State y) const;
  double density(double s, double t, double x, double y) const;

 private:
  BridgeSpec spec_;
  Construction construction_;
};

/// Ratio construction. InapplicableConstruction when p_{T-s}(x, b) = 0 (the
/// radial kernels with b = 0 and d >= 2): use the radial limit instead.
double bridge_density_ratio(const BridgeSpec& spec, double s, double t, State x,
                            State y);

/// p_{t-s}(x,y) lim_{eps->0} p_{T-t}(y,eps)/p_{T-s}(x,eps) for Bessel and
/// OuRadial bases with b = 0. The limit is evaluated in closed form from the
/// small-argument behaviour z^{-nu} I_nu(z) -> 2^{-nu}/Gamma(nu+1).
double bridge_density_radial_limit(const BridgeSpec& spec, double s, double t,
                                   double x, double y);

/// Explicit Wiener bridge kernel with endpoints zero.
double wiener_bridge_density(int d, double horizon, double s, double t, State x,
                             State y);

/// Explicit bridge kernel of the isotropic OU process (a, sigma) with
/// endpoints zero, written with kappa.
double ou_scalar_bridge_density(double a, double sigma, int d, double horizon,
                                double s, double t, State x, State y);

/// Explicit bridge kernel of the general OU process with endpoints zero,
/// written with V~_{t-s}, V~_{T-t}, V~_{T-s}.
double ou_bridge_density(const linalg::Matrix& drift, const linalg::Matrix& diffusion,
                         double horizon, double s, double t, State x, State y);

/// Transition density of the norm of the zero-endpoint OU bridge (a, sigma)
/// in dimension d, including the x = 0 row and the y = 0 limits.
double radial_bridge_density(double a, double sigma, int d, double horizon, double s,
                             double t, double x, double y);

/// Throws DomainError unless 0 <= s < t < horizon.
void check_bridge_times(double horizon, double s, double t);

}  // namespace bridgelab
