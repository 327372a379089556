#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/models.hpp"
#include "bridgelab/quadrature.hpp"
#include "bridgelab/report.hpp"

namespace bridgelab {

/// Pairs (s, t) with s in {0, .1T, .5T, .9T} and t - s in {.05T, .2T, .99T - s},
/// dropping pairs with t >= T.
std::vector<std::pair<double, double>> stratified_times(double horizon);

/// OU matrix model with drift -(B B^T + I/2) + (C - C^T), which is stable, and
/// a lower triangular diffusion with diagonal in [0.5, 1.5]; B, C and the
/// diffusion entries are drawn from RandomStream(seed, d).
ProcessModel random_stable_ou_matrix(int d, std::uint64_t seed);

struct KcResult {
  double lhs = 0.0;  // p over the combined step
  double rhs = 0.0;  // integral of the product
  double residual = 0.0;
  double error_estimate = 0.0;
  bool monte_carlo = false;  // rhs is an importance-sampling mean (d > 3)
};

/// p_{s+t}(x, z) against int p_s(x, y) p_t(y, z) dy, with s, t durations.
/// Tensor-product quadrature for d <= 3, importance sampling beyond.
KcResult kc_check(const ProcessModel& model, double s, double t, State x, State z,
                  const QuadratureConfig& quad);

/// p_{s,u}(x, z) against int p_{s,t}(x, y) p_{t,u}(y, z) dy for 0 <= s < t < u < T.
KcResult kc_check(const BridgeDensity& bridge, double s, double t, double u, State x,
                  State z, const QuadratureConfig& quad);

struct NormalizationResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double residual = 0.0;  // |value - 1|
};

/// int p_{s,t}(x, y) dy.
NormalizationResult normalization_check(const BridgeDensity& bridge, double s, double t,
                                        State x, const QuadratureConfig& quad);
/// int p_t(x, y) dy.
NormalizationResult normalization_check(const ProcessModel& model, double t, State x,
                                        const QuadratureConfig& quad);

/// Relative residual of the Bessel product integral
///   int_0^inf y e^{-gamma y^2} I_nu(alpha y) I_nu(beta y) dy
///     = exp{(alpha^2 + beta^2)/(4 gamma)} I_nu(alpha beta / (2 gamma)) / (2 gamma),
/// integrating the left side divided by the right side in log-space.
double bessel_identity_check(double alpha, double beta, double gamma, BesselOrder nu,
                             const QuadratureConfig& quad);

struct CommutationGrid {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::pair<double, double>> times;
  // (x, y) in {0, 0.25, ..., 5}^2 with the stratified time pairs.
  static CommutationGrid standard(double horizon);
};

/// Closed-form radial bridge against the radial-limit bridge of the OU radial
/// base, relative differences where either side is >= 1e-300. With a = 0,
/// sigma = 1 the Bessel base is compared as well.
VerificationReport commutation_check(double a, double sigma, int d, double horizon,
                                     const CommutationGrid& grid,
                                     double tolerance = 1e-10);

/// KC residuals of a base model over a fixed set of durations and states.
VerificationReport kc_report(const ProcessModel& model, const QuadratureConfig& quad,
                             double tolerance);

/// KC residuals of a bridge over the stratified grid (t midway between s, u).
VerificationReport kc_report(const BridgeDensity& bridge, const QuadratureConfig& quad,
                             double tolerance);

/// Normalization of a bridge kernel over the stratified (s, t) grid and a
/// fixed set of starting states.
VerificationReport normalization_report(const BridgeDensity& bridge,
                                        const QuadratureConfig& quad,
                                        double tolerance = 1e-8);

/// The Bessel identity over nu x alpha x beta x gamma.
struct BesselIdentityGrid {
  std::vector<double> nu{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> alpha{0.1, 1.0, 10.0};
  std::vector<double> beta{0.1, 1.0, 10.0};
  std::vector<double> gamma{0.5, 1.0, 5.0};
};
VerificationReport bessel_identity_report(const BesselIdentityGrid& grid,
                                          const QuadratureConfig& quad,
                                          double tolerance = 1e-8);

/// Numerical certificate for the hypotheses the KC construction needs of p_t:
/// continuity by difference quotients at seeded random points, local
/// boundedness in x and in y on expanding grids, and finiteness of
/// int p_t(x, y) dx. For Wiener the grid supremum is compared with
/// (2 pi t)^{-d/2}; for the Gaussian models int p_t(x, z) dx with det e^{-tA}.
VerificationReport lemma_kc_hypotheses_check(const ProcessModel& model, double t,
                                             const QuadratureConfig& quad,
                                             double tolerance = 1e-6);

/// For a radial base with b = 0: the ratio p_{T-t}(y, eps)/p_{T-s}(x, eps)
/// along eps = 2^-k with three Richardson levels against the analytic limit,
/// the x = 0 row of the limit, and the supremum bound
///   (c2/c1) (k_{T-s}/k_{T-t})^{d/2} exp{x'^2/(2k_{T-s}) + k_{T-s}/(2x'^2)}
/// with c1, c2 the fitted inf/sup of I_nu(z)/g(z) over a dense grid.
VerificationReport lemma_bessel_bridge_hypotheses_check(const ProcessModel& model,
                                                        double horizon,
                                                        const QuadratureConfig& quad,
                                                        double tolerance = 1e-6);

struct BesselBoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
/// inf and sup of I_nu(z) / (z^nu 1{z<1} + z^{-1/2} e^z 1{z>=1}) over a
/// log-spaced grid on [1e-8, 1e8] and the two limits z -> 0, z -> inf.
BesselBoundConstants fit_bessel_bound_constants(BesselOrder nu);

}  // namespace bridgelab
