#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bridgelab/linalg.hpp"
#include "bridgelab/quadrature.hpp"
#include "bridgelab/specfun.hpp"

namespace bridgelab {

using State = std::span<const double>;

enum class StateSpace { Euclidean, HalfLine };

/// Standard d-dimensional Wiener process.
struct Wiener {
  int dim = 1;
};
/// Euclidean norm of a d-dimensional Wiener process.
struct Bessel {
  int dim = 1;
};
/// dZ = a Z dt + sigma dW in R^d.
struct OuScalar {
  double a = 0.0;
  double sigma = 1.0;
  int dim = 1;
};
/// Euclidean norm of OuScalar.
struct OuRadial {
  double a = 0.0;
  double sigma = 1.0;
  int dim = 1;
};
/// dZ = A Z dt + Sigma dW with Sigma Sigma^T positive definite.
struct OuMatrix {
  linalg::Matrix drift;
  linalg::Matrix diffusion;
};

/// kappa(a, t) = (e^{2at} - 1)/(2a), continuous at a = 0 where it equals t.
double kappa(double a, double t);

class Transition;

/// One of the five base processes. Immutable once built; every factory
/// validates its parameters.
class ProcessModel {
 public:
  using Kind = std::variant<Wiener, Bessel, OuScalar, OuRadial, OuMatrix>;

  static ProcessModel wiener(int d);
  static ProcessModel bessel(int d);
  static ProcessModel ou_scalar(double a, double sigma, int d);
  static ProcessModel ou_radial(double a, double sigma, int d);
  static ProcessModel ou_matrix(linalg::Matrix drift, linalg::Matrix diffusion);

  const Kind& kind() const noexcept { return kind_; }
  StateSpace state_space() const noexcept;
  bool is_radial() const noexcept { return state_space() == StateSpace::HalfLine; }
  // Dimension d of the underlying Euclidean process.
  int dim() const noexcept;
  // Length of a state vector: d for Euclidean models, 1 for radial ones.
  int state_dim() const noexcept { return is_radial() ? 1 : dim(); }
  std::string name() const;

  // Scalar drift and noise level of the isotropic families (Bessel and Wiener
  // report a = 0, sigma = 1). Throws for OuMatrix.
  double scalar_drift() const;
  double scalar_sigma() const;

  // A and Sigma of the Gaussian families (aI and sigma*I for the isotropic
  // ones). Throws for radial models.
  linalg::Matrix drift_matrix() const;
  linalg::Matrix diffusion_matrix() const;

  /// Kernel p_t frozen at time t > 0; precomputes e^{tA} and V_t for OuMatrix.
  Transition at(double t) const;

  /// Throws DomainError unless `x` belongs to the state space.
  void check_state(State x) const;

 private:
  explicit ProcessModel(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Transition density p_t(x, y) of a model at a fixed time, evaluated in
/// log-space throughout.
class Transition {
 public:
  double time() const noexcept { return t_; }
  StateSpace state_space() const noexcept { return space_; }
  int state_dim() const noexcept { return state_dim_; }

  double log_density(State x, State y) const;
  double density(State x, State y) const;
  double log_density(double x, double y) const;
  double density(double x, double y) const;

  // Mean growth factor and variance k of the isotropic and radial families:
  // p_t(x, .) is the law of (the norm of) N(growth * x, k I).
  double growth() const;
  double variance() const;

 private:
  friend class ProcessModel;
  struct Iso {
    int dim;
    double growth;
    double variance;
  };
  struct Radial {
    BesselOrder nu;
    double growth;
    double variance;
  };
  struct Full {
    linalg::Matrix flow;
    linalg::Gramian covariance;
  };
  Transition(StateSpace space, int state_dim, double t,
             std::variant<Iso, Radial, Full> rep)
      : space_(space), state_dim_(state_dim), t_(t), rep_(std::move(rep)) {}

  void check_state(State x) const;

  StateSpace space_;
  int state_dim_;
  double t_;
  std::variant<Iso, Radial, Full> rep_;
};

/// p_t(x, y) for any model. Radial kernels return 0 at y = 0 for d >= 2 and
/// sqrt(2/(pi k)) exp(-(e^{at} x)^2 / (2k)) for d = 1.
double density(const ProcessModel& model, double t, State x, State y);
double density(const ProcessModel& model, double t, double x, double y);

/// The same Gaussian kernel written through V~_t:
/// ((2pi)^d det V_t)^{-1/2} exp(-(x - e^{-tA} y)^T V~_t^{-1} (x - e^{-tA} y) / 2).
/// Defined for the Gaussian families only.
double density_tilde(const ProcessModel& model, double t, State x, State y);

/// log p for the radial family N(growth*x, variance*I) pushed through the norm
/// in dimension 2 nu + 2. Shared by the radial kernels and samplers.
double log_radial_kernel(BesselOrder nu, double growth, double variance, double x,
                         double y);

/// int_0^b p_t(x, r) dr for a radial model by adaptive quadrature of the
/// closed-form kernel; b may be +inf.
double radial_cdf(const ProcessModel& model, double t, double x, double b,
                  const QuadratureConfig& quad);

struct RadialOracleResult {
  double probability = 0.0;
  double error_estimate = 0.0;
};

/// P(||Z_t|| < b | Z_0 = (0, ..., 0, x)) for the d-dimensional OU process
/// (a, sigma), d >= 2, by two-dimensional adaptive quadrature over the radius
/// and the polar angle; the remaining angular factors are sine-power
/// integrals. Independent of the Bessel-function code. b may be +inf.
RadialOracleResult radial_oracle(int d, double a, double sigma, double t, double x,
                                 double b, const QuadratureConfig& quad);

}  // namespace bridgelab
