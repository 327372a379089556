#include "bridgelab/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bridgelab/errors.hpp"

namespace bridgelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1, got " + std::to_string(d));
}

void require_scalar_params(double a, double sigma) {
  if (!std::isfinite(a)) throw DomainError("drift a must be finite");
  if (!std::isfinite(sigma) || sigma == 0.0) {
    throw DomainError("noise level sigma must be finite and nonzero");
  }
}

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("time must be positive and finite, got " + std::to_string(t));
  }
}

double iso_log_density(int d, double growth, double variance, State x, State y) {
  double sq = 0.0;
  for (int i = 0; i < d; ++i) {
    const double r = y[i] - growth * x[i];
    sq += r * r;
  }
  return -0.5 * d * std::log(2.0 * std::numbers::pi * variance) - sq / (2.0 * variance);
}

}  // namespace

double kappa(double a, double t) {
  require_time(t);
  if (!std::isfinite(a)) throw DomainError("kappa: a must be finite");
  const double at = a * t;
  if (std::abs(at) < 1e-6) {
    return t * (1.0 + at + (2.0 / 3.0) * at * at + at * at * at / 3.0);
  }
  return std::expm1(2.0 * at) / (2.0 * a);
}

ProcessModel ProcessModel::wiener(int d) {
  require_dim(d);
  return ProcessModel(Wiener{d});
}

ProcessModel ProcessModel::bessel(int d) {
  require_dim(d);
  return ProcessModel(Bessel{d});
}

ProcessModel ProcessModel::ou_scalar(double a, double sigma, int d) {
  require_dim(d);
  require_scalar_params(a, sigma);
  return ProcessModel(OuScalar{a, sigma, d});
}

ProcessModel ProcessModel::ou_radial(double a, double sigma, int d) {
  require_dim(d);
  require_scalar_params(a, sigma);
  return ProcessModel(OuRadial{a, sigma, d});
}

ProcessModel ProcessModel::ou_matrix(linalg::Matrix drift, linalg::Matrix diffusion) {
  const linalg::Matrix q = linalg::diffusion_covariance(drift, diffusion);
  Eigen::LLT<linalg::Matrix> llt(q);
  if (llt.info() != Eigen::Success) {
    throw DomainError("OU matrix model: Sigma Sigma^T must be positive definite");
  }
  return ProcessModel(OuMatrix{std::move(drift), std::move(diffusion)});
}

StateSpace ProcessModel::state_space() const noexcept {
  if (std::holds_alternative<Bessel>(kind_) || std::holds_alternative<OuRadial>(kind_)) {
    return StateSpace::HalfLine;
  }
  return StateSpace::Euclidean;
}

int ProcessModel::dim() const noexcept {
  return std::visit(
      Overloaded{[](const OuMatrix& m) { return static_cast<int>(m.drift.rows()); },
                 [](const auto& m) { return m.dim; }},
      kind_);
}

std::string ProcessModel::name() const {
  return std::visit(Overloaded{[](const Wiener&) { return std::string("wiener"); },
                               [](const Bessel&) { return std::string("bessel"); },
                               [](const OuScalar&) { return std::string("ou-scalar"); },
                               [](const OuRadial&) { return std::string("ou-radial"); },
                               [](const OuMatrix&) { return std::string("ou-matrix"); }},
                    kind_);
}

double ProcessModel::scalar_drift() const {
  return std::visit(
      Overloaded{[](const OuScalar& m) { return m.a; },
                 [](const OuRadial& m) { return m.a; },
                 [](const OuMatrix&) -> double {
                   throw DomainError("OU matrix model has no scalar drift");
                 },
                 [](const auto&) { return 0.0; }},
      kind_);
}

double ProcessModel::scalar_sigma() const {
  return std::visit(
      Overloaded{[](const OuScalar& m) { return m.sigma; },
                 [](const OuRadial& m) { return m.sigma; },
                 [](const OuMatrix&) -> double {
                   throw DomainError("OU matrix model has no scalar sigma");
                 },
                 [](const auto&) { return 1.0; }},
      kind_);
}

linalg::Matrix ProcessModel::drift_matrix() const {
  if (is_radial()) throw DomainError("radial models have no drift matrix");
  if (const auto* m = std::get_if<OuMatrix>(&kind_)) return m->drift;
  const int d = dim();
  return scalar_drift() * linalg::Matrix::Identity(d, d);
}

linalg::Matrix ProcessModel::diffusion_matrix() const {
  if (is_radial()) throw DomainError("radial models have no diffusion matrix");
  if (const auto* m = std::get_if<OuMatrix>(&kind_)) return m->diffusion;
  const int d = dim();
  return scalar_sigma() * linalg::Matrix::Identity(d, d);
}

void ProcessModel::check_state(State x) const {
  if (static_cast<int>(x.size()) != state_dim()) {
    throw DomainError(name() + ": state has " + std::to_string(x.size()) +
                      " coordinates, expected " + std::to_string(state_dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(name() + ": state must be finite");
  }
  if (is_radial() && x[0] < 0.0) {
    throw DomainError(name() + ": radial state must be >= 0");
  }
}

Transition ProcessModel::at(double t) const {
  require_time(t);
  const StateSpace space = state_space();
  const int sdim = state_dim();
  return std::visit(
      Overloaded{
          [&](const Wiener& m) {
            return Transition(space, sdim, t, Transition::Iso{m.dim, 1.0, t});
          },
          [&](const OuScalar& m) {
            return Transition(space, sdim, t,
                              Transition::Iso{m.dim, std::exp(m.a * t),
                                              m.sigma * m.sigma * kappa(m.a, t)});
          },
          [&](const Bessel& m) {
            return Transition(space, sdim, t,
                              Transition::Radial{BesselOrder::from_dimension(m.dim),
                                                 1.0, t});
          },
          [&](const OuRadial& m) {
            return Transition(space, sdim, t,
                              Transition::Radial{BesselOrder::from_dimension(m.dim),
                                                 std::exp(m.a * t),
                                                 m.sigma * m.sigma * kappa(m.a, t)});
          },
          [&](const OuMatrix& m) {
            return Transition(space, sdim, t,
                              Transition::Full{linalg::matrix_exp(m.drift, t),
                                               linalg::gramian_vt(m.drift, m.diffusion, t)});
          }},
      kind_);
}

void Transition::check_state(State x) const {
  if (static_cast<int>(x.size()) != state_dim_) {
    throw DomainError("state has " + std::to_string(x.size()) +
                      " coordinates, expected " + std::to_string(state_dim_));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("state must be finite");
  }
  if (space_ == StateSpace::HalfLine && x[0] < 0.0) {
    throw DomainError("radial state must be >= 0");
  }
}

double Transition::log_density(State x, State y) const {
  check_state(x);
  check_state(y);
  return std::visit(
      Overloaded{
          [&](const Iso& k) { return iso_log_density(k.dim, k.growth, k.variance, x, y); },
          [&](const Radial& k) {
            return log_radial_kernel(k.nu, k.growth, k.variance, x[0], y[0]);
          },
          [&](const Full& k) {
            const Eigen::Map<const linalg::Vector> xv(x.data(), x.size());
            const Eigen::Map<const linalg::Vector> yv(y.data(), y.size());
            const linalg::Vector r = yv - k.flow * xv;
            const double d = static_cast<double>(x.size());
            return -0.5 * d * std::log(2.0 * std::numbers::pi) -
                   0.5 * k.covariance.log_det() - 0.5 * k.covariance.quadratic_form(r);
          }},
      rep_);
}

double Transition::density(State x, State y) const { return std::exp(log_density(x, y)); }

double Transition::log_density(double x, double y) const {
  return log_density(State(&x, 1), State(&y, 1));
}

double Transition::density(double x, double y) const {
  return std::exp(log_density(x, y));
}

double Transition::growth() const {
  return std::visit(Overloaded{[](const Iso& k) { return k.growth; },
                               [](const Radial& k) { return k.growth; },
                               [](const Full&) -> double {
                                 throw DomainError("full Gaussian kernel has no scalar growth");
                               }},
                    rep_);
}

double Transition::variance() const {
  return std::visit(Overloaded{[](const Iso& k) { return k.variance; },
                               [](const Radial& k) { return k.variance; },
                               [](const Full&) -> double {
                                 throw DomainError("full Gaussian kernel has no scalar variance");
                               }},
                    rep_);
}

double log_radial_kernel(BesselOrder nu, double growth, double variance, double x,
                         double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw DomainError("radial kernel: states must be >= 0");
  }
  const double v = nu.value();
  const double k = variance;
  const double xs = growth * x;
  const double power = 2.0 * v + 1.0;  // d - 1
  // log(2^{-nu} / Gamma(nu + 1)): the z -> 0 limit of z^{-nu} I_nu(z).
  const double small_z = -v * std::numbers::ln2 - std::lgamma(v + 1.0);
  if (y == 0.0) {
    if (power > 0.0) return kNegInf;
    return -0.5 * std::log(k) - xs * xs / (2.0 * k) + small_z;
  }
  if (x == 0.0) {
    return power * std::log(y) - (v + 1.0) * std::log(k) - y * y / (2.0 * k) + small_z;
  }
  // y^{nu+1}/(k x'^nu) e^{-(x'^2+y^2)/2k} I_nu(x'y/k), regrouped as
  // y^{2nu+1} k^{-nu-1} e^{-(x'-y)^2/2k} [e^{-z} z^{-nu} I_nu(z)].
  const double z = xs * y / k;
  const double diff = xs - y;
  return power * std::log(y) - (v + 1.0) * std::log(k) - diff * diff / (2.0 * k) +
         log_bessel_i_normalized(nu, z);
}

double density(const ProcessModel& model, double t, State x, State y) {
  return model.at(t).density(x, y);
}

double density(const ProcessModel& model, double t, double x, double y) {
  return model.at(t).density(x, y);
}

double density_tilde(const ProcessModel& model, double t, State x, State y) {
  if (model.is_radial()) {
    throw DomainError("density_tilde is defined for the Gaussian models only");
  }
  require_time(t);
  model.check_state(x);
  model.check_state(y);
  const linalg::Matrix a = model.drift_matrix();
  const linalg::Matrix sigma = model.diffusion_matrix();
  const linalg::Gramian vt = linalg::gramian_vt(a, sigma, t);
  const linalg::Gramian vt_tilde = linalg::gramian_vt_tilde(a, sigma, t);
  const linalg::Matrix back = linalg::matrix_exp(a, -t);
  const Eigen::Map<const linalg::Vector> xv(x.data(), x.size());
  const Eigen::Map<const linalg::Vector> yv(y.data(), y.size());
  const linalg::Vector r = xv - back * yv;
  const double d = static_cast<double>(x.size());
  return std::exp(-0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * vt.log_det() -
                  0.5 * vt_tilde.quadratic_form(r));
}

double radial_cdf(const ProcessModel& model, double t, double x, double b,
                  const QuadratureConfig& quad) {
  if (!model.is_radial()) throw DomainError("radial_cdf needs a radial model");
  if (!(b >= 0.0)) throw DomainError("radial_cdf: b must be >= 0");
  const Transition kernel = model.at(t);
  const double center = kernel.growth() * x;
  const double width = std::sqrt(kernel.variance());
  auto f = [&](double r) { return kernel.density(x, r); };
  if (std::isinf(b)) return integrate_halfline(f, quad, center, width).value;
  std::vector<double> breaks;
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    breaks.push_back(center + k * width);
  }
  return integrate(f, 0.0, b, quad, breaks).value;
}

RadialOracleResult radial_oracle(int d, double a, double sigma, double t, double x,
                                 double b, const QuadratureConfig& quad) {
  if (d < 2) throw DomainError("radial_oracle needs d >= 2");
  require_scalar_params(a, sigma);
  require_time(t);
  if (!(x >= 0.0) || !(b >= 0.0)) throw DomainError("radial_oracle: x, b must be >= 0");

  const double k = sigma * sigma * kappa(a, t);
  const double xs = std::exp(a * t) * x;
  const double sd = std::sqrt(k);
  // Angular mass that does not involve theta_1.
  double angular = 2.0;
  if (d >= 3) {
    angular = 2.0 * std::numbers::pi;
    for (int j = 2; j <= d - 2; ++j) angular *= sine_power_integral(d - j - 1);
  }
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi * k);
  const double reach = xs + (quad.truncation_radius + std::sqrt(double(d))) * sd;
  const double upper = std::min(b, reach);

  auto integrand = [&](std::span<const double> p) {
    const double r = p[0];
    const double theta = p[1];
    if (r == 0.0 && d > 1) return 0.0;
    // ||y - x' e_d||^2 with y in polar form around e_d.
    const double dist2 = xs * xs + r * r - 2.0 * r * xs * std::cos(theta);
    const double sin_weight = d == 2 ? 1.0 : std::pow(std::sin(theta), d - 2);
    return angular * sin_weight *
           std::exp((d - 1) * std::log(r) + log_norm - dist2 / (2.0 * k));
  };

  std::vector<WindowAxis> axes(2);
  axes[0].lo = 0.0;
  axes[0].hi = upper;
  for (double m : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
    axes[0].breakpoints.push_back(xs + m * sd);
  }
  axes[1].lo = 0.0;
  axes[1].hi = std::numbers::pi;
  for (double f : {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2}) {
    axes[1].breakpoints.push_back(f * std::numbers::pi);
  }
  const QuadratureResult r = integrate_box(integrand, axes, quad);
  return {r.value, r.error_estimate};
}

}  // namespace bridgelab
