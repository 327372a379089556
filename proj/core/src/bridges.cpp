#include "bridgelab/bridges.hpp"

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

void check_vector(State x, int d, const char* what) {
  if (static_cast<int>(x.size()) != d) {
    throw DomainError(std::string(what) + ": state has " + std::to_string(x.size()) +
                      " coordinates, expected " + std::to_string(d));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": state must be finite");
  }
}

void check_radius(double r, const char* what) {
  if (!std::isfinite(r) || r < 0.0) {
    throw DomainError(std::string(what) + ": radial state must be finite and >= 0");
  }
}

double squared_norm(State x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

BridgeStep::LogKernel ratio_kernel(const BridgeSpec& spec, double s, double t) {
  const double horizon = spec.horizon;
  Transition first = spec.base.at(t - s);
  Transition second = spec.base.at(horizon - t);
  Transition whole = spec.base.at(horizon - s);
  return [first = std::move(first), second = std::move(second), whole = std::move(whole),
          end = spec.end](State x, State y) {
    const State b(end);
    const double denominator = whole.log_density(x, b);
    if (denominator == kNegInf) {
      throw InapplicableConstruction(
          "ratio construction: p_{T-s}(x, b) vanishes; use the radial limit");
    }
    return first.log_density(x, y) + second.log_density(y, b) - denominator;
  };
}

BridgeStep::LogKernel radial_limit_kernel(const BridgeSpec& spec, double s, double t) {
  const double horizon = spec.horizon;
  const double nu = BesselOrder::from_dimension(spec.base.dim()).value();
  Transition first = spec.base.at(t - s);
  const Transition second = spec.base.at(horizon - t);
  const Transition whole = spec.base.at(horizon - s);
  const double m2 = second.growth();
  const double k2 = second.variance();
  const double m3 = whole.growth();
  const double k3 = whole.variance();
  const double log_ratio = (nu + 1.0) * (std::log(k3) - std::log(k2));
  return [first = std::move(first), log_ratio, m2, k2, m3, k3](State x, State y) {
    const double base = first.log_density(x, y);
    if (base == kNegInf) return kNegInf;
    return base + log_ratio - m2 * m2 * y[0] * y[0] / (2.0 * k2) +
           m3 * m3 * x[0] * x[0] / (2.0 * k3);
  };
}

BridgeStep::LogKernel iso_bridge_kernel(double a, double sigma, int d, double horizon,
                                        double s, double t) {
  const double s2 = sigma * sigma;
  const double k1 = s2 * kappa(a, t - s);
  const double k2 = s2 * kappa(a, horizon - t);
  const double k3 = s2 * kappa(a, horizon - s);
  const double m1 = std::exp(a * (t - s));
  const double m2sq = std::exp(2.0 * a * (horizon - t));
  const double m3sq = std::exp(2.0 * a * (horizon - s));
  const double log_norm = 0.5 * d * (std::log(k3) - std::log(2.0 * std::numbers::pi * k1 * k2));
  return [=](State x, State y) {
    check_vector(x, d, "bridge kernel");
    check_vector(y, d, "bridge kernel");
    double sq = 0.0;
    for (int i = 0; i < d; ++i) {
      const double r = y[i] - m1 * x[i];
      sq += r * r;
    }
    return log_norm - sq / (2.0 * k1) - m2sq * squared_norm(y) / (2.0 * k2) +
           m3sq * squared_norm(x) / (2.0 * k3);
  };
}

BridgeStep::LogKernel wiener_bridge_kernel(int d, double horizon, double s, double t) {
  const double log_norm = 0.5 * d *
                          std::log((horizon - s) / (2.0 * std::numbers::pi * (t - s) *
                                                    (horizon - t)));
  return [=](State x, State y) {
    check_vector(x, d, "Wiener bridge");
    check_vector(y, d, "Wiener bridge");
    double sq = 0.0;
    for (int i = 0; i < d; ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
    return log_norm - sq / (2.0 * (t - s)) - squared_norm(y) / (2.0 * (horizon - t)) +
           squared_norm(x) / (2.0 * (horizon - s));
  };
}

BridgeStep::LogKernel matrix_bridge_kernel(const linalg::Matrix& drift,
                                           const linalg::Matrix& diffusion,
                                           double horizon, double s, double t) {
  const int d = static_cast<int>(drift.rows());
  auto v1 = linalg::gramian_vt_tilde(drift, diffusion, t - s);
  auto v2 = linalg::gramian_vt_tilde(drift, diffusion, horizon - t);
  auto v3 = linalg::gramian_vt_tilde(drift, diffusion, horizon - s);
  linalg::Matrix back = linalg::matrix_exp(drift, -(t - s));
  const double log_norm =
      0.5 * (v3.log_det() - d * std::log(2.0 * std::numbers::pi) - v1.log_det() -
             v2.log_det());
  return [=, v1 = std::move(v1), v2 = std::move(v2), v3 = std::move(v3),
          back = std::move(back)](State x, State y) {
    check_vector(x, d, "OU bridge");
    check_vector(y, d, "OU bridge");
    const Eigen::Map<const linalg::Vector> xv(x.data(), d);
    const Eigen::Map<const linalg::Vector> yv(y.data(), d);
    const linalg::Vector r = xv - back * yv;
    return log_norm - 0.5 * v1.quadratic_form(r) - 0.5 * v2.quadratic_form(yv) +
           0.5 * v3.quadratic_form(xv);
  };
}

BridgeStep::LogKernel radial_bridge_kernel(double a, double sigma, int d,
                                           double horizon, double s, double t) {
  const BesselOrder order = BesselOrder::from_dimension(d);
  const double nu = order.value();
  const double s2 = sigma * sigma;
  const double kap1 = kappa(a, t - s);
  const double kap2 = kappa(a, horizon - t);
  const double kap3 = kappa(a, horizon - s);
  const double k1 = s2 * kap1;
  const double k2 = s2 * kap2;
  const double k3 = s2 * kap3;
  const double m1 = std::exp(a * (t - s));
  const double m2sq = std::exp(2.0 * a * (horizon - t));
  const double m3sq = std::exp(2.0 * a * (horizon - s));
  const double end_ratio = std::log(kap3) - std::log(kap2);
  return [=](State xs, State ys) {
    if (xs.size() != 1 || ys.size() != 1) {
      throw DomainError("radial bridge: states are scalars");
    }
    const double x = xs[0];
    const double y = ys[0];
    check_radius(x, "radial bridge");
    check_radius(y, "radial bridge");
    if (y == 0.0) {
      if (d >= 2) return kNegInf;
      return 0.5 * std::log(2.0 / (std::numbers::pi * k1)) - m1 * m1 * x * x / (2.0 * k1) +
             0.5 * end_ratio + m3sq * x * x / (2.0 * k3);
    }
    if (x == 0.0) {
      const double y_power = d == 1 ? 0.0 : (2.0 * nu + 1.0) * std::log(y);
      return y_power - nu * std::numbers::ln2 - (nu + 1.0) * std::log(k1) -
             std::lgamma(nu + 1.0) + (nu + 1.0) * end_ratio - y * y / (2.0 * k1) -
             m2sq * y * y / (2.0 * k2);
    }
    const double z = m1 * x * y / k1;
    // log I_nu(z) - (m1^2 x^2 + y^2)/(2 k1) with the exponentials combined.
    const double diff = m1 * x - y;
    const double bessel = log_bessel_i_normalized(order, z) - diff * diff / (2.0 * k1);
    // nu log z - nu log x, kept finite when z underflows.
    const double z_power = nu * (std::log(m1 * y) - std::log(k1));
    return -a * nu * (t - s) + (nu + 1.0) * std::log(y) - std::log(k1) + z_power +
           (nu + 1.0) * end_ratio + bessel - m2sq * y * y / (2.0 * k2) +
           m3sq * x * x / (2.0 * k3);
  };
}

BridgeStep::LogKernel closed_form_kernel(const BridgeSpec& spec, double s, double t) {
  const double horizon = spec.horizon;
  return std::visit(
      Overloaded{
          [&](const Wiener& m) { return wiener_bridge_kernel(m.dim, horizon, s, t); },
          [&](const OuScalar& m) {
            return iso_bridge_kernel(m.a, m.sigma, m.dim, horizon, s, t);
          },
          [&](const OuMatrix& m) {
            return matrix_bridge_kernel(m.drift, m.diffusion, horizon, s, t);
          },
          [&](const Bessel& m) {
            return radial_bridge_kernel(0.0, 1.0, m.dim, horizon, s, t);
          },
          [&](const OuRadial& m) {
            return radial_bridge_kernel(m.a, m.sigma, m.dim, horizon, s, t);
          }},
      spec.base.kind());
}

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("bridge horizon must be positive and finite");
  }
}

}  // namespace

void check_bridge_times(double horizon, double s, double t) {
  check_horizon(horizon);
  if (!(s >= 0.0 && s < t && t < horizon)) {
    throw DomainError("bridge times must satisfy 0 <= s < t < T; got s = " +
                      std::to_string(s) + ", t = " + std::to_string(t) +
                      ", T = " + std::to_string(horizon));
  }
}

BridgeSpec BridgeSpec::zero_endpoints(ProcessModel base, double horizon) {
  const auto n = static_cast<std::size_t>(base.state_dim());
  BridgeSpec spec{std::move(base), std::vector<double>(n, 0.0),
                  std::vector<double>(n, 0.0), horizon};
  spec.validate();
  return spec;
}

void BridgeSpec::validate() const {
  check_horizon(horizon);
  base.check_state(start);
  base.check_state(end);
}

bool BridgeSpec::ends_at_zero() const {
  for (double v : end) {
    if (v != 0.0) return false;
  }
  return true;
}

const char* to_string(Construction c) {
  switch (c) {
    case Construction::Ratio:
      return "ratio";
    case Construction::BallLimit:
      return "ball-limit";
    case Construction::RadialLimit:
      return "radial-limit";
    case Construction::ClosedForm:
      return "closed-form";
  }
  return "unknown";
}

double BridgeStep::density(State x, State y) const { return std::exp(log_density(x, y)); }

double BridgeStep::density(double x, double y) const {
  return density(State(&x, 1), State(&y, 1));
}

BridgeDensity::BridgeDensity(BridgeSpec spec, Construction construction)
    : spec_(std::move(spec)), construction_(construction) {
  spec_.validate();
  switch (construction_) {
    case Construction::Ratio:
      break;
    case Construction::BallLimit:
      throw InapplicableConstruction(
          "the ball-limit construction has no direct evaluator; use ratio or closed-form");
    case Construction::RadialLimit:
      if (!spec_.base.is_radial()) {
        throw InapplicableConstruction("radial limit requires a Bessel or OU radial base");
      }
      if (!spec_.ends_at_zero()) {
        throw InapplicableConstruction("radial limit requires the endpoint b = 0");
      }
      break;
    case Construction::ClosedForm:
      if (!spec_.ends_at_zero()) {
        throw InapplicableConstruction("closed-form bridges require the endpoint b = 0");
      }
      break;
  }
}

BridgeStep BridgeDensity::at(double s, double t) const {
  check_bridge_times(spec_.horizon, s, t);
  switch (construction_) {
    case Construction::Ratio:
      return BridgeStep(s, t, ratio_kernel(spec_, s, t));
    case Construction::RadialLimit:
      return BridgeStep(s, t, radial_limit_kernel(spec_, s, t));
    case Construction::ClosedForm:
      return BridgeStep(s, t, closed_form_kernel(spec_, s, t));
    case Construction::BallLimit:
      break;
  }
  throw InapplicableConstruction("construction cannot be evaluated");
}

double BridgeDensity::density(double s, double t, State x, State y) const {
  return at(s, t).density(x, y);
}

double BridgeDensity::density(double s, double t, double x, double y) const {
  return at(s, t).density(x, y);
}

double bridge_density_ratio(const BridgeSpec& spec, double s, double t, State x,
                            State y) {
  return BridgeDensity(spec, Construction::Ratio).density(s, t, x, y);
}

double bridge_density_radial_limit(const BridgeSpec& spec, double s, double t,
                                   double x, double y) {
  return BridgeDensity(spec, Construction::RadialLimit).density(s, t, x, y);
}

double wiener_bridge_density(int d, double horizon, double s, double t, State x,
                             State y) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  check_bridge_times(horizon, s, t);
  return std::exp(wiener_bridge_kernel(d, horizon, s, t)(x, y));
}

double ou_scalar_bridge_density(double a, double sigma, int d, double horizon,
                                double s, double t, State x, State y) {
  ProcessModel::ou_scalar(a, sigma, d);
  check_bridge_times(horizon, s, t);
  return std::exp(iso_bridge_kernel(a, sigma, d, horizon, s, t)(x, y));
}

double ou_bridge_density(const linalg::Matrix& drift, const linalg::Matrix& diffusion,
                         double horizon, double s, double t, State x, State y) {
  ProcessModel::ou_matrix(drift, diffusion);
  check_bridge_times(horizon, s, t);
  return std::exp(matrix_bridge_kernel(drift, diffusion, horizon, s, t)(x, y));
}

double radial_bridge_density(double a, double sigma, int d, double horizon, double s,
                             double t, double x, double y) {
  ProcessModel::ou_radial(a, sigma, d);
  check_bridge_times(horizon, s, t);
  return std::exp(radial_bridge_kernel(a, sigma, d, horizon, s, t)(State(&x, 1),
                                                                   State(&y, 1)));
}

}  // namespace bridgelab
