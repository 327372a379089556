#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/errors.hpp"
#include "bridgelab/verify.hpp"
#include "oracles.hpp"

namespace bridgelab {
namespace {

using linalg::Matrix;
using std::numbers::pi;
using Vec = std::vector<double>;

BridgeSpec zero_bridge(ProcessModel m, double horizon) {
  return BridgeSpec::zero_endpoints(std::move(m), horizon);
}

TEST(BridgeSpec, Validation) {
  BridgeSpec spec{ProcessModel::wiener(2), {0.0, 0.0}, {0.0}, 1.0};
  EXPECT_THROW(spec.validate(), DomainError);
  spec.end = {0.0, 0.0};
  spec.horizon = 0.0;
  EXPECT_THROW(spec.validate(), DomainError);
  BridgeSpec radial{ProcessModel::bessel(2), {-1.0}, {0.0}, 1.0};
  EXPECT_THROW(radial.validate(), DomainError);
  EXPECT_TRUE(zero_bridge(ProcessModel::bessel(3), 2.0).ends_at_zero());
}

TEST(Ratio, WienerMidpoint) {
  const auto spec = zero_bridge(ProcessModel::wiener(1), 1.0);
  const Vec x{0.0};
  const Vec y{0.0};
  EXPECT_NEAR(bridge_density_ratio(spec, 0.0, 0.5, x, y), std::sqrt(2 / pi), 1e-15);
  EXPECT_NEAR(wiener_bridge_density(1, 1.0, 0.0, 0.5, x, y), std::sqrt(2 / pi), 1e-15);
}

TEST(Ratio, MatchesTextbookBrownianBridge) {
  BridgeSpec spec{ProcessModel::wiener(1), {0.3}, {-0.8}, 2.0};
  for (double y : {-2.0, -0.5, 0.0, 1.1}) {
    const Vec xv{0.4};
    const Vec yv{y};
    EXPECT_NEAR(bridge_density_ratio(spec, 0.5, 1.2, xv, yv) /
                    oracle::brownian_bridge_density(2.0, 0.5, 1.2, 0.4, y, -0.8),
                1.0, 1e-13);
  }
}

TEST(Ratio, BesselAtZeroIsInapplicable) {
  for (int d : {2, 3}) {
    const auto spec = zero_bridge(ProcessModel::bessel(d), 1.0);
    const Vec x{0.5};
    const Vec y{0.7};
    EXPECT_THROW(bridge_density_ratio(spec, 0.0, 0.5, x, y), InapplicableConstruction);
  }
}

TEST(Ratio, TimeOrder) {
  const auto spec = zero_bridge(ProcessModel::wiener(1), 1.0);
  const Vec x{0.0};
  EXPECT_THROW(bridge_density_ratio(spec, 0.5, 0.5, x, x), DomainError);
  EXPECT_THROW(bridge_density_ratio(spec, 0.2, 1.0, x, x), DomainError);
  EXPECT_THROW(bridge_density_ratio(spec, -0.1, 0.5, x, x), DomainError);
}

TEST(Ratio, ConcentratesAtEndpoint) {
  const auto spec = zero_bridge(ProcessModel::ou_scalar(-1.0, 1.0, 1), 1.0);
  const QuadratureConfig quad;
  for (double delta : {0.1, 0.01}) {
    double prev = 0.0;
    for (double t : {0.9, 0.99, 0.999}) {
      const Vec x{0.5};
      const double mass = integrate(
          [&](double y) {
            const Vec yv{y};
            return bridge_density_ratio(spec, 0.2, t, x, yv);
          },
          -delta, delta, quad).value;
      EXPECT_GT(mass, prev);
      prev = mass;
    }
    if (delta == 0.1) EXPECT_GT(prev, 0.99);
  }
}

TEST(WienerBridge, TimeSymmetry) {
  const Vec x{0.0};
  for (double t : {0.1, 0.3, 0.45}) {
    for (double y : {0.0, 0.4, 1.3}) {
      const Vec yv{y};
      EXPECT_NEAR(wiener_bridge_density(1, 1.0, 0.0, t, x, yv),
                  wiener_bridge_density(1, 1.0, 0.0, 1.0 - t, x, yv), 1e-14);
    }
  }
}

TEST(ClosedForms, AgreeWithRatio) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Matrix drift = random_stable_ou_matrix(2, 9).drift_matrix();
  const Matrix diffusion = random_stable_ou_matrix(2, 9).diffusion_matrix();
  const auto wiener = zero_bridge(ProcessModel::wiener(2), 1.5);
  const auto scalar = zero_bridge(ProcessModel::ou_scalar(0.6, 0.8, 2), 1.5);
  const auto matrix = zero_bridge(ProcessModel::ou_matrix(drift, diffusion), 1.5);
  for (int i = 0; i < 25; ++i) {
    const double s = 0.6 * std::abs(u(gen));
    const double t = s + 0.05 + 0.4 * std::abs(u(gen));
    const Vec x{u(gen), u(gen)};
    const Vec y{u(gen), u(gen)};
    EXPECT_NEAR(wiener_bridge_density(2, 1.5, s, t, x, y) / bridge_density_ratio(wiener, s, t, x, y),
                1.0, 1e-12);
    EXPECT_NEAR(ou_scalar_bridge_density(0.6, 0.8, 2, 1.5, s, t, x, y) /
                    bridge_density_ratio(scalar, s, t, x, y),
                1.0, 1e-10);
    EXPECT_NEAR(ou_bridge_density(drift, diffusion, 1.5, s, t, x, y) /
                    bridge_density_ratio(matrix, s, t, x, y),
                1.0, 1e-10);
  }
}

TEST(ClosedForms, MatrixReducesToScalarAndWiener) {
  const Vec x{0.3, -0.2};
  const Vec y{-0.4, 0.9};
  const Matrix id = Matrix::Identity(2, 2);
  EXPECT_NEAR(ou_bridge_density(Matrix::Zero(2, 2), id, 1.0, 0.1, 0.6, x, y) /
                  wiener_bridge_density(2, 1.0, 0.1, 0.6, x, y),
              1.0, 1e-12);
  EXPECT_NEAR(ou_bridge_density(-0.8 * id, 1.3 * id, 2.0, 0.1, 0.6, x, y) /
                  ou_scalar_bridge_density(-0.8, 1.3, 2, 2.0, 0.1, 0.6, x, y),
              1.0, 1e-11);
}

TEST(BallLimit, OracleMatchesClosedForm) {
  const auto spec = zero_bridge(ProcessModel::ou_scalar(-0.5, 1.0, 2), 1.0);
  const Vec x{0.4, 0.1};
  const Vec y{-0.3, 0.5};
  const double exact = ou_scalar_bridge_density(-0.5, 1.0, 2, 1.0, 0.1, 0.5, x, y);
  const double coarse = oracle::ball_limit_bridge_density(spec, 0.1, 0.5, x, y, 0.1, 20000, 1);
  const double fine = oracle::ball_limit_bridge_density(spec, 0.1, 0.5, x, y, 0.05, 20000, 1);
  const double extrapolated = (4 * fine - coarse) / 3;
  EXPECT_NEAR(extrapolated / exact, 1.0, 2e-3);
  EXPECT_THROW(BridgeDensity(spec, Construction::BallLimit), InapplicableConstruction);
}

TEST(RadialLimit, AgreesWithEpsilonSequence) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& base : {ProcessModel::bessel(2), ProcessModel::ou_radial(-0.8, 1.3, 3)}) {
    const auto spec = zero_bridge(base, 1.0);
    for (int i = 0; i < 10; ++i) {
      const double s = 0.5 * u(gen);
      const double t = s + 0.05 + 0.4 * u(gen);
      const double x = 0.1 + 2.0 * u(gen);
      const double y = 0.1 + 2.0 * u(gen);
      const double analytic = bridge_density_radial_limit(spec, s, t, x, y);
      const double numeric = oracle::radial_epsilon_limit(base, 1.0, s, t, x, y);
      EXPECT_NEAR(numeric / analytic, 1.0, 1e-6) << s << " " << t << " " << x << " " << y;
    }
  }
}

TEST(RadialLimit, RequiresZeroEndpoint) {
  BridgeSpec spec{ProcessModel::bessel(2), {0.0}, {1.0}, 1.0};
  EXPECT_THROW(bridge_density_radial_limit(spec, 0.0, 0.5, 1.0, 1.0), InapplicableConstruction);
  EXPECT_THROW(BridgeDensity(spec, Construction::RadialLimit), InapplicableConstruction);
  EXPECT_THROW(BridgeDensity(spec, Construction::ClosedForm), InapplicableConstruction);
  EXPECT_THROW(BridgeDensity(zero_bridge(ProcessModel::wiener(1), 1.0), Construction::RadialLimit),
               InapplicableConstruction);
}

TEST(RadialBridge, BesselFromOriginMatchesNormOfWienerBridge) {
  // From x = 0 the norm of the Wiener bridge at t is chi with variance t(T-t)/T per axis.
  const double t = 0.3;
  const double v = t * (1.0 - t);
  for (double y : {0.2, 0.7, 1.4}) {
    const double chi3 = std::sqrt(2 / pi) * y * y * std::exp(-y * y / (2 * v)) / std::pow(v, 1.5);
    EXPECT_NEAR(radial_bridge_density(0.0, 1.0, 3, 1.0, 0.0, t, 0.0, y) / chi3, 1.0, 1e-13);
    const auto spec = zero_bridge(ProcessModel::bessel(3), 1.0);
    EXPECT_NEAR(bridge_density_radial_limit(spec, 0.0, t, 0.0, y) / chi3, 1.0, 1e-13);
  }
}

TEST(RadialBridge, OneDimensionIsFoldedGaussianBridge) {
  for (double x : {0.0, 0.6}) {
    for (double y : {0.0, 0.3, 1.2}) {
      const Vec xp{x};
      const Vec yp{y};
      const Vec ym{-y};
      const double expected = ou_scalar_bridge_density(0.5, 0.7, 1, 1.0, 0.2, 0.6, xp, yp) +
                               ou_scalar_bridge_density(0.5, 0.7, 1, 1.0, 0.2, 0.6, xp, ym);
      EXPECT_NEAR(radial_bridge_density(0.5, 0.7, 1, 1.0, 0.2, 0.6, x, y) / expected, 1.0, 1e-12)
          << x << " " << y;
    }
  }
}

TEST(RadialBridge, BoundaryValues) {
  EXPECT_EQ(radial_bridge_density(0.3, 1.0, 3, 1.0, 0.2, 0.6, 0.4, 0.0), 0.0);
  EXPECT_GT(radial_bridge_density(0.3, 1.0, 1, 1.0, 0.2, 0.6, 0.4, 0.0), 0.0);
  EXPECT_THROW(radial_bridge_density(0.3, 1.0, 3, 1.0, 0.2, 0.6, -0.4, 1.0), DomainError);
  EXPECT_THROW(radial_bridge_density(0.3, 1.0, 3, 1.0, 0.6, 0.2, 0.4, 1.0), DomainError);
}

TEST(RadialBridge, Normalized) {
  const QuadratureConfig quad;
  for (int d : {1, 2, 5}) {
    for (double x : {0.0, 0.8, 3.0}) {
      const auto r = integrate_halfline(
          [&](double y) { return radial_bridge_density(-0.8, 1.3, d, 2.0, 0.2, 1.0, x, y); }, quad,
          x, 1.0);
      EXPECT_NEAR(r.value, 1.0, 1e-8) << d << " " << x;
    }
  }
}

TEST(BridgeDensity, DispatchesConstructions) {
  const auto spec = zero_bridge(ProcessModel::ou_radial(-0.8, 1.3, 3), 2.0);
  const BridgeDensity closed(spec, Construction::ClosedForm);
  const BridgeDensity limit(spec, Construction::RadialLimit);
  EXPECT_NEAR(closed.density(0.2, 1.0, 1.0, 1.1), limit.density(0.2, 1.0, 1.0, 1.1), 1e-14);
  const auto step = closed.at(0.2, 1.0);
  EXPECT_EQ(step.density(1.0, 1.1), closed.density(0.2, 1.0, 1.0, 1.1));
  EXPECT_STREQ(to_string(Construction::RadialLimit), "radial-limit");
}

}  // namespace
}  // namespace bridgelab
