#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/report.hpp"
#include "bridgelab/rng.hpp"

namespace bridgelab {

struct PathSample {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// `points` equally spaced times from 0 to T inclusive (points >= 2).
std::vector<double> uniform_grid(double horizon, int points);

/// DomainError unless the grid starts at 0, ends at T, and strictly increases.
void check_grid(std::span<const double> times, double horizon);

/// Conditional law of the next state of a zero-endpoint Gaussian bridge over
/// [s, t]: N(M x, P^{-1}) with P = F^T V~_{t-s}^{-1} F + V~_{T-t}^{-1},
/// F = e^{-(t-s)A}, M = P^{-1} F^T V~_{t-s}^{-1}, read off the bridge kernel.
class GaussianBridgeStep {
 public:
  GaussianBridgeStep(const ProcessModel& base, double horizon, double s, double t);

  const linalg::Matrix& mean_map() const noexcept { return mean_map_; }
  linalg::Matrix covariance() const;
  void draw(const linalg::Vector& x, RandomStream& rng, linalg::Vector& out) const;

 private:
  linalg::Matrix mean_map_;
  linalg::Matrix precision_factor_;  // lower Cholesky factor L of P
};

/// Exact sequential sampling of the zero-endpoint bridge of a Wiener, OuScalar
/// or OuMatrix base. The state at T is pinned to 0.
PathSample sample_gaussian_bridge_path(const BridgeSpec& spec, std::span<const double> times,
                                       std::uint64_t seed, std::uint64_t stream = 0);
/// Paths 0..count-1 on streams 0..count-1, generated in parallel.
std::vector<PathSample> sample_gaussian_bridge_paths(const BridgeSpec& spec,
                                                     std::span<const double> times,
                                                     std::uint64_t seed, std::size_t count);

/// Inverse-CDF table for one radial bridge step p_{s,t}(x, .). The window is
/// taken from the Gaussian proxy of the step and cut into 96 panels, each
/// halved until the 15-point Gauss-Kronrod mass agrees with the sum over its
/// halves to 1e-13. ComputationError when the tabulated mass differs from 1
/// by more than 1e-6.
class RadialStepTable {
 public:
  RadialStepTable(const BridgeDensity& bridge, double s, double t, double x);

  double x() const noexcept { return x_; }
  double lo() const noexcept { return nodes_.front(); }
  double hi() const noexcept { return nodes_.back(); }
  double total_mass() const noexcept { return mass_; }
  double cdf(double y) const;
  // Safeguarded Newton on the tabulated-plus-local CDF; |cdf(q) - u| < 1e-10.
  double quantile(double u) const;
  double density(double y) const;

 private:
  double partial(std::size_t panel, double y) const;

  BridgeStep step_;
  double x_;
  std::vector<double> nodes_;
  std::vector<double> cdf_;  // normalized, cdf_[0] = 0, cdf_.back() = 1
  double mass_ = 0.0;
};

/// Sequential inverse-CDF sampling of the zero-endpoint bridge of a Bessel or
/// OuRadial base; states are radii, the state at T is pinned to 0.
PathSample sample_radial_bridge_path(const BridgeSpec& spec, std::span<const double> times,
                                     std::uint64_t seed, std::uint64_t stream = 0);
/// Batch version; tables for steps starting at 0 are built once and shared.
std::vector<PathSample> sample_radial_bridge_paths(const BridgeSpec& spec,
                                                   std::span<const double> times,
                                                   std::uint64_t seed, std::size_t count);

/// Dispatches on the base model.
std::vector<PathSample> sample_bridge_paths(const BridgeSpec& spec,
                                            std::span<const double> times,
                                            std::uint64_t seed, std::size_t count);

struct KsResult {
  double statistic = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double p_value_bound = 1.0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov-Smirnov test; n, m >= 100. The p-value uses the
/// asymptotic distribution with the Stephens correction.
KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);
/// One-sample test against a continuous CDF; n >= 100.
KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf);

/// `time,dim0,...` (or `time,r` for radial paths), one row per grid point.
std::string path_to_csv(const PathSample& path, bool radial);
Json path_metadata(const PathSample& path, const BridgeSpec& spec);
Json bridge_spec_to_json(const BridgeSpec& spec);

/// Writes path_NNNN.csv and path_NNNN.json for every path into `dir`
/// (created if missing), each file atomically.
void write_paths(const std::filesystem::path& dir, const std::vector<PathSample>& paths,
                 const BridgeSpec& spec);

}  // namespace bridgelab
