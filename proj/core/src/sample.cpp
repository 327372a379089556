#include "bridgelab/sample.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "bridgelab/errors.hpp"
#include "bridgelab/parallel.hpp"

namespace bridgelab {

namespace {

constexpr int kInitialPanels = 96;
constexpr int kMaxDepth = 12;
constexpr double kPanelTolerance = 1e-13;
constexpr double kMassTolerance = 1e-6;
constexpr double kWindowSds = 14.0;

void require_zero_endpoints(const BridgeSpec& spec) {
  spec.validate();
  const bool zero_start =
      std::all_of(spec.start.begin(), spec.start.end(), [](double v) { return v == 0.0; });
  if (!zero_start || !spec.ends_at_zero()) {
    throw PreconditionError("bridge sampling needs start and end states equal to 0");
  }
}

std::string padded(std::size_t i) {
  std::string s = std::to_string(i);
  if (s.size() < 4) s.insert(0, 4 - s.size(), '0');
  return s;
}

Json matrix_json(const linalg::Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<double> uniform_grid(double horizon, int points) {
  if (points < 2) throw DomainError("time grid needs at least 2 points");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("time grid horizon must be positive and finite");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = horizon * i / (points - 1);
  out.back() = horizon;
  return out;
}

void check_grid(std::span<const double> times, double horizon) {
  if (times.size() < 2) throw DomainError("time grid needs at least 2 points");
  if (times.front() != 0.0) throw DomainError("time grid must start at 0");
  if (times.back() != horizon) throw DomainError("time grid must end at the horizon T");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw DomainError("time grid must be strictly increasing");
    }
  }
}

GaussianBridgeStep::GaussianBridgeStep(const ProcessModel& base, double horizon, double s,
                                       double t) {
  if (base.is_radial()) throw DomainError("Gaussian bridge step needs a Gaussian base");
  check_bridge_times(horizon, s, t);
  const linalg::Matrix a = base.drift_matrix();
  const linalg::Matrix sigma = base.diffusion_matrix();
  const linalg::Gramian v1 = linalg::gramian_vt_tilde(a, sigma, t - s);
  const linalg::Gramian v2 = linalg::gramian_vt_tilde(a, sigma, horizon - t);
  const linalg::Matrix f = linalg::matrix_exp(a, -(t - s));
  const linalg::Matrix v1_inv_f = v1.cholesky().solve(f);
  linalg::Matrix precision = f.transpose() * v1_inv_f + v2.inverse();
  precision = 0.5 * (precision + precision.transpose());
  const Eigen::LLT<linalg::Matrix> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw ComputationError("Gaussian bridge step: precision is not positive definite");
  }
  precision_factor_ = llt.matrixL();
  mean_map_ = llt.solve(v1_inv_f.transpose());
}

linalg::Matrix GaussianBridgeStep::covariance() const {
  const linalg::Matrix p = precision_factor_ * precision_factor_.transpose();
  return p.inverse();
}

void GaussianBridgeStep::draw(const linalg::Vector& x, RandomStream& rng,
                              linalg::Vector& out) const {
  linalg::Vector u(x.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
  // P = L L^T, so L^{-T} u has covariance P^{-1}.
  out = mean_map_ * x +
        precision_factor_.transpose().triangularView<Eigen::Upper>().solve(u);
}

namespace {

std::vector<GaussianBridgeStep> gaussian_steps(const BridgeSpec& spec,
                                               std::span<const double> times) {
  std::vector<GaussianBridgeStep> steps;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    steps.emplace_back(spec.base, spec.horizon, times[i - 1], times[i]);
  }
  return steps;
}

PathSample gaussian_path(const BridgeSpec& spec, std::span<const double> times,
                         const std::vector<GaussianBridgeStep>& steps, std::uint64_t seed,
                         std::uint64_t stream) {
  const int d = spec.base.dim();
  PathSample path;
  path.seed = seed;
  path.stream = stream;
  path.times.assign(times.begin(), times.end());
  path.states.reserve(times.size());
  RandomStream rng(seed, stream);
  linalg::Vector x = linalg::Vector::Zero(d);
  linalg::Vector next(d);
  path.states.emplace_back(static_cast<std::size_t>(d), 0.0);
  for (const auto& step : steps) {
    step.draw(x, rng, next);
    x = next;
    path.states.emplace_back(x.data(), x.data() + d);
  }
  path.states.emplace_back(static_cast<std::size_t>(d), 0.0);
  return path;
}

void require_gaussian(const BridgeSpec& spec, std::span<const double> times) {
  if (spec.base.is_radial()) {
    throw DomainError("Gaussian bridge sampling needs a Wiener, OU scalar or OU matrix base");
  }
  require_zero_endpoints(spec);
  check_grid(times, spec.horizon);
}

void require_radial(const BridgeSpec& spec, std::span<const double> times) {
  if (!spec.base.is_radial()) {
    throw DomainError("radial bridge sampling needs a Bessel or OU radial base");
  }
  require_zero_endpoints(spec);
  check_grid(times, spec.horizon);
}

}  // namespace

PathSample sample_gaussian_bridge_path(const BridgeSpec& spec, std::span<const double> times,
                                       std::uint64_t seed, std::uint64_t stream) {
  require_gaussian(spec, times);
  return gaussian_path(spec, times, gaussian_steps(spec, times), seed, stream);
}

std::vector<PathSample> sample_gaussian_bridge_paths(const BridgeSpec& spec,
                                                     std::span<const double> times,
                                                     std::uint64_t seed, std::size_t count) {
  require_gaussian(spec, times);
  const auto steps = gaussian_steps(spec, times);
  return parallel_map<PathSample>(count, [&](std::size_t i) {
    return gaussian_path(spec, times, steps, seed, i);
  });
}

RadialStepTable::RadialStepTable(const BridgeDensity& bridge, double s, double t, double x)
    : step_(bridge.at(s, t)), x_(x) {
  const BridgeSpec& spec = bridge.spec();
  if (!spec.base.is_radial()) throw DomainError("radial step table needs a radial base");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("radial state must be >= 0");
  const int d = spec.base.dim();
  const double a = spec.base.scalar_drift();
  const double sigma = spec.base.scalar_sigma();
  const double m1 = std::exp(a * (t - s));
  const double k1 = sigma * sigma * kappa(a, t - s);
  const double m2 = std::exp(a * (spec.horizon - t));
  const double k2 = sigma * sigma * kappa(a, spec.horizon - t);
  const double var = 1.0 / (1.0 / k1 + m2 * m2 / k2);
  const double c = var * m1 * x / k1;
  const double center = std::sqrt(c * c + (d - 1) * var);
  const double sd = std::sqrt(var);
  const double lo = std::max(0.0, center - kWindowSds * sd);
  const double hi = center + (kWindowSds + std::sqrt(double(d))) * sd;

  auto f = [this](double y) { return step_.density(x_, y); };

  // Uniform panels, each split in halves until the 15-point rule agrees with
  // the sum over the halves.
  struct Panel {
    double lo, hi, mass;
    int depth;
  };
  std::vector<Panel> stack;
  const double h = (hi - lo) / kInitialPanels;
  for (int j = kInitialPanels - 1; j >= 0; --j) {
    const double a0 = lo + j * h;
    const double b0 = j + 1 == kInitialPanels ? hi : lo + (j + 1) * h;
    stack.push_back({a0, b0, gauss_kronrod15(f, a0, b0), 0});
  }
  nodes_.push_back(lo);
  cdf_.push_back(0.0);
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (p.lo + p.hi);
    const double left = gauss_kronrod15(f, p.lo, mid);
    const double right = gauss_kronrod15(f, mid, p.hi);
    if (p.depth < kMaxDepth && std::abs(left + right - p.mass) > kPanelTolerance) {
      stack.push_back({mid, p.hi, right, p.depth + 1});
      stack.push_back({p.lo, mid, left, p.depth + 1});
      continue;
    }
    nodes_.push_back(mid);
    cdf_.push_back(cdf_.back() + left);
    nodes_.push_back(p.hi);
    cdf_.push_back(cdf_.back() + right);
  }
  mass_ = cdf_.back();
  if (!(std::abs(mass_ - 1.0) <= kMassTolerance)) {
    throw ComputationError("radial step table: tabulated mass " + format_double(mass_) +
                           " differs from 1 by more than 1e-6");
  }
  for (double& v : cdf_) v /= mass_;
  cdf_.back() = 1.0;
}

double RadialStepTable::density(double y) const {
  if (y < nodes_.front() || y > nodes_.back()) return 0.0;
  return step_.density(x_, y) / mass_;
}

double RadialStepTable::partial(std::size_t panel, double y) const {
  if (y <= nodes_[panel]) return 0.0;
  return gauss_kronrod15([this](double v) { return step_.density(x_, v); }, nodes_[panel], y) /
         mass_;
}

double RadialStepTable::cdf(double y) const {
  if (y <= nodes_.front()) return 0.0;
  if (y >= nodes_.back()) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(1.0, cdf_[i] + partial(i, y));
}

double RadialStepTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0, 1)");
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
  double lo = nodes_[i];
  double hi = nodes_[i + 1];
  const double target = u - cdf_[i];
  const double span = cdf_[i + 1] - cdf_[i];
  double y = span > 0.0 ? lo + (hi - lo) * std::clamp(target / span, 0.0, 1.0)
                        : 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const double g = partial(i, y) - target;
    if (std::abs(g) < 1e-13) break;
    if (g < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    const double dens = density(y);
    double next = dens > 0.0 ? y - g / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  return y;
}

namespace {

PathSample radial_path(const BridgeDensity& bridge, std::span<const double> times,
                       const std::optional<RadialStepTable>& first, std::uint64_t seed,
                       std::uint64_t stream) {
  PathSample path;
  path.seed = seed;
  path.stream = stream;
  path.times.assign(times.begin(), times.end());
  path.states.reserve(times.size());
  RandomStream rng(seed, stream);
  double x = 0.0;
  path.states.push_back({0.0});
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double u = rng.uniform();
    if (x == 0.0 && i == 1 && first) {
      x = first->quantile(u);
    } else {
      x = RadialStepTable(bridge, times[i - 1], times[i], x).quantile(u);
    }
    path.states.push_back({x});
  }
  path.states.push_back({0.0});
  return path;
}

}  // namespace

PathSample sample_radial_bridge_path(const BridgeSpec& spec, std::span<const double> times,
                                     std::uint64_t seed, std::uint64_t stream) {
  require_radial(spec, times);
  const BridgeDensity bridge(spec, Construction::ClosedForm);
  return radial_path(bridge, times, std::nullopt, seed, stream);
}

std::vector<PathSample> sample_radial_bridge_paths(const BridgeSpec& spec,
                                                   std::span<const double> times,
                                                   std::uint64_t seed, std::size_t count) {
  require_radial(spec, times);
  const BridgeDensity bridge(spec, Construction::ClosedForm);
  std::optional<RadialStepTable> first;
  if (times.size() > 2) first.emplace(bridge, times[0], times[1], 0.0);
  return parallel_map<PathSample>(count, [&](std::size_t i) {
    return radial_path(bridge, times, first, seed, i);
  });
}

std::vector<PathSample> sample_bridge_paths(const BridgeSpec& spec,
                                            std::span<const double> times,
                                            std::uint64_t seed, std::size_t count) {
  if (spec.base.is_radial()) return sample_radial_bridge_paths(spec, times, seed, count);
  return sample_gaussian_bridge_paths(spec, times, seed, count);
}

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form of the CDF, fast for small lambda.
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * w);
      cdf += term;
      if (term < 1e-17 * cdf) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() < 100 || ys.size() < 100) {
    throw DomainError("ks_two_sample: both samples need at least 100 values");
  }
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  const double ne = std::sqrt(n * m / (n + m));
  return {d, a.size(), b.size(), kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

KsResult ks_one_sample(std::span<const double> xs, const std::function<double(double)>& cdf) {
  if (xs.size() < 100) throw DomainError("ks_one_sample: need at least 100 values");
  std::vector<double> a(xs.begin(), xs.end());
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, a.size(), 0, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

std::string path_to_csv(const PathSample& path, bool radial) {
  std::string out = "time";
  const std::size_t d = path.states.empty() ? 0 : path.states.front().size();
  if (radial) {
    out += ",r";
  } else {
    for (std::size_t k = 0; k < d; ++k) out += ",dim" + std::to_string(k);
  }
  out += '\n';
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out += format_double(path.times[i]);
    for (double v : path.states[i]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

Json bridge_spec_to_json(const BridgeSpec& spec) {
  Json j;
  const ProcessModel& base = spec.base;
  j["model"] = base.name();
  j["d"] = base.dim();
  if (std::holds_alternative<OuMatrix>(base.kind())) {
    j["drift"] = matrix_json(base.drift_matrix());
    j["diffusion"] = matrix_json(base.diffusion_matrix());
  } else {
    j["a"] = base.scalar_drift();
    j["sigma"] = base.scalar_sigma();
  }
  j["T"] = spec.horizon;
  j["start"] = spec.start;
  j["end"] = spec.end;
  return j;
}

Json path_metadata(const PathSample& path, const BridgeSpec& spec) {
  Json j;
  j["schema"] = VerificationReport::kSchema;
  j["seed"] = path.seed;
  j["stream"] = path.stream;
  j["spec"] = bridge_spec_to_json(spec);
  j["grid"] = {{"points", path.times.size()}, {"times", path.times}};
  return j;
}

void write_paths(const std::filesystem::path& dir, const std::vector<PathSample>& paths,
                 const BridgeSpec& spec) {
  std::filesystem::create_directories(dir);
  const bool radial = spec.base.is_radial();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string stem = "path_" + padded(i);
    write_file_atomic(dir / (stem + ".csv"), path_to_csv(paths[i], radial));
    write_file_atomic(dir / (stem + ".json"), path_metadata(paths[i], spec).dump(2) + "\n");
  }
}

}  // namespace bridgelab
