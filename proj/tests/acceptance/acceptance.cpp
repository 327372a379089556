// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/cli.hpp"
#include "bridgelab/linalg.hpp"
#include "bridgelab/models.hpp"
#include "bridgelab/sample.hpp"
#include "bridgelab/specfun.hpp"
#include "bridgelab/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace bridgelab;
using linalg::Matrix;
using Vec = std::vector<double>;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Worst residual of one group checked against its tolerance.
struct Tally {
  std::string name;
  double tolerance;
  double worst = 0.0;
  std::size_t points = 0;
  bool ok = true;

  void add(double residual) {
    ++points;
    if (!(residual <= tolerance)) ok = false;
    if (std::isnan(residual) || residual > worst) worst = residual;
  }
  void add(const VerificationReport& r) {
    points += r.evaluated;
    if (!r.pass) ok = false;
    worst = std::max(worst, r.max_residual);
  }
  std::string text() const {
    return name + " max " + format_double(worst) + " <= " + format_double(tolerance) + " (" +
           std::to_string(points) + " points)";
  }
};

Outcome combine(const std::vector<Tally>& tallies) {
  Outcome o;
  for (const auto& t : tallies) {
    o.pass = o.pass && t.ok && t.points > 0;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += t.text();
  }
  return o;
}

Outcome commutation() {
  Tally t{"relative difference", 1e-10};
  struct P {
    double a, sigma;
    int d;
  };
  for (const P& p : {P{0, 1, 1}, P{0, 1, 2}, P{0, 1, 3}, P{-0.8, 1.3, 2}, P{0.5, 0.7, 3}}) {
    for (double horizon : {1.0, 2.0}) {
      t.add(commutation_check(p.a, p.sigma, p.d, horizon, CommutationGrid::standard(horizon), 1e-10));
    }
  }
  return combine({t});
}

Outcome bessel_identity() {
  Tally t{"relative residual", 1e-8};
  t.add(bessel_identity_report(BesselIdentityGrid{}, QuadratureConfig{}, 1e-8));
  return combine({t});
}

std::vector<Construction> constructions(const ProcessModel& m) {
  if (m.is_radial()) {
    std::vector<Construction> c{Construction::ClosedForm, Construction::RadialLimit};
    if (m.dim() == 1) c.push_back(Construction::Ratio);
    return c;
  }
  return {Construction::ClosedForm, Construction::Ratio};
}

std::vector<ProcessModel> scalar_models() {
  return {ProcessModel::bessel(1),    ProcessModel::bessel(2),
          ProcessModel::bessel(3),    ProcessModel::ou_radial(-0.8, 1.3, 2),
          ProcessModel::wiener(1),    ProcessModel::wiener(2),
          ProcessModel::wiener(3),    ProcessModel::ou_scalar(0.5, 0.7, 2)};
}

Outcome kolmogorov_chapman() {
  const QuadratureConfig quad;
  Tally base{"base kernels", 1e-7};
  Tally bridges{"bridge kernels", 1e-7};
  Tally matrix{"random stable 2x2 OU (base and bridges)", 1e-6};
  for (const auto& m : scalar_models()) {
    base.add(kc_report(m, quad, 1e-7));
    const auto spec = BridgeSpec::zero_endpoints(m, 1.0);
    for (Construction c : constructions(m)) bridges.add(kc_report(BridgeDensity(spec, c), quad, 1e-7));
  }
  const ProcessModel ou = random_stable_ou_matrix(2, 7);
  matrix.add(kc_report(ou, quad, 1e-6));
  for (Construction c : constructions(ou)) {
    matrix.add(kc_report(BridgeDensity(BridgeSpec::zero_endpoints(ou, 1.0), c), quad, 1e-6));
  }
  return combine({base, bridges, matrix});
}

Outcome normalization() {
  const QuadratureConfig quad;
  Tally t{"|integral - 1|", 1e-8};
  auto models = scalar_models();
  models.push_back(ProcessModel::ou_radial(0.5, 0.7, 3));
  models.push_back(random_stable_ou_matrix(2, 7));
  for (const auto& m : models) {
    for (double horizon : {1.0, 2.0}) {
      const auto spec = BridgeSpec::zero_endpoints(m, horizon);
      for (Construction c : constructions(m)) t.add(normalization_report(BridgeDensity(spec, c), quad, 1e-8));
    }
  }
  return combine({t});
}

Outcome reduction_chain() {
  Tally matrix{"OuMatrix(aI, sigma I) vs OuScalar", 1e-11};
  Tally wiener{"OuScalar(0, 1) vs Wiener", 1e-11};
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + i % 3;
    const double a = 1.5 * u(gen);
    const double sigma = 1.0 + 0.8 * u(gen);
    const double t = 0.05 + 1.5 * std::abs(u(gen));
    Vec x(d);
    Vec y(d);
    for (auto& c : x) c = 2 * u(gen);
    for (auto& c : y) c = 2 * u(gen);
    const auto om = ProcessModel::ou_matrix(a * Matrix::Identity(d, d), sigma * Matrix::Identity(d, d));
    const double ps = density(ProcessModel::ou_scalar(a, sigma, d), t, x, y);
    matrix.add(relative_residual(density(om, t, x, y), ps));
    const double pw = density(ProcessModel::wiener(d), t, x, y);
    wiener.add(relative_residual(density(ProcessModel::ou_scalar(0.0, 1.0, d), t, x, y), pw));
    const auto om0 = ProcessModel::ou_matrix(Matrix::Zero(d, d), Matrix::Identity(d, d));
    wiener.add(relative_residual(density(om0, t, x, y), pw));
  }
  return combine({matrix, wiener});
}

double rel_norm(const Matrix& diff, const Matrix& ref) {
  return diff.norm() / std::max(ref.norm(), 1e-300);
}

Outcome gramian_identities() {
  Tally finite{"V_t = V - e^{tA} V e^{tA^T}", 1e-9};
  Tally lyap{"Lyapunov residual", 1e-10};
  Tally quadrature{"V_t vs quadrature oracle", 1e-8};
  Tally mass{"integral over x = det e^{-tA}", 1e-8};
  std::vector<std::pair<Matrix, Matrix>> cases;
  Matrix upper(2, 2);
  upper << -1, 2, 0, -3;
  cases.push_back({upper, Matrix::Identity(2, 2)});
  for (std::uint64_t seed : {1, 2, 3}) {
    for (int d : {2, 3}) {
      const auto m = random_stable_ou_matrix(d, seed);
      cases.push_back({m.drift_matrix(), m.diffusion_matrix()});
    }
  }
  const QuadratureConfig quad;
  for (const auto& [a, sigma] : cases) {
    const Matrix q = sigma * sigma.transpose();
    const Matrix v = linalg::lyapunov_solve(a, sigma).matrix();
    lyap.add(rel_norm(a * v + v * a.transpose() + q, q));
    for (double t : {0.3, 1.0, 5.0}) {
      const Matrix vt = linalg::gramian_vt(a, sigma, t).matrix();
      const Matrix e = linalg::matrix_exp(a, t);
      finite.add(rel_norm(v - e * v * e.transpose() - vt, vt));
      quadrature.add(rel_norm(vt - oracle::gramian_quadrature(a, sigma, t), vt));
    }
    if (a.rows() == 2) {
      const auto model = ProcessModel::ou_matrix(a, sigma);
      for (double t : {0.3, 1.0}) {
        const Transition p = model.at(t);
        const Vec z{0.4, -0.2};
        const linalg::Vector zv = Eigen::Map<const linalg::Vector>(z.data(), 2);
        const linalg::Vector c = linalg::matrix_exp(a, -t) * zv;
        // x = c + L u with L L^T = V~_t, the covariance of x given z.
        const linalg::Gramian cov = linalg::gramian_vt_tilde(a, sigma, t);
        const Matrix l = cov.cholesky().matrixL();
        const double jacobian = std::exp(0.5 * cov.log_det());
        const std::vector<WindowAxis> axes(2, WindowAxis{-12.0, 12.0, {0.0}});
        const double value = jacobian * integrate_box(
                                            [&](std::span<const double> u) {
                                              const linalg::Vector x =
                                                  c + l * linalg::Vector::Map(u.data(), 2);
                                              return p.density(Vec{x(0), x(1)}, z);
                                            },
                                            axes, quad)
                                            .value;
        mass.add(relative_residual(value, std::exp(-t * a.trace())));
      }
    }
  }
  return combine({finite, lyap, quadrature, mass});
}

Outcome radial_oracle_agreement() {
  Tally t{"|closed-form CDF - polar oracle|", 1e-7};
  const QuadratureConfig quad;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int d : {2, 3, 5}) {
    for (int i = 0; i < 20; ++i) {
      const bool bessel = i % 2 == 0;
      const double a = bessel ? 0.0 : 2.0 * u(gen) - 1.0;
      const double sigma = bessel ? 1.0 : 0.5 + u(gen);
      const double time = 0.1 + 1.9 * u(gen);
      const double x = i % 5 == 0 ? 0.0 : 3.0 * u(gen);
      const double b = 0.2 + 3.0 * u(gen);
      const ProcessModel m = bessel ? ProcessModel::bessel(d) : ProcessModel::ou_radial(a, sigma, d);
      const double closed = radial_cdf(m, time, x, b, quad);
      t.add(std::abs(closed - radial_oracle(d, a, sigma, time, x, b, quad).probability));
    }
  }
  return combine({t});
}

Outcome empirical_law() {
  constexpr std::size_t kDraws = 100000;
  Outcome o;
  struct P {
    double a, sigma;
    int d;
  };
  const double horizon = 1.0;
  for (const P& p : {P{0, 1, 3}, P{-1, 1, 2}}) {
    const auto gauss = BridgeSpec::zero_endpoints(ProcessModel::ou_scalar(p.a, p.sigma, p.d), horizon);
    const auto radial = BridgeSpec::zero_endpoints(ProcessModel::ou_radial(p.a, p.sigma, p.d), horizon);
    // Whole paths on one grid, so the later times go through sequential steps.
    const std::vector<double> grid{0.0, 0.25 * horizon, 0.5 * horizon, 0.9 * horizon, horizon};
    const auto gp = sample_bridge_paths(gauss, grid, 1001, kDraws);
    const auto rp = sample_bridge_paths(radial, grid, 2002, kDraws);
    for (std::size_t k = 1; k <= 3; ++k) {
      std::vector<double> xs;
      std::vector<double> ys;
      xs.reserve(kDraws);
      ys.reserve(kDraws);
      for (const auto& path : gp) {
        double s = 0.0;
        for (double c : path.states[k]) s += c * c;
        xs.push_back(std::sqrt(s));
      }
      for (const auto& path : rp) ys.push_back(path.states[k][0]);
      const KsResult r = ks_two_sample(xs, ys);
      const bool ok = r.p_value_bound > 0.01;
      o.pass = o.pass && ok;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s(a=%g,d=%d,t=%gT) D=%.5f p=%.3f", o.detail.empty() ? "" : "; ",
                    p.a, p.d, grid[k] / horizon, r.statistic, r.p_value_bound);
      o.detail += buf;
    }
  }
  o.detail += " (reject below 0.01)";
  return o;
}

Outcome special_functions() {
  Tally gr{"gr8431", 1e-9};
  Tally half{"half-integer I_nu", 1e-12};
  Tally cross{"crossover continuity", 1e-11};
  const QuadratureConfig quad;
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    for (double c : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      const auto r = gr8431_check(BesselOrder(nu), c, quad);
      gr.add(r.converged ? r.residual : INFINITY);
    }
  }
  for (double nu : {-0.5, 0.5, 1.5, 2.5}) {
    for (double z = 1.0; z <= 100.0; z *= 1.2) {
      half.add(relative_residual(bessel_i_scaled(BesselOrder(nu), z),
                                 oracle::bessel_i_scaled_half_integer(nu, z)));
    }
  }
  for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const BesselOrder order(nu);
    const double z = bessel_crossover(order);
    cross.add(relative_residual(detail::bessel_i_scaled_series(order, z),
                                detail::bessel_i_scaled_asymptotic(order, z)));
  }
  return combine({gr, half, cross});
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "bridgelab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  std::size_t compared = 0;
  bool same = true;
  auto run_twice = [&](std::vector<std::string> args, const std::string& tail) {
    std::vector<fs::path> outs;
    for (const char* run : {"a", "b"}) {
      auto full = args;
      outs.push_back(root / (std::string(run) + tail));
      full.push_back(outs.back().string());
      if (cli::run_cli(full, sink, sink) != cli::kOk) same = false;
    }
    if (fs::is_directory(outs[0])) {
      for (const auto& entry : fs::directory_iterator(outs[0])) {
        ++compared;
        same = same && slurp(entry.path()) == slurp(outs[1] / entry.path().filename());
      }
    } else {
      ++compared;
      same = same && slurp(outs[0]) == slurp(outs[1]);
    }
  };
  run_twice({"sample", "--bridge", "ou-matrix", "--drift", "-1,0.5;-0.5,-2", "-T", "1", "--grid",
             "51", "--paths", "4", "--seed", "42", "--out"},
            "_matrix");
  run_twice({"sample", "--bridge", "ou-radial", "--a", "-1", "--sigma", "1", "-d", "3", "-T", "1",
             "--grid", "21", "--paths", "3", "--seed", "42", "--out"},
            "_radial");
  run_twice({"verify", "commute", "--a", "0.5", "--sigma", "0.7", "-d", "3", "--out"}, "_report.json");
  fs::remove_all(root);
  return {same && compared == 4 * 2 + 3 * 2 + 1,
          std::to_string(compared) + " CSV/JSON files compared across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "commutation of radial part and bridge", commutation},
      {2, "Bessel product integral identity", bessel_identity},
      {3, "Kolmogorov-Chapman equation", kolmogorov_chapman},
      {4, "bridge kernel normalization", normalization},
      {5, "OU reduction chain", reduction_chain},
      {6, "Gramian and Lyapunov identities", gramian_identities},
      {7, "radial CDF vs polar oracle", radial_oracle_agreement},
      {8, "empirical law equality (two-sample KS)", empirical_law},
      {9, "special functions", special_functions},
      {10, "byte-identical outputs for a fixed seed", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
