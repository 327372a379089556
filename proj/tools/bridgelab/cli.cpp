#include "bridgelab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <optional>

#include "bridgelab/bridges.hpp"
#include "bridgelab/errors.hpp"
#include "bridgelab/report.hpp"
#include "bridgelab/sample.hpp"
#include "bridgelab/verify.hpp"

namespace bridgelab::cli {

namespace {

const std::vector<std::string> kModels = {"wiener", "bessel", "ou-scalar", "ou-radial",
                                          "ou-matrix"};
const std::vector<std::string> kSuites = {"kc",        "normalization",    "commute",
                                          "bessel-identity", "lemma-hypotheses", "all"};

double parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw CLI::ValidationError("'" + std::string(text) + "' is not a number");
  }
  return v;
}

struct ModelOptions {
  std::string model;
  int d = 1;
  double a = 0.0;
  double sigma = 1.0;
  std::string drift;
  std::string diffusion;
  CLI::Option* model_opt = nullptr;
};

void add_model_options(CLI::App* app, ModelOptions& m, const std::string& model_flag,
                       bool required) {
  m.model_opt = app->add_option(model_flag, m.model, "process model")
                    ->check(CLI::IsMember(kModels));
  if (required) m.model_opt->required();
  app->add_option("-d,--dim", m.d, "dimension d")->check(CLI::PositiveNumber);
  app->add_option("--a", m.a, "scalar drift a");
  app->add_option("--sigma", m.sigma, "noise level sigma");
  app->add_option("--drift", m.drift, "drift matrix A for ou-matrix, rows separated by ';'");
  app->add_option("--diffusion", m.diffusion,
                  "diffusion matrix Sigma for ou-matrix (default identity)");
}

linalg::Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DomainError("empty matrix");
  const std::size_t cols = rows.front().size();
  linalg::Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw DomainError("matrix rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

ProcessModel build_model(const ModelOptions& m) {
  if (m.model == "wiener") return ProcessModel::wiener(m.d);
  if (m.model == "bessel") return ProcessModel::bessel(m.d);
  if (m.model == "ou-scalar") return ProcessModel::ou_scalar(m.a, m.sigma, m.d);
  if (m.model == "ou-radial") return ProcessModel::ou_radial(m.a, m.sigma, m.d);
  if (m.model == "ou-matrix") {
    if (m.drift.empty()) throw DomainError("ou-matrix needs --drift");
    const linalg::Matrix a = to_matrix(parse_matrix(m.drift));
    const linalg::Matrix sigma = m.diffusion.empty()
                                     ? linalg::Matrix::Identity(a.rows(), a.rows())
                                     : to_matrix(parse_matrix(m.diffusion));
    return ProcessModel::ou_matrix(a, sigma);
  }
  throw DomainError("unknown model '" + m.model + "'");
}

struct QuadOptions {
  QuadratureConfig config;
};

void add_quadrature_options(CLI::App* app, QuadOptions& q) {
  app->add_option("--abs-tol", q.config.abs_tol, "quadrature absolute tolerance");
  app->add_option("--rel-tol", q.config.rel_tol, "quadrature relative tolerance");
  app->add_option("--max-subdivisions", q.config.max_subdivisions,
                  "quadrature subdivision limit");
  app->add_option("--truncation-radius", q.config.truncation_radius,
                  "integration window half-width in standard deviations");
}

std::vector<double> state_or_zero(const std::string& text, const ProcessModel& model) {
  if (text.empty()) return std::vector<double>(static_cast<std::size_t>(model.state_dim()), 0.0);
  return parse_vector(text);
}

Construction parse_construction(const std::string& name) {
  if (name == "ratio") return Construction::Ratio;
  if (name == "radial-limit") return Construction::RadialLimit;
  if (name == "closed-form") return Construction::ClosedForm;
  if (name == "ball-limit") return Construction::BallLimit;
  throw DomainError("unknown construction '" + name + "'");
}

// Models exercised by the suites when no --model is given.
struct SuiteModel {
  ProcessModel model;
  double kc_tolerance;
};

std::vector<SuiteModel> standard_models(std::uint64_t seed) {
  std::vector<SuiteModel> out;
  for (int d : {1, 2, 3}) out.push_back({ProcessModel::bessel(d), 1e-7});
  out.push_back({ProcessModel::ou_radial(-0.8, 1.3, 2), 1e-7});
  for (int d : {1, 2, 3}) out.push_back({ProcessModel::wiener(d), 1e-7});
  out.push_back({ProcessModel::ou_scalar(0.5, 0.7, 2), 1e-7});
  out.push_back({random_stable_ou_matrix(2, seed), 1e-6});
  return out;
}

std::vector<Construction> constructions_for(const ProcessModel& model) {
  if (model.is_radial()) {
    std::vector<Construction> c{Construction::ClosedForm, Construction::RadialLimit};
    if (model.dim() == 1) c.push_back(Construction::Ratio);
    return c;
  }
  return {Construction::ClosedForm, Construction::Ratio};
}

struct VerifyOptions {
  std::string suite;
  ModelOptions model;
  QuadOptions quad;
  double horizon = 1.0;
  double t = 0.7;
  std::uint64_t seed = 7;
  std::string out;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* a_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* d_opt = nullptr;
};

void tag(VerificationReport& r, const std::string& suite) { r.params["suite"] = suite; }

std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& o) {
  const QuadratureConfig& quad = o.quad.config;
  quad.validate();
  std::vector<SuiteModel> models;
  if (o.model.model_opt->count() > 0) {
    ProcessModel m = build_model(o.model);
    const double tol = std::holds_alternative<OuMatrix>(m.kind()) ? 1e-6 : 1e-7;
    models.push_back({std::move(m), tol});
  } else if (suite != "commute" && suite != "bessel-identity") {
    models = standard_models(o.seed);
  }

  std::vector<VerificationReport> reports;
  auto add = [&](VerificationReport r) {
    tag(r, suite);
    reports.push_back(std::move(r));
  };
  if (suite == "kc") {
    for (const auto& sm : models) {
      add(kc_report(sm.model, quad, sm.kc_tolerance));
      const auto spec = BridgeSpec::zero_endpoints(sm.model, o.horizon);
      for (Construction c : constructions_for(sm.model)) {
        add(kc_report(BridgeDensity(spec, c), quad, sm.kc_tolerance));
      }
    }
  } else if (suite == "normalization") {
    for (const auto& sm : models) {
      const auto spec = BridgeSpec::zero_endpoints(sm.model, o.horizon);
      for (Construction c : constructions_for(sm.model)) {
        add(normalization_report(BridgeDensity(spec, c), quad));
      }
    }
  } else if (suite == "commute") {
    const bool explicit_params = o.a_opt->count() > 0 || o.sigma_opt->count() > 0 ||
                                 o.d_opt->count() > 0 || o.horizon_opt->count() > 0;
    if (explicit_params) {
      add(commutation_check(o.model.a, o.model.sigma, o.model.d, o.horizon,
                            CommutationGrid::standard(o.horizon)));
    } else {
      struct P {
        double a, sigma;
        int d;
      };
      for (const P& p : {P{0, 1, 1}, P{0, 1, 2}, P{0, 1, 3}, P{-0.8, 1.3, 2}, P{0.5, 0.7, 3}}) {
        for (double horizon : {1.0, 2.0}) {
          add(commutation_check(p.a, p.sigma, p.d, horizon, CommutationGrid::standard(horizon)));
        }
      }
    }
  } else if (suite == "bessel-identity") {
    add(bessel_identity_report(BesselIdentityGrid{}, quad));
  } else if (suite == "lemma-hypotheses") {
    for (const auto& sm : models) {
      add(lemma_kc_hypotheses_check(sm.model, o.t, quad));
      if (sm.model.is_radial()) {
        add(lemma_bessel_bridge_hypotheses_check(sm.model, o.horizon, quad));
      }
    }
  }
  return reports;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
  std::vector<VerificationReport> reports;
  if (o.suite == "all") {
    for (const auto& s : kSuites) {
      if (s == "all") continue;
      auto part = run_suite(s, o);
      for (auto& r : part) reports.push_back(std::move(r));
    }
  } else {
    reports = run_suite(o.suite, o);
  }
  bool pass = true;
  for (const auto& r : reports) {
    out << r.summary() << '\n';
    pass = pass && r.pass;
  }
  if (!o.out.empty()) {
    write_file_atomic(o.out, reports_to_json(reports).dump(2) + "\n");
  }
  return pass ? kOk : kVerificationFailed;
}

}  // namespace

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_number(std::string_view(text).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (true) {
    const std::size_t semi = text.find(';', start);
    rows.push_back(parse_vector(text.substr(
        start, semi == std::string::npos ? std::string::npos : semi - start)));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov bridge densities, identities and exact path sampling", "bridgelab"};
  app.set_config("--config", "", "read flags from a TOML/INI style key = value file");
  app.require_subcommand(1);

  // density
  auto* density = app.add_subcommand("density", "evaluate a transition or bridge density");
  ModelOptions dm;
  add_model_options(density, dm, "--model", true);
  double t = 1.0;
  double s = 0.0;
  double horizon = 1.0;
  std::string x_text;
  std::string y_text;
  std::string end_text;
  std::string construction = "closed-form";
  bool bridge = false;
  density->add_option("-t,--t", t, "time t (duration for base kernels)");
  density->add_option("-x,--x", x_text, "state x, comma separated")->required();
  density->add_option("-y,--y", y_text, "state y, comma separated")->required();
  density->add_flag("--bridge", bridge, "evaluate the bridge kernel p_{s,t}(x, y)");
  density->add_option("-s,--s", s, "bridge start time s");
  density->add_option("-T,--horizon", horizon, "bridge horizon T");
  density->add_option("--end", end_text, "bridge end state b (default 0)");
  density->add_option("--construction", construction, "bridge construction")
      ->check(CLI::IsMember({"ratio", "radial-limit", "closed-form", "ball-limit"}));

  // verify
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  VerifyOptions vo;
  verify->add_option("suite", vo.suite, "suite name")->required()->check(CLI::IsMember(kSuites));
  add_model_options(verify, vo.model, "--model", false);
  vo.a_opt = verify->get_option("--a");
  vo.sigma_opt = verify->get_option("--sigma");
  vo.d_opt = verify->get_option("--dim");
  add_quadrature_options(verify, vo.quad);
  vo.horizon_opt = verify->add_option("-T,--horizon", vo.horizon, "bridge horizon T");
  verify->add_option("--t", vo.t, "time for the kernel hypotheses");
  verify->add_option("--seed", vo.seed, "seed of the random stable drift matrix");
  verify->add_option("--out", vo.out, "write the JSON report here");

  // sample
  auto* sample = app.add_subcommand("sample", "sample zero-endpoint bridge paths");
  ModelOptions sm;
  add_model_options(sample, sm, "--bridge", true);
  double sample_horizon = 1.0;
  int grid_points = 101;
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "paths";
  sample->add_option("-T,--horizon", sample_horizon, "horizon T");
  sample->add_option("--grid", grid_points, "number of equally spaced grid points")
      ->check(CLI::Range(2, 1000000));
  sample->add_option("--paths", paths, "number of paths");
  sample->add_option("--seed", seed, "random seed");
  sample->add_option("--out", out_dir, "output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (density->parsed()) {
      const ProcessModel model = build_model(dm);
      const std::vector<double> x = parse_vector(x_text);
      const std::vector<double> y = parse_vector(y_text);
      double value = 0.0;
      if (bridge) {
        BridgeSpec spec{model, std::vector<double>(static_cast<std::size_t>(model.state_dim()), 0.0),
                        state_or_zero(end_text, model), horizon};
        value = BridgeDensity(spec, parse_construction(construction)).density(s, t, x, y);
      } else {
        value = bridgelab::density(model, t, x, y);
      }
      out << format_g15(value) << '\n';
      return kOk;
    }
    if (verify->parsed()) return cmd_verify(vo, out);
    if (sample->parsed()) {
      const BridgeSpec spec = BridgeSpec::zero_endpoints(build_model(sm), sample_horizon);
      const std::vector<double> times = uniform_grid(sample_horizon, grid_points);
      const auto result = sample_bridge_paths(spec, times, seed, paths);
      write_paths(out_dir, result, spec);
      out << "wrote " << result.size() << " paths to " << out_dir << '\n';
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const InapplicableConstruction& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kUsage;
}

}  // namespace bridgelab::cli
