#include "bridgelab/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bridgelab/report.hpp"

namespace bridgelab::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bridgelab_cli_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Density, WienerPeak) {
  const auto r = run({"density", "--model", "wiener", "-d", "1", "-t", "1", "-x", "0", "-y", "0"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "0.398942280401433\n");
}

TEST(Density, BesselAtZero) {
  const auto r = run({"density", "--model", "bessel", "-d", "2", "-t", "1", "-x", "0.5", "-y", "0"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "0\n");
}

TEST(Density, VectorStatesAndBridge) {
  const auto r = run({"density", "--model", "wiener", "-d", "1", "--bridge", "-s", "0", "-t", "0.5",
                      "-T", "1", "-x", "0", "-y", "0"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, "0.797884560802865\n");
  const auto v = run({"density", "--model", "ou-matrix", "--drift", "-1,0;0,-1", "-t", "1", "-x",
                      "0,0", "-y", "0,0"});
  EXPECT_EQ(v.code, kOk);
}

TEST(Density, Errors) {
  EXPECT_EQ(run({"density", "--model", "nope", "-t", "1", "-x", "0", "-y", "0"}).code, kUsage);
  EXPECT_EQ(run({"density", "--model", "wiener", "-t", "-1", "-x", "0", "-y", "0"}).code, kDomain);
  EXPECT_EQ(run({"density", "--model", "bessel", "-d", "2", "-t", "1", "-x", "-1", "-y", "0"}).code,
            kDomain);
  EXPECT_EQ(run({"density", "--model", "bessel", "-d", "3", "--bridge", "--construction", "ratio",
                 "-s", "0", "-t", "0.5", "-x", "1", "-y", "1"})
                .code,
            kDomain);
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"--help"}).code, kOk);
}

TEST(Verify, DocumentedCommands) {
  EXPECT_EQ(run({"verify", "commute", "--a", "-0.8", "--sigma", "1.3", "-d", "3", "-T", "2"}).code, kOk);
  EXPECT_EQ(run({"verify", "bessel-identity"}).code, kOk);
  const auto kc = run({"verify", "kc", "--model", "bessel", "-d", "3"});
  EXPECT_EQ(kc.code, kOk);
  EXPECT_NE(kc.out.find("PASS"), std::string::npos);
}

TEST(Verify, ReportFileIsDeterministic) {
  const fs::path dir = scratch("verify");
  fs::create_directories(dir);
  const std::vector<std::string> args{"verify", "commute", "--a", "0.5", "--sigma", "0.7", "-d", "1",
                                      "--out", (dir / "a.json").string()};
  ASSERT_EQ(run(args).code, kOk);
  auto again = args;
  again.back() = (dir / "b.json").string();
  ASSERT_EQ(run(again).code, kOk);
  const std::string a = slurp(dir / "a.json");
  EXPECT_EQ(a, slurp(dir / "b.json"));
  const Json j = Json::parse(a);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j["pass"].get<bool>());
  fs::remove_all(dir);
}

TEST(Verify, FailingCheckExitsOne) {
  const fs::path dir = scratch("fail");
  fs::create_directories(dir);
  const auto r = run({"verify", "kc", "--model", "bessel", "-d", "2", "--rel-tol", "1e-16", "--abs-tol", "1e-300",
                      "--max-subdivisions", "2", "--out",
                      (dir / "r.json").string()});
  EXPECT_EQ(r.code, kVerificationFailed);
  ASSERT_TRUE(fs::exists(dir / "r.json"));
  const Json j = Json::parse(slurp(dir / "r.json"));
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_FALSE(j["reports"][0]["failures"].empty());
  fs::remove_all(dir);
}

TEST(Verify, ConfigFile) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.toml");
    cfg << "[verify]\na = 0.5\nsigma = 0.7\ndim = 3\nhorizon = 1\n";
  }
  const auto r = run({"--config", (dir / "run.toml").string(), "verify", "commute"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("PASS commutation"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Sample, WienerPathsPinnedAndDeterministic) {
  const fs::path a = scratch("sample_a");
  const fs::path b = scratch("sample_b");
  const std::vector<std::string> base{"sample", "--bridge", "wiener", "-d", "2", "-T", "1", "--grid",
                                      "101", "--paths", "10", "--seed", "42", "--out"};
  auto args = base;
  args.push_back(a.string());
  ASSERT_EQ(run(args).code, kOk);
  args.back() = b.string();
  ASSERT_EQ(run(args).code, kOk);
  for (int i = 0; i < 10; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%04d", i);
    const std::string csv = slurp(a / (std::string(name) + ".csv"));
    EXPECT_EQ(csv, slurp(b / (std::string(name) + ".csv")));
    EXPECT_EQ(slurp(a / (std::string(name) + ".json")), slurp(b / (std::string(name) + ".json")));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,dim0,dim1");
    EXPECT_NE(csv.find("\n0,0,0\n"), std::string::npos);
    EXPECT_EQ(csv.substr(csv.rfind('\n', csv.size() - 2) + 1), "1,0,0\n");
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Sample, RadialNonnegative) {
  const fs::path dir = scratch("sample_radial");
  ASSERT_EQ(run({"sample", "--bridge", "ou-radial", "--a", "-1", "--sigma", "1", "-d", "3", "--grid",
                 "21", "--paths", "3", "--seed", "1", "--out", dir.string()})
                .code,
            kOk);
  std::ifstream f(dir / "path_0002.csv");
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "time,r");
  while (std::getline(f, line)) EXPECT_GE(std::stod(line.substr(line.find(',') + 1)), 0.0);
  fs::remove_all(dir);
}

TEST(Parsers, VectorsAndMatrices) {
  EXPECT_EQ(parse_vector("1, -2.5,3e-1"), (std::vector<double>{1.0, -2.5, 0.3}));
  const auto m = parse_matrix("1,2;3,4");
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[1], (std::vector<double>{3.0, 4.0}));
  EXPECT_ANY_THROW(parse_vector("1,x"));
}

}  // namespace
}  // namespace bridgelab::cli
