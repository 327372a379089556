#include <benchmark/benchmark.h>

#include <vector>

#include "bridgelab/bridges.hpp"
#include "bridgelab/sample.hpp"
#include "bridgelab/specfun.hpp"
#include "bridgelab/verify.hpp"

namespace {

using namespace bridgelab;

void BM_BesselScaled(benchmark::State& state) {
  const BesselOrder nu(static_cast<double>(state.range(0)) / 2.0);
  double z = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_i_scaled(nu, z));
    z = z < 60.0 ? z * 1.1 : 0.1;
  }
}
BENCHMARK(BM_BesselScaled)->Arg(0)->Arg(1)->Arg(6);

void BM_RadialKernel(benchmark::State& state) {
  const Transition p = ProcessModel::ou_radial(-0.8, 1.3, 3).at(0.7);
  double y = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(p.density(1.2, y));
    y = y < 5.0 ? y + 0.01 : 0.01;
  }
}
BENCHMARK(BM_RadialKernel);

void BM_MatrixExp(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const linalg::Matrix a = random_stable_ou_matrix(static_cast<int>(d), 3).drift_matrix();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::matrix_exp(a, 1.7));
}
BENCHMARK(BM_MatrixExp)->Arg(2)->Arg(4)->Arg(8);

void BM_Gramian(benchmark::State& state) {
  const ProcessModel m = random_stable_ou_matrix(2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        linalg::gramian_vt(m.drift_matrix(), m.diffusion_matrix(), 0.9).log_det());
  }
}
BENCHMARK(BM_Gramian);

void BM_RadialBridgeClosedForm(benchmark::State& state) {
  double y = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(radial_bridge_density(-0.8, 1.3, 3, 2.0, 0.2, 1.0, 1.1, y));
    y = y < 5.0 ? y + 0.01 : 0.01;
  }
}
BENCHMARK(BM_RadialBridgeClosedForm);

void BM_RadialStepTable(benchmark::State& state) {
  const BridgeDensity bridge(BridgeSpec::zero_endpoints(ProcessModel::ou_radial(-1, 1, 2), 1.0),
                             Construction::ClosedForm);
  for (auto _ : state) {
    RadialStepTable table(bridge, 0.2, 0.3, 0.8);
    benchmark::DoNotOptimize(table.total_mass());
  }
}
BENCHMARK(BM_RadialStepTable)->Unit(benchmark::kMillisecond);

void BM_RadialQuantile(benchmark::State& state) {
  const BridgeDensity bridge(BridgeSpec::zero_endpoints(ProcessModel::ou_radial(-1, 1, 2), 1.0),
                             Construction::ClosedForm);
  const RadialStepTable table(bridge, 0.0, 0.5, 0.0);
  RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(table.quantile(rng.uniform()));
}
BENCHMARK(BM_RadialQuantile);

void BM_GaussianBridgePath(benchmark::State& state) {
  const auto spec = BridgeSpec::zero_endpoints(ProcessModel::ou_scalar(-1, 1, 3), 1.0);
  const auto grid = uniform_grid(1.0, 101);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gaussian_bridge_path(spec, grid, 42, stream++).states.size());
  }
}
BENCHMARK(BM_GaussianBridgePath)->Unit(benchmark::kMillisecond);

void BM_KcBessel(benchmark::State& state) {
  const ProcessModel m = ProcessModel::bessel(3);
  const QuadratureConfig quad;
  const std::vector<double> x{1.0};
  const std::vector<double> z{2.0};
  for (auto _ : state) benchmark::DoNotOptimize(kc_check(m, 0.3, 0.7, x, z, quad).residual);
}
BENCHMARK(BM_KcBessel)->Unit(benchmark::kMicrosecond);

void BM_KcWiener3(benchmark::State& state) {
  const ProcessModel m = ProcessModel::wiener(3);
  const QuadratureConfig quad;
  const std::vector<double> x{0.2, -0.1, 0.4};
  const std::vector<double> z{0.5, 0.3, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(kc_check(m, 0.3, 0.7, x, z, quad).residual);
}
BENCHMARK(BM_KcWiener3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
