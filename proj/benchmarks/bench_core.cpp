#include <benchmark/benchmark.h>

#include "moire_ssh/eigen_lapack.hpp"
#include "moire_ssh/entanglement.hpp"
#include "moire_ssh/spectral.hpp"
#include "moire_ssh/topology.hpp"

using namespace moire_ssh;

namespace {

ModelParams at_size(benchmark::State& state) {
  return {0.3, 1.27, 1.2, 3, 7, static_cast<int>(state.range(0))};
}

void BM_DenseEigensolve(benchmark::State& state) {
  const auto h = build_hamiltonian(at_size(state), Boundary::Open);
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(h));
  state.counters["sites"] = static_cast<double>(h.matrix.rows());
}

// Lower half of the spectrum from the SVD of the chiral block.
void BM_ChiralSolve(benchmark::State& state) {
  const auto h = build_hamiltonian(at_size(state), Boundary::Open);
  const Eigen::MatrixXd q = lapack::chiral_block(h.matrix);
  for (auto _ : state) benchmark::DoNotOptimize(lapack::chiral_lowest(q));
}

void BM_RealSpaceWinding(benchmark::State& state) {
  const auto p = at_size(state);
  for (auto _ : state) benchmark::DoNotOptimize(real_space_winding(p));
}

void BM_MomentumWinding(benchmark::State& state) {
  const auto p = at_size(state);
  for (auto _ : state) benchmark::DoNotOptimize(momentum_winding(p));
}

void BM_GroundStateCorrelation(benchmark::State& state) {
  const auto p = at_size(state);
  for (auto _ : state) benchmark::DoNotOptimize(ground_state_correlation(p, Boundary::Periodic));
}

void BM_EntanglementSpectrum(benchmark::State& state) {
  const auto p = at_size(state);
  const auto c = ground_state_correlation(p, Boundary::Periodic);
  for (auto _ : state) benchmark::DoNotOptimize(entanglement_spectrum(c, p.cells() / 2));
}

}  // namespace

BENCHMARK(BM_DenseEigensolve)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChiralSolve)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RealSpaceWinding)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
// The k resolution is 64 a12 regardless of length.
BENCHMARK(BM_MomentumWinding)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GroundStateCorrelation)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EntanglementSpectrum)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
