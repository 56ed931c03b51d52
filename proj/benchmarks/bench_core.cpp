#include <benchmark/benchmark.h>

#include "echolab/echo.hpp"
#include "echolab/oracle.hpp"

using namespace echolab;

static void BM_BuildGammaF(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const Mat F = random_symplectic(d, 7, 1.2).m;
  for (auto _ : state) benchmark::DoNotOptimize(build_GammaF(F));
}
BENCHMARK(BM_BuildGammaF)->Arg(1)->Arg(2)->Arg(3);

static void BM_RandomSymplectic(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(random_symplectic(2, seed++, 1.5).m);
}
BENCHMARK(BM_RandomSymplectic);

static void BM_EvolveQuartic(benchmark::State& state) {
  const auto model = quartic_model();
  const PhaseVector z = phase_point(1.0, 0.0);
  const auto times = uniform_times(static_cast<double>(state.range(0)), 16);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(model, z, times).points.back());
}
BENCHMARK(BM_EvolveQuartic)->Arg(5)->Arg(20);

static void BM_FidelityLeading(benchmark::State& state) {
  const auto h0 = quartic_model();
  const auto hd = perturbed_model(h0, quadratic_q_perturbation(), 0.02);
  const auto times = uniform_times(3.0, 60);
  for (auto _ : state)
    benchmark::DoNotOptimize(fidelity_leading(h0, hd, phase_point(1, 0), times, 0.05).values);
}
BENCHMARK(BM_FidelityLeading);

static void BM_SplitStep(benchmark::State& state) {
  const auto model = anharmonic_model(1.0);
  Grid1D g;
  g.q_min = -6.0;
  g.q_max = 6.0;
  g.n_points = static_cast<int>(state.range(0));
  g.hbar = 0.05;
  const auto psi = discretize_coherent(phase_point(0.6, 0.0), g);
  for (auto _ : state)
    benchmark::DoNotOptimize(split_step_propagate(model, psi, 0.5, 1000).samples);
}
BENCHMARK(BM_SplitStep)->Arg(1024)->Arg(4096);

static void BM_MatrixElement(benchmark::State& state) {
  const Mat F = random_symplectic(1, 3, 1.0).m;
  const PhaseVector X = phase_point(0.4, -0.2), Y = phase_point(-0.1, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_element(F, X, Y));
}
BENCHMARK(BM_MatrixElement);

static void BM_Autocorrelation(benchmark::State& state) {
  std::vector<double> e(400);
  for (int n = 0; n < 400; ++n) {
    const double f = 0.001 * (n + 0.5);
    e[n] = f + 0.5 * f * f;
  }
  const auto lad =
      ladder_from_energies(0.001, 0, std::move(e), 0.2, LadderSource::explicit_formula);
  WavepacketSpec spec;
  spec.center_energy = lad.ref_energy();
  spec.form = CoeffForm::index_gaussian;
  const auto coeffs = wavepacket_coefficients(lad, spec);
  const auto times = uniform_times(50.0, 1000);
  for (auto _ : state)
    benchmark::DoNotOptimize(autocorrelation(lad, coeffs, times, 0.001).rho);
}
BENCHMARK(BM_Autocorrelation);

static void BM_Eigensolve(benchmark::State& state) {
  Grid1D g;
  g.q_min = -4.0;
  g.q_max = 4.0;
  g.n_points = static_cast<int>(state.range(0));
  g.hbar = 0.05;
  const auto model = quartic_model();
  for (auto _ : state)
    benchmark::DoNotOptimize(eigenvalues_1d(model, 0.05, g, 20));
}
BENCHMARK(BM_Eigensolve)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_WignerTransform(benchmark::State& state) {
  Grid1D g;
  g.q_min = -10.0;
  g.q_max = 10.0;
  g.n_points = 1024;
  g.hbar = 1.0;
  const auto psi = discretize_coherent(phase_point(0.5, -0.5), g);
  for (auto _ : state) benchmark::DoNotOptimize(wigner_transform(psi).w);
}
BENCHMARK(BM_WignerTransform)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
