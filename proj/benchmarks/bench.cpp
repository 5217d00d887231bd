#include "funcctl/criteria.hpp"
#include "funcctl/linalg.hpp"
#include "funcctl/sim.hpp"
#include "funcctl/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace funcctl;

namespace {

Matrix random_matrix(Index rows, Index cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix M(rows, cols);
  for (Index i = 0; i < M.size(); ++i) M(i) = unit(rng);
  return M;
}

criteria::SystemTriple bench_plant() {
  Matrix A(5, 5);
  A << 0.25, 2.25, 0.75, -0.25, 1.50,
      2.25, 0.25, -0.25, 0.75, -1.50,
      1.75, 1.75, 0.25, 1.25, -0.50,
      -1.25, -1.25, 2.25, 1.25, 0.50,
      0, 0, 0, 0, -4.00;
  Matrix B(5, 1);
  B << 2, 0, 0, 0, 0;
  Matrix C(1, 5);
  C << 1, 1, 0, 0, 0;
  return {A, B, C};
}

void BM_NumericalRank(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix M = random_matrix(n, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::numerical_rank(M));
}
BENCHMARK(BM_NumericalRank)->Arg(8)->Arg(20)->Arg(50);

void BM_ControllabilitySubspace(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix A = random_matrix(n, n, 11);
  const Matrix B = random_matrix(n, 2, 13);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::controllability_subspace(A, B));
}
BENCHMARK(BM_ControllabilitySubspace)->Arg(8)->Arg(20)->Arg(50);

void BM_PowerImageBasis(benchmark::State& state) {
  const Index n = state.range(0);
  Matrix A = random_matrix(n, n, 17);
  A.diagonal().array() -= 1.0;
  const Complex lambda = linalg::eigenvalues(A).values.front();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::power_image_basis(A, lambda));
}
BENCHMARK(BM_PowerImageBasis)->Arg(6)->Arg(12)->Arg(24);

void BM_PlacePoles(benchmark::State& state) {
  const Index n = state.range(0);
  Matrix A, B;
  for (unsigned seed = 1;; ++seed) {
    A = random_matrix(n, n, seed);
    B = random_matrix(n, 2, seed + 1000);
    if (linalg::controllability_subspace(A, B).dimension == n) break;
  }
  ComplexSpectrum poles;
  for (Index k = 0; k < n; ++k) poles.values.emplace_back(-1.0 - 0.9 * k, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::place_poles(A, B, poles));
}
BENCHMARK(BM_PlacePoles)->Arg(4)->Arg(6);

void BM_PropertyReport(benchmark::State& state) {
  const auto sys = bench_plant();
  criteria::FunctionalTarget f{(Matrix(1, 5) << 0.5, 0.5, 0.5, 0.5, 0).finished()};
  for (auto _ : state) benchmark::DoNotOptimize(criteria::property_report(sys, f));
}
BENCHMARK(BM_PropertyReport);

void BM_DesignPipeline(benchmark::State& state) {
  const auto sys = bench_plant();
  criteria::FunctionalTarget f{(Matrix(1, 5) << 1.5, 1.5, -0.5, -0.5, 0).finished()};
  for (auto _ : state) {
    const auto aug = synthesis::find_controller_augmentation(sys, f);
    const auto ctrl = synthesis::design_functional_controller(sys, f, aug.R,
                                                              ComplexSpectrum::reals({-3, -5}));
    const auto obs = synthesis::design_functional_observer(sys, f, aug.R,
                                                           ComplexSpectrum::reals({-6, -7}));
    benchmark::DoNotOptimize(synthesis::assemble_separation(sys, ctrl, obs));
  }
}
BENCHMARK(BM_DesignPipeline);

void BM_SimulateRK4(benchmark::State& state) {
  const Matrix Acl = (Matrix(2, 2) << -3, 6, 0, -6).finished();
  sim::SimConfig cfg;
  cfg.t_final = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_lti(Acl, Vector::Ones(2), cfg));
}
BENCHMARK(BM_SimulateRK4)->Arg(1)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
