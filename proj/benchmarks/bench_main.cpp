#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "roomreg/dense_linalg.hpp"
#include "roomreg/pipeline.hpp"

using namespace roomreg;

namespace {

Mat random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = d(rng);
  return m;
}

Mat stable_matrix(int n, unsigned seed) {
  const Mat A = random_matrix(n, n, seed);
  return A - (spectral_abscissa(A) + 1.0) * Mat::Identity(n, n);
}

void BM_AssembleLinearForms(benchmark::State& state) {
  const FemSpaces s = build_spaces(build_mesh(reference_room(), static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_linear_forms(s, PhysicalParams{}));
}
BENCHMARK(BM_AssembleLinearForms)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Lyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat A = stable_matrix(n, 1);
  const Mat B = random_matrix(n, 3, 2);
  const Mat W = B * B.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(A, W));
}
BENCHMARK(BM_Lyapunov)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_Care(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  // Few unstable modes near the axis, as in the room models.
  const Mat R = random_matrix(n, n, 3) / std::sqrt(double(n));
  const Mat A = R - (spectral_abscissa(R) - 0.2) * Mat::Identity(n, n);
  const Mat B = random_matrix(n, 3, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_care(A, Mat(), B, Mat::Identity(n, n), Mat::Identity(3, 3)));
}
BENCHMARK(BM_Care)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_BalancedTruncation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mat A = stable_matrix(n, 5);
  const Mat B = random_matrix(n, 6, 6), C = random_matrix(3, n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(balanced_truncate(A, Mat(), B, C, 20));
}
BENCHMARK(BM_BalancedTruncation)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_UnstableSpectrumPenalty(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FemSpaces s = build_spaces(build_mesh(reference_room(), n));
  const LinearForms f = assemble_linear_forms(s, PhysicalParams{});
  const int n_x = s.n_v + s.n_t;
  const InputMatrices in{Mat::Zero(n_x, 1), Mat::Zero(n_x, 1)};
  const SaddlePointPlant p = linearize(s, f, SteadyState::zero(s), in, Mat::Zero(1, n_x));
  const PenaltyPlant pp = eliminate_pressure_penalty(p, 1e-5);
  EigenOptions o;
  o.dense_threshold = 0;
  for (auto _ : state) benchmark::DoNotOptimize(unstable_spectrum(pp.sys.A, pp.sys.E, 0.5, o));
}
BENCHMARK(BM_UnstableSpectrumPenalty)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
