#include <random>

#include <benchmark/benchmark.h>

#include "lcpdl/block_code.hpp"
#include "lcpdl/dictionary_admm.hpp"
#include "lcpdl/locality_graph.hpp"
#include "lcpdl/projection.hpp"
#include "lcpdl/trainer.hpp"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
  return M;
}

void BM_CodeUpdate(benchmark::State& state) {
  const auto Ni = state.range(0);
  const int n = 64, k = 8, c = 10;
  const auto X = gaussian(n, Ni, 1);
  const Eigen::MatrixXd D = lcpdl::project_columns_unit_ball(gaussian(n, k, 2));
  const auto P = gaussian(c * k, n, 3);
  const lcpdl::BlockIndicator Q(c, k);
  const auto L = lcpdl::build_atom_graph(D).laplacian;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lcpdl::update_codes(X, D, P, Q.slice(0), L, 0.01, 0.01, 1e-10));
  }
  state.SetComplexityN(Ni);
}
BENCHMARK(BM_CodeUpdate)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_ProjectionUpdate(benchmark::State& state) {
  const auto N = state.range(0);
  const int n = 64, K = 80, c = 10;
  const auto X = gaussian(n, N, 4);
  const auto B = gaussian(K, N, 5);
  const auto H = gaussian(c, N, 6);
  const auto W = gaussian(c, K, 7);
  const lcpdl::ProjectionSolver solver(X, 1e-8);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(B, H, W, 0.01, 0.1));
  state.SetComplexityN(N);
}
BENCHMARK(BM_ProjectionUpdate)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_DictionaryAdmm(benchmark::State& state) {
  const auto Ni = state.range(0);
  const int n = 64, k = 8;
  const auto X = gaussian(n, Ni, 8);
  const auto A = gaussian(k, Ni, 9);
  const Eigen::MatrixXd D0 = lcpdl::project_columns_unit_ball(gaussian(n, k, 10));
  for (auto _ : state) benchmark::DoNotOptimize(lcpdl::solve_dictionary(X, A, D0));
  state.SetComplexityN(Ni);
}
BENCHMARK(BM_DictionaryAdmm)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_FitIteration(benchmark::State& state) {
  const auto per_class = state.range(0);
  const auto ds = lcpdl::synth_blobs(10, 64, per_class, 8.0, 11);
  lcpdl::Hyperparams hp = lcpdl::preset("cbcl");
  hp.max_outer = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lcpdl::fit(ds, hp));
  state.SetComplexityN(per_class * 10);
}
BENCHMARK(BM_FitIteration)->RangeMultiplier(2)->Range(32, 256)->Complexity()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
