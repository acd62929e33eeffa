// Microbenchmarks for the hot paths: scalar/vector prox, the gradient step,
// spectral norm estimation, adaptive weight selection, and a full solve.

#include <benchmark/benchmark.h>

#include <random>

#include "quasisparse/experiments.hpp"
#include "quasisparse/fraction_penalty.hpp"
#include "quasisparse/quasilinear.hpp"
#include "quasisparse/solvers.hpp"

using namespace quasisparse;

namespace {

DenseVector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  return v;
}

GeneratedProblem benchmark_problem(int r) {
  ExperimentSpec spec;  // 30 x 100 with the logarithmic shift
  return generate_problem(trial_seed(7777, r, 0), spec, r);
}

void BM_ProxScalar(benchmark::State& state) {
  const PenaltyParams params{2.0, 0.7};
  double gamma = -3.0;
  for (auto _ : state) {
    gamma = gamma >= 3.0 ? -3.0 : gamma + 1e-3;
    benchmark::DoNotOptimize(prox_scalar(params, gamma));
  }
}
BENCHMARK(BM_ProxScalar);

void BM_ProxVector(benchmark::State& state) {
  const PenaltyParams params{1.0, 0.25};
  const DenseVector z = random_vector(state.range(0), 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_vector(params, z));
  }
}
BENCHMARK(BM_ProxVector)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LandweberStep(benchmark::State& state) {
  const GeneratedProblem p = benchmark_problem(3);
  const DenseVector y = random_vector(p.op.cols(), 13);
  for (auto _ : state) {
    benchmark::DoNotOptimize(landweber_step(p.op, y, p.b, 0.01));
  }
}
BENCHMARK(BM_LandweberStep);

void BM_SpectralNormSq(benchmark::State& state) {
  const GeneratedProblem p = benchmark_problem(3);
  const DenseVector y = random_vector(p.op.cols(), 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_norm_sq(p.op, y));
  }
}
BENCHMARK(BM_SpectralNormSq);

void BM_AdaptiveLambda(benchmark::State& state) {
  const DenseVector z = random_vector(state.range(0), 19);
  for (auto _ : state) {
    benchmark::DoNotOptimize(adaptive_lambda(1.0, 0.5, z, 5));
  }
}
BENCHMARK(BM_AdaptiveLambda)->Arg(100)->Arg(1000);

void BM_IftaSolve(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const GeneratedProblem p = benchmark_problem(r);
  SolverConfig cfg;
  cfg.sparsity_prior = r;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ifta_solve(p.op, p.b, cfg));
  }
}
BENCHMARK(BM_IftaSolve)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
