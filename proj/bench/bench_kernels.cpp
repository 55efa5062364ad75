// Serial reference vs OpenMP kernels. Each benchmark takes the mode as its argument
// (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlbvp/examples.hpp"
#include "nlbvp/kernels.hpp"
#include "nlbvp/solver.hpp"
#include "nlbvp/witness.hpp"

using namespace nlbvp;
using kernels::Mode;

namespace {

Mode mode_of(const benchmark::State& state) { return state.range(0) == 0 ? Mode::Serial : Mode::Parallel; }

const solver::DiscreteProblem& problem() {
  static const auto p = solver::assemble(examples::spec("case1"), 0, {256, 512, 12.0});
  return p;
}

const kernels::CsrMatrix& csr() {
  static const auto a = kernels::CsrMatrix::from_eigen(problem().matrix);
  return a;
}

std::vector<double> random_vector(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void BM_Spmv(benchmark::State& state) {
  const auto& a = csr();
  const auto x = random_vector(static_cast<std::size_t>(a.cols));
  std::vector<double> y(static_cast<std::size_t>(a.rows));
  for (auto _ : state) {
    kernels::spmv(a, x, y, mode_of(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(a.val.size()));
}

void BM_ResidualNorm(benchmark::State& state) {
  const auto& a = csr();
  const auto x = random_vector(static_cast<std::size_t>(a.cols));
  const std::vector<double> b(problem().rhs.data(), problem().rhs.data() + problem().rhs.size());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::residual_norm(a, x, b, mode_of(state)));
}

void BM_BatchedDet(benchmark::State& state) {
  const auto m = halfplane_rotation_model(-0.5, -0.5);
  std::vector<pencil::Complex> lambdas;
  for (int i = 0; i < 512; ++i) lambdas.emplace_back(-8.0 + i / 32.0, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::batched_det(m, lambdas, mode_of(state)));
}

void BM_Sweep(benchmark::State& state) {
  std::vector<double> s;
  for (int i = 0; i <= 16; ++i) s.push_back(-3.0 + 0.25 * i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::s_sweep(s, {}, mode_of(state)));
}

void BM_DyadicLevels(benchmark::State& state) {
  const auto m = halfplane_rotation_model(-0.5, -0.5);
  static const auto rep = pencil::analyze(m);
  static const auto w = classifier::witness_singular_function(m, rep.eigenvalues.at(0), 0.03125);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::dyadic_levels([](int l) { return w.w2_level(l); }, 24, mode_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_Spmv)->Arg(0)->Arg(1);
BENCHMARK(BM_ResidualNorm)->Arg(0)->Arg(1);
BENCHMARK(BM_BatchedDet)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DyadicLevels)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
