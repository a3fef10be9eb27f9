// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "psh/bergman.hpp"
#include "psh/kernels.hpp"
#include "psh/potential.hpp"

namespace {

using namespace psh;
using kernels::cplx;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Exec mode_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_WeightedSum(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const auto v = random_vector(n, 1), w = random_vector(n, 2);
  const Exec m = mode_of(s);
  for (auto _ : s) benchmark::DoNotOptimize(kernels::weighted_sum(v, w, m));
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_WeightedSum)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}});

void BM_Gram(benchmark::State& s) {
  const auto points = static_cast<std::size_t>(s.range(0));
  const std::size_t nb = 15;
  const auto re = random_vector(points * nb, 3), im = random_vector(points * nb, 4), w = random_vector(points, 5);
  std::vector<cplx> basis(points * nb);
  for (std::size_t i = 0; i < basis.size(); ++i) basis[i] = {re[i], im[i]};
  std::vector<cplx> g(nb * nb);
  const Exec m = mode_of(s);
  for (auto _ : s) {
    kernels::gram(basis, nb, w, g, m);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_Gram)->ArgsProduct({{1 << 12, 1 << 15}, {0, 1}});

void BM_GreenSolve(benchmark::State& s) {
  const double h = 1.0 / static_cast<double>(s.range(0));
  const std::vector<double> c = {0.0, 0.0, 0.0};
  auto dom = GridDomain::ball(c, 1.0, h, Dimension::real(3));
  // full CG solve: stencil applications dominate
  GreenProblem gp{dom, Measure::point(c, 4 * h)};
  const Exec m = mode_of(s);
  for (auto _ : s) benchmark::DoNotOptimize(green_potential(gp, m).iterations);
}
BENCHMARK(BM_GreenSolve)->ArgsProduct({{16, 24}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_KernelDiag(benchmark::State& s) {
  const std::vector<double> o = {0.0, 0.0};
  auto dom = GridDomain::ball(o, 1.0, 1.0 / static_cast<double>(s.range(0)), Dimension::complex(1));
  BergmanProblem p{dom, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }, 8,
                   Normalization::lebesgue};
  const Exec m = mode_of(s);
  for (auto _ : s) benchmark::DoNotOptimize(BergmanKernel(p, m).diag(o).value);
}
BENCHMARK(BM_KernelDiag)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
