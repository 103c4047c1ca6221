#include <benchmark/benchmark.h>

#include <random>

#include "nlsync/linalg3.hpp"
#include "nlsync/model.hpp"

namespace {

using namespace nlsync;

std::vector<Matrix3> random_matrices(std::size_t count) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  std::vector<Matrix3> out(count);
  for (auto& m : out)
    for (auto& x : m.m) x = dist(rng);
  return out;
}

void BM_Eigenvalues3(benchmark::State& state) {
  const auto ms = random_matrices(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues3(ms[i++ & 1023]));
}
BENCHMARK(BM_Eigenvalues3);

void BM_HurwitzCertificate(benchmark::State& state) {
  const auto ms = random_matrices(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hurwitz_certificate(ms[i++ & 1023]));
}
BENCHMARK(BM_HurwitzCertificate);

void BM_FindEquilibria(benchmark::State& state) {
  const Params p;
  for (auto _ : state) benchmark::DoNotOptimize(find_equilibria(p));
}
BENCHMARK(BM_FindEquilibria)->Unit(benchmark::kMillisecond);

}  // namespace
