// Serial reference kernels against their OpenMP counterparts, plus one full
// Strang step. Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "magzak/initial_data.hpp"
#include "magzak/integrator.hpp"
#include "magzak/kernels.hpp"

namespace {

using magzak::cplx;

struct Data {
  std::vector<cplx> a, b, out;
  std::vector<double> k2;
  explicit Data(std::size_t n) : a(n), b(n), out(n), k2(n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = {nd(rng), nd(rng)};
      b[i] = {nd(rng), nd(rng)};
      k2[i] = std::abs(nd(rng));
    }
  }
};

const auto kSymbol = [](double q) { return 1.0 / (1.0 + 0.01 * q * q); };

template <bool Parallel>
void BM_apply_symbol(benchmark::State& state) {
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      magzak::kernels::omp::apply_symbol(d.k2, d.a, kSymbol);
    else
      magzak::kernels::serial::apply_symbol(d.k2, d.a, kSymbol);
    benchmark::DoNotOptimize(d.a.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_weighted_norm2(benchmark::State& state) {
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double v = Parallel ? magzak::kernels::omp::weighted_norm2(d.k2, d.a, kSymbol)
                        : magzak::kernels::serial::weighted_norm2(d.k2, d.a, kSymbol);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_cross(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Data u(n), v(n);
  std::vector<cplx> w0(n), w1(n), w2(n);
  for (auto _ : state) {
    if constexpr (Parallel)
      magzak::kernels::omp::cross(u.a, u.b, u.out, v.a, v.b, v.out, w0, w1, w2);
    else
      magzak::kernels::serial::cross(u.a, u.b, u.out, v.a, v.b, v.out, w0, w1, w2);
    benchmark::DoNotOptimize(w0.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_sum_abs_pow(benchmark::State& state) {
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double v = Parallel ? magzak::kernels::omp::sum_abs_pow(d.a, 4.0)
                        : magzak::kernels::serial::sum_abs_pow(d.a, 4.0);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_strang_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  omp_set_num_threads(threads);
  magzak::InitialSpec spec;
  spec.n_amplitude = 0.05;
  spec.b_amplitude = 0.05;
  const auto grid = magzak::make_grid(2, n, 16.0 * 3.14159265358979323846);
  magzak::SystemState st = magzak::generate_initial_data(spec, grid, {1.0, 0.1, 2.0}, 1);
  for (auto _ : state) {
    st = magzak::strang_step(st, 1e-3);
    benchmark::DoNotOptimize(st.e[0].data());
  }
  omp_set_num_threads(omp_get_num_procs());
}

constexpr std::int64_t kSmall = 1 << 12, kLarge = 1 << 20;

}  // namespace

BENCHMARK(BM_apply_symbol<false>)->Name("apply_symbol/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_apply_symbol<true>)->Name("apply_symbol/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_weighted_norm2<false>)->Name("weighted_norm2/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_weighted_norm2<true>)->Name("weighted_norm2/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_cross<false>)->Name("cross/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_cross<true>)->Name("cross/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_sum_abs_pow<false>)->Name("sum_abs_pow/serial")->Range(kSmall, kLarge);
BENCHMARK(BM_sum_abs_pow<true>)->Name("sum_abs_pow/omp")->Range(kSmall, kLarge);
BENCHMARK(BM_strang_step)
    ->Name("strang_step")
    ->ArgsProduct({{64, 256}, {1, 2, 4}})
    ->ArgNames({"N", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
