// Serial reference vs OpenMP direct sum vs FFT for one convolution sweep.
#include <benchmark/benchmark.h>

#include <random>

#include "nlfb/nonlocal_ops.hpp"

using namespace nlfb;

namespace {

void run_path(benchmark::State& state, const KernelSpec& spec, double dx, ConvPath path) {
  const NonlocalOperator op(make_kernel(spec), dx);
  const auto n = static_cast<std::int64_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> f(static_cast<size_t>(n)), out(f.size());
  for (double& v : f) v = uni(rng);
  const std::int64_t first = -n / 2;
  op.reserve(n);
  for (auto _ : state) {
    op.convolve(f, first, std::nullopt, first, first + n - 1, out, path);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_LaplaceSerial(benchmark::State& s) { run_path(s, LaplaceSpec{1.0}, 0.1, ConvPath::Serial); }
void BM_LaplaceDirect(benchmark::State& s) { run_path(s, LaplaceSpec{1.0}, 0.1, ConvPath::Direct); }
void BM_LaplaceFft(benchmark::State& s) { run_path(s, LaplaceSpec{1.0}, 0.1, ConvPath::Fft); }
void BM_PowerLawSerial(benchmark::State& s) { run_path(s, PowerLawSpec{1.5, 1.0}, 0.25, ConvPath::Serial); }
void BM_PowerLawDirect(benchmark::State& s) { run_path(s, PowerLawSpec{1.5, 1.0}, 0.25, ConvPath::Direct); }
void BM_PowerLawFft(benchmark::State& s) { run_path(s, PowerLawSpec{1.5, 1.0}, 0.25, ConvPath::Fft); }

}  // namespace

BENCHMARK(BM_LaplaceSerial)->Arg(2000)->Arg(20000);
BENCHMARK(BM_LaplaceDirect)->Arg(2000)->Arg(20000);
BENCHMARK(BM_LaplaceFft)->Arg(2000)->Arg(20000);
BENCHMARK(BM_PowerLawSerial)->Arg(4000)->Arg(16000);
BENCHMARK(BM_PowerLawDirect)->Arg(4000)->Arg(16000);
BENCHMARK(BM_PowerLawFft)->Arg(4000)->Arg(16000);

BENCHMARK_MAIN();
