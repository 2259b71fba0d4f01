// Serial reference against the OpenMP kernels. Both sides compute identical
// results; only wall time differs.

#include <benchmark/benchmark.h>

#include "heine/expo.hpp"
#include "heine/harness.hpp"
#include "heine/pade.hpp"
#include "heine/parallel.hpp"

namespace {

using namespace heine;

HeineInstance reference() {
  const Field K = Field::rational();
  auto r = [&](long v) { return FieldElement(K, Rational(v)); };
  return HeineInstance::heine_system(K, RingElement(K, 3), RingElement(K, 1), 1, Poly(K, {r(3)}), {r(1), r(2)});
}

HarnessOptions enum_options() {
  HarnessOptions o;
  o.box = {static_cast<unsigned long>(12)};
  return o;
}

void BM_Enumerate_Serial(benchmark::State& st) {
  const auto inst = reference();
  const auto o = enum_options();
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_forms_serial(inst, o).forms);
}

void BM_Enumerate_Parallel(benchmark::State& st) {
  const auto inst = reference();
  const auto o = enum_options();
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_forms(inst, o).forms);
}

struct SystemInput {
  HeineInstance inst = reference();
  BlockProfile prof = BlockProfile::balanced(2, 20, Rational(1, 5));
  std::vector<SeriesPrefix> pre;
  SystemInput() {
    for (std::size_t i = 0; i < 2; ++i) pre.push_back(series_coefficients(inst, i, prof.Ni(i)));
  }
};

void BM_BuildSystem_Serial(benchmark::State& st) {
  SystemInput in;
  for (auto _ : st) benchmark::DoNotOptimize(build_system_serial(in.inst, in.prof, in.pre).size());
}

void BM_BuildSystem_Parallel(benchmark::State& st) {
  SystemInput in;
  for (auto _ : st) benchmark::DoNotOptimize(build_system(in.inst, in.prof, in.pre).size());
}

void BM_GammaScan_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(f_sign_scan_serial(2, 2, 2000).size());
}

void BM_GammaScan_Parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(f_sign_scan(2, 2, 2000).size());
}

}  // namespace

BENCHMARK(BM_Enumerate_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Enumerate_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildSystem_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildSystem_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GammaScan_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GammaScan_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::AddCustomContext("omp_threads", std::to_string(heine::thread_count()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
