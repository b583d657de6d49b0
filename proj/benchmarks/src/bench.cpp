// Hot-path benchmarks: shortest-path rows, slice calculus, smoothing, warped
// construction, and the Poincare eigensolve.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mms/analysis.hpp"
#include "mms/corpus.hpp"
#include "mms/products.hpp"
#include "mms/rng.hpp"
#include "mms/space.hpp"
#include "mms/tensorize.hpp"

namespace {

using namespace mms;

// Above the dense-cache size cap, so every row is a fresh Dijkstra pass.
void BM_DistanceRow(benchmark::State& state) {
  static const FiniteSpace s = FiniteSpace::interval(1.0, 6000);
  int c = 0;
  for (auto _ : state) {
    auto row = s.distance_row(c);
    benchmark::DoNotOptimize(row);
    c = (c + 997) % s.size();
  }
}
BENCHMARK(BM_DistanceRow)->Unit(benchmark::kMillisecond);

void BM_ProductLip(benchmark::State& state) {
  static const FiniteSpace x = FiniteSpace::interval(1.0, 100);
  static const ProductSpace p = ProductSpace::cartesian(x, x);
  static const std::vector<double> f = named_field(p, "sincos");
  for (auto _ : state) {
    auto lip = product_local_lip(p, f);
    benchmark::DoNotOptimize(lip);
  }
}
BENCHMARK(BM_ProductLip)->Unit(benchmark::kMillisecond);

void BM_Smooth(benchmark::State& state) {
  static const FiniteSpace x = FiniteSpace::interval(1.0, 150);
  static const ProductSpace p = ProductSpace::cartesian(x, x);
  static const std::vector<double> f = [] {
    Rng rng(7);
    return cascade_tensor_sum(x, x, rng).evaluate(p);
  }();
  for (auto _ : state) {
    SmoothResult r = smooth(p, f, 8);
    benchmark::DoNotOptimize(r.field);
  }
}
BENCHMARK(BM_Smooth)->Unit(benchmark::kMillisecond);

void BM_WarpedConeBuild(benchmark::State& state) {
  static const FiniteSpace theta = FiniteSpace::circle(6.283185307179586, 200);
  static const FiniteSpace radial = FiniteSpace::interval(1.0, 100);
  static const std::vector<double> t = axis_positions(radial);
  for (auto _ : state) {
    ProductSpace cone = ProductSpace::warped(theta, radial, WarpSpec::make(radial, t, t));
    benchmark::DoNotOptimize(cone.size());
  }
}
BENCHMARK(BM_WarpedConeBuild)->Unit(benchmark::kMillisecond);

void BM_Poincare(benchmark::State& state) {
  static const FiniteSpace s = FiniteSpace::interval(1.0, 201);
  for (auto _ : state) {
    PoincareReport rep = poincare_constant(s, 100, s.diameter() / 2.0, 1.0);
    benchmark::DoNotOptimize(rep.c_p);
  }
}
BENCHMARK(BM_Poincare)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
