// Serial reference vs OpenMP for the per-sample kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "sparse_ocp/conditions.hpp"
#include "sparse_ocp/manufactured.hpp"
#include "sparse_ocp/parallel.hpp"
#include "sparse_ocp/random_fields.hpp"

using namespace sparse_ocp;

namespace {

const StationaryInstance& instance() {
  static const StationaryInstance inst = build_stationary_instance(
      {.grid = SpaceTimeGrid(1, 40, 40, 1.0),
       .op = OperatorA::laplacian(1),
       .f = OddPolynomial{{0.0, 0.0, 1.0}},
       .mu = 0.1,
       .alpha = -1.0,
       .beta = 1.0,
       .phi_bar = {.kind = FieldRecipe::Kind::Sine, .amplitude = 0.3, .time_poly = {1.0, -2.0}}});
  return inst;
}

double hessian_at(const ConeAnalyzer& cones, std::size_t i) {
  auto rng = sample_stream(1, i);
  const Field z = cones.point().linearized(random_field(cones.point().spec().grid, rng));
  return cones.point().hess(z, z);
}

void BM_HessianSerial(benchmark::State& state) {
  const ConeAnalyzer cones(instance().spec, instance().u_bar, instance().phi_bar);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(n);
  for (auto _ : state) {
    for_each_index_serial(n, [&](std::size_t i) { out[i] = hessian_at(cones, i); });
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_HessianOpenMP(benchmark::State& state) {
  const ConeAnalyzer cones(instance().spec, instance().u_bar, instance().phi_bar);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  std::vector<double> out(n);
  for (auto _ : state) {
    for_each_index(n, workers, [&](std::size_t i) { out[i] = hessian_at(cones, i); });
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_CoercivityCampaign(benchmark::State& state) {
  const ConeAnalyzer cones(instance().spec, instance().u_bar, instance().phi_bar);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ssc_report(cones, {.kind = ConeKind::Ctau, .tau = 0.1}, 64, 1, workers).min_ratio);
}

}  // namespace

BENCHMARK(BM_HessianSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HessianOpenMP)->Args({64, 1})->Args({64, 2})->Args({64, 4})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoercivityCampaign)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
