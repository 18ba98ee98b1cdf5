#include "cahnlab/critical.hpp"
#include "cahnlab/distance.hpp"
#include "cahnlab/energy.hpp"
#include "cahnlab/flow.hpp"
#include "cahnlab/photography.hpp"
#include "cahnlab/profile.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace cahnlab;

namespace {

const SurfaceMesh& icosphere(int k) {
  static const SurfaceMesh meshes[] = {make_icosphere(3), make_icosphere(4), make_icosphere(5)};
  return meshes[k - 3];
}

void BM_Assemble(benchmark::State& state) {
  const auto& mesh = icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh.positions(), mesh.triangles()));
  state.SetLabel(std::to_string(mesh.num_vertices()) + " vertices");
}
BENCHMARK(BM_Assemble)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_Distance(benchmark::State& state) {
  const auto& mesh = icosphere(static_cast<int>(state.range(0)));
  const auto method = state.range(1) ? DistanceMethod::fast_marching : DistanceMethod::graph;
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_distance(mesh, 0, method));
  state.SetLabel(state.range(1) ? "fast marching" : "graph");
}
BENCHMARK(BM_Distance)->ArgsProduct({{3, 4, 5}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Profile(benchmark::State& state) {
  const auto w = DoubleWell::quartic();
  for (auto _ : state) benchmark::DoNotOptimize(build_profile(w, 0.02, 0.0, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Profile)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_Photograph(benchmark::State& state) {
  const auto& mesh = icosphere(5);
  const auto w = DoubleWell::quartic();
  const auto profile = photography_profile(w, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(photograph(mesh, w, 0.02, std::numbers::pi / 2, 0, profile));
}
BENCHMARK(BM_Photograph)->Unit(benchmark::kMillisecond);

void BM_Energy(benchmark::State& state) {
  const auto& mesh = icosphere(5);
  const auto w = DoubleWell::quartic();
  const ScalarField u = ScalarField::Constant(mesh.num_vertices(), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(mesh, w, 0.02, u));
}
BENCHMARK(BM_Energy)->Unit(benchmark::kMicrosecond);

void BM_FlowStep(benchmark::State& state) {
  const auto& mesh = icosphere(static_cast<int>(state.range(0)));
  const auto w = DoubleWell::quartic();
  const ScalarField u = photograph(mesh, w, 0.05, 1.0, 0).field;
  for (auto _ : state) benchmark::DoNotOptimize(semi_implicit_step(mesh, w, 0.05, u, 0.01));
}
BENCHMARK(BM_FlowStep)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const auto& mesh = icosphere(4);
  const auto w = DoubleWell::quartic();
  const ScalarField u0 = photograph(mesh, w, 0.05, 1.0, 0).field;
  for (auto _ : state) benchmark::DoNotOptimize(solve_constrained(mesh, w, 0.05, 1.0, u0));
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

void BM_MorseIndex(benchmark::State& state) {
  const auto& mesh = icosphere(4);
  const auto w = DoubleWell::quartic();
  const ScalarField half = ScalarField::Constant(mesh.num_vertices(), 0.5);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(morse_index(mesh, w, 0.5, half, k));
}
BENCHMARK(BM_MorseIndex)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
