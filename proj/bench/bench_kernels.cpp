#include "waist/cloud_index.hpp"
#include "waist/conical.hpp"
#include "waist/kernels.hpp"
#include "waist/norm.hpp"
#include "waist/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace waist;

template <bool Parallel>
void BM_FillConical(benchmark::State& state) {
  const Norm norm = Norm::lp(4.0, 5);
  const auto count = static_cast<std::size_t>(state.range(0));
  std::vector<double> out(count * 5);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::fill_conical(norm, ConicalMethod::exact, 1, streams::samples, 0, count, out);
    else
      kernels::serial::fill_conical(norm, ConicalMethod::exact, 1, streams::samples, 0, count, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_CountNear(benchmark::State& state) {
  const Norm norm = Norm::euclidean(3);
  const auto fiber = fiber_points(norm, last_coordinates_map(3, 1), Eigen::VectorXd::Zero(1), 10000, 2);
  const CloudIndex index(norm, fiber.coords);
  const auto count = static_cast<std::size_t>(state.range(0));
  std::vector<double> pts(count * 3);
  kernels::omp::fill_conical(norm, ConicalMethod::exact, 3, streams::samples, 0, count, pts);
  for (auto _ : state) {
    std::uint64_t hits = Parallel ? kernels::omp::count_near(index, pts, 0.5) : kernels::serial::count_near(index, pts, 0.5);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_ConicalRejection(benchmark::State& state) {
  const Norm norm = Norm::lp(1.5, 4);
  const auto count = static_cast<std::size_t>(state.range(0));
  const Indicator orthant = [](std::span<const double> x) { return x[0] > 0 && x[1] > 0; };
  for (auto _ : state) {
    const auto hits = Parallel
                          ? kernels::omp::count_conical_if(norm, ConicalMethod::rejection, 4, streams::samples, count, orthant)
                          : kernels::serial::count_conical_if(norm, ConicalMethod::rejection, 4, streams::samples, count, orthant);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FillConical<false>)->Name("fill_conical/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_FillConical<true>)->Name("fill_conical/omp")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_CountNear<false>)->Name("count_near/serial")->Arg(1 << 16);
BENCHMARK(BM_CountNear<true>)->Name("count_near/omp")->Arg(1 << 16);
BENCHMARK(BM_ConicalRejection<false>)->Name("count_conical_if/serial")->Arg(1 << 16);
BENCHMARK(BM_ConicalRejection<true>)->Name("count_conical_if/omp")->Arg(1 << 16);

BENCHMARK_MAIN();
