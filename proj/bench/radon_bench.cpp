#include <benchmark/benchmark.h>

#include "incode/ct/radon.hpp"

namespace {

using incode::Matrix;
using incode::ct::Exec;

Exec exec_of(const benchmark::State& state) { return state.range(2) == 0 ? Exec::serial : Exec::parallel; }

void BM_Radon(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto angles = incode::ct::uniform_angles(static_cast<int>(state.range(1)));
  const Matrix image = Matrix::Random(n, n);
  const Exec exec = exec_of(state);
  for (auto _ : state) {
    Matrix sino = incode::ct::radon(image, angles, 0, exec);
    benchmark::DoNotOptimize(sino.data());
  }
}

void BM_RadonAdjoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto angles = incode::ct::uniform_angles(static_cast<int>(state.range(1)));
  const Matrix sino = Matrix::Random(static_cast<Eigen::Index>(angles.size()), incode::ct::default_bins(n));
  const Exec exec = exec_of(state);
  for (auto _ : state) {
    Matrix image = incode::ct::radon_adjoint(sino, angles, n, exec);
    benchmark::DoNotOptimize(image.data());
  }
}

}  // namespace

BENCHMARK(BM_Radon)
    ->ArgNames({"n", "angles", "parallel"})
    ->Args({64, 180, 0})
    ->Args({64, 180, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RadonAdjoint)
    ->ArgNames({"n", "angles", "parallel"})
    ->Args({64, 180, 0})
    ->Args({64, 180, 1})
    ->Unit(benchmark::kMillisecond);
