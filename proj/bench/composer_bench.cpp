// Serial reference vs OpenMP kernels for the composer and the radon operator.

#include <benchmark/benchmark.h>

#include "incode/nn/composer.hpp"

namespace {

using incode::Matrix;
using incode::nn::ActivationParams;
using incode::nn::ComposerConfig;
using incode::nn::ComposerNetwork;
using incode::nn::Exec;

struct Setup {
  ComposerNetwork net;
  Matrix coords;
  Matrix grad;
  ActivationParams params = ActivationParams::from_raw({0.31, 0.31, 0.31, 0.31});

  Setup(Eigen::Index batch, int width) {
    incode::Rng rng(1);
    net = ComposerNetwork(ComposerConfig{2, 3, 5, width, 30.0, 30.0}, rng);
    coords = Matrix::Random(batch, 2);
    grad = Matrix::Random(batch, 3);
  }
};

Exec exec_of(const benchmark::State& state) {
  return state.range(2) == 0 ? Exec::serial : Exec::parallel;
}

void BM_ComposerForward(benchmark::State& state) {
  Setup s(state.range(0), static_cast<int>(state.range(1)));
  const Exec exec = exec_of(state);
  incode::nn::ForwardTrace trace;
  for (auto _ : state) {
    incode::nn::composer_forward(s.net, s.coords, s.params, trace, exec);
    benchmark::DoNotOptimize(trace.output.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ComposerForwardBackward(benchmark::State& state) {
  Setup s(state.range(0), static_cast<int>(state.range(1)));
  const Exec exec = exec_of(state);
  incode::nn::ForwardTrace trace;
  for (auto _ : state) {
    incode::nn::composer_forward(s.net, s.coords, s.params, trace, exec);
    auto grads = incode::nn::composer_backward(trace, s.net, s.params, s.grad, false, exec);
    benchmark::DoNotOptimize(grads.effective.a);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ComposerForward)
    ->ArgNames({"batch", "width", "parallel"})
    ->Args({1024, 64, 0})
    ->Args({1024, 64, 1})
    ->Args({4096, 128, 0})
    ->Args({4096, 128, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ComposerForwardBackward)
    ->ArgNames({"batch", "width", "parallel"})
    ->Args({1024, 64, 0})
    ->Args({1024, 64, 1})
    ->Args({4096, 128, 0})
    ->Args({4096, 128, 1})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
