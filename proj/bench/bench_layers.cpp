// Throughput comparison between the OpenMP gather-then-dense convolution and
// the serial materialized-kernel reference, plus the sparse linear kernel
// against a dense matrix product of equal output size.

#include <benchmark/benchmark.h>

#include "xnet/layers.hpp"
#include "xnet/rng.hpp"

using namespace xnet;

namespace {

Tensor<double> random_input(std::vector<long long> shape, std::uint64_t seed) {
  Tensor<double> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

XConvLayer conv_layer(int n, int degree) {
  return make_xconv<double>(random_expander(n, n, degree, 7), 3, 1, 1, 8);
}

void BM_XConvFast(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int degree = static_cast<int>(state.range(1));
  XConvLayer layer = conv_layer(n, degree);
  Tensor<double> x = random_input({8, n, 16, 16}, 9);
  for (auto _ : state) {
    Tensor<double> y = xconv_forward_fast(layer, x);
    benchmark::DoNotOptimize(y.data.data());
  }
  state.SetItemsProcessed(state.iterations() * 8LL * n * degree * 9 * 16 * 16);
}

void BM_XConvSparseReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int degree = static_cast<int>(state.range(1));
  XConvLayer layer = conv_layer(n, degree);
  Tensor<double> x = random_input({8, n, 16, 16}, 9);
  for (auto _ : state) {
    Tensor<double> y = xconv_forward_sparse(layer, x);
    benchmark::DoNotOptimize(y.data.data());
  }
  state.SetItemsProcessed(state.iterations() * 8LL * n * degree * 9 * 16 * 16);
}

void BM_XConvBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int degree = static_cast<int>(state.range(1));
  XConvLayer layer = conv_layer(n, degree);
  Tensor<double> x = random_input({8, n, 16, 16}, 9);
  Tensor<double> go = random_input({8, n, 16, 16}, 10);
  Tensor<double> gx, gk;
  for (auto _ : state) {
    xconv_backward(layer, x, go, gx, gk);
    benchmark::DoNotOptimize(gx.data.data());
  }
}

void BM_XLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int degree = static_cast<int>(state.range(1));
  XLinearLayer layer = make_xlinear<double>(random_expander(n, n, degree, 3), 4);
  Tensor<double> x = random_input({64, n}, 5);
  for (auto _ : state) {
    Tensor<double> y = xlinear_forward(layer, x);
    benchmark::DoNotOptimize(y.data.data());
  }
  state.SetItemsProcessed(state.iterations() * 64LL * n * degree);
}

void BM_DenseLinear(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  XLinearLayer layer = make_xlinear<double>(dense_graph(n, n), 4);
  Tensor<double> x = random_input({64, n}, 5);
  for (auto _ : state) {
    Tensor<double> y = xlinear_forward(layer, x);
    benchmark::DoNotOptimize(y.data.data());
  }
  state.SetItemsProcessed(state.iterations() * 64LL * n * n);
}

}  // namespace

BENCHMARK(BM_XConvFast)->Args({64, 8})->Args({128, 16})->Args({256, 16});
BENCHMARK(BM_XConvSparseReference)->Args({64, 8})->Args({128, 16});
BENCHMARK(BM_XConvBackward)->Args({64, 8})->Args({128, 16});
BENCHMARK(BM_XLinear)->Args({1024, 64})->Args({4096, 64});
BENCHMARK(BM_DenseLinear)->Args({1024})->Args({4096});

BENCHMARK_MAIN();
