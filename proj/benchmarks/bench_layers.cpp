#include <benchmark/benchmark.h>

#include "htmlphish/layers.hpp"
#include "htmlphish/rng.hpp"
#include "htmlphish/tensor.hpp"

namespace {

using namespace htmlphish::nn;

Tensor uniform_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-0.5, 0.5);
  return t;
}

// Arguments: sequence length, embedding width, filters. Kernel 8 throughout.
void BM_Conv1dForward(benchmark::State& state) {
  Rng rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto f = static_cast<std::size_t>(state.range(2));
  const auto input = uniform_tensor({len, d}, rng);
  const auto filters = uniform_tensor({f, 8, d}, rng);
  const auto bias = uniform_tensor({f}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_forward(input, filters, bias));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>((len - 7) * f * 8 * d));
}
BENCHMARK(BM_Conv1dForward)->Args({260, 16, 8})->Args({2180, 100, 32})->Unit(benchmark::kMillisecond);

void BM_Conv1dBackward(benchmark::State& state) {
  Rng rng(2);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto f = static_cast<std::size_t>(state.range(2));
  const auto input = uniform_tensor({len, d}, rng);
  const auto filters = uniform_tensor({f, 8, d}, rng);
  const auto grad_out = uniform_tensor({len - 7, f}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv1d_backward(input, filters, grad_out));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>((len - 7) * f * 8 * d));
}
BENCHMARK(BM_Conv1dBackward)->Args({260, 16, 8})->Args({2180, 100, 32})->Unit(benchmark::kMillisecond);

}  // namespace
