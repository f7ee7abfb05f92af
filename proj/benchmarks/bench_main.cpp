#include <benchmark/benchmark.h>

#include <vector>

#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/attention.hpp"
#include "mascot/numerics/ops.hpp"
#include "mascot/numerics/rng.hpp"
#include "mascot/numerics/tape.hpp"

using namespace mascot;

namespace {

Tensor noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.normal();
  return Tensor({rows, cols}, std::move(v));
}

// 16 frames of 17 tokens, d = 64, 4 heads: one spatial layer of a toy batch.
void BM_AttentionForward(benchmark::State& state) {
  const std::size_t T = 17, G = 16, d = 64;
  const Tensor q = noise(G * T, d, 1), k = noise(G * T, d, 2), v = noise(G * T, d, 3);
  std::vector<double> gate;
  if (state.range(0)) {
    const std::size_t masked[] = {1, 4, 9, 12};
    gate = masking::spatial_interaction_mask(masking::patch_flags(masked, T - 1)).u;
  }
  for (auto _ : state) {
    auto r = multi_head_attention(q, k, v, 4, T, gate, GateMode::kRenormalized);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_AttentionForward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_AttentionBackward(benchmark::State& state) {
  const std::size_t T = 17, G = 16, d = 64;
  const Tensor q = noise(G * T, d, 1), k = noise(G * T, d, 2), v = noise(G * T, d, 3);
  for (auto _ : state) {
    Tape tape;
    const Tensor tq = tape.variable(q), tk = tape.variable(k), tv = tape.variable(v);
    const auto r = multi_head_attention(tq, tk, tv, 4, T, {}, GateMode::kPostSoftmax);
    benchmark::DoNotOptimize(tape.backward(sum(r.context)));
  }
}
BENCHMARK(BM_AttentionBackward)->Unit(benchmark::kMicrosecond);

void BM_TrainingStep(benchmark::State& state) {
  colearning::RunConfig cfg;
  const auto& m = cfg.model;
  const auto ds = data::gen_dataset(64, 0, {m.n_frames, m.image_height, m.image_width});
  colearning::Trainer trainer(cfg, ds);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.step());
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond)->Iterations(5);

}  // namespace

BENCHMARK_MAIN();
