// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include "hasqa/config.hpp"
#include "hasqa/kernels.hpp"
#include "hasqa/pipeline.hpp"
#include "hasqa/rng.hpp"
#include "hasqa/synthetic.hpp"

using namespace hasqa;

namespace {

Tensor randomMatrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(r, c);
  for (double& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = randomMatrix(n, n, 1), b = randomMatrix(n, n, 2);
  Tensor c(n, n);
  const kernels::GemmShape shape{n, n, n};
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::gemm(shape, a.data(), b.data(), c.data(), false);
    else
      kernels::gemmSerial(shape, a.data(), b.data(), c.data(), false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <bool Parallel>
void BM_RowSoftmax(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor logits = randomMatrix(n, n, 3);
  Tensor out(n, n);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::rowSoftmax(logits, nullptr, out);
    else
      kernels::rowSoftmaxSerial(logits, nullptr, out);
    benchmark::DoNotOptimize(out.data());
  }
}

struct PredictFixture {
  Dataset data;
  Model model;
  InferenceConfig config;
  PredictFixture() {
    const RunConfig rc = loadRunConfig(std::string(HASQA_CONFIG_DIR) + "/desk.json");
    SyntheticConfig sc = loadSyntheticConfig(std::string(HASQA_CONFIG_DIR) + "/synthetic_test.json");
    sc.numExamples = 20;
    data = generateSynthetic(sc);
    model = buildModel(rc.encoder, Vocabulary::fromDataset(data), rc.train.seed);
    config = inferenceConfig(rc.train);
  }
};

const PredictFixture& predictFixture() {
  static const PredictFixture f;
  return f;
}

template <bool Parallel>
void BM_PredictDataset(benchmark::State& state) {
  const PredictFixture& f = predictFixture();
  for (auto _ : state) {
    auto out = Parallel ? predictDataset(f.data, f.model, f.config) : predictDatasetSerial(f.data, f.model, f.config);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.size()));
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Name("gemm/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_Gemm<true>)->Name("gemm/omp")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_RowSoftmax<false>)->Name("rowSoftmax/serial")->Arg(64)->Arg(400);
BENCHMARK(BM_RowSoftmax<true>)->Name("rowSoftmax/omp")->Arg(64)->Arg(400);
BENCHMARK(BM_PredictDataset<false>)->Name("predictDataset/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictDataset<true>)->Name("predictDataset/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
