#include <benchmark/benchmark.h>

#include "finsent/evaluation.h"
#include "finsent/random.h"

namespace {

using namespace finsent::eval;

std::vector<PredictionRecord> predictions(std::size_t n) {
  finsent::Rng rng(1);
  std::vector<PredictionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t actual = rng.uniform_below(3);
    const std::size_t predicted = rng.uniform_below(5) == 0 ? rng.uniform_below(3) : actual;
    std::vector<double> probs(3, 0.1);
    probs[predicted] = 0.8;
    out.push_back({"p-" + std::to_string(i), actual, predicted, probs});
  }
  return out;
}

void BM_Evaluate(benchmark::State& state) {
  const auto recs = predictions(static_cast<std::size_t>(state.range(0)));
  const auto names = sentiment_classes();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(recs, names));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Evaluate)->Range(1 << 8, 1 << 18);

void BM_SweepTestSizes(benchmark::State& state) {
  const auto recs = predictions(100000);
  const std::vector<std::size_t> sizes{1000, 5000, 10000, 50000, 100000};
  const auto names = sentiment_classes();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        evaluate_by_test_size(recs, sizes, names, 7, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_SweepTestSizes)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
