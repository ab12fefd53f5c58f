#include <benchmark/benchmark.h>

#include <filesystem>

#include "finsent/concatenation.h"
#include "finsent/io.h"
#include "finsent/nsp_dataset.h"
#include "finsent/random.h"

namespace {

using namespace finsent;

std::vector<nsp::ParagraphDoc> docs(std::size_t n_docs, std::size_t per_doc) {
  std::vector<nsp::ParagraphDoc> out;
  for (std::size_t d = 0; d < n_docs; ++d) {
    nsp::ParagraphDoc doc{"d-" + std::to_string(d), {}};
    for (std::size_t i = 0; i < per_doc; ++i) {
      doc.sentences.push_back("Sentence " + std::to_string(i) + " of document " +
                              std::to_string(d) + " .");
    }
    out.push_back(std::move(doc));
  }
  return out;
}

void BM_SegmentNewsSample(benchmark::State& state) {
  const std::string text = read_file(std::filesystem::path(FINSENT_REPO_DATA_DIR) /
                                     "news_sample" / "financial_news.txt");
  for (auto _ : state) benchmark::DoNotOptimize(nsp::segment_corpus(text));
}
BENCHMARK(BM_SegmentNewsSample)->Unit(benchmark::kMicrosecond);

void BM_GeneratePairs(benchmark::State& state) {
  const auto corpus = docs(5000, 6);
  const auto target = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nsp::generate_pairs(corpus, target, 42));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratePairs)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_SequentialGateMock(benchmark::State& state) {
  std::vector<std::string> sentences;
  for (int i = 0; i < 6; ++i) sentences.push_back("Net sales rose " + std::to_string(i) + " .");
  scoring::MockNspScorer scorer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(concat::predict_multiple_nsp(sentences, true, scorer));
  }
}
BENCHMARK(BM_SequentialGateMock);

}  // namespace
