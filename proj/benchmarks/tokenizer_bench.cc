#include <benchmark/benchmark.h>

#include <filesystem>

#include "finsent/io.h"
#include "finsent/tokenization.h"

namespace {

using finsent::tokenization::Vocabulary;
using finsent::tokenization::WordPieceTokenizer;

const WordPieceTokenizer& tokenizer() {
  static const WordPieceTokenizer tok(Vocabulary::load(finsent::read_file(
      std::filesystem::path(FINSENT_REPO_DATA_DIR) / "vocab" / "bert-base-uncased-vocab.txt")));
  return tok;
}

void BM_VocabularyLoad(benchmark::State& state) {
  const std::string raw = finsent::read_file(std::filesystem::path(FINSENT_REPO_DATA_DIR) /
                                             "vocab" / "bert-base-uncased-vocab.txt");
  for (auto _ : state) benchmark::DoNotOptimize(Vocabulary::load(raw));
}
BENCHMARK(BM_VocabularyLoad)->Unit(benchmark::kMillisecond);

void BM_TokenizeSentence(benchmark::State& state) {
  const std::string text =
      "Operating profit of Nordic Steel Inc. rose to EUR 13.1 mn from EUR 8.7 mn in the "
      "corresponding period in 2007 , representing 7.7 % of net sales .";
  const auto& tok = tokenizer();
  for (auto _ : state) benchmark::DoNotOptimize(tok.tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_TokenizeSentence);

void BM_TokenizeNewsSample(benchmark::State& state) {
  const std::string text = finsent::read_file(std::filesystem::path(FINSENT_REPO_DATA_DIR) /
                                              "news_sample" / "financial_news.txt");
  const auto& tok = tokenizer();
  for (auto _ : state) benchmark::DoNotOptimize(tok.token_count(text, false));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_TokenizeNewsSample)->Unit(benchmark::kMicrosecond);

}  // namespace
