#ifndef FINSENT_NSP_DATASET_H_
#define FINSENT_NSP_DATASET_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace finsent::nsp {

struct ParagraphDoc {
  std::string doc_id;
  std::vector<std::string> sentences;
};

enum class NspLabel : std::uint8_t { kNotNext = 0, kIsNext = 1 };

struct SentencePair {
  std::string sentence_a;
  std::string sentence_b;
  NspLabel label = NspLabel::kIsNext;
  // Index of sentence_a within doc_a. For positives doc_b == doc_a; for
  // negatives doc_b is the document sentence_b was drawn from.
  std::size_t doc_a = 0;
  std::size_t doc_b = 0;
  std::size_t position = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Documents are separated by blank lines. Sentences end at '.', '!' or '?'
// (optionally followed by closing quotes or brackets) when followed by
// whitespace and an upper-case letter, or by end of text. Periods closing a
// known abbreviation ("Mr.", "Inc.", ...) or a single-letter initial never
// end a sentence.
std::vector<ParagraphDoc> segment_corpus(std::string_view raw);

// True when `word` (including its trailing '.') is on the guard list.
bool is_guarded_abbreviation(std::string_view word);

// Exactly target_count/2 positives (distinct adjacent pairs) and as many
// negatives. Negative i reuses positive i's A-side and takes its B-side from
// another adjacent pair, never the true successor of A nor A itself. The
// combined list is shuffled by `seed`.
// Throws InvalidSize for an odd or zero target and InsufficientCorpus when
// the corpus cannot supply the requested pairs.
std::vector<SentencePair> generate_pairs(std::span<const ParagraphDoc> docs,
                                         std::size_t target_count,
                                         std::uint64_t seed);

// Shard i is generated with seed + i and outputs are concatenated in shard
// order. `jobs` bounds the number of shards generated at once.
std::vector<SentencePair> generate_pairs_sharded(
    std::span<const std::vector<ParagraphDoc>> shards,
    std::size_t target_per_shard, std::uint64_t seed, std::size_t jobs = 1);

struct PairSplit {
  std::vector<SentencePair> train;
  std::vector<SentencePair> test;
};

// Label-stratified hold-out. Each label contributes test slots in proportion
// to its share (largest remainder); both outputs are shuffled by `seed`.
// Throws InvalidSize unless test_size < pairs.size().
PairSplit hold_out_pairs(std::span<const SentencePair> pairs,
                         std::size_t test_size, std::uint64_t seed);

// One JSON object per line: sentence_a, sentence_b, label (0/1).
std::string to_jsonl(std::span<const SentencePair> pairs);

}  // namespace finsent::nsp

#endif  // FINSENT_NSP_DATASET_H_
