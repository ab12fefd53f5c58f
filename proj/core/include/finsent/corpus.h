#ifndef FINSENT_CORPUS_H_
#define FINSENT_CORPUS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsent/labels.h"

namespace finsent::corpus {

struct LabeledSentence {
  std::string id;
  std::string text;
  Sentiment label = Sentiment::kNeutral;
  RecordSource source = RecordSource::kPhrasebank;
  // Token count including [CLS]/[SEP]; set by the concatenation builders.
  std::optional<std::size_t> n_tokens;

  friend bool operator==(const LabeledSentence&,
                         const LabeledSentence&) = default;
};

using Dataset = std::vector<LabeledSentence>;

struct CorpusStats {
  std::size_t count = 0;
  std::array<std::size_t, kNumSentiments> class_counts{};
  // Exact 100 * class_count / count; zero for an empty corpus.
  double pct_negative = 0.0;
  double pct_neutral = 0.0;
  double pct_positive = 0.0;

  double pct(Sentiment s) const;
  // Reporting precision: one decimal.
  double rounded_pct(Sentiment s) const;
};

inline constexpr std::string_view kDefaultEncoding = "iso-8859-1";

// Parses the `<sentence>@<label>` line format. The sentence is everything
// before the last '@'. Blank lines are skipped; ids are "pb-<n>" in file order.
// Throws MalformedLine (1-based line numbers) or EncodingError.
Dataset parse_phrasebank(std::string_view raw,
                         std::string_view encoding = kDefaultEncoding);

// Inverse of parse_phrasebank for UTF-8 input.
std::string serialize_phrasebank(std::span<const LabeledSentence> records);

CorpusStats label_distribution(std::span<const LabeledSentence> records);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Stratified by label. For each class of size n: train takes floor(n*train),
// the remainder goes to validation/test in proportion (validation rounds
// half up). Membership is seeded; each split keeps input order.
// Throws InvalidRatios.
DatasetSplit split_dataset(std::span<const LabeledSentence> records,
                           const SplitRatios& ratios, std::uint64_t seed);

// Line-delimited JSON with "text" and "label". Whitespace-normalized,
// exact duplicates dropped (first kept), source=synthetic, ids "syn-<n>".
// Throws MalformedRecord with the 0-based index of the non-blank record.
Dataset ingest_synthetic(std::string_view raw);

struct MergeResult {
  Dataset dataset;
  std::array<std::size_t, kNumSources> source_counts{};
};

// Concatenates parts in order and re-assigns ids as "m-<n>".
MergeResult merge_corpora(std::span<const Dataset> parts);

// Drops later records whose text equals an earlier one.
Dataset dedup_exact(std::span<const LabeledSentence> records);

// Interchange format: one JSON object per line with keys id, text, label,
// source and optional n_tokens.
std::string to_jsonl(std::span<const LabeledSentence> records);
// Throws MalformedRecord (0-based line index among non-blank lines).
Dataset from_jsonl(std::string_view raw);

}  // namespace finsent::corpus

#endif  // FINSENT_CORPUS_H_
