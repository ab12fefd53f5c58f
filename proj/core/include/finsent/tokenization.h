#ifndef FINSENT_TOKENIZATION_H_
#define FINSENT_TOKENIZATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "finsent/corpus.h"

namespace finsent::tokenization {

inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kContinuationPrefix = "##";

// Immutable token table; line number in the source file is the id.
class Vocabulary {
 public:
  // One token per line, UTF-8. Throws DuplicateToken or MissingUnk.
  static Vocabulary load(std::string_view raw);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;
  std::optional<std::int32_t> id_of(std::string_view token) const;
  const std::string& token_at(std::int32_t id) const;

  bool has_cls() const { return has_cls_; }
  bool has_sep() const { return has_sep_; }
  bool has_pad() const { return has_pad_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t, Hash, std::equal_to<>> ids_;
  bool has_cls_ = false;
  bool has_sep_ = false;
  bool has_pad_ = false;
};

struct TokenizerOptions {
  bool lower_case = true;
  bool strip_accents = true;
  std::size_t max_word_chars = 100;
};

// Basic BERT pre-tokenization: drop control characters, space out CJK
// ideographs, lower-case and strip accents, split on whitespace and on
// punctuation (each punctuation mark its own piece).
std::vector<std::string> basic_tokenize(std::string_view text,
                                        const TokenizerOptions& options = {});

class WordPieceTokenizer {
 public:
  explicit WordPieceTokenizer(Vocabulary vocab, TokenizerOptions options = {});

  // Basic split followed by greedy longest-match-first subwords. A word with
  // no full cover, or longer than max_word_chars code points, becomes [UNK].
  std::vector<std::string> tokenize(std::string_view text) const;

  // Tokens without specials, plus 2 for [CLS]/[SEP] when requested.
  std::size_t token_count(std::string_view text, bool include_special) const;

  const Vocabulary& vocab() const { return vocab_; }
  const TokenizerOptions& options() const { return options_; }

 private:
  Vocabulary vocab_;
  TokenizerOptions options_;
};

std::vector<std::string> wordpiece_tokenize(std::string_view text,
                                            const Vocabulary& vocab);
std::size_t token_count(std::string_view text, const Vocabulary& vocab,
                        bool include_special);

struct HistogramReport {
  std::size_t bin_width = 1;
  std::vector<std::size_t> bin_edges;  // bin_edges[i] is the start of bin i
  std::vector<std::size_t> bin_counts;
  std::size_t n = 0;
  std::size_t min_tokens = 0;
  std::size_t max_tokens = 0;
  double mean_tokens = 0.0;

  // Header `bin_start,bin_end,count`, one row per bin, then a "# summary" row.
  std::string to_csv() const;
};

// Bins [0,w), [w,2w), ... up to the bin holding the maximum.
// Throws ValidationError when bin_width is 0.
HistogramReport histogram_of_counts(std::span<const std::size_t> counts,
                                    std::size_t bin_width);

// Counts exclude special tokens unless requested.
HistogramReport length_histogram(std::span<const corpus::LabeledSentence> dataset,
                                 const WordPieceTokenizer& tokenizer,
                                 std::size_t bin_width,
                                 bool include_special = false);

}  // namespace finsent::tokenization

#endif  // FINSENT_TOKENIZATION_H_
