#include "finsent/tokenization.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "finsent/error.h"
#include "finsent/text.h"

namespace finsent::tokenization {
namespace {

bool is_whitespace(UChar32 c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return true;
  return u_charType(c) == U_SPACE_SEPARATOR;
}

bool is_control(UChar32 c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  switch (u_charType(c)) {
    case U_CONTROL_CHAR:
    case U_FORMAT_CHAR:
    case U_UNASSIGNED:
    case U_PRIVATE_USE_CHAR:
    case U_SURROGATE:
      return true;
    default:
      return false;
  }
}

bool is_punctuation(UChar32 c) {
  // All non-alphanumeric ASCII counts, e.g. '$' and '^'.
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

bool is_cjk(UChar32 c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2B73F) ||
         (c >= 0x2B740 && c <= 0x2B81F) || (c >= 0x2B820 && c <= 0x2CEAF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

std::string to_utf8(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

icu::UnicodeString strip_marks(const icu::UnicodeString& word) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFD unavailable");
  icu::UnicodeString decomposed = nfd->normalize(word, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  icu::UnicodeString out;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    if (u_charType(c) != U_NON_SPACING_MARK) out.append(c);
    i = decomposed.moveIndex32(i, 1);
  }
  return out;
}

void split_on_punctuation(const icu::UnicodeString& word,
                          std::vector<std::string>& out) {
  icu::UnicodeString current;
  for (int32_t i = 0; i < word.length();) {
    const UChar32 c = word.char32At(i);
    if (is_punctuation(c)) {
      if (!current.isEmpty()) {
        out.push_back(to_utf8(current));
        current.remove();
      }
      out.push_back(to_utf8(icu::UnicodeString(c)));
    } else {
      current.append(c);
    }
    i = word.moveIndex32(i, 1);
  }
  if (!current.isEmpty()) out.push_back(to_utf8(current));
}

// Byte offsets of each code point start plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  offsets.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

}  // namespace

Vocabulary Vocabulary::load(std::string_view raw) {
  Vocabulary v;
  for (std::string_view line : split(raw, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    v.tokens_.emplace_back(line);
  }
  // A final newline is a terminator, not an empty token.
  if (!v.tokens_.empty() && v.tokens_.back().empty()) v.tokens_.pop_back();
  v.ids_.reserve(v.tokens_.size());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (!v.ids_.emplace(v.tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw DuplicateToken(v.tokens_[i]);
    }
  }
  if (!v.contains(kUnkToken)) throw MissingUnk();
  v.has_cls_ = v.contains(kClsToken);
  v.has_sep_ = v.contains(kSepToken);
  v.has_pad_ = v.contains(kPadToken);
  return v;
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.find(token) != ids_.end();
}

std::optional<std::int32_t> Vocabulary::id_of(std::string_view token) const {
  const auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token_at(std::int32_t id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

std::vector<std::string> basic_tokenize(std::string_view text,
                                        const TokenizerOptions& options) {
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  icu::UnicodeString cleaned;
  for (int32_t i = 0; i < input.length();) {
    const UChar32 c = input.char32At(i);
    i = input.moveIndex32(i, 1);
    if (c == 0 || c == 0xFFFD || is_control(c)) continue;
    if (is_whitespace(c)) {
      cleaned.append(UChar32{' '});
    } else if (is_cjk(c)) {
      cleaned.append(UChar32{' '}).append(c).append(UChar32{' '});
    } else {
      cleaned.append(c);
    }
  }

  std::vector<std::string> out;
  int32_t start = -1;
  auto flush_word = [&](int32_t end) {
    if (start < 0) return;
    icu::UnicodeString word(cleaned, start, end - start);
    if (options.lower_case) word.toLower(icu::Locale::getRoot());
    if (options.strip_accents) word = strip_marks(word);
    split_on_punctuation(word, out);
    start = -1;
  };
  for (int32_t i = 0; i < cleaned.length(); ++i) {
    if (cleaned.charAt(i) == u' ') {
      flush_word(i);
    } else if (start < 0) {
      start = i;
    }
  }
  flush_word(cleaned.length());
  return out;
}

namespace {

void split_word(const std::string& word, const Vocabulary& vocab,
                const TokenizerOptions& options, std::vector<std::string>& out) {
  const std::vector<std::size_t> offsets = code_point_offsets(word);
  const std::size_t n_chars = offsets.size() - 1;
  if (n_chars > options.max_word_chars) {
    out.emplace_back(kUnkToken);
    return;
  }
  std::vector<std::string> pieces;
  std::string candidate;
  std::size_t start = 0;
  while (start < n_chars) {
    std::size_t end = n_chars;
    bool found = false;
    while (start < end) {
      candidate.clear();
      if (start > 0) candidate += kContinuationPrefix;
      candidate.append(word, offsets[start], offsets[end] - offsets[start]);
      if (vocab.contains(candidate)) {
        found = true;
        break;
      }
      --end;
    }
    if (!found) {
      out.emplace_back(kUnkToken);
      return;
    }
    pieces.push_back(candidate);
    start = end;
  }
  for (auto& p : pieces) out.push_back(std::move(p));
}

std::vector<std::string> tokenize_with(std::string_view text,
                                       const Vocabulary& vocab,
                                       const TokenizerOptions& options) {
  std::vector<std::string> out;
  for (const std::string& word : basic_tokenize(text, options)) {
    split_word(word, vocab, options, out);
  }
  return out;
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(Vocabulary vocab,
                                       TokenizerOptions options)
    : vocab_(std::move(vocab)), options_(options) {}

std::vector<std::string> WordPieceTokenizer::tokenize(
    std::string_view text) const {
  return tokenize_with(text, vocab_, options_);
}

std::size_t WordPieceTokenizer::token_count(std::string_view text,
                                            bool include_special) const {
  return tokenize(text).size() + (include_special ? 2 : 0);
}

std::vector<std::string> wordpiece_tokenize(std::string_view text,
                                            const Vocabulary& vocab) {
  return tokenize_with(text, vocab, TokenizerOptions{});
}

std::size_t token_count(std::string_view text, const Vocabulary& vocab,
                        bool include_special) {
  return tokenize_with(text, vocab, TokenizerOptions{}).size() +
         (include_special ? 2 : 0);
}

std::string HistogramReport::to_csv() const {
  std::ostringstream out;
  out << "bin_start,bin_end,count\n";
  for (std::size_t i = 0; i < bin_counts.size(); ++i) {
    out << bin_edges[i] << ',' << bin_edges[i] + bin_width << ','
        << bin_counts[i] << '\n';
  }
  char mean[32];
  std::snprintf(mean, sizeof(mean), "%.6f", mean_tokens);
  out << "# summary: n=" << n << " min=" << min_tokens << " max=" << max_tokens
      << " mean=" << mean << '\n';
  return out.str();
}

HistogramReport histogram_of_counts(std::span<const std::size_t> counts,
                                    std::size_t bin_width) {
  if (bin_width == 0) throw ValidationError("bin_width must be >= 1");
  HistogramReport h;
  h.bin_width = bin_width;
  h.n = counts.size();
  if (counts.empty()) return h;
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  h.min_tokens = *lo;
  h.max_tokens = *hi;
  const std::size_t total =
      std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  h.mean_tokens = static_cast<double>(total) / static_cast<double>(h.n);
  const std::size_t n_bins = h.max_tokens / bin_width + 1;
  h.bin_counts.assign(n_bins, 0);
  for (std::size_t i = 0; i < n_bins; ++i) h.bin_edges.push_back(i * bin_width);
  for (std::size_t c : counts) ++h.bin_counts[c / bin_width];
  return h;
}

HistogramReport length_histogram(
    std::span<const corpus::LabeledSentence> dataset,
    const WordPieceTokenizer& tokenizer, std::size_t bin_width,
    bool include_special) {
  std::vector<std::size_t> counts;
  counts.reserve(dataset.size());
  for (const auto& rec : dataset) {
    counts.push_back(tokenizer.token_count(rec.text, include_special));
  }
  return histogram_of_counts(counts, bin_width);
}

}  // namespace finsent::tokenization
