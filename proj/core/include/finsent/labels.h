#ifndef FINSENT_LABELS_H_
#define FINSENT_LABELS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace finsent {

// Ordinal encoding is part of every file format; never reorder.
enum class Sentiment : std::uint8_t {
  kNegative = 0,
  kNeutral = 1,
  kPositive = 2,
};

inline constexpr std::size_t kNumSentiments = 3;
inline constexpr std::array<Sentiment, kNumSentiments> kAllSentiments = {
    Sentiment::kNegative, Sentiment::kNeutral, Sentiment::kPositive};

constexpr std::size_t index_of(Sentiment s) {
  return static_cast<std::size_t>(s);
}

std::string_view to_string(Sentiment s);

// Case-insensitive, surrounding whitespace ignored.
std::optional<Sentiment> parse_sentiment(std::string_view text);

// Phrasebank files ship one per annotator-agreement threshold.
enum class AgreementLevel : std::uint8_t {
  k50 = 50,
  k66 = 66,
  k75 = 75,
  k100 = 100,
};

std::optional<AgreementLevel> agreement_from_percent(int percent);
int percent_of(AgreementLevel level);

// Guesses the level from a public file name such as "Sentences_66Agree.txt".
std::optional<AgreementLevel> agreement_from_filename(std::string_view name);

enum class RecordSource : std::uint8_t {
  kPhrasebank,
  kConcatRandom,
  kConcatSequential,
  kSynthetic,
};

inline constexpr std::size_t kNumSources = 4;

std::string_view to_string(RecordSource s);
std::optional<RecordSource> parse_source(std::string_view text);

}  // namespace finsent

#endif  // FINSENT_LABELS_H_
