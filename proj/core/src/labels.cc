#include "finsent/labels.h"

#include "finsent/text.h"

namespace finsent {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::kNegative:
      return "negative";
    case Sentiment::kNeutral:
      return "neutral";
    case Sentiment::kPositive:
      return "positive";
  }
  return "unknown";
}

std::optional<Sentiment> parse_sentiment(std::string_view text) {
  const std::string lowered = ascii_lower(trim(text));
  for (Sentiment s : kAllSentiments) {
    if (lowered == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<AgreementLevel> agreement_from_percent(int percent) {
  switch (percent) {
    case 50:
      return AgreementLevel::k50;
    case 66:
      return AgreementLevel::k66;
    case 75:
      return AgreementLevel::k75;
    case 100:
      return AgreementLevel::k100;
    default:
      return std::nullopt;
  }
}

int percent_of(AgreementLevel level) { return static_cast<int>(level); }

std::optional<AgreementLevel> agreement_from_filename(std::string_view name) {
  const std::string lowered = ascii_lower(name);
  if (lowered.find("allagree") != std::string::npos) return AgreementLevel::k100;
  if (lowered.find("75agree") != std::string::npos) return AgreementLevel::k75;
  if (lowered.find("66agree") != std::string::npos) return AgreementLevel::k66;
  if (lowered.find("50agree") != std::string::npos) return AgreementLevel::k50;
  return std::nullopt;
}

std::string_view to_string(RecordSource s) {
  switch (s) {
    case RecordSource::kPhrasebank:
      return "phrasebank";
    case RecordSource::kConcatRandom:
      return "concat_random";
    case RecordSource::kConcatSequential:
      return "concat_sequential";
    case RecordSource::kSynthetic:
      return "synthetic";
  }
  return "unknown";
}

std::optional<RecordSource> parse_source(std::string_view text) {
  for (RecordSource s :
       {RecordSource::kPhrasebank, RecordSource::kConcatRandom,
        RecordSource::kConcatSequential, RecordSource::kSynthetic}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

}  // namespace finsent
