#include "finsent/corpus.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "finsent/error.h"
#include "finsent/random.h"
#include "finsent/text.h"
#include "json.hpp"

namespace finsent::corpus {
namespace {

using ordered_json = nlohmann::ordered_json;

// Split lines on '\n', dropping a trailing '\r'.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::optional<Sentiment> label_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_sentiment(v.get<std::string>());
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0 && i < static_cast<std::int64_t>(kNumSentiments)) {
      return static_cast<Sentiment>(i);
    }
  }
  return std::nullopt;
}

}  // namespace

double CorpusStats::pct(Sentiment s) const {
  switch (s) {
    case Sentiment::kNegative:
      return pct_negative;
    case Sentiment::kNeutral:
      return pct_neutral;
    case Sentiment::kPositive:
      return pct_positive;
  }
  return 0.0;
}

double CorpusStats::rounded_pct(Sentiment s) const {
  return std::round(pct(s) * 10.0) / 10.0;
}

Dataset parse_phrasebank(std::string_view raw, std::string_view encoding) {
  const std::string text = decode_to_utf8(raw, encoding);
  Dataset out;
  std::size_t line_no = 0;
  for (std::string_view line : lines_of(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::size_t at = line.rfind('@');
    if (at == std::string_view::npos) {
      throw MalformedLine(line_no, "no '@' separator");
    }
    const std::string_view sentence = line.substr(0, at);
    const std::string_view label_text = line.substr(at + 1);
    const auto label = parse_sentiment(label_text);
    if (!label) {
      throw MalformedLine(line_no,
                          "unknown label '" + std::string(label_text) + "'");
    }
    if (trim(sentence).empty()) throw MalformedLine(line_no, "empty sentence");
    LabeledSentence rec;
    rec.id = "pb-" + std::to_string(out.size() + 1);
    rec.text = std::string(sentence);
    rec.label = *label;
    rec.source = RecordSource::kPhrasebank;
    out.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_phrasebank(std::span<const LabeledSentence> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.text;
    out.push_back('@');
    out += to_string(r.label);
    out.push_back('\n');
  }
  return out;
}

CorpusStats label_distribution(std::span<const LabeledSentence> records) {
  CorpusStats stats;
  stats.count = records.size();
  for (const auto& r : records) ++stats.class_counts[index_of(r.label)];
  if (stats.count == 0) return stats;
  const double total = static_cast<double>(stats.count);
  auto pct = [&](Sentiment s) {
    return 100.0 * static_cast<double>(stats.class_counts[index_of(s)]) / total;
  };
  stats.pct_negative = pct(Sentiment::kNegative);
  stats.pct_neutral = pct(Sentiment::kNeutral);
  stats.pct_positive = pct(Sentiment::kPositive);
  return stats;
}

DatasetSplit split_dataset(std::span<const LabeledSentence> records,
                           const SplitRatios& ratios, std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (!(ratios.train > 0.0) || !(ratios.validation > 0.0) ||
      !(ratios.test > 0.0) || std::abs(sum - 1.0) > 1e-9) {
    throw InvalidRatios("split ratios must be positive and sum to 1");
  }

  enum class Slot : std::uint8_t { kTrain, kValidation, kTest };
  std::vector<Slot> slot(records.size(), Slot::kTrain);
  Rng rng(seed);

  for (Sentiment s : kAllSentiments) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == s) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t n = members.size();
    // The epsilon keeps e.g. 0.29 * 100 from flooring to 28.
    const auto n_train = std::min(
        n, static_cast<std::size_t>(
               std::floor(static_cast<double>(n) * ratios.train + 1e-9)));
    const std::size_t rest = n - n_train;
    const double val_share =
        ratios.validation / (ratios.validation + ratios.test);
    const auto n_val = std::min(
        rest, static_cast<std::size_t>(
                  std::floor(static_cast<double>(rest) * val_share + 0.5)));
    for (std::size_t k = 0; k < n; ++k) {
      slot[members[k]] = k < n_train           ? Slot::kTrain
                         : k < n_train + n_val ? Slot::kValidation
                                               : Slot::kTest;
    }
  }

  DatasetSplit out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    switch (slot[i]) {
      case Slot::kTrain:
        out.train.push_back(records[i]);
        break;
      case Slot::kValidation:
        out.validation.push_back(records[i]);
        break;
      case Slot::kTest:
        out.test.push_back(records[i]);
        break;
    }
  }
  return out;
}

Dataset ingest_synthetic(std::string_view raw) {
  Dataset out;
  std::unordered_set<std::string> seen;
  std::size_t index = 0;
  for (std::string_view line : lines_of(raw)) {
    if (trim(line).empty()) continue;
    const std::size_t this_index = index++;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw MalformedRecord(this_index, "not a JSON object");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw MalformedRecord(this_index, "missing string field 'text'");
    }
    if (!obj.contains("label")) {
      throw MalformedRecord(this_index, "missing field 'label'");
    }
    const auto label = label_from_json(obj["label"]);
    if (!label) throw MalformedRecord(this_index, "unknown label");
    std::string text = normalize_whitespace(obj["text"].get<std::string>());
    if (text.empty()) throw MalformedRecord(this_index, "empty text");
    if (!is_valid_utf8(text)) throw MalformedRecord(this_index, "invalid UTF-8");
    if (!seen.insert(text).second) continue;
    LabeledSentence rec;
    rec.id = "syn-" + std::to_string(out.size() + 1);
    rec.text = std::move(text);
    rec.label = *label;
    rec.source = RecordSource::kSynthetic;
    out.push_back(std::move(rec));
  }
  return out;
}

MergeResult merge_corpora(std::span<const Dataset> parts) {
  MergeResult result;
  for (const auto& part : parts) {
    for (const auto& rec : part) {
      LabeledSentence copy = rec;
      copy.id = "m-" + std::to_string(result.dataset.size() + 1);
      ++result.source_counts[static_cast<std::size_t>(copy.source)];
      result.dataset.push_back(std::move(copy));
    }
  }
  return result;
}

Dataset dedup_exact(std::span<const LabeledSentence> records) {
  Dataset out;
  std::unordered_set<std::string_view> seen;
  for (const auto& r : records) {
    if (seen.insert(r.text).second) out.push_back(r);
  }
  return out;
}

std::string to_jsonl(std::span<const LabeledSentence> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["text"] = r.text;
    j["label"] = to_string(r.label);
    j["source"] = to_string(r.source);
    if (r.n_tokens) j["n_tokens"] = *r.n_tokens;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

Dataset from_jsonl(std::string_view raw) {
  Dataset out;
  std::size_t index = 0;
  std::unordered_set<std::string> ids;
  for (std::string_view line : lines_of(raw)) {
    if (trim(line).empty()) continue;
    const std::size_t this_index = index++;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw MalformedRecord(this_index, "not a JSON object");
    }
    for (const char* key : {"id", "text", "source"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw MalformedRecord(this_index,
                              std::string("missing string field '") + key + "'");
      }
    }
    if (!obj.contains("label")) {
      throw MalformedRecord(this_index, "missing field 'label'");
    }
    LabeledSentence rec;
    rec.id = obj["id"].get<std::string>();
    rec.text = obj["text"].get<std::string>();
    const auto label = label_from_json(obj["label"]);
    if (!label) throw MalformedRecord(this_index, "unknown label");
    rec.label = *label;
    const auto source = parse_source(obj["source"].get<std::string>());
    if (!source) throw MalformedRecord(this_index, "unknown source");
    rec.source = *source;
    if (obj.contains("n_tokens")) {
      if (!obj["n_tokens"].is_number_unsigned()) {
        throw MalformedRecord(this_index, "n_tokens must be a non-negative integer");
      }
      rec.n_tokens = obj["n_tokens"].get<std::size_t>();
    }
    if (trim(rec.text).empty()) throw MalformedRecord(this_index, "empty text");
    if (!ids.insert(rec.id).second) {
      throw MalformedRecord(this_index, "duplicate id " + rec.id);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace finsent::corpus
