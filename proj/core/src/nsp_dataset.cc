#include "finsent/nsp_dataset.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <exception>
#include <numeric>
#include <thread>

#include "finsent/error.h"
#include "finsent/random.h"
#include "finsent/text.h"
#include "json.hpp"

namespace finsent::nsp {
namespace {

constexpr std::array<std::string_view, 48> kAbbreviations = {
    "mr.",   "mrs.",  "ms.",   "dr.",    "prof.", "inc.",  "ltd.",  "corp.",
    "co.",   "plc.",  "jr.",   "sr.",    "st.",   "vs.",   "etc.",  "e.g.",
    "i.e.",  "no.",   "nos.",  "approx.", "est.", "dept.", "jan.",  "feb.",
    "mar.",  "apr.",  "jun.",  "jul.",   "aug.",  "sep.",  "sept.", "oct.",
    "nov.",  "dec.",  "eur.",  "usd.",   "mn.",   "bn.",   "mln.",  "oy.",
    "oyj.",  "ab.",   "ag.",   "n.v.",   "s.a.",  "u.s.",  "u.k.",  "gen.",
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

bool starts_upper(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return false;
  UChar32 c = 0;
  auto i = static_cast<int32_t>(pos);
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), i,
          static_cast<int32_t>(s.size()), c);
  return c >= 0 && u_isupper(c);
}

// Initials and dotted acronyms: "J.", "U.S.", "A.B.".
bool is_initialism(std::string_view word) {
  if (word.size() < 2 || word.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < word.size(); i += 2) {
    const auto c = static_cast<unsigned char>(word[i]);
    if (!std::isalpha(c) || word[i + 1] != '.') return false;
  }
  return true;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const std::string_view s = trim(text.substr(start, end - start));
    if (!s.empty()) out.emplace_back(s);
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_closer(text[j])) ++j;
    bool boundary = false;
    if (j == text.size()) {
      boundary = true;
    } else if (is_space(text[j])) {
      std::size_t k = j;
      while (k < text.size() && is_space(text[k])) ++k;
      if (k < text.size() && is_opener(text[k])) ++k;
      boundary = starts_upper(text, k);
    }
    if (boundary && c == '.') {
      std::size_t w = i;
      while (w > start && !is_space(text[w - 1])) --w;
      const std::string_view word = text.substr(w, i + 1 - w);
      if (is_guarded_abbreviation(word)) boundary = false;
    }
    if (boundary) {
      emit(j);
      i = j - 1;
    }
  }
  emit(text.size());
  return out;
}

struct Adjacent {
  std::size_t doc;
  std::size_t pos;
};

}  // namespace

bool is_guarded_abbreviation(std::string_view word) {
  // Strip leading punctuation such as an opening parenthesis.
  while (!word.empty() && (is_opener(word.front()))) word.remove_prefix(1);
  if (is_initialism(word)) return true;
  const std::string lowered = ascii_lower(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) !=
         kAbbreviations.end();
}

std::vector<ParagraphDoc> segment_corpus(std::string_view raw) {
  std::vector<ParagraphDoc> docs;
  std::string paragraph;
  auto flush = [&] {
    const std::string text = normalize_whitespace(paragraph);
    paragraph.clear();
    if (text.empty()) return;
    ParagraphDoc doc;
    doc.sentences = split_sentences(text);
    if (doc.sentences.empty()) return;
    doc.doc_id = "doc-" + std::to_string(docs.size() + 1);
    docs.push_back(std::move(doc));
  };
  for (std::string_view line : split(raw, '\n')) {
    if (trim(line).empty()) {
      flush();
    } else {
      paragraph += line;
      paragraph.push_back(' ');
    }
  }
  flush();
  return docs;
}

std::vector<SentencePair> generate_pairs(std::span<const ParagraphDoc> docs,
                                         std::size_t target_count,
                                         std::uint64_t seed) {
  if (target_count == 0 || target_count % 2 != 0) {
    throw InvalidSize("target_count must be even and positive");
  }
  const std::size_t half = target_count / 2;

  std::vector<Adjacent> adjacent;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t p = 0; p + 1 < docs[d].sentences.size(); ++p) {
      adjacent.push_back({d, p});
    }
  }
  if (adjacent.size() < 2 || adjacent.size() < half) {
    throw InsufficientCorpus("corpus has " + std::to_string(adjacent.size()) +
                             " adjacent sentence pairs; " +
                             std::to_string(half) + " positives requested");
  }

  Rng rng(seed);
  std::vector<std::size_t> order(adjacent.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < half; ++i) {
    const std::size_t j = i + rng.uniform_below(order.size() - i);
    std::swap(order[i], order[j]);
  }

  std::vector<SentencePair> out;
  out.reserve(target_count);
  for (std::size_t i = 0; i < half; ++i) {
    const Adjacent& a = adjacent[order[i]];
    out.push_back({docs[a.doc].sentences[a.pos], docs[a.doc].sentences[a.pos + 1],
                   NspLabel::kIsNext, a.doc, a.doc, a.pos});
  }

  std::size_t total_sentences = 0;
  for (const auto& doc : docs) total_sentences += doc.sentences.size();

  for (std::size_t i = 0; i < half; ++i) {
    const std::size_t self = order[i];
    const Adjacent& src = adjacent[self];
    const std::string& a = docs[src.doc].sentences[src.pos];
    const std::string& true_next = docs[src.doc].sentences[src.pos + 1];
    auto acceptable = [&](const std::string& cand) {
      return cand != a && cand != true_next;
    };

    bool found = false;
    SentencePair neg{a, {}, NspLabel::kNotNext, src.doc, 0, src.pos};
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      std::size_t m = rng.uniform_below(adjacent.size() - 1);
      if (m >= self) ++m;
      const Adjacent& other = adjacent[m];
      const std::string& cand = docs[other.doc].sentences[other.pos + 1];
      if (acceptable(cand)) {
        neg.sentence_b = cand;
        neg.doc_b = other.doc;
        found = true;
      }
    }
    if (!found) {
      // Degenerate corpora (few distinct sentences): scan everything.
      const std::size_t offset = rng.uniform_below(total_sentences);
      for (std::size_t step = 0; step < total_sentences && !found; ++step) {
        const std::size_t target = (offset + step) % total_sentences;
        std::size_t flat = 0;
        for (std::size_t d = 0; d < docs.size(); ++d) {
          const std::size_t n = docs[d].sentences.size();
          if (target < flat + n) {
            const std::string& cand = docs[d].sentences[target - flat];
            if (acceptable(cand)) {
              neg.sentence_b = cand;
              neg.doc_b = d;
              found = true;
            }
            break;
          }
          flat += n;
        }
      }
    }
    if (!found) {
      throw InsufficientCorpus("no negative B-side available for '" + a + "'");
    }
    out.push_back(std::move(neg));
  }

  rng.shuffle(std::span<SentencePair>(out));
  return out;
}

std::vector<SentencePair> generate_pairs_sharded(
    std::span<const std::vector<ParagraphDoc>> shards,
    std::size_t target_per_shard, std::uint64_t seed, std::size_t jobs) {
  std::vector<std::vector<SentencePair>> results(shards.size());
  std::vector<std::exception_ptr> errors(shards.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < shards.size(); i = next++) {
      try {
        results[i] = generate_pairs(shards[i], target_per_shard, seed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(jobs, shards.size()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SentencePair> out;
  for (auto& r : results) {
    out.insert(out.end(), std::make_move_iterator(r.begin()),
               std::make_move_iterator(r.end()));
  }
  return out;
}

PairSplit hold_out_pairs(std::span<const SentencePair> pairs,
                         std::size_t test_size, std::uint64_t seed) {
  if (test_size >= pairs.size()) {
    throw InvalidSize("test_size must be smaller than the number of pairs");
  }
  Rng rng(seed);
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    by_label[static_cast<std::size_t>(pairs[i].label)].push_back(i);
  }
  for (auto& group : by_label) rng.shuffle(std::span<std::size_t>(group));

  const std::uint64_t total = pairs.size();
  std::array<std::size_t, 2> quota{};
  std::array<std::uint64_t, 2> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::uint64_t scaled = std::uint64_t{test_size} * by_label[c].size();
    quota[c] = static_cast<std::size_t>(scaled / total);
    remainder[c] = scaled % total;
    assigned += quota[c];
  }
  std::array<std::size_t, 2> rank = {0, 1};
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) {
    return remainder[x] > remainder[y];
  });
  for (std::size_t k = 0; assigned < test_size; ++k, ++assigned) {
    ++quota[rank[k % 2]];
  }

  PairSplit split;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t k = 0; k < by_label[c].size(); ++k) {
      auto& dst = k < quota[c] ? split.test : split.train;
      dst.push_back(pairs[by_label[c][k]]);
    }
  }
  rng.shuffle(std::span<SentencePair>(split.test));
  rng.shuffle(std::span<SentencePair>(split.train));
  return split;
}

std::string to_jsonl(std::span<const SentencePair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["sentence_a"] = p.sentence_a;
    j["sentence_b"] = p.sentence_b;
    j["label"] = static_cast<int>(p.label);
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace finsent::nsp
