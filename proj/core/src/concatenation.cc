#include "finsent/concatenation.h"

#include <array>
#include <cstdio>
#include <sstream>

#include "finsent/error.h"
#include "finsent/parallel.h"
#include "finsent/random.h"
#include "finsent/text.h"

namespace finsent::concat {
namespace {

std::vector<std::string> texts_of(std::span<const corpus::LabeledSentence> records,
                                  const std::vector<std::size_t>& members) {
  std::vector<std::string> texts;
  texts.reserve(members.size());
  for (std::size_t m : members) texts.push_back(records[m].text);
  return texts;
}

std::vector<std::string> ids_of(std::span<const corpus::LabeledSentence> records,
                                const std::vector<std::size_t>& members) {
  std::vector<std::string> ids;
  ids.reserve(members.size());
  for (std::size_t m : members) ids.push_back(records[m].id);
  return ids;
}

// Per-proposal outcome, filled in parallel and collected in run order.
struct Outcome {
  bool accepted = false;
  ConcatSample sample;
  RejectedRun rejected;
};

ConcatBuild build(std::span<const corpus::LabeledSentence> records,
                  scoring::NspScorer* scorer,
                  const tokenization::WordPieceTokenizer& tokenizer,
                  const ConcatOptions& options) {
  options.validate();
  const std::vector<RunProposal> proposals = propose_runs(records, options);
  const ConcatMethod method =
      scorer ? ConcatMethod::kSequential : ConcatMethod::kRandom;

  std::vector<Outcome> outcomes(proposals.size());
  parallel_for(proposals.size(), options.jobs, [&](std::size_t i) {
    const RunProposal& run = proposals[i];
    const std::vector<std::string> texts = texts_of(records, run.members);
    std::string joined = join_space(texts);
    const std::size_t n_tokens = tokenizer.token_count(joined, true);
    Outcome& out = outcomes[i];
    out.rejected.run_index = run.run_index;
    out.rejected.label = run.label;
    out.rejected.n_tokens = n_tokens;
    if (n_tokens > options.max_tokens) {
      out.rejected.reason = RejectReason::kTokenCap;
      out.rejected.part_ids = ids_of(records, run.members);
      return;
    }
    if (scorer) {
      const GateResult gate = predict_multiple_nsp(texts, true, *scorer);
      if (!gate.valid) {
        out.rejected.reason = RejectReason::kNspGate;
        out.rejected.first_failing_pair = gate.decisions.back().pair_index;
        out.rejected.failing_score = gate.decisions.back().score;
        out.rejected.part_ids = ids_of(records, run.members);
        return;
      }
    }
    out.accepted = true;
    out.sample.text = std::move(joined);
    out.sample.label = run.label;
    out.sample.part_ids = ids_of(records, run.members);
    out.sample.n_tokens = n_tokens;
    out.sample.method = method;
  });

  ConcatBuild result;
  result.proposed = proposals.size();
  for (auto& o : outcomes) {
    if (o.accepted) {
      result.samples.push_back(std::move(o.sample));
    } else {
      result.rejected.push_back(std::move(o.rejected));
    }
  }
  return result;
}

}  // namespace

GateResult predict_multiple_nsp(std::span<const std::string> sentences,
                                bool concatenate, scoring::NspScorer& scorer) {
  if (sentences.size() < 2) {
    throw TooFewSentences("predict_multiple_nsp needs at least two sentences");
  }
  GateResult result;
  std::string prefix;
  for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
    if (concatenate) {
      if (i > 0) prefix.push_back(' ');
      prefix += sentences[i];
    }
    const std::string_view sentence_a =
        concatenate ? std::string_view(prefix) : std::string_view(sentences[i]);
    const double score = scorer.predict_nsp(sentence_a, sentences[i + 1]);
    const bool passed = score > kNspThreshold;
    result.decisions.push_back({i, score, passed});
    if (!passed) {
      result.valid = false;
      break;
    }
  }
  return result;
}

void ConcatOptions::validate() const {
  if (min_run < 2) throw InvalidConfig("min_run must be at least 2");
  if (max_run < min_run) throw InvalidConfig("max_run must be >= min_run");
  if (max_tokens < 3) throw InvalidConfig("max_tokens must leave room for text");
}

std::vector<RunProposal> propose_runs(
    std::span<const corpus::LabeledSentence> records,
    const ConcatOptions& options) {
  options.validate();
  Rng rng(options.seed);
  std::vector<RunProposal> runs;
  for (Sentiment label : kAllSentiments) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == label) pool.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(pool));
    std::size_t pos = 0;
    while (pool.size() - pos >= options.min_run) {
      const std::size_t drawn =
          rng.uniform_between(options.min_run, options.max_run);
      const std::size_t len = std::min(drawn, pool.size() - pos);
      RunProposal run;
      run.run_index = runs.size();
      run.label = label;
      run.members.assign(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                         pool.begin() + static_cast<std::ptrdiff_t>(pos + len));
      runs.push_back(std::move(run));
      pos += len;
    }
  }
  return runs;
}

ConcatBuild build_random_concat(std::span<const corpus::LabeledSentence> records,
                                const tokenization::WordPieceTokenizer& tokenizer,
                                const ConcatOptions& options) {
  return build(records, nullptr, tokenizer, options);
}

ConcatBuild build_sequential_concat(
    std::span<const corpus::LabeledSentence> records,
    scoring::NspScorer& scorer,
    const tokenization::WordPieceTokenizer& tokenizer,
    const ConcatOptions& options) {
  return build(records, &scorer, tokenizer, options);
}

corpus::Dataset to_dataset(std::span<const ConcatSample> samples) {
  corpus::Dataset out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    corpus::LabeledSentence rec;
    const bool sequential = s.method == ConcatMethod::kSequential;
    rec.id = (sequential ? "cs-" : "cr-") + std::to_string(out.size() + 1);
    rec.text = s.text;
    rec.label = s.label;
    rec.source = sequential ? RecordSource::kConcatSequential
                            : RecordSource::kConcatRandom;
    rec.n_tokens = s.n_tokens;
    out.push_back(std::move(rec));
  }
  return out;
}

std::string rejected_to_csv(std::span<const RejectedRun> rejected) {
  std::ostringstream out;
  out << "run_index,label,reason,first_failing_pair,score,n_tokens,part_ids\n";
  for (const auto& r : rejected) {
    out << r.run_index << ',' << to_string(r.label) << ','
        << (r.reason == RejectReason::kTokenCap ? "token_cap" : "nsp_gate")
        << ',';
    if (r.first_failing_pair) out << *r.first_failing_pair;
    out << ',';
    if (r.failing_score) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", *r.failing_score);
      out << buf;
    }
    out << ',' << r.n_tokens << ',';
    for (std::size_t i = 0; i < r.part_ids.size(); ++i) {
      if (i > 0) out << ' ';
      out << r.part_ids[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace finsent::concat
