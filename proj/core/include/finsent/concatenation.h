#ifndef FINSENT_CONCATENATION_H_
#define FINSENT_CONCATENATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsent/corpus.h"
#include "finsent/labels.h"
#include "finsent/scoring.h"
#include "finsent/tokenization.h"

namespace finsent::concat {

// A pair passes the gate only when the scorer returns strictly more than this.
inline constexpr double kNspThreshold = 0.5;

struct NspDecision {
  std::size_t pair_index = 0;
  double score = 0.0;
  bool passed = false;
};

struct GateResult {
  bool valid = true;
  // One entry per scorer call, in call order.
  std::vector<NspDecision> decisions;
};

// Scores pairs i = 0 .. n-2. With `concatenate`, the A-side of call i is the
// space-join of sentences[0..i]; otherwise it is sentences[i]. The B-side is
// always sentences[i+1]. Stops at the first score <= 0.5.
// Throws TooFewSentences for fewer than two sentences; scorer errors
// propagate unchanged.
GateResult predict_multiple_nsp(std::span<const std::string> sentences,
                                bool concatenate, scoring::NspScorer& scorer);

enum class ConcatMethod : std::uint8_t { kRandom, kSequential };

struct ConcatSample {
  std::string text;
  Sentiment label = Sentiment::kNeutral;
  std::vector<std::string> part_ids;
  std::size_t n_tokens = 0;  // with [CLS]/[SEP]
  ConcatMethod method = ConcatMethod::kRandom;
};

struct ConcatOptions {
  std::size_t max_tokens = 512;
  std::size_t min_run = 2;
  std::size_t max_run = 6;
  std::uint64_t seed = 42;
  // Runs gated at once; output order never depends on it.
  std::size_t jobs = 1;

  // Throws InvalidConfig.
  void validate() const;
};

// Candidate run of same-label records, as indices into the input.
struct RunProposal {
  std::size_t run_index = 0;
  Sentiment label = Sentiment::kNeutral;
  std::vector<std::size_t> members;
};

// Shared by both builders. Labels are visited negative, neutral, positive;
// each label pool is shuffled, then cut front to back into runs whose length
// is drawn uniformly from [min_run, max_run]. A tail shorter than min_run is
// left unused; a longer tail becomes a shorter final run.
std::vector<RunProposal> propose_runs(
    std::span<const corpus::LabeledSentence> records,
    const ConcatOptions& options);

enum class RejectReason : std::uint8_t { kTokenCap, kNspGate };

struct RejectedRun {
  std::size_t run_index = 0;
  Sentiment label = Sentiment::kNeutral;
  std::vector<std::string> part_ids;
  RejectReason reason = RejectReason::kNspGate;
  std::size_t n_tokens = 0;
  // Set for gate failures.
  std::optional<std::size_t> first_failing_pair;
  std::optional<double> failing_score;
};

struct ConcatBuild {
  std::vector<ConcatSample> samples;  // ascending run index
  std::vector<RejectedRun> rejected;  // ascending run index
  std::size_t proposed = 0;
};

// Emits every proposal whose joined text fits in max_tokens.
ConcatBuild build_random_concat(std::span<const corpus::LabeledSentence> records,
                                const tokenization::WordPieceTokenizer& tokenizer,
                                const ConcatOptions& options);

// Emits proposals that fit the cap and pass predict_multiple_nsp with
// concatenate=true. The cap is checked first so oversize runs cost no
// scorer calls.
ConcatBuild build_sequential_concat(
    std::span<const corpus::LabeledSentence> records,
    scoring::NspScorer& scorer,
    const tokenization::WordPieceTokenizer& tokenizer,
    const ConcatOptions& options);

// Interchange records with source concat_random / concat_sequential, ids
// "cr-<n>" / "cs-<n>" and n_tokens set.
corpus::Dataset to_dataset(std::span<const ConcatSample> samples);

// Header: run_index,label,reason,first_failing_pair,score,n_tokens,part_ids
std::string rejected_to_csv(std::span<const RejectedRun> rejected);

}  // namespace finsent::concat

#endif  // FINSENT_CONCATENATION_H_
