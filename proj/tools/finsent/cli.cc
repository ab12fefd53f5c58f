#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "finsent/concatenation.h"
#include "finsent/corpus.h"
#include "finsent/error.h"
#include "finsent/evaluation.h"
#include "finsent/freeze_planner.h"
#include "finsent/io.h"
#include "finsent/labels.h"
#include "finsent/nsp_dataset.h"
#include "finsent/scoring.h"
#include "finsent/text.h"
#include "finsent/tokenization.h"
#include "json.hpp"
#include "manifest.h"

#ifndef FINSENT_VERSION
#define FINSENT_VERSION "0.0.0"
#endif
#ifndef FINSENT_DEFAULT_VOCAB
#define FINSENT_DEFAULT_VOCAB "data/vocab/bert-base-uncased-vocab.txt"
#endif

namespace finsent::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::string manifest;
};

// State handed to a subcommand body.
struct Invocation {
  explicit Invocation(const Globals& g) : globals(g) {}

  const Globals& globals;
  RunContext files;
  std::ostringstream out;
  // Where the manifest goes unless --manifest-out overrides it.
  std::optional<fs::path> manifest_path;
};

using Handler = std::function<void(Invocation&)>;

std::string default_vocab_path() {
  if (const char* env = std::getenv("FINSENT_VOCAB"); env && *env) return env;
  return FINSENT_DEFAULT_VOCAB;
}

std::string fmt_double(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// .jsonl/.json files are interchange datasets; anything else is read as a
// phrasebank file.
corpus::Dataset load_dataset(Invocation& inv, const std::string& path,
                             const std::string& encoding) {
  const std::string raw = inv.files.read(path);
  if (has_suffix(path, ".jsonl") || has_suffix(path, ".json")) {
    return corpus::from_jsonl(raw);
  }
  return corpus::parse_phrasebank(raw, encoding);
}

tokenization::WordPieceTokenizer load_tokenizer(Invocation& inv,
                                                const std::string& path) {
  return tokenization::WordPieceTokenizer(
      tokenization::Vocabulary::load(inv.files.read(path)));
}

std::vector<std::string> class_names_for(const std::string& task) {
  return task == "nsp" ? eval::nsp_classes() : eval::sentiment_classes();
}

std::size_t resolve_class(std::string_view name,
                          const std::vector<std::string>& classes) {
  const std::string lowered = ascii_lower(trim(name));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (ascii_lower(classes[i]) == lowered) return i;
  }
  throw UnknownLabel("unknown class: " + std::string(name));
}

std::string agreement_label(const std::string& path) {
  const auto level = agreement_from_filename(fs::path(path).filename().string());
  return level ? std::to_string(percent_of(*level)) + "%" : "-";
}

void print_stats_header(std::ostream& out) {
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %9s %9s %9s %8s\n", "Agreement",
                "Negative", "Neutral", "Positive", "Count");
  out << line;
}

void print_stats_row(std::ostream& out, const std::string& agreement,
                     const corpus::CorpusStats& s) {
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8.1f%% %8.1f%% %8.1f%% %8zu\n",
                agreement.c_str(), s.rounded_pct(Sentiment::kNegative),
                s.rounded_pct(Sentiment::kNeutral),
                s.rounded_pct(Sentiment::kPositive), s.count);
  out << line;
}

std::string stats_csv_row(const std::string& file, const std::string& agreement,
                          const corpus::CorpusStats& s) {
  return file + "," + agreement + "," +
         fmt_double("%.1f", s.rounded_pct(Sentiment::kNegative)) + "," +
         fmt_double("%.1f", s.rounded_pct(Sentiment::kNeutral)) + "," +
         fmt_double("%.1f", s.rounded_pct(Sentiment::kPositive)) + "," +
         std::to_string(s.count) + "\n";
}

scoring::BackendConfig backend_config(Invocation& inv, const std::string& kind,
                                      const std::string& endpoint,
                                      const std::string& config_path) {
  scoring::BackendConfig cfg;
  if (!config_path.empty()) {
    cfg = scoring::parse_backend_config(inv.files.read(config_path));
  }
  if (kind == "remote") cfg.kind = scoring::BackendKind::kRemote;
  if (kind == "mock" && config_path.empty()) cfg.kind = scoring::BackendKind::kMock;
  if (!endpoint.empty()) {
    cfg.endpoint = endpoint;
    cfg.kind = scoring::BackendKind::kRemote;
  }
  cfg = scoring::apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

// ingest

struct IngestOptions {
  std::string input;
  std::string encoding{corpus::kDefaultEncoding};
  std::string output;
};

void run_ingest(Invocation& inv, const IngestOptions& o) {
  const corpus::Dataset records =
      corpus::parse_phrasebank(inv.files.read(o.input), o.encoding);
  inv.files.write(o.output, corpus::to_jsonl(records));
  inv.manifest_path = o.output + ".manifest.json";
  print_stats_header(inv.out);
  print_stats_row(inv.out, agreement_label(o.input), corpus::label_distribution(records));
  inv.out << "wrote " << records.size() << " records to " << o.output << "\n";
}

// stats

struct StatsOptions {
  std::vector<std::string> inputs;
  std::string encoding{corpus::kDefaultEncoding};
  bool dedup = false;
  std::string output;
};

void run_stats(Invocation& inv, const StatsOptions& o) {
  std::string csv = "file,agreement,pct_negative,pct_neutral,pct_positive,count\n";
  print_stats_header(inv.out);
  for (const auto& path : o.inputs) {
    corpus::Dataset records = load_dataset(inv, path, o.encoding);
    if (o.dedup) records = corpus::dedup_exact(records);
    const auto stats = corpus::label_distribution(records);
    const std::string agreement = agreement_label(path);
    print_stats_row(inv.out, agreement, stats);
    csv += stats_csv_row(fs::path(path).filename().string(), agreement, stats);
  }
  if (o.dedup) inv.out << "(exact duplicates removed)\n";
  if (!o.output.empty()) {
    inv.files.write(o.output, csv);
    inv.manifest_path = o.output + ".manifest.json";
  }
}

// split

struct SplitOptions {
  std::string input;
  std::string encoding{corpus::kDefaultEncoding};
  std::vector<double> ratios{0.8, 0.1, 0.1};
  std::string out_dir;
};

void run_split(Invocation& inv, const SplitOptions& o) {
  if (o.ratios.size() != 3) throw InvalidRatios("--ratios takes three values");
  const corpus::Dataset records = load_dataset(inv, o.input, o.encoding);
  const corpus::SplitRatios ratios{o.ratios[0], o.ratios[1], o.ratios[2]};
  const auto split = corpus::split_dataset(records, ratios, inv.globals.seed);
  const fs::path dir(o.out_dir);
  inv.files.write(dir / "train.jsonl", corpus::to_jsonl(split.train));
  inv.files.write(dir / "validation.jsonl", corpus::to_jsonl(split.validation));
  inv.files.write(dir / "test.jsonl", corpus::to_jsonl(split.test));
  inv.manifest_path = dir / "manifest.json";
  inv.out << "stratified split " << o.ratios[0] << "/" << o.ratios[1] << "/"
          << o.ratios[2] << " (seed " << inv.globals.seed << ")\n";
  inv.out << "train " << split.train.size() << ", validation "
          << split.validation.size() << ", test " << split.test.size() << "\n";
}

// nsp-pairs

struct NspPairsOptions {
  std::vector<std::string> inputs;
  std::size_t count = 20000;
  std::size_t test_size = 0;
  std::string out_dir;
};

void run_nsp_pairs(Invocation& inv, const NspPairsOptions& o) {
  std::vector<std::vector<nsp::ParagraphDoc>> shards;
  for (const auto& path : o.inputs) {
    shards.push_back(nsp::segment_corpus(decode_to_utf8(inv.files.read(path), "auto")));
  }
  std::vector<nsp::SentencePair> pairs =
      shards.size() == 1
          ? nsp::generate_pairs(shards.front(), o.count, inv.globals.seed)
          : nsp::generate_pairs_sharded(shards, o.count, inv.globals.seed,
                                        inv.globals.jobs);
  const fs::path dir(o.out_dir);
  inv.files.write(dir / "pairs.jsonl", nsp::to_jsonl(pairs));
  inv.manifest_path = dir / "manifest.json";
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label == nsp::NspLabel::kIsNext;
  inv.out << "pairs " << pairs.size() << " (isNext " << positives << ", notNext "
          << pairs.size() - positives << ")\n";
  if (o.test_size > 0) {
    const auto held = nsp::hold_out_pairs(pairs, o.test_size, inv.globals.seed);
    inv.files.write(dir / "train.jsonl", nsp::to_jsonl(held.train));
    inv.files.write(dir / "test.jsonl", nsp::to_jsonl(held.test));
    inv.out << "train " << held.train.size() << ", test " << held.test.size() << "\n";
  }
}

// concat

struct ConcatCliOptions {
  std::string input;
  std::string encoding{corpus::kDefaultEncoding};
  std::string method = "random";
  std::string vocab = default_vocab_path();
  std::size_t max_tokens = 512;
  std::size_t min_run = 2;
  std::size_t max_run = 6;
  std::string backend = "mock";
  std::string endpoint;
  std::string backend_config;
  std::string output;
  std::string audit;
};

void run_concat(Invocation& inv, const ConcatCliOptions& o) {
  const corpus::Dataset records = load_dataset(inv, o.input, o.encoding);
  const auto tokenizer = load_tokenizer(inv, o.vocab);
  concat::ConcatOptions options;
  options.max_tokens = o.max_tokens;
  options.min_run = o.min_run;
  options.max_run = o.max_run;
  options.seed = inv.globals.seed;
  options.jobs = inv.globals.jobs;

  concat::ConcatBuild build;
  if (o.method == "sequential") {
    const auto cfg = backend_config(inv, o.backend, o.endpoint, o.backend_config);
    const scoring::Backend backend = scoring::make_backend(cfg);
    build = concat::build_sequential_concat(records, *backend.nsp, tokenizer, options);
  } else {
    build = concat::build_random_concat(records, tokenizer, options);
  }
  inv.files.write(o.output, corpus::to_jsonl(concat::to_dataset(build.samples)));
  inv.manifest_path = o.output + ".manifest.json";
  if (!o.audit.empty()) inv.files.write(o.audit, concat::rejected_to_csv(build.rejected));

  std::size_t capped = 0;
  for (const auto& r : build.rejected) capped += r.reason == concat::RejectReason::kTokenCap;
  std::size_t max_tokens = 0;
  std::size_t min_tokens = build.samples.empty() ? 0 : SIZE_MAX;
  for (const auto& s : build.samples) {
    max_tokens = std::max(max_tokens, s.n_tokens);
    min_tokens = std::min(min_tokens, s.n_tokens);
  }
  inv.out << o.method << " concatenation: proposed " << build.proposed << ", emitted "
          << build.samples.size() << ", rejected " << build.rejected.size()
          << " (token cap " << capped << ", nsp gate "
          << build.rejected.size() - capped << ")\n";
  inv.out << "n_tokens with [CLS]/[SEP]: min " << min_tokens << ", max " << max_tokens
          << "\n";
}

// tokenize-stats

struct TokenizeStatsOptions {
  std::string input;
  std::string encoding{corpus::kDefaultEncoding};
  std::string vocab = default_vocab_path();
  std::size_t bin_width = 8;
  bool include_special = false;
  std::string output;
};

void run_tokenize_stats(Invocation& inv, const TokenizeStatsOptions& o) {
  const corpus::Dataset records = load_dataset(inv, o.input, o.encoding);
  const auto tokenizer = load_tokenizer(inv, o.vocab);
  if (o.bin_width == 0) throw ValidationError("--bin-width must be positive");
  const auto hist =
      tokenization::length_histogram(records, tokenizer, o.bin_width, o.include_special);
  if (!o.output.empty()) {
    inv.files.write(o.output, hist.to_csv());
    inv.manifest_path = o.output + ".manifest.json";
  }
  inv.out << "records " << hist.n << ", min tokens " << hist.min_tokens
          << ", max tokens " << hist.max_tokens << ", mean tokens "
          << fmt_double("%.2f", hist.mean_tokens)
          << (o.include_special ? " (with [CLS]/[SEP])" : " (without special tokens)")
          << "\n";
}

// evaluate / sweep

struct PredictionOptions {
  std::string predictions;
  std::string task = "sentiment";
  std::string dataset;
};

struct LoadedPredictions {
  std::vector<std::string> classes;
  std::vector<eval::PredictionRecord> records;
  std::map<std::string, std::string> text_by_id;
};

LoadedPredictions load_predictions(Invocation& inv, const PredictionOptions& o) {
  LoadedPredictions loaded;
  loaded.classes = class_names_for(o.task);
  std::unordered_map<std::string, std::size_t> actual_by_id;
  if (!o.dataset.empty()) {
    for (const auto& rec : load_dataset(inv, o.dataset, std::string(corpus::kDefaultEncoding))) {
      actual_by_id.emplace(rec.id, index_of(rec.label));
      loaded.text_by_id.emplace(rec.id, rec.text);
    }
  }
  loaded.records = eval::parse_predictions(inv.files.read(o.predictions), loaded.classes,
                                           o.dataset.empty() ? nullptr : &actual_by_id);
  return loaded;
}

struct EvaluateOptions {
  PredictionOptions source;
  std::string model_name = "model";
  std::string output;
  std::string confusion_output;
  std::string misclassified;
  std::string misclassified_output;
};

void run_evaluate(Invocation& inv, const EvaluateOptions& o) {
  const LoadedPredictions loaded = load_predictions(inv, o.source);
  const eval::MetricsReport report = eval::evaluate(loaded.records, loaded.classes);
  inv.out << eval::render_report(report, o.model_name);
  if (!o.output.empty()) {
    inv.files.write(o.output, eval::metrics_to_csv(report));
    inv.manifest_path = o.output + ".manifest.json";
  }
  if (!o.confusion_output.empty()) {
    inv.files.write(o.confusion_output, report.confusion.to_csv());
  }
  if (!o.misclassified.empty()) {
    const std::size_t colon = o.misclassified.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("--misclassified expects ACTUAL:PREDICTED");
    }
    const std::size_t a = resolve_class(o.misclassified.substr(0, colon), loaded.classes);
    const std::size_t p = resolve_class(o.misclassified.substr(colon + 1), loaded.classes);
    std::vector<std::size_t> actual;
    std::vector<std::size_t> predicted;
    for (const auto& r : loaded.records) {
      actual.push_back(r.actual);
      predicted.push_back(r.predicted);
    }
    const auto hits = eval::list_misclassified<eval::PredictionRecord>(
        loaded.records, actual, predicted, {a, p});
    inv.out << "\n" << loaded.classes[a] << " predicted as " << loaded.classes[p] << ": "
            << hits.size() << "\n";
    std::string jsonl;
    for (const auto& r : hits) {
      ordered_json j;
      j["id"] = r.id;
      j["actual"] = loaded.classes[a];
      j["predicted"] = loaded.classes[p];
      const auto text = loaded.text_by_id.find(r.id);
      if (text != loaded.text_by_id.end()) j["text"] = text->second;
      jsonl += j.dump() + "\n";
      inv.out << "  " << r.id;
      if (text != loaded.text_by_id.end()) inv.out << "  " << text->second;
      inv.out << "\n";
    }
    if (!o.misclassified_output.empty()) inv.files.write(o.misclassified_output, jsonl);
  }
}

struct SweepOptions {
  PredictionOptions source;
  std::vector<std::size_t> sizes;
  bool no_shuffle = false;
  std::string output;
};

void run_sweep(Invocation& inv, const SweepOptions& o) {
  const LoadedPredictions loaded = load_predictions(inv, o.source);
  const std::optional<std::uint64_t> seed =
      o.no_shuffle ? std::nullopt : std::optional<std::uint64_t>(inv.globals.seed);
  const auto rows = eval::evaluate_by_test_size(loaded.records, o.sizes, loaded.classes,
                                                seed, inv.globals.jobs);
  const std::string csv = eval::sweep_to_csv(rows);
  if (!o.output.empty()) {
    inv.files.write(o.output, csv);
    inv.manifest_path = o.output + ".manifest.json";
  }
  inv.out << csv;
}

// freeze-table

struct FreezeOptions {
  freeze::EncoderConfig encoder;
  bool no_pooler = false;
  std::string freeze_through;
  std::string output;
  std::string finetune_input;
  std::string finetune_output;
};

void run_freeze_table(Invocation& inv, const FreezeOptions& o) {
  freeze::EncoderConfig encoder = o.encoder;
  encoder.include_pooler = !o.no_pooler;
  const auto rows = freeze::freeze_table(encoder);
  const std::uint64_t total = freeze::total_parameters(encoder);
  inv.out << freeze::freeze_table_text(rows, total);
  inv.out << "per-layer parameters " << freeze::layer_parameters(encoder) << "\n";
  if (!o.freeze_through.empty()) {
    const auto plan = freeze::trainable_after_freeze(
        encoder, freeze::FreezeThrough::parse(o.freeze_through));
    inv.out << "freeze through " << plan.freeze_through.to_string() << ": trainable "
            << plan.trainable_count << " of " << plan.total_count << "\n";
  }
  if (!o.output.empty()) {
    inv.files.write(o.output, freeze::freeze_table_csv(rows));
    inv.manifest_path = o.output + ".manifest.json";
  }
  if (!o.finetune_output.empty()) {
    freeze::FineTuneConfig cfg;
    cfg.seed = inv.globals.seed;
    if (!o.finetune_input.empty()) {
      cfg = freeze::parse_finetune_config(inv.files.read(o.finetune_input));
    }
    inv.files.write(o.finetune_output, freeze::to_json(cfg));
    if (!inv.manifest_path) inv.manifest_path = o.finetune_output + ".manifest.json";
  }
}

// merge / synth-ingest

struct MergeOptions {
  std::vector<std::string> inputs;
  std::string encoding{corpus::kDefaultEncoding};
  bool dedup = false;
  std::string output;
};

void run_merge(Invocation& inv, const MergeOptions& o) {
  std::vector<corpus::Dataset> parts;
  for (const auto& path : o.inputs) parts.push_back(load_dataset(inv, path, o.encoding));
  corpus::MergeResult merged = corpus::merge_corpora(parts);
  corpus::Dataset out = o.dedup ? corpus::dedup_exact(merged.dataset) : merged.dataset;
  inv.files.write(o.output, corpus::to_jsonl(out));
  inv.manifest_path = o.output + ".manifest.json";
  inv.out << "merged " << out.size() << " records\n";
  for (std::size_t s = 0; s < kNumSources; ++s) {
    inv.out << "  " << to_string(static_cast<RecordSource>(s)) << " "
            << merged.source_counts[s] << "\n";
  }
}

struct SynthOptions {
  std::string input;
  std::string output;
};

void run_synth_ingest(Invocation& inv, const SynthOptions& o) {
  const corpus::Dataset records = corpus::ingest_synthetic(inv.files.read(o.input));
  inv.files.write(o.output, corpus::to_jsonl(records));
  inv.manifest_path = o.output + ".manifest.json";
  print_stats_header(inv.out);
  print_stats_row(inv.out, "synthetic", corpus::label_distribution(records));
}

// Builds a parameter record from the parsed options of `sub`.
ordered_json collect_parameters(const CLI::App& sub) {
  ordered_json params = ordered_json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    std::string name = opt->get_name();
    if (name == "--help" || name.empty()) continue;
    while (!name.empty() && name.front() == '-') name.erase(0, 1);
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i > 0) joined += ",";
        joined += results[i];
      }
      params[name] = joined;
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const RunManifest m = RunManifest::parse(read_file(manifest_path));
  const fs::path previous = fs::current_path();
  std::error_code ec;
  fs::current_path(m.cwd, ec);
  if (ec) throw IoError("cannot enter recorded directory " + m.cwd);
  struct Restore {
    fs::path dir;
    ~Restore() {
      std::error_code ignored;
      fs::current_path(dir, ignored);
    }
  } restore{previous};

  for (const auto& in : m.inputs) {
    if (sha256_hex(read_file(in.path)) != in.sha256) {
      throw ValidationError("input changed since the recorded run: " + in.path);
    }
  }
  std::ostringstream captured;
  const int rc = run(m.argv, captured, err);
  if (rc != kExitOk) return rc;

  bool identical = sha256_hex(captured.str()) == m.stdout_sha256;
  out << (identical ? "identical " : "DIFFERS   ") << "<stdout>\n";
  for (const auto& o : m.outputs) {
    const bool same = sha256_hex(read_file(o.path)) == o.sha256;
    identical = identical && same;
    out << (same ? "identical " : "DIFFERS   ") << o.path << "\n";
  }
  out << (identical ? "replay reproduced every artifact\n"
                    : "replay produced different artifacts\n");
  return identical ? kExitOk : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Financial sentiment corpus and evaluation toolkit", "finsent"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", FINSENT_VERSION);

  Globals globals;
  app.add_option("--seed", globals.seed, "Seed for every sampling step")
      ->capture_default_str();
  app.add_option("--jobs", globals.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--manifest-out", globals.manifest, "Manifest output path");

  std::map<std::string, Handler> handlers;

  IngestOptions ingest;
  {
    auto* sub = app.add_subcommand("ingest", "Convert a phrasebank file to JSONL");
    sub->add_option("--input", ingest.input, "Phrasebank file")->required();
    sub->add_option("--encoding", ingest.encoding, "iso-8859-1, utf-8 or auto")
        ->capture_default_str();
    sub->add_option("--out", ingest.output, "Output JSONL")->required();
    handlers["ingest"] = [&](Invocation& inv) { run_ingest(inv, ingest); };
  }

  StatsOptions stats;
  {
    auto* sub = app.add_subcommand("stats", "Label distribution per file");
    sub->add_option("--input", stats.inputs, "Phrasebank or JSONL files")->required();
    sub->add_option("--encoding", stats.encoding)->capture_default_str();
    sub->add_flag("--dedup", stats.dedup, "Drop exact duplicate records first");
    sub->add_option("--out", stats.output, "CSV report");
    handlers["stats"] = [&](Invocation& inv) { run_stats(inv, stats); };
  }

  SplitOptions split_opts;
  {
    auto* sub = app.add_subcommand("split", "Stratified train/validation/test split");
    sub->add_option("--input", split_opts.input)->required();
    sub->add_option("--encoding", split_opts.encoding)->capture_default_str();
    sub->add_option("--ratios", split_opts.ratios, "train,validation,test")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    sub->add_option("--out-dir", split_opts.out_dir)->required();
    handlers["split"] = [&](Invocation& inv) { run_split(inv, split_opts); };
  }

  NspPairsOptions nsp_opts;
  {
    auto* sub = app.add_subcommand("nsp-pairs", "Balanced next-sentence pairs");
    sub->add_option("--input", nsp_opts.inputs,
                    "Text corpora, blank-line separated documents; one shard each")
        ->required();
    sub->add_option("--count", nsp_opts.count, "Pairs per shard (even)")
        ->capture_default_str();
    sub->add_option("--test-size", nsp_opts.test_size, "Held-out pairs")
        ->capture_default_str();
    sub->add_option("--out-dir", nsp_opts.out_dir)->required();
    handlers["nsp-pairs"] = [&](Invocation& inv) { run_nsp_pairs(inv, nsp_opts); };
  }

  ConcatCliOptions concat_opts;
  {
    auto* sub = app.add_subcommand("concat", "Build long same-label samples");
    sub->add_option("--input", concat_opts.input)->required();
    sub->add_option("--encoding", concat_opts.encoding)->capture_default_str();
    sub->add_option("--method", concat_opts.method)
        ->check(CLI::IsMember({"random", "sequential"}))
        ->capture_default_str();
    sub->add_option("--vocab", concat_opts.vocab)->capture_default_str();
    sub->add_option("--max-tokens", concat_opts.max_tokens)->capture_default_str();
    sub->add_option("--min-run", concat_opts.min_run)->capture_default_str();
    sub->add_option("--max-run", concat_opts.max_run)->capture_default_str();
    sub->add_option("--backend", concat_opts.backend)
        ->check(CLI::IsMember({"mock", "remote"}))
        ->capture_default_str();
    sub->add_option("--endpoint", concat_opts.endpoint, "Model server URL");
    sub->add_option("--backend-config", concat_opts.backend_config,
                    "JSON or key=value backend settings");
    sub->add_option("--out", concat_opts.output)->required();
    sub->add_option("--audit", concat_opts.audit, "CSV of rejected runs");
    handlers["concat"] = [&](Invocation& inv) { run_concat(inv, concat_opts); };
  }

  TokenizeStatsOptions tok_opts;
  {
    auto* sub = app.add_subcommand("tokenize-stats", "Token length histogram");
    sub->add_option("--input", tok_opts.input)->required();
    sub->add_option("--encoding", tok_opts.encoding)->capture_default_str();
    sub->add_option("--vocab", tok_opts.vocab)->capture_default_str();
    sub->add_option("--bin-width", tok_opts.bin_width)->capture_default_str();
    sub->add_flag("--include-special", tok_opts.include_special,
                  "Count [CLS] and [SEP]");
    sub->add_option("--out", tok_opts.output, "Histogram CSV");
    handlers["tokenize-stats"] = [&](Invocation& inv) { run_tokenize_stats(inv, tok_opts); };
  }

  auto add_prediction_options = [](CLI::App* sub, PredictionOptions& p) {
    sub->add_option("--predictions", p.predictions, "Prediction JSONL")->required();
    sub->add_option("--task", p.task)
        ->check(CLI::IsMember({"sentiment", "nsp"}))
        ->capture_default_str();
    sub->add_option("--dataset", p.dataset,
                    "Dataset supplying actual labels and texts by id");
  };

  EvaluateOptions eval_opts;
  {
    auto* sub = app.add_subcommand("evaluate", "Metrics and confusion matrix");
    add_prediction_options(sub, eval_opts.source);
    sub->add_option("--model-name", eval_opts.model_name)->capture_default_str();
    sub->add_option("--out", eval_opts.output, "Metrics CSV");
    sub->add_option("--confusion-out", eval_opts.confusion_output, "Confusion CSV");
    sub->add_option("--misclassified", eval_opts.misclassified,
                    "List records with ACTUAL:PREDICTED");
    sub->add_option("--misclassified-out", eval_opts.misclassified_output);
    handlers["evaluate"] = [&](Invocation& inv) { run_evaluate(inv, eval_opts); };
  }

  SweepOptions sweep_opts;
  {
    auto* sub = app.add_subcommand("sweep", "Metrics against test size");
    add_prediction_options(sub, sweep_opts.source);
    sub->add_option("--sizes", sweep_opts.sizes, "Ascending sizes")
        ->delimiter(',')
        ->required();
    sub->add_flag("--no-shuffle", sweep_opts.no_shuffle,
                  "Use records in file order instead of a seeded shuffle");
    sub->add_option("--out", sweep_opts.output, "Sweep CSV");
    handlers["sweep"] = [&](Invocation& inv) { run_sweep(inv, sweep_opts); };
  }

  FreezeOptions freeze_opts;
  {
    auto* sub = app.add_subcommand("freeze-table", "Trainable parameters per freeze depth");
    auto& e = freeze_opts.encoder;
    sub->add_option("--vocab-size", e.vocab_size)->capture_default_str();
    sub->add_option("--hidden", e.hidden)->capture_default_str();
    sub->add_option("--layers", e.layers)->capture_default_str();
    sub->add_option("--intermediate", e.intermediate)->capture_default_str();
    sub->add_option("--max-positions", e.max_positions)->capture_default_str();
    sub->add_option("--type-vocab", e.type_vocab)->capture_default_str();
    sub->add_option("--num-labels", e.num_labels)->capture_default_str();
    sub->add_flag("--no-pooler", freeze_opts.no_pooler);
    sub->add_option("--freeze-through", freeze_opts.freeze_through,
                    "none, embedding or layer-<k>");
    sub->add_option("--out", freeze_opts.output, "CSV report");
    sub->add_option("--finetune-config", freeze_opts.finetune_input,
                    "Fine-tune settings to validate and re-emit");
    sub->add_option("--write-finetune-config", freeze_opts.finetune_output,
                    "Write the fine-tune config JSON here");
    handlers["freeze-table"] = [&](Invocation& inv) { run_freeze_table(inv, freeze_opts); };
  }

  MergeOptions merge_opts;
  {
    auto* sub = app.add_subcommand("merge", "Concatenate datasets");
    sub->add_option("--input", merge_opts.inputs)->required();
    sub->add_option("--encoding", merge_opts.encoding)->capture_default_str();
    sub->add_flag("--dedup", merge_opts.dedup);
    sub->add_option("--out", merge_opts.output)->required();
    handlers["merge"] = [&](Invocation& inv) { run_merge(inv, merge_opts); };
  }

  SynthOptions synth_opts;
  {
    auto* sub = app.add_subcommand("synth-ingest", "Validate generated samples");
    sub->add_option("--input", synth_opts.input, "JSONL with text and label")->required();
    sub->add_option("--out", synth_opts.output)->required();
    handlers["synth-ingest"] = [&](Invocation& inv) { run_synth_ingest(inv, synth_opts); };
  }

  std::string replay_manifest;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare digests");
  replay_cmd->add_option("--manifest", replay_manifest)->required();

  std::vector<const char*> argv{"finsent"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) return replay(replay_manifest, out, err);

    CLI::App* sub = app.get_subcommands().front();
    Invocation inv(globals);
    int rc = kExitOk;
    try {
      handlers.at(sub->get_name())(inv);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      rc = kExitValidation;
    }
    out << inv.out.str();
    if (rc != kExitOk) return rc;

    RunManifest m;
    m.version = FINSENT_VERSION;
    m.subcommand = sub->get_name();
    m.argv = args;
    m.cwd = fs::current_path().string();
    m.seed = globals.seed;
    m.jobs = globals.jobs;
    m.parameters = collect_parameters(*sub);
    m.inputs = inv.files.inputs();
    m.outputs = inv.files.outputs();
    m.stdout_sha256 = sha256_hex(inv.out.str());
    const fs::path manifest_path =
        !globals.manifest.empty() ? fs::path(globals.manifest)
        : inv.manifest_path       ? *inv.manifest_path
                                  : fs::path("finsent-" + m.subcommand + ".manifest.json");
    write_file_atomic(manifest_path, m.to_json());
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace finsent::cli
