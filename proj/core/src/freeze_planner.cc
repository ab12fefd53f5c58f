#include "finsent/freeze_planner.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "finsent/error.h"
#include "finsent/text.h"
#include "json.hpp"

namespace finsent::freeze {
namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw InvalidConfig("parameter count overflows 64 bits");
  }
  return out;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw InvalidConfig("parameter count overflows 64 bits");
  }
  return out;
}

// Linear map in -> out with bias.
std::uint64_t dense(std::uint64_t in, std::uint64_t out) {
  return add(mul(in, out), out);
}

std::uint64_t layer_norm(std::uint64_t h) { return mul(2, h); }

ordered_json parse_object(std::string_view text) {
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    auto j = ordered_json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw InvalidConfig("fine-tune config is not a JSON object");
    }
    return j;
  }
  ordered_json j = ordered_json::object();
  for (std::string_view line : split(body, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig("expected key=value: " + std::string(line));
    }
    j[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return j;
}

double as_double(const ordered_json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return out;
  }
  throw InvalidConfig("bad number for " + key);
}

std::uint64_t as_count(const ordered_json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::uint64_t>(i);
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const unsigned long long out = std::strtoull(s.c_str(), &end, 10);
    if (!s.empty() && s.front() != '-' && end != s.c_str() && *end == '\0') {
      return out;
    }
  }
  throw InvalidConfig("bad non-negative integer for " + key);
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size == 0 || hidden == 0 || intermediate == 0 || max_positions == 0 ||
      type_vocab == 0) {
    throw InvalidConfig("encoder dimensions must be positive");
  }
  if (layers < 1) throw InvalidConfig("encoder needs at least one layer");
  if (num_labels < 2) throw InvalidConfig("classifier needs at least two labels");
}

std::uint64_t embedding_parameters(const EncoderConfig& c) {
  const std::uint64_t rows = add(add(c.vocab_size, c.max_positions), c.type_vocab);
  return add(mul(rows, c.hidden), layer_norm(c.hidden));
}

std::uint64_t layer_parameters(const EncoderConfig& c) {
  const std::uint64_t h = c.hidden;
  std::uint64_t n = mul(4, dense(h, h));
  n = add(n, layer_norm(h));
  n = add(n, dense(h, c.intermediate));
  n = add(n, dense(c.intermediate, h));
  return add(n, layer_norm(h));
}

std::uint64_t pooler_parameters(const EncoderConfig& c) {
  return c.include_pooler ? dense(c.hidden, c.hidden) : 0;
}

std::uint64_t classifier_parameters(const EncoderConfig& c) {
  return dense(c.hidden, c.num_labels);
}

std::uint64_t total_parameters(const EncoderConfig& c) {
  c.validate();
  std::uint64_t n = embedding_parameters(c);
  n = add(n, mul(c.layers, layer_parameters(c)));
  n = add(n, pooler_parameters(c));
  return add(n, classifier_parameters(c));
}

FreezeThrough FreezeThrough::parse(std::string_view text) {
  const std::string s = ascii_lower(trim(text));
  if (s == "none") return none();
  if (s == "embedding" || s == "embeddings") return embedding();
  std::string_view digits = s;
  for (std::string_view prefix : {"layer-", "layer ", "layer_", "layer"}) {
    if (digits.substr(0, prefix.size()) == prefix) {
      digits.remove_prefix(prefix.size());
      break;
    }
  }
  const std::string num(digits);
  char* end = nullptr;
  const unsigned long long k = std::strtoull(num.c_str(), &end, 10);
  if (num.empty() || num.front() == '-' || *end != '\0' || k == 0) {
    throw InvalidLayer("cannot parse freeze point: " + std::string(text));
  }
  return through_layer(k);
}

std::string FreezeThrough::to_string() const {
  switch (kind) {
    case Kind::kNone:
      return "none";
    case Kind::kEmbedding:
      return "embedding";
    case Kind::kLayer:
      return "layer-" + std::to_string(layer);
  }
  return "none";
}

FreezePlan trainable_after_freeze(const EncoderConfig& c, FreezeThrough through) {
  FreezePlan plan;
  plan.freeze_through = through;
  plan.total_count = total_parameters(c);
  std::uint64_t frozen = 0;
  switch (through.kind) {
    case FreezeThrough::Kind::kNone:
      break;
    case FreezeThrough::Kind::kEmbedding:
      frozen = embedding_parameters(c);
      break;
    case FreezeThrough::Kind::kLayer:
      if (through.layer == 0 || through.layer > c.layers) {
        throw InvalidLayer("layer " + std::to_string(through.layer) +
                           " outside 1.." + std::to_string(c.layers));
      }
      frozen = embedding_parameters(c) + through.layer * layer_parameters(c);
      break;
  }
  plan.trainable_count = plan.total_count - frozen;
  return plan;
}

std::string round_to_millions(std::uint64_t count) {
  const double m = static_cast<double>(count) / 1e6;
  char buf[32];
  if (count >= 1000000) {
    std::snprintf(buf, sizeof(buf), "%lluM",
                  static_cast<unsigned long long>(std::llround(m)));
  } else {
    std::snprintf(buf, sizeof(buf), "%.1fM", m);
  }
  return buf;
}

std::vector<FreezeRow> freeze_table(const EncoderConfig& c) {
  c.validate();
  std::vector<FreezeRow> rows;
  auto push = [&](std::string name, FreezeThrough through) {
    const FreezePlan plan = trainable_after_freeze(c, through);
    rows.push_back({std::move(name), through, plan.trainable_count,
                    round_to_millions(plan.trainable_count)});
  };
  push("Embedding Layer", FreezeThrough::embedding());
  for (std::uint64_t k = 1; k <= c.layers; ++k) {
    push("Layer " + std::to_string(k), FreezeThrough::through_layer(k));
  }
  return rows;
}

std::string freeze_table_csv(const std::vector<FreezeRow>& rows) {
  std::ostringstream out;
  out << "layer,freeze_through,trainable_parameters,rounded\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.freeze_through.to_string() << ',' << r.trainable
        << ',' << r.rounded << '\n';
  }
  return out.str();
}

std::string freeze_table_text(const std::vector<FreezeRow>& rows,
                              std::uint64_t total) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-18s %14s %10s\n", "Frozen through",
                "Trainable", "Rounded");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-18s %14llu %10s\n", r.name.c_str(),
                  static_cast<unsigned long long>(r.trainable), r.rounded.c_str());
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-18s %14llu %10s\n", "(total)",
                static_cast<unsigned long long>(total),
                round_to_millions(total).c_str());
  out << line;
  return out.str();
}

void FineTuneConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("learning_rate must be positive");
  }
  if (max_token_length == 0 || batch_size == 0 || epochs == 0) {
    throw InvalidConfig("max_token_length, batch_size and epochs must be positive");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw InvalidConfig("weight_decay must be non-negative");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw InvalidConfig("dropout must be in [0, 1)");
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw InvalidConfig("adam betas must be in (0, 1)");
  }
}

std::string to_json(const FineTuneConfig& config) {
  ordered_json j;
  j["learning_rate"] = config.learning_rate;
  j["max_token_length"] = config.max_token_length;
  j["batch_size"] = config.batch_size;
  j["weight_decay"] = config.weight_decay;
  j["dropout"] = config.dropout;
  j["adam_beta1"] = config.adam_beta1;
  j["adam_beta2"] = config.adam_beta2;
  j["epochs"] = config.epochs;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

FineTuneConfig parse_finetune_config(std::string_view text) {
  FineTuneConfig cfg;
  const ordered_json object = parse_object(text);
  for (const auto& [key, value] : object.items()) {
    if (key == "learning_rate") {
      cfg.learning_rate = as_double(value, key);
    } else if (key == "max_token_length") {
      cfg.max_token_length = as_count(value, key);
    } else if (key == "batch_size") {
      cfg.batch_size = as_count(value, key);
    } else if (key == "weight_decay") {
      cfg.weight_decay = as_double(value, key);
    } else if (key == "dropout") {
      cfg.dropout = as_double(value, key);
    } else if (key == "adam_beta1") {
      cfg.adam_beta1 = as_double(value, key);
    } else if (key == "adam_beta2") {
      cfg.adam_beta2 = as_double(value, key);
    } else if (key == "epochs") {
      cfg.epochs = as_count(value, key);
    } else if (key == "seed") {
      cfg.seed = as_count(value, key);
    } else {
      throw InvalidConfig("unknown fine-tune config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace finsent::freeze
