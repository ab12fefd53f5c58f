#ifndef FINSENT_FREEZE_PLANNER_H_
#define FINSENT_FREEZE_PLANNER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace finsent::freeze {

// Dimensions of a BERT-style encoder with a classification head.
// Defaults are the uncased base model with three labels.
struct EncoderConfig {
  std::uint64_t vocab_size = 30522;
  std::uint64_t hidden = 768;
  std::uint64_t layers = 12;
  std::uint64_t intermediate = 3072;
  std::uint64_t max_positions = 512;
  std::uint64_t type_vocab = 2;
  std::uint64_t num_labels = 3;
  bool include_pooler = true;

  // Throws InvalidConfig.
  void validate() const;
};

// Word, position and token-type tables plus one LayerNorm.
std::uint64_t embedding_parameters(const EncoderConfig& c);
// Attention (q, k, v, output), two LayerNorms and the feed-forward pair.
std::uint64_t layer_parameters(const EncoderConfig& c);
std::uint64_t pooler_parameters(const EncoderConfig& c);
std::uint64_t classifier_parameters(const EncoderConfig& c);

// Sum of every block. No masked-LM head. Throws InvalidConfig.
std::uint64_t total_parameters(const EncoderConfig& c);

// How deep the freeze goes. kLayer with layer == L leaves only the head.
struct FreezeThrough {
  enum class Kind : std::uint8_t { kNone, kEmbedding, kLayer };
  Kind kind = Kind::kNone;
  std::uint64_t layer = 0;

  static FreezeThrough none() { return {}; }
  static FreezeThrough embedding() { return {Kind::kEmbedding, 0}; }
  static FreezeThrough through_layer(std::uint64_t k) { return {Kind::kLayer, k}; }

  // "none", "embedding", "layer-<k>", "layer <k>" or a bare "<k>".
  // Throws InvalidLayer.
  static FreezeThrough parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const FreezeThrough&, const FreezeThrough&) = default;
};

struct FreezePlan {
  FreezeThrough freeze_through;
  std::uint64_t trainable_count = 0;
  std::uint64_t total_count = 0;
};

// Throws InvalidConfig, or InvalidLayer when the layer is 0 or > L.
FreezePlan trainable_after_freeze(const EncoderConfig& c, FreezeThrough through);

struct FreezeRow {
  std::string name;  // "Embedding Layer", "Layer 1", ...
  FreezeThrough freeze_through;
  std::uint64_t trainable = 0;
  std::string rounded;  // millions: "86M", or "0.6M" below one million
};

// Integer millions at or above 1M, one decimal below.
std::string round_to_millions(std::uint64_t count);

// Rows for the embedding layer then layers 1..L.
std::vector<FreezeRow> freeze_table(const EncoderConfig& c);

// layer,freeze_through,trainable_parameters,rounded
std::string freeze_table_csv(const std::vector<FreezeRow>& rows);
std::string freeze_table_text(const std::vector<FreezeRow>& rows,
                              std::uint64_t total);

// Hyperparameters handed to the fine-tuning harness.
struct FineTuneConfig {
  double learning_rate = 2e-5;
  std::uint64_t max_token_length = 512;
  std::uint64_t batch_size = 8;
  double weight_decay = 0.01;
  double dropout = 0.2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  std::uint64_t epochs = 4;
  std::uint64_t seed = 42;

  // Throws InvalidConfig.
  void validate() const;

  friend bool operator==(const FineTuneConfig&, const FineTuneConfig&) = default;
};

// JSON object with keys in this order: learning_rate, max_token_length,
// batch_size, weight_decay, dropout, adam_beta1, adam_beta2, epochs, seed.
std::string to_json(const FineTuneConfig& config);

// JSON or key=value lines; missing keys keep their defaults, unknown keys
// are rejected. Throws InvalidConfig.
FineTuneConfig parse_finetune_config(std::string_view text);

}  // namespace finsent::freeze

#endif  // FINSENT_FREEZE_PLANNER_H_
