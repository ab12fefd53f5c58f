#include <gtest/gtest.h>

#include "finsent/error.h"
#include "finsent/freeze_planner.h"

namespace finsent::freeze {
namespace {

// vocab 10, hidden 2, one layer, ffn 4, 3 positions, 2 types, 2 labels.
// embeddings (10+3+2)*2 + 4 = 34; layer 4*6 + 8 + 12 + 10 = 54;
// pooler 6; classifier 6; total 100.
EncoderConfig tiny() {
  EncoderConfig c;
  c.vocab_size = 10;
  c.hidden = 2;
  c.layers = 1;
  c.intermediate = 4;
  c.max_positions = 3;
  c.type_vocab = 2;
  c.num_labels = 2;
  return c;
}

TEST(ParameterCount, TinyConfigByHand) {
  const EncoderConfig c = tiny();
  EXPECT_EQ(embedding_parameters(c), 34u);
  EXPECT_EQ(layer_parameters(c), 54u);
  EXPECT_EQ(pooler_parameters(c), 6u);
  EXPECT_EQ(classifier_parameters(c), 6u);
  EXPECT_EQ(total_parameters(c), 100u);
  const auto rows = freeze_table(c);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].trainable, 66u);
  EXPECT_EQ(rows[1].trainable, 12u);
}

TEST(ParameterCount, BaseEncoder) {
  const EncoderConfig c;
  EXPECT_EQ(embedding_parameters(c), 23837184u);
  EXPECT_EQ(layer_parameters(c), 7087872u);
  EXPECT_EQ(total_parameters(c), 109484547u);
  EncoderConfig no_pooler;
  no_pooler.include_pooler = false;
  EXPECT_EQ(total_parameters(no_pooler), 109484547u - 590592u);
}

TEST(FreezeTable, BaseEncoderRows) {
  const auto rows = freeze_table(EncoderConfig{});
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0].name, "Embedding Layer");
  EXPECT_EQ(rows[0].trainable, 85647363u);
  EXPECT_EQ(rows[10].name, "Layer 10");
  EXPECT_EQ(rows[10].trainable, 14768643u);
  EXPECT_EQ(rows[12].trainable, 592899u);
  const std::vector<std::string> rounded{"86M", "79M", "71M", "64M", "57M", "50M", "43M",
                                         "36M", "29M", "22M", "15M", "8M", "0.6M"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].rounded, rounded[i]) << rows[i].name;
    if (i > 0) EXPECT_EQ(rows[i - 1].trainable - rows[i].trainable, 7087872u);
  }
}

TEST(FreezeTable, LinearInDepth) {
  EncoderConfig c;
  c.layers = 24;
  c.hidden = 1024;
  c.intermediate = 4096;
  const auto rows = freeze_table(c);
  ASSERT_EQ(rows.size(), 25u);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    EXPECT_EQ(rows[0].trainable - rows[k].trainable, k * layer_parameters(c));
  }
  EXPECT_EQ(rows.back().trainable, pooler_parameters(c) + classifier_parameters(c));
}

TEST(TrainableAfterFreeze, Bounds) {
  const EncoderConfig c;
  EXPECT_EQ(trainable_after_freeze(c, FreezeThrough::none()).trainable_count, 109484547u);
  EXPECT_THROW(trainable_after_freeze(c, FreezeThrough::through_layer(0)), InvalidLayer);
  EXPECT_THROW(trainable_after_freeze(c, FreezeThrough::through_layer(13)), InvalidLayer);
  EncoderConfig bad;
  bad.hidden = 0;
  EXPECT_THROW(trainable_after_freeze(bad, FreezeThrough::none()), InvalidConfig);
}

TEST(FreezeThrough, ParseAndPrint) {
  EXPECT_EQ(FreezeThrough::parse("none"), FreezeThrough::none());
  EXPECT_EQ(FreezeThrough::parse("Embedding"), FreezeThrough::embedding());
  EXPECT_EQ(FreezeThrough::parse("layer-10"), FreezeThrough::through_layer(10));
  EXPECT_EQ(FreezeThrough::parse("Layer 3"), FreezeThrough::through_layer(3));
  EXPECT_EQ(FreezeThrough::parse("7"), FreezeThrough::through_layer(7));
  EXPECT_EQ(FreezeThrough::through_layer(10).to_string(), "layer-10");
  EXPECT_EQ(FreezeThrough::embedding().to_string(), "embedding");
  EXPECT_THROW(FreezeThrough::parse("layer-x"), InvalidLayer);
  EXPECT_THROW(FreezeThrough::parse(""), InvalidLayer);
}

TEST(RoundToMillions, Formats) {
  EXPECT_EQ(round_to_millions(85647363), "86M");
  EXPECT_EQ(round_to_millions(1000000), "1M");
  EXPECT_EQ(round_to_millions(592899), "0.6M");
  EXPECT_EQ(round_to_millions(0), "0.0M");
}

TEST(FreezeTable, CsvHeader) {
  const std::string csv = freeze_table_csv(freeze_table(tiny()));
  EXPECT_EQ(csv,
            "layer,freeze_through,trainable_parameters,rounded\n"
            "Embedding Layer,embedding,66,0.0M\n"
            "Layer 1,layer-1,12,0.0M\n");
}

TEST(FineTuneConfig, DefaultJsonKeyOrder) {
  EXPECT_EQ(to_json(FineTuneConfig{}),
            "{\n"
            "  \"learning_rate\": 2e-05,\n"
            "  \"max_token_length\": 512,\n"
            "  \"batch_size\": 8,\n"
            "  \"weight_decay\": 0.01,\n"
            "  \"dropout\": 0.2,\n"
            "  \"adam_beta1\": 0.9,\n"
            "  \"adam_beta2\": 0.999,\n"
            "  \"epochs\": 4,\n"
            "  \"seed\": 42\n"
            "}\n");
}

TEST(FineTuneConfig, RoundTripAndKeyValue) {
  FineTuneConfig c;
  c.learning_rate = 3e-5;
  c.epochs = 2;
  EXPECT_EQ(parse_finetune_config(to_json(c)), c);
  const FineTuneConfig kv = parse_finetune_config("batch_size = 16\n# note\ndropout=0.1\n");
  EXPECT_EQ(kv.batch_size, 16u);
  EXPECT_DOUBLE_EQ(kv.dropout, 0.1);
  EXPECT_EQ(kv.epochs, 4u);
}

TEST(FineTuneConfig, Rejects) {
  EXPECT_THROW(parse_finetune_config("momentum=0.9\n"), InvalidConfig);
  EXPECT_THROW(parse_finetune_config(R"({"dropout": 1.5})"), InvalidConfig);
  EXPECT_THROW(parse_finetune_config(R"({"learning_rate": 0})"), InvalidConfig);
  EXPECT_THROW(parse_finetune_config(R"({"batch_size": -1})"), InvalidConfig);
  EXPECT_THROW(parse_finetune_config("epochs=many\n"), InvalidConfig);
}

}  // namespace
}  // namespace finsent::freeze
