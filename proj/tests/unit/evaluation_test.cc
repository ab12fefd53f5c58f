#include <gtest/gtest.h>

#include <cmath>

#include "finsent/error.h"
#include "finsent/evaluation.h"
#include "finsent/random.h"
#include "oracles.h"

namespace finsent::eval {
namespace {

using Rows = std::vector<std::vector<std::uint64_t>>;

ConfusionMatrix table6() {
  return ConfusionMatrix::from_counts(sentiment_classes(),
                                      Rows{{53, 5, 2}, {7, 263, 18}, {0, 23, 114}});
}
ConfusionMatrix table7() {
  return ConfusionMatrix::from_counts(sentiment_classes(),
                                      Rows{{27, 1, 2}, {0, 138, 1}, {1, 1, 55}});
}
ConfusionMatrix table8() {
  return ConfusionMatrix::from_counts(nsp_classes(), Rows{{2277, 223}, {233, 2267}});
}

// Expands a matrix into (actual, predicted) label streams.
void expand(const ConfusionMatrix& cm, std::vector<std::size_t>& actual,
            std::vector<std::size_t>& predicted) {
  for (std::size_t a = 0; a < cm.num_classes(); ++a) {
    for (std::size_t p = 0; p < cm.num_classes(); ++p) {
      for (std::uint64_t n = 0; n < cm.at(a, p); ++n) {
        actual.push_back(a);
        predicted.push_back(p);
      }
    }
  }
}

TEST(Confusion, TablesMatchHandComputedMetrics) {
  EXPECT_NEAR(accuracy(table6()), 0.8865979381443299, 1e-12);
  EXPECT_NEAR(macro_f1(table6()), 0.8777082045431853, 1e-12);
  EXPECT_NEAR(macro_f1_harmonic(table6()), 0.8777480187700439, 1e-12);
  EXPECT_NEAR(accuracy(table7()), 0.9734513274336283, 1e-12);
  EXPECT_NEAR(macro_f1(table7()), 0.9589345112390041, 1e-12);
  EXPECT_NEAR(macro_f1_harmonic(table7()), 0.9592846866705614, 1e-12);
  EXPECT_NEAR(accuracy(table8()), 0.9088, 1e-12);
  EXPECT_NEAR(macro_f1(table8()), 0.9087996351985408, 1e-12);
  EXPECT_NEAR(macro_f1_harmonic(table8()), 0.908803270440558, 1e-12);
}

TEST(Confusion, PerClassOnTable6) {
  const auto m = per_class_metrics(table6());
  ASSERT_EQ(m.size(), 3u);
  EXPECT_DOUBLE_EQ(m[1].precision, 263.0 / 291.0);
  EXPECT_DOUBLE_EQ(m[1].recall, 263.0 / 288.0);
  EXPECT_NEAR(m[0].f1, 0.883333, 5e-7);
  EXPECT_NEAR(m[2].precision, 0.850746, 5e-7);
  EXPECT_NEAR(m[2].recall, 0.832117, 5e-7);
  EXPECT_NEAR(m[2].f1, 0.841328, 5e-7);
  EXPECT_EQ(m[2].support, 137u);
}

TEST(Confusion, BuiltFromLabelsMatchesCounts) {
  std::vector<std::size_t> actual;
  std::vector<std::size_t> predicted;
  expand(table7(), actual, predicted);
  EXPECT_EQ(confusion_matrix(actual, predicted, sentiment_classes()), table7());

  const std::vector<std::string> a{"isNext", "notNext"};
  const std::vector<std::string> p{"isNext", "isNext"};
  const ConfusionMatrix cm = confusion_matrix(a, p, nsp_classes());
  EXPECT_EQ(cm.at(1, 1), 1u);
  EXPECT_EQ(cm.at(0, 1), 1u);
}

TEST(Confusion, Errors) {
  const std::vector<std::size_t> two{0, 1};
  const std::vector<std::size_t> one{0};
  const std::vector<std::size_t> bad{0, 3};
  EXPECT_THROW(confusion_matrix(two, one, sentiment_classes()), LengthMismatch);
  EXPECT_THROW(confusion_matrix(two, bad, sentiment_classes()), UnknownLabel);
  const std::vector<std::string> s{"bullish"};
  EXPECT_THROW(confusion_matrix(s, s, sentiment_classes()), UnknownLabel);
  EXPECT_THROW(ConfusionMatrix::from_counts(nsp_classes(), Rows{{1, 2, 3}, {4, 5, 6}}),
               InvalidConfig);
  const ConfusionMatrix empty(sentiment_classes());
  EXPECT_THROW(accuracy(empty), EmptyMatrix);
  EXPECT_THROW(macro_f1(empty), EmptyMatrix);
}

TEST(Confusion, UndefinedRatiosAreZeroAndFlagged) {
  const ConfusionMatrix cm =
      ConfusionMatrix::from_counts(sentiment_classes(), Rows{{3, 0, 0}, {0, 2, 0}, {0, 0, 0}});
  const auto m = per_class_metrics(cm);
  EXPECT_EQ(m[2].precision, 0.0);
  EXPECT_EQ(m[2].recall, 0.0);
  EXPECT_EQ(m[2].f1, 0.0);
  EXPECT_TRUE(m[2].precision_undefined);
  EXPECT_TRUE(m[2].recall_undefined);
  EXPECT_FALSE(m[0].precision_undefined);
  EXPECT_DOUBLE_EQ(macro_f1(cm), 2.0 / 3.0);
}

TEST(Confusion, CsvLayout) {
  const std::string csv = table8().to_csv();
  EXPECT_EQ(csv, "actual\\predicted,notNext,isNext\nnotNext,2277,223\nisNext,233,2267\n");
}

TEST(Metrics, AgreeWithBruteForceOnRandomStreams) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_below(3);
    const std::size_t n = 1 + rng.uniform_below(300);
    std::vector<std::size_t> a(n);
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform_below(k);
      p[i] = rng.uniform_below(4) == 0 ? rng.uniform_below(k) : a[i];
    }
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    const ConfusionMatrix cm = confusion_matrix(a, p, names);
    const auto want = testing::brute_force_metrics(a, p, k);
    EXPECT_NEAR(accuracy(cm), want.accuracy, 1e-12);
    EXPECT_NEAR(macro_f1(cm), want.macro_f1, 1e-12);
    EXPECT_NEAR(macro_f1_harmonic(cm), want.macro_f1_harmonic, 1e-12);
    const auto got = per_class_metrics(cm);
    for (std::size_t c = 0; c < k; ++c) {
      EXPECT_NEAR(got[c].precision, want.precision[c], 1e-12);
      EXPECT_NEAR(got[c].recall, want.recall[c], 1e-12);
      EXPECT_NEAR(got[c].f1, want.f1[c], 1e-12);
    }
  }
}

TEST(Metrics, PermutationInvariant) {
  std::vector<std::size_t> a;
  std::vector<std::size_t> p;
  expand(table6(), a, p);
  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(4);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> a2;
  std::vector<std::size_t> p2;
  for (auto i : order) {
    a2.push_back(a[i]);
    p2.push_back(p[i]);
  }
  EXPECT_EQ(macro_f1(confusion_matrix(a2, p2, sentiment_classes())), macro_f1(table6()));
}

TEST(Loss, KnownValues) {
  const std::vector<std::vector<double>> perfect{{0, 1, 0}, {1, 0, 0}};
  const std::vector<std::size_t> actual{1, 0};
  EXPECT_DOUBLE_EQ(cross_entropy_loss(perfect, actual), 0.0);

  const std::vector<std::vector<double>> uniform{{1.0 / 3, 1.0 / 3, 1.0 / 3}};
  const std::vector<std::size_t> one{2};
  EXPECT_NEAR(cross_entropy_loss(uniform, one), std::log(3.0), 1e-12);

  const std::vector<std::vector<double>> wrong{{1, 0, 0}};
  EXPECT_NEAR(cross_entropy_loss(wrong, one), -std::log(1e-12), 1e-9);
  EXPECT_NEAR(cross_entropy_loss(wrong, one), 27.631021115928547, 1e-9);
}

TEST(Loss, Errors) {
  const std::vector<std::vector<double>> probs{{0.5, 0.5, 0.0}};
  const std::vector<std::size_t> two{0, 1};
  EXPECT_THROW(cross_entropy_loss(probs, two), LengthMismatch);
  const std::vector<std::size_t> one{0};
  const std::vector<std::vector<double>> unnormalized{{0.5, 0.6, 0.0}};
  EXPECT_THROW(cross_entropy_loss(unnormalized, one), InvalidProbability);
  const std::vector<std::vector<double>> negative{{1.5, -0.5, 0.0}};
  EXPECT_THROW(cross_entropy_loss(negative, one), InvalidProbability);
  const std::vector<std::size_t> out_of_range{5};
  EXPECT_THROW(cross_entropy_loss(probs, out_of_range), UnknownLabel);
  EXPECT_THROW(cross_entropy_loss({}, {}), InvalidSizes);
}

std::vector<PredictionRecord> records_from(const ConfusionMatrix& cm) {
  std::vector<std::size_t> a;
  std::vector<std::size_t> p;
  expand(cm, a, p);
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back({"t-" + std::to_string(i), a[i], p[i], std::nullopt});
  }
  return out;
}

TEST(Sweep, FullSizeEqualsWholeEvaluation) {
  const auto recs = records_from(table7());
  const std::vector<std::size_t> sizes{1, 50, recs.size()};
  const auto rows = evaluate_by_test_size(recs, sizes, sentiment_classes(), 3, 4);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].report.n, 1u);
  EXPECT_TRUE(rows[0].report.accuracy == 0.0 || rows[0].report.accuracy == 1.0);
  EXPECT_EQ(rows[2].report.confusion, table7());
  EXPECT_DOUBLE_EQ(rows[2].report.macro_f1, macro_f1(table7()));
  const std::string csv = sweep_to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "size,n,loss,accuracy,macro_precision,macro_recall,macro_f1,macro_f1_harmonic");
}

TEST(Sweep, PrefixWithoutShuffle) {
  const auto recs = records_from(table7());
  const std::vector<std::size_t> sizes{30};
  const auto rows = evaluate_by_test_size(recs, sizes, sentiment_classes(), std::nullopt);
  // The first 30 records are the negative row of the matrix.
  EXPECT_EQ(rows[0].report.confusion.row_sum(0), 30u);
  EXPECT_DOUBLE_EQ(rows[0].report.accuracy, 27.0 / 30.0);
}

TEST(Sweep, InvalidSizes) {
  const auto recs = records_from(table7());
  for (const std::vector<std::size_t>& sizes :
       {std::vector<std::size_t>{0}, std::vector<std::size_t>{10, 5},
        std::vector<std::size_t>{5, 5}, std::vector<std::size_t>{recs.size() + 1},
        std::vector<std::size_t>{}}) {
    EXPECT_THROW(evaluate_by_test_size(recs, sizes, sentiment_classes(), 1), InvalidSizes);
  }
}

TEST(Misclassified, FiltersByPair) {
  std::vector<std::size_t> a;
  std::vector<std::size_t> p;
  expand(table7(), a, p);
  const auto idx = list_misclassified(a, p, {1, 2});
  ASSERT_EQ(idx.size(), 1u);
  EXPECT_EQ(a[idx[0]], 1u);
  EXPECT_EQ(p[idx[0]], 2u);

  std::vector<std::size_t> a6;
  std::vector<std::size_t> p6;
  expand(table6(), a6, p6);
  EXPECT_TRUE(list_misclassified(a6, p6, {2, 0}).empty());
  EXPECT_EQ(list_misclassified(a6, p6, {1, 2}).size(), 18u);

  const std::vector<std::size_t> shorter{0};
  EXPECT_THROW(list_misclassified(a, shorter, {0, 1}), LengthMismatch);
}

TEST(ParsePredictions, NamesIndicesAndProbs) {
  const std::string raw =
      R"({"id":"a","actual":"Neutral","predicted":1,"probs":[0.1,0.8,0.1]})"
      "\n"
      R"({"id":"b","actual":2,"predicted":"negative","probs":{"negative":0.6,"neutral":0.1,"positive":0.3}})"
      "\n\n";
  const auto recs = parse_predictions(raw, sentiment_classes());
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].actual, 1u);
  EXPECT_EQ(recs[0].predicted, 1u);
  EXPECT_EQ(*recs[1].probs, (std::vector<double>{0.6, 0.1, 0.3}));
  EXPECT_EQ(recs[1].actual, 2u);
  const MetricsReport r = evaluate(recs, sentiment_classes());
  ASSERT_TRUE(r.loss.has_value());
  EXPECT_NEAR(*r.loss, (-std::log(0.8) - std::log(0.3)) / 2, 1e-12);
}

TEST(ParsePredictions, JoinsActualById) {
  const std::unordered_map<std::string, std::size_t> gold{{"x", 2}};
  const auto recs =
      parse_predictions(R"({"id":"x","predicted":"positive"})", sentiment_classes(), &gold);
  EXPECT_EQ(recs[0].actual, 2u);
  EXPECT_FALSE(recs[0].probs);
  EXPECT_FALSE(evaluate(recs, sentiment_classes()).loss);
}

TEST(ParsePredictions, ErrorsCarryIndex) {
  try {
    parse_predictions("{\"id\":\"a\",\"actual\":0,\"predicted\":0}\n{\"id\":\"b\",\"actual\":0}\n",
                      sentiment_classes());
    FAIL();
  } catch (const MalformedRecord& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(parse_predictions(R"({"id":"a","actual":"up","predicted":0})", sentiment_classes()),
               MalformedRecord);
  EXPECT_THROW(parse_predictions(R"({"id":"a","predicted":0})", sentiment_classes()),
               MalformedRecord);
  EXPECT_THROW(parse_predictions("not json", sentiment_classes()), MalformedRecord);
}

TEST(Report, CsvAndRenderedText) {
  const auto recs = records_from(table6());
  const MetricsReport r = evaluate(recs, sentiment_classes());
  const std::string csv = metrics_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,value");
  EXPECT_NE(csv.find("accuracy,0.886598"), std::string::npos);
  EXPECT_NE(csv.find("macro_f1,0.877708"), std::string::npos);
  EXPECT_NE(csv.find("macro_f1_definition,mean_of_per_class_f1"), std::string::npos);
  const std::string text = render_report(r, "FinBERT-test");
  EXPECT_NE(text.find("FinBERT-test"), std::string::npos);
  EXPECT_NE(text.find("0.8866"), std::string::npos);
  EXPECT_NE(text.find("0.8777"), std::string::npos);
  EXPECT_FALSE(r.has_undefined());
}

}  // namespace
}  // namespace finsent::eval
