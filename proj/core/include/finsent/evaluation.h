#ifndef FINSENT_EVALUATION_H_
#define FINSENT_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace finsent::eval {

// Class name lists used by the CLI. Order defines the class index.
std::vector<std::string> sentiment_classes();  // negative, neutral, positive
std::vector<std::string> nsp_classes();        // notNext, isNext

// Rows are actual classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> class_names);

  // Throws InvalidConfig unless `rows` is K x K for K class names.
  static ConfusionMatrix from_counts(std::vector<std::string> class_names,
                                     const std::vector<std::vector<std::uint64_t>>& rows);

  std::size_t num_classes() const { return names_.size(); }
  const std::vector<std::string>& class_names() const { return names_; }

  std::uint64_t at(std::size_t actual, std::size_t predicted) const {
    return counts_[actual * names_.size() + predicted];
  }
  void add(std::size_t actual, std::size_t predicted, std::uint64_t n = 1);

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t actual) const;
  std::uint64_t column_sum(std::size_t predicted) const;

  // "actual\predicted,<names...>" header then one row per actual class.
  std::string to_csv() const;
  std::string to_table() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::uint64_t> counts_;
};

// Label indices must be < class_names.size().
// Throws LengthMismatch or UnknownLabel.
ConfusionMatrix confusion_matrix(std::span<const std::size_t> actual,
                                 std::span<const std::size_t> predicted,
                                 std::vector<std::string> class_names);

// Same, resolving labels by exact class name.
ConfusionMatrix confusion_matrix(std::span<const std::string> actual,
                                 std::span<const std::string> predicted,
                                 std::vector<std::string> class_names);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;  // actual count
  // 0/0 cases, reported as 0 and flagged.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

// All of these throw EmptyMatrix when total() == 0.
double accuracy(const ConfusionMatrix& cm);
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);
double macro_precision(const ConfusionMatrix& cm);
double macro_recall(const ConfusionMatrix& cm);
// Unweighted mean of per-class F1. This is the default macro F1.
double macro_f1(const ConfusionMatrix& cm);
// Harmonic mean of macro precision and macro recall.
double macro_f1_harmonic(const ConfusionMatrix& cm);

inline constexpr double kProbabilityFloor = 1e-12;

// Mean of -ln(max(p[actual], 1e-12)). Every vector must have one entry per
// class, entries in [0,1], sum within 1e-6 of 1.
// Throws LengthMismatch, InvalidProbability, or InvalidSizes when empty.
double cross_entropy_loss(std::span<const std::vector<double>> probs,
                          std::span<const std::size_t> actual);

struct PredictionRecord {
  std::string id;
  std::size_t actual = 0;
  std::size_t predicted = 0;
  std::optional<std::vector<double>> probs;
};

// Line-delimited JSON {"id", "actual", "predicted", "probs"?}. Labels may be
// class names (case-insensitive) or indices; probs an array in class order
// or an object keyed by class name. A record without "actual" takes it from
// `actual_by_id` when given. Throws MalformedRecord.
std::vector<PredictionRecord> parse_predictions(
    std::string_view raw, const std::vector<std::string>& class_names,
    const std::unordered_map<std::string, std::size_t>* actual_by_id = nullptr);

struct MetricsReport {
  std::size_t n = 0;
  std::optional<double> loss;  // present when every record carries probs
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double macro_f1_harmonic = 0.0;
  ConfusionMatrix confusion{{}};

  bool has_undefined() const;
};

// Throws EmptyMatrix on empty input.
MetricsReport evaluate(std::span<const PredictionRecord> records,
                       const std::vector<std::string>& class_names);

struct SweepRow {
  std::size_t size = 0;
  MetricsReport report;
};

// Metrics on the first s records of the evaluation stream for each s. The
// stream is shuffled by `seed` when one is given. Sizes must be strictly
// ascending, positive and <= records.size(); throws InvalidSizes otherwise or
// when no sizes are given.
std::vector<SweepRow> evaluate_by_test_size(
    std::span<const PredictionRecord> records, std::span<const std::size_t> sizes,
    const std::vector<std::string>& class_names,
    std::optional<std::uint64_t> seed, std::size_t jobs = 1);

// size,n,loss,accuracy,macro_precision,macro_recall,macro_f1,macro_f1_harmonic
std::string sweep_to_csv(std::span<const SweepRow> rows);

// Indices (input order) where actual == filter.first and
// predicted == filter.second. Throws LengthMismatch.
std::vector<std::size_t> list_misclassified(
    std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
    std::pair<std::size_t, std::size_t> filter);

template <typename Record>
std::vector<Record> list_misclassified(std::span<const Record> records,
                                       std::span<const std::size_t> actual,
                                       std::span<const std::size_t> predicted,
                                       std::pair<std::size_t, std::size_t> filter) {
  std::vector<Record> out;
  for (std::size_t i : list_misclassified(actual, predicted, filter)) {
    out.push_back(records[i]);
  }
  return out;
}

// metric,value rows; names the macro F1 definition and flags 0/0 cases.
std::string metrics_to_csv(const MetricsReport& report);

// Model/loss/accuracy/f1 row, per-class table and confusion matrix.
std::string render_report(const MetricsReport& report, std::string_view model_name);

}  // namespace finsent::eval

#endif  // FINSENT_EVALUATION_H_
