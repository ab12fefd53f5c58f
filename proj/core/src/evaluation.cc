#include "finsent/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "finsent/error.h"
#include "finsent/parallel.h"
#include "finsent/random.h"
#include "finsent/text.h"
#include "json.hpp"

namespace finsent::eval {
namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix();
}

double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::optional<std::size_t> resolve_label(const nlohmann::json& v,
                                         const std::vector<std::string>& names) {
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0 && static_cast<std::size_t>(i) < names.size()) {
      return static_cast<std::size_t>(i);
    }
    return std::nullopt;
  }
  if (v.is_string()) {
    const std::string lowered = ascii_lower(trim(v.get<std::string>()));
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (ascii_lower(names[i]) == lowered) return i;
    }
  }
  return std::nullopt;
}

void check_probs(const std::vector<double>& p, std::size_t k, std::size_t row) {
  if (p.size() != k) {
    throw InvalidProbability("record " + std::to_string(row) + ": expected " +
                             std::to_string(k) + " probabilities");
  }
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw InvalidProbability("record " + std::to_string(row) +
                               ": probability outside [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidProbability("record " + std::to_string(row) +
                             ": probabilities do not sum to 1");
  }
}

}  // namespace

std::vector<std::string> sentiment_classes() {
  return {"negative", "neutral", "positive"};
}

std::vector<std::string> nsp_classes() { return {"notNext", "isNext"}; }

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : names_(std::move(class_names)),
      counts_(names_.size() * names_.size(), 0) {}

ConfusionMatrix ConfusionMatrix::from_counts(
    std::vector<std::string> class_names,
    const std::vector<std::vector<std::uint64_t>>& rows) {
  ConfusionMatrix cm(std::move(class_names));
  const std::size_t k = cm.num_classes();
  if (rows.size() != k) throw InvalidConfig("confusion matrix must be square");
  for (std::size_t i = 0; i < k; ++i) {
    if (rows[i].size() != k) throw InvalidConfig("confusion matrix must be square");
    for (std::size_t j = 0; j < k; ++j) cm.add(i, j, rows[i][j]);
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted,
                          std::uint64_t n) {
  counts_[actual * names_.size() + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < names_.size(); ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t actual) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < names_.size(); ++j) s += at(actual, j);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < names_.size(); ++i) s += at(i, predicted);
  return s;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "actual\\predicted";
  for (const auto& n : names_) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out << names_[i];
    for (std::size_t j = 0; j < names_.size(); ++j) out << ',' << at(i, j);
    out << '\n';
  }
  return out.str();
}

std::string ConfusionMatrix::to_table() const {
  std::size_t width = 10;
  for (const auto& n : names_) width = std::max(width, n.size() + 2);
  auto pad = [&](const std::string& s) {
    return s + std::string(width > s.size() ? width - s.size() : 1, ' ');
  };
  std::ostringstream out;
  out << pad("actual") << "| predicted\n" << pad("");
  for (const auto& n : names_) out << pad(n);
  out << '\n';
  for (std::size_t i = 0; i < names_.size(); ++i) {
    out << pad(names_[i]);
    for (std::size_t j = 0; j < names_.size(); ++j) {
      out << pad(std::to_string(at(i, j)));
    }
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> actual,
                                 std::span<const std::size_t> predicted,
                                 std::vector<std::string> class_names) {
  if (actual.size() != predicted.size()) {
    throw LengthMismatch("actual and predicted differ in length");
  }
  ConfusionMatrix cm(std::move(class_names));
  const std::size_t k = cm.num_classes();
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] >= k || predicted[i] >= k) {
      throw UnknownLabel("label index out of range at record " + std::to_string(i));
    }
    cm.add(actual[i], predicted[i]);
  }
  return cm;
}

ConfusionMatrix confusion_matrix(std::span<const std::string> actual,
                                 std::span<const std::string> predicted,
                                 std::vector<std::string> class_names) {
  if (actual.size() != predicted.size()) {
    throw LengthMismatch("actual and predicted differ in length");
  }
  auto index = [&](const std::string& label) {
    const auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it == class_names.end()) throw UnknownLabel("unknown label: " + label);
    return static_cast<std::size_t>(it - class_names.begin());
  };
  std::vector<std::size_t> a;
  std::vector<std::size_t> p;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    a.push_back(index(actual[i]));
    p.push_back(index(predicted[i]));
  }
  return confusion_matrix(a, p, std::move(class_names));
}

double accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  return ratio_or_zero(cm.trace(), cm.total());
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  std::vector<ClassMetrics> out(cm.num_classes());
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    ClassMetrics& m = out[c];
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t col = cm.column_sum(c);
    const std::uint64_t row = cm.row_sum(c);
    m.support = row;
    m.precision_undefined = col == 0;
    m.recall_undefined = row == 0;
    m.precision = ratio_or_zero(tp, col);
    m.recall = ratio_or_zero(tp, row);
    const double denom = m.precision + m.recall;
    m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  }
  return out;
}

double macro_precision(const ConfusionMatrix& cm) {
  const auto pc = per_class_metrics(cm);
  double s = 0.0;
  for (const auto& m : pc) s += m.precision;
  return s / static_cast<double>(pc.size());
}

double macro_recall(const ConfusionMatrix& cm) {
  const auto pc = per_class_metrics(cm);
  double s = 0.0;
  for (const auto& m : pc) s += m.recall;
  return s / static_cast<double>(pc.size());
}

double macro_f1(const ConfusionMatrix& cm) {
  const auto pc = per_class_metrics(cm);
  double s = 0.0;
  for (const auto& m : pc) s += m.f1;
  return s / static_cast<double>(pc.size());
}

double macro_f1_harmonic(const ConfusionMatrix& cm) {
  const double p = macro_precision(cm);
  const double r = macro_recall(cm);
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double cross_entropy_loss(std::span<const std::vector<double>> probs,
                          std::span<const std::size_t> actual) {
  if (probs.size() != actual.size()) {
    throw LengthMismatch("probabilities and labels differ in length");
  }
  if (probs.empty()) throw InvalidSizes("cross-entropy of an empty set");
  const std::size_t k = probs.front().size();
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    check_probs(probs[i], k, i);
    if (actual[i] >= k) throw UnknownLabel("label index out of range");
    sum += -std::log(std::max(probs[i][actual[i]], kProbabilityFloor));
  }
  return sum / static_cast<double>(probs.size());
}

std::vector<PredictionRecord> parse_predictions(
    std::string_view raw, const std::vector<std::string>& class_names,
    const std::unordered_map<std::string, std::size_t>* actual_by_id) {
  std::vector<PredictionRecord> out;
  std::size_t index = 0;
  for (std::string_view line : split(raw, '\n')) {
    if (trim(line).empty()) continue;
    const std::size_t row = index++;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw MalformedRecord(row, "not a JSON object");
    }
    PredictionRecord rec;
    if (j.contains("id")) {
      rec.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    } else {
      rec.id = std::to_string(row);
    }
    for (const char* key : {"actual", "predicted"}) {
      if (!j.contains(key) && std::string_view(key) == "actual" && actual_by_id) {
        const auto it = actual_by_id->find(rec.id);
        if (it == actual_by_id->end()) {
          throw MalformedRecord(row, "no actual label for id " + rec.id);
        }
        rec.actual = it->second;
        continue;
      }
      if (!j.contains(key)) {
        throw MalformedRecord(row, std::string("missing field '") + key + "'");
      }
      const auto label = resolve_label(j[key], class_names);
      if (!label) throw MalformedRecord(row, std::string("unknown label in ") + key);
      (std::string_view(key) == "actual" ? rec.actual : rec.predicted) = *label;
    }
    if (j.contains("probs") && !j["probs"].is_null()) {
      const auto& p = j["probs"];
      std::vector<double> probs(class_names.size(), 0.0);
      if (p.is_array()) {
        if (p.size() != class_names.size()) {
          throw MalformedRecord(row, "probs has the wrong number of entries");
        }
        for (std::size_t c = 0; c < p.size(); ++c) {
          if (!p[c].is_number()) throw MalformedRecord(row, "non-numeric prob");
          probs[c] = p[c].get<double>();
        }
      } else if (p.is_object()) {
        for (std::size_t c = 0; c < class_names.size(); ++c) {
          if (!p.contains(class_names[c]) || !p[class_names[c]].is_number()) {
            throw MalformedRecord(row, "probs missing class " + class_names[c]);
          }
          probs[c] = p[class_names[c]].get<double>();
        }
      } else {
        throw MalformedRecord(row, "probs must be an array or object");
      }
      rec.probs = std::move(probs);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

bool MetricsReport::has_undefined() const {
  return std::any_of(per_class.begin(), per_class.end(), [](const auto& m) {
    return m.precision_undefined || m.recall_undefined;
  });
}

MetricsReport evaluate(std::span<const PredictionRecord> records,
                       const std::vector<std::string>& class_names) {
  std::vector<std::size_t> actual;
  std::vector<std::size_t> predicted;
  std::vector<std::vector<double>> probs;
  bool all_probs = !records.empty();
  for (const auto& r : records) {
    actual.push_back(r.actual);
    predicted.push_back(r.predicted);
    if (r.probs) {
      probs.push_back(*r.probs);
    } else {
      all_probs = false;
    }
  }
  MetricsReport report;
  report.confusion = confusion_matrix(actual, predicted, class_names);
  report.n = records.size();
  report.accuracy = accuracy(report.confusion);
  report.per_class = per_class_metrics(report.confusion);
  report.macro_precision = macro_precision(report.confusion);
  report.macro_recall = macro_recall(report.confusion);
  report.macro_f1 = macro_f1(report.confusion);
  report.macro_f1_harmonic = macro_f1_harmonic(report.confusion);
  if (all_probs) report.loss = cross_entropy_loss(probs, actual);
  return report;
}

std::vector<SweepRow> evaluate_by_test_size(
    std::span<const PredictionRecord> records, std::span<const std::size_t> sizes,
    const std::vector<std::string>& class_names,
    std::optional<std::uint64_t> seed, std::size_t jobs) {
  if (sizes.empty()) throw InvalidSizes("no sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0 || sizes[i] > records.size() ||
        (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw InvalidSizes("sizes must be ascending, positive and <= " +
                         std::to_string(records.size()));
    }
  }
  std::vector<PredictionRecord> stream(records.begin(), records.end());
  if (seed) {
    Rng rng(*seed);
    rng.shuffle(std::span<PredictionRecord>(stream));
  }
  std::vector<SweepRow> rows(sizes.size());
  parallel_for(sizes.size(), jobs, [&](std::size_t i) {
    rows[i].size = sizes[i];
    rows[i].report = evaluate(std::span(stream).first(sizes[i]), class_names);
  });
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "size,n,loss,accuracy,macro_precision,macro_recall,macro_f1,"
         "macro_f1_harmonic\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << row.size << ',' << r.n << ',' << (r.loss ? fixed(*r.loss) : "") << ','
        << fixed(r.accuracy) << ',' << fixed(r.macro_precision) << ','
        << fixed(r.macro_recall) << ',' << fixed(r.macro_f1) << ','
        << fixed(r.macro_f1_harmonic) << '\n';
  }
  return out.str();
}

std::vector<std::size_t> list_misclassified(
    std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
    std::pair<std::size_t, std::size_t> filter) {
  if (actual.size() != predicted.size()) {
    throw LengthMismatch("actual and predicted differ in length");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == filter.first && predicted[i] == filter.second) {
      out.push_back(i);
    }
  }
  return out;
}

std::string metrics_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "n," << report.n << '\n';
  out << "loss," << (report.loss ? fixed(*report.loss) : "") << '\n';
  out << "accuracy," << fixed(report.accuracy) << '\n';
  out << "macro_precision," << fixed(report.macro_precision) << '\n';
  out << "macro_recall," << fixed(report.macro_recall) << '\n';
  out << "macro_f1," << fixed(report.macro_f1) << '\n';
  out << "macro_f1_definition,mean_of_per_class_f1\n";
  out << "macro_f1_harmonic," << fixed(report.macro_f1_harmonic) << '\n';
  const auto& names = report.confusion.class_names();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    out << "precision_" << names[c] << ',' << fixed(m.precision) << '\n';
    out << "recall_" << names[c] << ',' << fixed(m.recall) << '\n';
    out << "f1_" << names[c] << ',' << fixed(m.f1) << '\n';
    out << "support_" << names[c] << ',' << m.support << '\n';
    if (m.precision_undefined) out << "undefined_precision_" << names[c] << ",0/0\n";
    if (m.recall_undefined) out << "undefined_recall_" << names[c] << ",0/0\n";
  }
  return out.str();
}

std::string render_report(const MetricsReport& report, std::string_view model_name) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-20s %-8s %-9s %-9s\n", "Model", "loss",
                "accuracy", "f1 macro");
  out << line;
  std::snprintf(line, sizeof(line), "%-20.*s %-8s %-9s %-9s\n",
                static_cast<int>(model_name.size()), model_name.data(),
                report.loss ? fixed(*report.loss, 4).c_str() : "-",
                fixed(report.accuracy, 4).c_str(), fixed(report.macro_f1, 4).c_str());
  out << line;
  out << "\nmacro F1 = mean of per-class F1; harmonic mean of macro precision "
         "and macro recall = "
      << fixed(report.macro_f1_harmonic, 4) << "\n\n";
  std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s %-8s\n", "class",
                "precision", "recall", "f1", "support");
  out << line;
  const auto& names = report.confusion.class_names();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(line, sizeof(line), "%-12s %-10s %-10s %-10s %-8llu\n",
                  names[c].c_str(), fixed(m.precision, 4).c_str(),
                  fixed(m.recall, 4).c_str(), fixed(m.f1, 4).c_str(),
                  static_cast<unsigned long long>(m.support));
    out << line;
  }
  out << "\nconfusion matrix (rows = actual, columns = predicted)\n"
      << report.confusion.to_table();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    if (m.precision_undefined) {
      out << "note: precision for " << names[c] << " is 0/0, reported as 0\n";
    }
    if (m.recall_undefined) {
      out << "note: recall for " << names[c] << " is 0/0, reported as 0\n";
    }
  }
  return out.str();
}

}  // namespace finsent::eval
