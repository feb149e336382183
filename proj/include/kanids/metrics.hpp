#pragma once

// Multiclass evaluation: confusion matrix plus accuracy and precision /
// recall / F1 under micro, macro and support-weighted averaging.
//
// confusion[i][j] counts rows whose true class is i and predicted class is j.
// Macro averages run over the classes that occur in the labels or in the
// predictions; classes absent from both carry no information.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kanids/error.hpp"

namespace kanids {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class Averaging { Micro, Macro, Weighted };

inline std::string_view to_string(Averaging a) {
  switch (a) {
    case Averaging::Micro: return "micro";
    case Averaging::Macro: return "macro";
    case Averaging::Weighted: return "weighted";
  }
  return "weighted";
}

inline Averaging parse_averaging(std::string_view s) {
  if (s == "micro") return Averaging::Micro;
  if (s == "macro") return Averaging::Macro;
  if (s == "weighted") return Averaging::Weighted;
  throw Error(ErrorKind::Config, "unknown averaging mode '" + std::string(s) + "'");
}

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::uint64_t>> confusion;
  std::uint64_t total = 0;
  double accuracy = 0.0;
  AveragedMetrics micro;
  AveragedMetrics macro;
  AveragedMetrics weighted;
  std::vector<ClassMetrics> per_class;

  std::size_t classes() const { return confusion.size(); }

  const AveragedMetrics& averaged(Averaging a) const {
    switch (a) {
      case Averaging::Micro: return micro;
      case Averaging::Macro: return macro;
      case Averaging::Weighted: return weighted;
    }
    return weighted;
  }
};

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

inline double harmonic_f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

inline std::vector<std::string> default_class_names(std::size_t classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < classes; ++c) names.push_back("class" + std::to_string(c));
  return names;
}

inline EvalReport report_from_confusion(std::vector<std::vector<std::uint64_t>> confusion,
                                        std::vector<std::string> class_names = {}) {
  const std::size_t n = confusion.size();
  for (const auto& row : confusion)
    if (row.size() != n) throw Error(ErrorKind::ShapeMismatch, "confusion matrix must be square");
  if (class_names.empty()) class_names = default_class_names(n);
  if (class_names.size() != n) throw Error(ErrorKind::LengthMismatch, "one name per class required");

  EvalReport rep;
  rep.class_names = std::move(class_names);
  rep.confusion = std::move(confusion);
  std::vector<std::uint64_t> row_sum(n, 0), col_sum(n, 0);
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row_sum[i] += rep.confusion[i][j];
      col_sum[j] += rep.confusion[i][j];
      rep.total += rep.confusion[i][j];
    }
    trace += rep.confusion[i][i];
  }
  const double total = static_cast<double>(rep.total);
  rep.accuracy = safe_ratio(static_cast<double>(trace), total);

  rep.per_class.resize(n);
  std::size_t present = 0;
  for (std::size_t c = 0; c < n; ++c) {
    auto& m = rep.per_class[c];
    const double tp = static_cast<double>(rep.confusion[c][c]);
    m.support = row_sum[c];
    m.precision = safe_ratio(tp, static_cast<double>(col_sum[c]));
    m.recall = safe_ratio(tp, static_cast<double>(row_sum[c]));
    m.f1 = harmonic_f1(m.precision, m.recall);
    if (row_sum[c] > 0 || col_sum[c] > 0) {
      ++present;
      rep.macro.precision += m.precision;
      rep.macro.recall += m.recall;
      rep.macro.f1 += m.f1;
    }
    const double w = safe_ratio(static_cast<double>(row_sum[c]), total);
    rep.weighted.precision += w * m.precision;
    rep.weighted.recall += w * m.recall;
    rep.weighted.f1 += w * m.f1;
  }
  if (present > 0) {
    rep.macro.precision /= static_cast<double>(present);
    rep.macro.recall /= static_cast<double>(present);
    rep.macro.f1 /= static_cast<double>(present);
  }
  // Pooled counts: every misclassification is one false positive and one false negative.
  const double tp = static_cast<double>(trace);
  const double fp = total - tp;
  const double fn = total - tp;
  rep.micro.precision = safe_ratio(tp, tp + fp);
  rep.micro.recall = safe_ratio(tp, tp + fn);
  rep.micro.f1 = harmonic_f1(rep.micro.precision, rep.micro.recall);
  return rep;
}

inline EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels, std::size_t classes,
                           std::vector<std::string> class_names = {}) {
  if (predictions.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                               std::to_string(labels.size()) + " labels");
  std::vector<std::vector<std::uint64_t>> confusion(classes, std::vector<std::uint64_t>(classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i];
    const int p = predictions[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= classes || static_cast<std::size_t>(p) >= classes)
      throw Error(ErrorKind::LabelOutOfRange, "class id out of range at position " + std::to_string(i));
    ++confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return report_from_confusion(std::move(confusion), std::move(class_names));
}

inline nlohmann::json averaged_json(const AveragedMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const EvalReport& rep) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < rep.classes(); ++c) {
    const auto& m = rep.per_class[c];
    per_class.push_back({{"class", rep.class_names[c]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  return {{"classes", rep.class_names},
          {"total", rep.total},
          {"accuracy", rep.accuracy},
          {"micro", averaged_json(rep.micro)},
          {"macro", averaged_json(rep.macro)},
          {"weighted", averaged_json(rep.weighted)},
          {"per_class", per_class},
          {"confusion", rep.confusion}};
}

/// Header row "true\predicted,<names>", then one row per true class.
inline void write_confusion_csv(std::ostream& out, const EvalReport& rep) {
  out << "true\\predicted";
  for (const auto& name : rep.class_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < rep.classes(); ++i) {
    out << rep.class_names[i];
    for (auto v : rep.confusion[i]) out << ',' << v;
    out << '\n';
  }
}

inline EvalReport read_confusion_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Format, "empty confusion CSV");
  auto header = split(line);
  if (header.size() < 2) throw Error(ErrorKind::Format, "confusion CSV header too short");
  std::vector<std::string> names(header.begin() + 1, header.end());
  std::vector<std::vector<std::uint64_t>> counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != names.size() + 1) throw Error(ErrorKind::Format, "ragged confusion CSV row");
    std::vector<std::uint64_t> row;
    for (std::size_t j = 1; j < cells.size(); ++j) row.push_back(std::stoull(cells[j]));
    counts.push_back(std::move(row));
  }
  return report_from_confusion(std::move(counts), std::move(names));
}

}  // namespace kanids
