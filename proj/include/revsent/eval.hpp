#pragma once

#include <json.hpp>

#include <array>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/lexicon.hpp"

namespace revsent::eval {

// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{};

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts) n += std::accumulate(row.begin(), row.end(), std::size_t{0});
    return n;
  }
  std::size_t row_sum(int i) const {
    return std::accumulate(counts[i].begin(), counts[i].end(), std::size_t{0});
  }
  std::size_t col_sum(int j) const {
    std::size_t n = 0;
    for (const auto& row : counts) n += row[j];
    return n;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassReport {
  std::array<double, kNumClasses> precision{}, recall{}, f1{};
  std::array<std::size_t, kNumClasses> support{};  // true-class counts of the evaluated split
  // Set when a metric hit a zero denominator and was reported as 0.
  std::array<bool, kNumClasses> undefined{};
  double accuracy = 0.0;
  double loss = 0.0;
  ConfusionMatrix confusion;
};

inline ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw Error("confusion: " + std::to_string(truth.size()) + " labels vs " +
                std::to_string(pred.size()) + " predictions");
  }
  ConfusionMatrix cm;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const int t = truth[k], p = pred[k];
    if (t < 0 || t >= kNumClasses || p < 0 || p >= kNumClasses) {
      throw Error("confusion: class code out of range at row " + std::to_string(k));
    }
    ++cm.counts[t][p];
  }
  return cm;
}

// Zero denominators give 0.0 and set `undefined` for that class.
inline ClassReport class_report(const ConfusionMatrix& cm, std::span<const double> losses) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error("class_report: empty confusion matrix");
  ClassReport r;
  r.confusion = cm;
  std::size_t diag = 0;
  for (int j = 0; j < kNumClasses; ++j) {
    const double tp = static_cast<double>(cm.counts[j][j]);
    const std::size_t col = cm.col_sum(j), row = cm.row_sum(j);
    diag += cm.counts[j][j];
    r.support[j] = row;
    if (col > 0) r.precision[j] = tp / static_cast<double>(col);
    else r.undefined[j] = true;
    if (row > 0) r.recall[j] = tp / static_cast<double>(row);
    else r.undefined[j] = true;
    const double pr = r.precision[j] + r.recall[j];
    if (pr > 0.0) r.f1[j] = 2.0 * r.precision[j] * r.recall[j] / pr;
    else r.undefined[j] = true;
  }
  r.accuracy = static_cast<double>(diag) / static_cast<double>(total);
  if (!losses.empty()) {
    r.loss = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size());
  }
  return r;
}

using NamedReports = std::vector<std::pair<std::string, ClassReport>>;

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad_right(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

}  // namespace detail

// Accuracy as a percentage with 2 decimals, loss with 4, per-class metrics
// with 2. Classes are listed in label-code order.
inline std::string render_report(const NamedReports& reports) {
  using detail::fmt;
  using detail::pad_left;
  using detail::pad_right;
  if (reports.empty()) throw Error("render_report: no reports");
  std::string out;
  out += pad_right("Model", 10) + pad_left("Accuracy%", 10) + pad_left("Loss", 10) + "\n";
  for (const auto& [name, r] : reports) {
    out += pad_right(name, 10) + pad_left(fmt("%.2f", r.accuracy * 100.0), 10) +
           pad_left(fmt("%.4f", r.loss), 10) + "\n";
  }
  out += "\n";
  out += pad_right("Model", 10) + pad_right("Class", 10) + pad_left("Precision", 11) +
         pad_left("Recall", 8) + pad_left("F1-Score", 10) + pad_left("Support", 9) + "\n";
  for (const auto& [name, r] : reports) {
    for (int c = 0; c < kNumClasses; ++c) {
      out += pad_right(name, 10) + pad_right(std::string(label_name(label_from_code(c))), 10) +
             pad_left(fmt("%.2f", r.precision[c]), 11) + pad_left(fmt("%.2f", r.recall[c]), 8) +
             pad_left(fmt("%.2f", r.f1[c]), 10) + pad_left(std::to_string(r.support[c]), 9) +
             (r.undefined[c] ? "  (undefined metric reported as 0)" : "") + "\n";
    }
  }
  for (const auto& [name, r] : reports) {
    out += "\nConfusion matrix (" + name + "; rows true, columns predicted)\n";
    out += pad_right("", 10);
    for (int c = 0; c < kNumClasses; ++c) out += pad_left(std::string(label_name(label_from_code(c))), 10);
    out += "\n";
    for (int i = 0; i < kNumClasses; ++i) {
      out += pad_right(std::string(label_name(label_from_code(i))), 10);
      for (int j = 0; j < kNumClasses; ++j) out += pad_left(std::to_string(r.confusion.counts[i][j]), 10);
      out += "\n";
    }
  }
  return out;
}

inline nlohmann::json to_json(const ClassReport& r) {
  nlohmann::json classes = nlohmann::json::array();
  for (int c = 0; c < kNumClasses; ++c) {
    classes.push_back({{"label", label_name(label_from_code(c))},
                       {"code", c},
                       {"precision", r.precision[c]},
                       {"recall", r.recall[c]},
                       {"f1", r.f1[c]},
                       {"support", r.support[c]},
                       {"undefined", r.undefined[c]}});
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : r.confusion.counts) matrix.push_back(row);
  return {{"accuracy", r.accuracy}, {"loss", r.loss}, {"classes", classes},
          {"confusion_matrix", matrix}, {"total", r.confusion.total()}};
}

// One record per model.
inline std::string render_report_json(const NamedReports& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [name, r] : reports) {
    auto rec = to_json(r);
    rec["model"] = name;
    arr.push_back(std::move(rec));
  }
  return arr.dump(2) + "\n";
}

}  // namespace revsent::eval
