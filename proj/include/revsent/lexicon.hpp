#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "revsent/common.hpp"

namespace revsent {

// Integer codes are part of every artifact format; do not reorder.
enum class SentimentLabel : int { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<SentimentLabel, kNumClasses> kAllLabels = {
    SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive};

inline constexpr int code(SentimentLabel l) { return static_cast<int>(l); }

inline SentimentLabel label_from_code(int c) {
  if (c < 0 || c >= kNumClasses) throw Error("label code out of range: " + std::to_string(c));
  return static_cast<SentimentLabel>(c);
}

inline std::string_view label_name(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Negative: return "Negative";
    case SentimentLabel::Neutral: return "Neutral";
    case SentimentLabel::Positive: return "Positive";
  }
  return "?";
}

inline SentimentLabel parse_label(std::string_view s) {
  for (auto l : kAllLabels) {
    if (label_name(l) == s) return l;
  }
  throw Error("unknown sentiment label: '" + std::string(s) + "'");
}

namespace lexicon {

struct Lexicon {
  std::unordered_map<std::string, double> entries;
  std::unordered_set<std::string> negators;
  double negation_factor = -0.5;
  std::size_t duplicate_warnings = 0;
};

struct LabelRule {
  double pos_threshold = 0.1;
  double neg_threshold = -0.1;
};

// Format, one record per line:
//   word<TAB>polarity        polarity in [-1, 1]
//   !negator<TAB>word
//   # comment
inline Lexicon parse_lexicon(std::string_view text) {
  Lexicon lex;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected word<TAB>polarity", line_no);
    const std::string key(line.substr(0, tab));
    const std::string value(line.substr(tab + 1));
    if (key == "!negator") {
      if (value.empty()) throw ParseError("empty negator", line_no);
      lex.negators.insert(value);
      continue;
    }
    if (key.empty()) throw ParseError("empty word", line_no);
    double polarity = 0.0;
    std::size_t used = 0;
    try {
      polarity = std::stod(value, &used);
    } catch (const std::exception&) {
      throw ParseError("polarity is not a number: '" + value + "'", line_no);
    }
    if (used != value.size() || !std::isfinite(polarity)) {
      throw ParseError("polarity is not a number: '" + value + "'", line_no);
    }
    if (polarity < -1.0 || polarity > 1.0) {
      throw ParseError("polarity outside [-1, 1]: " + value, line_no);
    }
    auto [it, inserted] = lex.entries.insert_or_assign(key, polarity);
    if (!inserted) ++lex.duplicate_warnings;
    if (eol == text.size()) break;
  }
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) { return parse_lexicon(read_file(path)); }

// Mean polarity over lexicon hits. A hit directly after a negator is scaled
// by negation_factor. No hits scores 0.
inline double score_text(std::string_view clean, const Lexicon& lex) {
  double sum = 0.0;
  std::size_t matches = 0;
  std::string prev;
  std::size_t i = 0;
  while (i < clean.size()) {
    while (i < clean.size() && clean[i] == ' ') ++i;
    std::size_t j = i;
    while (j < clean.size() && clean[j] != ' ') ++j;
    if (j == i) break;
    std::string token(clean.substr(i, j - i));
    if (auto it = lex.entries.find(token); it != lex.entries.end()) {
      double p = it->second;
      if (!prev.empty() && lex.negators.contains(prev)) p *= lex.negation_factor;
      sum += p;
      ++matches;
    }
    prev = std::move(token);
    i = j;
  }
  if (matches == 0) return 0.0;
  return std::clamp(sum / static_cast<double>(matches), -1.0, 1.0);
}

// Both thresholds are inclusive to Neutral.
inline SentimentLabel assign_label(double polarity, const LabelRule& rule = {}) {
  if (polarity > rule.pos_threshold) return SentimentLabel::Positive;
  if (polarity < rule.neg_threshold) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

}  // namespace lexicon
}  // namespace revsent
