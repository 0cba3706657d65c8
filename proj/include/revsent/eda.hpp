#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/corpus.hpp"
#include "revsent/dataprep.hpp"

namespace revsent::eda {

struct Proportions {
  std::map<std::string, std::array<double, kNumClasses>> by_app;  // neg, neu, pos
  std::vector<std::string> warnings;
};

// `expected_apps` lets callers name apps that should be present; those with
// no rows are reported in `warnings` instead of getting a row.
inline Proportions sentiment_proportions(const dataprep::LabeledDataset& data,
                                         const std::vector<std::string>& expected_apps = {}) {
  std::map<std::string, std::array<std::size_t, kNumClasses>> counts;
  for (const auto& r : data.rows) ++counts[r.app_id][code(r.label)];
  Proportions out;
  for (const auto& [app, c] : counts) {
    const double n = static_cast<double>(c[0] + c[1] + c[2]);
    out.by_app[app] = {c[0] / n, c[1] / n, c[2] / n};
  }
  for (const auto& app : expected_apps) {
    if (!counts.contains(app)) out.warnings.push_back("app '" + app + "' has no labeled rows; omitted");
  }
  return out;
}

struct RatingHistogram {
  std::array<std::size_t, 5> stars{};  // index 0 is one star
  std::size_t missing = 0;

  std::size_t total() const {
    std::size_t n = missing;
    for (auto s : stars) n += s;
    return n;
  }
};

inline std::map<std::string, RatingHistogram> rating_distribution(
    const std::vector<corpus::Review>& reviews) {
  std::map<std::string, RatingHistogram> out;
  for (const auto& r : reviews) {
    auto& h = out[r.app_id];
    if (r.rating) ++h.stars[*r.rating - 1];
    else ++h.missing;
  }
  return out;
}

// Token counts per app, rows ordered by combined count desc then token.
struct FreqTable {
  struct Row {
    std::string token;
    std::map<std::string, std::size_t> count_per_app;

    std::size_t combined() const {
      std::size_t n = 0;
      for (const auto& [app, c] : count_per_app) n += c;
      return n;
    }
  };
  std::vector<std::string> apps;
  std::vector<Row> rows;
};

using TextsByApp = std::map<std::string, std::vector<std::string>>;

namespace detail {

inline std::map<std::string, std::unordered_map<std::string, std::size_t>> count_tokens(
    const TextsByApp& texts, const std::set<std::string>& stopwords) {
  std::map<std::string, std::unordered_map<std::string, std::size_t>> counts;
  for (const auto& [app, docs] : texts) {
    auto& c = counts[app];
    for (const auto& doc : docs) {
      for (auto& tok : split_ws(doc)) {
        if (!stopwords.contains(tok)) ++c[tok];
      }
    }
  }
  return counts;
}

inline FreqTable assemble(const TextsByApp& texts,
                          const std::map<std::string, std::unordered_map<std::string, std::size_t>>& counts,
                          const std::set<std::string>& tokens) {
  FreqTable t;
  for (const auto& [app, docs] : texts) t.apps.push_back(app);
  for (const auto& tok : tokens) {
    FreqTable::Row row{tok, {}};
    for (const auto& app : t.apps) {
      const auto& c = counts.at(app);
      auto it = c.find(tok);
      row.count_per_app[app] = it == c.end() ? 0 : it->second;
    }
    t.rows.push_back(std::move(row));
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto& a, const auto& b) {
    const auto ca = a.combined(), cb = b.combined();
    if (ca != cb) return ca > cb;
    return a.token < b.token;
  });
  return t;
}

}  // namespace detail

// Union of each app's k most frequent tokens (ties alphabetical), with every
// app's count for each token in the union.
inline FreqTable top_k_words(const TextsByApp& texts, std::size_t k = 20,
                             const std::set<std::string>& stopwords = {}) {
  if (k < 1) throw Error("top_k_words: k must be at least 1");
  const auto counts = detail::count_tokens(texts, stopwords);
  std::set<std::string> chosen;
  for (const auto& [app, c] : counts) {
    std::vector<std::pair<std::string, std::size_t>> ranked(c.begin(), c.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) chosen.insert(ranked[i].first);
  }
  return detail::assemble(texts, counts, chosen);
}

// Every token with its per-app counts; the data behind a word cloud.
inline FreqTable word_frequencies(const TextsByApp& texts, const std::set<std::string>& stopwords = {}) {
  const auto counts = detail::count_tokens(texts, stopwords);
  std::set<std::string> all;
  for (const auto& [app, c] : counts) {
    for (const auto& [tok, n] : c) all.insert(tok);
  }
  return detail::assemble(texts, counts, all);
}

inline TextsByApp texts_by_app(const dataprep::LabeledDataset& data) {
  TextsByApp out;
  for (const auto& r : data.rows) out[r.app_id].push_back(r.clean_text);
  return out;
}

// ------------------------------------------------------------ TSV writers

inline std::string to_tsv(const Proportions& p) {
  std::string out = "app_id\tnegative\tneutral\tpositive\n";
  for (const auto& [app, f] : p.by_app) {
    out += app + "\t" + format_double(f[0]) + "\t" + format_double(f[1]) + "\t" + format_double(f[2]) + "\n";
  }
  return out;
}

inline std::string to_tsv(const std::map<std::string, RatingHistogram>& h) {
  std::string out = "app_id\tstar_1\tstar_2\tstar_3\tstar_4\tstar_5\tmissing\n";
  for (const auto& [app, r] : h) {
    out += app;
    for (auto s : r.stars) out += "\t" + std::to_string(s);
    out += "\t" + std::to_string(r.missing) + "\n";
  }
  return out;
}

inline std::string to_tsv(const FreqTable& t) {
  std::string out = "token";
  for (const auto& app : t.apps) out += "\t" + app;
  out += "\ttotal\n";
  for (const auto& row : t.rows) {
    out += row.token;
    for (const auto& app : t.apps) out += "\t" + std::to_string(row.count_per_app.at(app));
    out += "\t" + std::to_string(row.combined()) + "\n";
  }
  return out;
}

}  // namespace revsent::eda
