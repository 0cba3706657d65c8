#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/csv.hpp"

namespace revsent::corpus {

// One scraped review, schema of the Play-store scraper export.
struct Review {
  std::string app_id;
  std::string text;
  std::optional<int> rating;
  std::string timestamp;
  std::string review_id;
};

struct CleanReview {
  std::string app_id;
  std::string text;
  std::optional<int> rating;
};

// Column names in the input file. Overridable from the command line.
struct ColumnMap {
  std::string text = "content";
  std::string rating = "score";
  std::string timestamp = "at";
  std::string review_id = "reviewId";
};

struct IngestResult {
  std::vector<Review> reviews;
  std::size_t dropped_empty = 0;
};

struct DedupResult {
  std::vector<Review> reviews;
  std::size_t removed = 0;
};

inline std::optional<int> parse_rating(const std::string& field, std::size_t line) {
  if (field.empty()) return std::nullopt;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw ParseError("rating is not a number: '" + field + "'", line);
  }
  if (pos != field.size() || v != std::floor(v) || v < 1 || v > 5) {
    throw ParseError("rating outside 1..5: '" + field + "'", line);
  }
  return static_cast<int>(v);
}

// Rows are counted from 2 (line 1 is the header) for error messages; quoted
// multi-line fields make this a row index rather than a physical line.
inline IngestResult ingest_table(const csv::Table& table, const std::string& app_id,
                                 const ColumnMap& cols = {}) {
  const int text_col = table.column(cols.text);
  if (text_col < 0) throw SchemaError("missing required column '" + cols.text + "'");
  const int rating_col = table.column(cols.rating);
  if (rating_col < 0) throw SchemaError("missing required column '" + cols.rating + "'");
  const int ts_col = table.column(cols.timestamp);
  const int id_col = table.column(cols.review_id);

  IngestResult result;
  std::size_t row_no = 1;
  for (const auto& row : table.rows) {
    ++row_no;
    auto field = [&](int col) -> std::string {
      return col >= 0 && static_cast<std::size_t>(col) < row.size() ? row[col] : std::string{};
    };
    Review r;
    r.app_id = app_id;
    r.text = field(text_col);
    if (r.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      ++result.dropped_empty;
      continue;
    }
    r.rating = parse_rating(field(rating_col), row_no);
    r.timestamp = field(ts_col);
    r.review_id = field(id_col);
    result.reviews.push_back(std::move(r));
  }
  return result;
}

inline IngestResult ingest(const std::string& path, const std::string& app_id,
                           const ColumnMap& cols = {}, char delim = ',') {
  return ingest_table(csv::read(path, delim), app_id, cols);
}

// First occurrence of each raw text wins; order is kept.
inline DedupResult deduplicate(const std::vector<Review>& reviews) {
  DedupResult result;
  std::unordered_set<std::string_view> seen;
  seen.reserve(reviews.size());
  for (const auto& r : reviews) {
    if (seen.insert(r.text).second) {
      result.reviews.push_back(r);
    } else {
      ++result.removed;
    }
  }
  return result;
}

// Lowercase ASCII letters kept; every other byte (digits, punctuation, any
// UTF-8 sequence) is a separator. Runs collapse to one space, then trim.
inline std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

inline CleanReview clean(const Review& r) { return {r.app_id, clean_text(r.text), r.rating}; }

// Cleaning-stage artifact: input schema plus app_id and clean_text.
inline csv::Table to_table(const std::vector<Review>& reviews, const ColumnMap& cols = {}) {
  csv::Table t;
  t.header = {"app_id", cols.review_id, cols.timestamp, cols.rating, cols.text, "clean_text"};
  for (const auto& r : reviews) {
    t.rows.push_back({r.app_id, r.review_id, r.timestamp,
                      r.rating ? std::to_string(*r.rating) : std::string{}, r.text,
                      clean_text(r.text)});
  }
  return t;
}

inline std::vector<Review> from_table(const csv::Table& t, const ColumnMap& cols = {}) {
  const int app_col = t.column("app_id");
  if (app_col < 0) throw SchemaError("missing required column 'app_id'");
  std::vector<Review> out;
  const int text_col = t.column(cols.text);
  if (text_col < 0) throw SchemaError("missing required column '" + cols.text + "'");
  const int rating_col = t.column(cols.rating);
  const int ts_col = t.column(cols.timestamp);
  const int id_col = t.column(cols.review_id);
  std::size_t row_no = 1;
  for (const auto& row : t.rows) {
    ++row_no;
    auto field = [&](int col) -> std::string {
      return col >= 0 && static_cast<std::size_t>(col) < row.size() ? row[col] : std::string{};
    };
    out.push_back({field(app_col), field(text_col), parse_rating(field(rating_col), row_no),
                   field(ts_col), field(id_col)});
  }
  return out;
}

}  // namespace revsent::corpus
