#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "revsent/common.hpp"
#include "revsent/csv.hpp"
#include "revsent/lexicon.hpp"

namespace revsent::dataprep {

struct LabeledRow {
  std::string clean_text;
  SentimentLabel label = SentimentLabel::Neutral;
  std::string app_id;

  bool operator==(const LabeledRow&) const = default;
};

using ClassCounts = std::array<std::size_t, kNumClasses>;

struct LabeledDataset {
  std::vector<LabeledRow> rows;

  ClassCounts class_counts() const {
    ClassCounts c{};
    for (const auto& r : rows) ++c[code(r.label)];
    return c;
  }
  std::size_t size() const { return rows.size(); }
};

// Round half up on non-negative values, in integers: round(num / den).
inline std::size_t round_half_up(std::size_t num, std::size_t den) {
  return (2 * num + den) / (2 * den);
}

// 80/20 train/test, then 10% of train held out for validation.
struct SplitSpec {
  std::size_t n_total = 0;
  std::size_t n_train_full = 0;
  std::size_t n_test = 0;
  std::size_t n_val = 0;
  std::size_t n_train = 0;
  std::uint64_t seed = 0;

  static SplitSpec for_total(std::size_t n_total, std::uint64_t seed) {
    SplitSpec s;
    s.n_total = n_total;
    s.n_train_full = round_half_up(8 * n_total, 10);
    s.n_test = n_total - s.n_train_full;
    s.n_val = round_half_up(s.n_train_full, 10);
    s.n_train = s.n_train_full - s.n_val;
    s.seed = seed;
    return s;
  }
};

struct Splits {
  LabeledDataset train;
  LabeledDataset val;
  LabeledDataset test;
};

// Random oversampling: every class is topped up to the original majority
// count with uniform-with-replacement copies of its own rows. Originals come
// first, in input order; copies are appended class by class.
inline LabeledDataset oversample(const LabeledDataset& data, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < data.rows.size(); ++i) by_class[code(data.rows[i].label)].push_back(i);
  std::size_t target = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) {
      throw Error("cannot oversample: class " + std::string(label_name(label_from_code(c))) +
                  " has no rows");
    }
    target = std::max(target, by_class[c].size());
  }
  Rng rng(seed);
  LabeledDataset out = data;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& members = by_class[c];
    for (std::size_t k = members.size(); k < target; ++k) {
      out.rows.push_back(data.rows[members[rng.below(members.size())]]);
    }
  }
  return out;
}

namespace detail {

// Splits `size` slots across classes as evenly as availability allows. Each
// slot goes to the class with the fewest slots so far; ties go to the class
// with the most rows still unassigned, then to the lowest label code.
inline ClassCounts allocate_even(std::size_t size, const ClassCounts& available) {
  ClassCounts take{};
  for (std::size_t n = 0; n < size; ++n) {
    int best = -1;
    for (int c = 0; c < kNumClasses; ++c) {
      if (take[c] >= available[c]) continue;
      if (best < 0 || take[c] < take[best] ||
          (take[c] == take[best] && available[c] - take[c] > available[best] - take[best])) {
        best = c;
      }
    }
    if (best < 0) throw Error("split allocation exceeds available rows");
    ++take[best];
  }
  return take;
}

}  // namespace detail

// Test split first, then validation from what is left, then train takes the
// remainder. Test and validation are class-balanced up to a difference of
// one row per class; see allocate_even for where remainders land.
inline Splits stratified_split(const LabeledDataset& data, const SplitSpec& spec) {
  if (spec.n_total != data.size()) {
    throw Error("split spec n_total " + std::to_string(spec.n_total) + " != dataset size " +
                std::to_string(data.size()));
  }
  if (spec.n_total < static_cast<std::size_t>(kNumClasses) * 3) {
    throw Error("cannot stratify " + std::to_string(spec.n_total) + " rows over " +
                std::to_string(kNumClasses) + " classes");
  }
  Rng rng(spec.seed);
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < data.rows.size(); ++i) by_class[code(data.rows[i].label)].push_back(i);
  for (auto& members : by_class) rng.shuffle(members);

  ClassCounts remaining{};
  for (int c = 0; c < kNumClasses; ++c) remaining[c] = by_class[c].size();
  const ClassCounts test_take = detail::allocate_even(spec.n_test, remaining);
  for (int c = 0; c < kNumClasses; ++c) remaining[c] -= test_take[c];
  const ClassCounts val_take = detail::allocate_even(spec.n_val, remaining);

  Splits out;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto& members = by_class[c];
    std::size_t k = 0;
    for (; k < test_take[c]; ++k) out.test.rows.push_back(data.rows[members[k]]);
    for (std::size_t v = 0; v < val_take[c]; ++v, ++k) out.val.rows.push_back(data.rows[members[k]]);
    for (; k < members.size(); ++k) out.train.rows.push_back(data.rows[members[k]]);
  }
  // Interleave classes so files are not sorted by label.
  rng.shuffle(out.train.rows);
  rng.shuffle(out.val.rows);
  rng.shuffle(out.test.rows);
  return out;
}

inline std::vector<int> encode_labels(const LabeledDataset& data) {
  std::vector<int> out;
  out.reserve(data.rows.size());
  for (const auto& r : data.rows) out.push_back(code(r.label));
  return out;
}

inline std::string row_hash(const LabeledRow& r) {
  std::uint64_t h = fnv1a(r.app_id);
  h = fnv1a("\t", h);
  h = fnv1a(r.clean_text, h);
  h = fnv1a("\t", h);
  h = fnv1a(label_name(r.label), h);
  return hex64(h);
}

// One line per row: <row-hash>\t<split>. Rows appear in split order
// train, val, test.
inline std::string split_manifest(const Splits& s) {
  std::string out;
  auto emit = [&](const LabeledDataset& d, const char* name) {
    for (const auto& r : d.rows) {
      out += row_hash(r);
      out += '\t';
      out += name;
      out += '\n';
    }
  };
  emit(s.train, "train");
  emit(s.val, "val");
  emit(s.test, "test");
  return out;
}

inline csv::Table to_table(const LabeledDataset& d) {
  csv::Table t;
  t.header = {"app_id", "clean_text", "label", "label_code"};
  for (const auto& r : d.rows) {
    t.rows.push_back({r.app_id, r.clean_text, std::string(label_name(r.label)),
                      std::to_string(code(r.label))});
  }
  return t;
}

inline LabeledDataset from_table(const csv::Table& t) {
  const int app = t.column("app_id");
  const int text = t.column("clean_text");
  const int label = t.column("label");
  const std::pair<int, const char*> required[] = {{app, "app_id"}, {text, "clean_text"}, {label, "label"}};
  for (auto [idx, name] : required) {
    if (idx < 0) throw SchemaError(std::string("missing required column '") + name + "'");
  }
  LabeledDataset d;
  for (const auto& row : t.rows) {
    if (row.size() < t.header.size()) throw SchemaError("short row in labeled table");
    d.rows.push_back({row[text], parse_label(row[label]), row[app]});
  }
  return d;
}

}  // namespace revsent::dataprep
