#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revsent/common.hpp"

namespace revsent::textenc {

inline constexpr int kPadIndex = 0;
inline constexpr int kOovIndex = 1;
inline constexpr std::size_t kDefaultMaxWords = 5000;
inline constexpr std::size_t kDefaultMaxLength = 100;

struct Vocabulary {
  std::unordered_map<std::string, int> word_to_index;
  std::vector<std::string> index_to_word{"<pad>", "<oov>"};
  std::size_t max_words = kDefaultMaxWords;
  std::size_t max_length = kDefaultMaxLength;

  std::size_t size() const { return index_to_word.size(); }
};

struct EncodedSequence {
  std::vector<int> ids;
  std::size_t length = 0;  // true length before padding, capped at max_length
};

// Rank by descending frequency; ties by first occurrence in scan order.
inline Vocabulary build_vocab(const std::vector<std::string>& corpus,
                              std::size_t max_words = kDefaultMaxWords) {
  if (corpus.empty()) throw Error("cannot build vocabulary from an empty corpus");
  if (max_words < 2) throw Error("max_words must be at least 2 (pad and oov)");
  struct Stat {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::vector<std::string> order;
  for (const auto& text : corpus) {
    for (auto& tok : split_ws(text)) {
      auto [it, inserted] = stats.try_emplace(tok, Stat{0, order.size()});
      if (inserted) order.push_back(tok);
      ++it->second.count;
    }
  }
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const auto& sa = stats.at(a);
    const auto& sb = stats.at(b);
    if (sa.count != sb.count) return sa.count > sb.count;
    return sa.first < sb.first;
  });
  Vocabulary v;
  v.max_words = max_words;
  const std::size_t keep = std::min(order.size(), max_words - 2);
  for (std::size_t i = 0; i < keep; ++i) {
    v.word_to_index.emplace(order[i], static_cast<int>(v.index_to_word.size()));
    v.index_to_word.push_back(order[i]);
  }
  return v;
}

inline std::vector<int> encode(std::string_view text, const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const auto& tok : split_ws(text)) {
    auto it = vocab.word_to_index.find(tok);
    ids.push_back(it == vocab.word_to_index.end() ? kOovIndex : it->second);
  }
  return ids;
}

// Post-padding and post-truncation: the head of the review is kept.
inline EncodedSequence pad(std::vector<int> ids, std::size_t max_length) {
  if (max_length < 1) throw Error("max_length must be at least 1");
  EncodedSequence seq;
  seq.length = std::min(ids.size(), max_length);
  ids.resize(max_length, kPadIndex);
  seq.ids = std::move(ids);
  return seq;
}

inline std::string serialize(const Vocabulary& v) {
  std::string out = "#max_words\t" + std::to_string(v.max_words) + "\n";
  out += "#max_length\t" + std::to_string(v.max_length) + "\n";
  for (std::size_t i = 2; i < v.index_to_word.size(); ++i) {
    out += v.index_to_word[i] + "\t" + std::to_string(i) + "\n";
  }
  return out;
}

inline Vocabulary deserialize(std::string_view text) {
  Vocabulary v;
  bool have_words = false, have_length = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected key<TAB>value", line_no);
    const std::string key(line.substr(0, tab));
    std::size_t value = 0;
    try {
      value = std::stoul(std::string(line.substr(tab + 1)));
    } catch (const std::exception&) {
      throw ParseError("bad integer", line_no);
    }
    if (key == "#max_words") {
      v.max_words = value;
      have_words = true;
    } else if (key == "#max_length") {
      v.max_length = value;
      have_length = true;
    } else {
      if (value != v.index_to_word.size()) throw ParseError("indices must be contiguous from 2", line_no);
      v.word_to_index.emplace(key, static_cast<int>(value));
      v.index_to_word.push_back(key);
    }
  }
  if (!have_words || !have_length) throw ParseError("missing vocabulary header", 1);
  if (v.index_to_word.size() > v.max_words) throw ParseError("more words than max_words", line_no);
  return v;
}

}  // namespace revsent::textenc
