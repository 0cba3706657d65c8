#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "revsent/textenc.hpp"

namespace te = revsent::textenc;

TEST(BuildVocab, FrequencyThenFirstOccurrence) {
  const auto v = te::build_vocab({"good good bad", "good ok"}, 4);
  EXPECT_EQ(v.word_to_index.size(), 2u);
  EXPECT_EQ(v.word_to_index.at("good"), 2);
  EXPECT_EQ(v.word_to_index.at("bad"), 3);
  EXPECT_FALSE(v.word_to_index.contains("ok"));
  EXPECT_EQ(v.index_to_word[0], "<pad>");
  EXPECT_EQ(v.index_to_word[1], "<oov>");
}

TEST(BuildVocab, Degenerate) {
  EXPECT_EQ(te::build_vocab({"hello"}).word_to_index.at("hello"), 2);
  const auto tiny = te::build_vocab({"a b c"}, 2);
  EXPECT_TRUE(tiny.word_to_index.empty());
  EXPECT_EQ(te::encode("a b zzz", tiny), (std::vector<int>{1, 1, 1}));
  EXPECT_THROW(te::build_vocab({}), revsent::Error);
  EXPECT_THROW(te::build_vocab({"a"}, 1), revsent::Error);
}

TEST(Encode, Examples) {
  const auto v = te::build_vocab({"good good bad", "good ok"}, 4);
  EXPECT_EQ(te::encode("good bad", v), (std::vector<int>{2, 3}));
  EXPECT_EQ(te::encode("zzz", v), (std::vector<int>{1}));
  EXPECT_TRUE(te::encode("", v).empty());
}

TEST(Pad, Examples) {
  auto a = te::pad({2, 3}, 4);
  EXPECT_EQ(a.ids, (std::vector<int>{2, 3, 0, 0}));
  EXPECT_EQ(a.length, 2u);
  auto b = te::pad({2, 3, 4, 5, 6}, 4);
  EXPECT_EQ(b.ids, (std::vector<int>{2, 3, 4, 5}));
  EXPECT_EQ(b.length, 4u);
  EXPECT_EQ(te::pad({}, 3).ids, (std::vector<int>{0, 0, 0}));
  EXPECT_THROW(te::pad({1}, 0), revsent::Error);
}

TEST(Pad, LengthAndIdempotence) {
  std::mt19937 gen(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<int> ids(gen() % 20);
    for (auto& x : ids) x = 1 + static_cast<int>(gen() % 50);
    const std::size_t L = 1 + gen() % 12;
    const auto once = te::pad(ids, L);
    EXPECT_EQ(once.ids.size(), L);
    EXPECT_EQ(te::pad(once.ids, L).ids, once.ids);
  }
}

namespace {

std::vector<std::string> random_corpus(std::mt19937& gen, int docs) {
  std::vector<std::string> out;
  for (int d = 0; d < docs; ++d) {
    std::string s;
    for (int k = 0, n = 1 + static_cast<int>(gen() % 10); k < n; ++k) {
      if (k) s += ' ';
      s += "w" + std::to_string(gen() % 40);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(BuildVocab, TopWordsNeverOov) {
  std::mt19937 gen(4);
  for (int t = 0; t < 50; ++t) {
    const auto corpus = random_corpus(gen, 30);
    const std::size_t max_words = 2 + gen() % 30;
    const auto v = te::build_vocab(corpus, max_words);
    EXPECT_LE(v.word_to_index.size(), max_words - 2);
    // independent count
    std::map<std::string, std::size_t> freq;
    for (const auto& doc : corpus) {
      for (const auto& w : revsent::split_ws(doc)) ++freq[w];
    }
    std::vector<std::size_t> counts;
    for (const auto& [w, c] : freq) counts.push_back(c);
    std::sort(counts.rbegin(), counts.rend());
    const std::size_t kept = v.word_to_index.size();
    if (kept == 0) continue;
    const std::size_t cutoff = counts[kept - 1];
    for (const auto& [w, c] : freq) {
      if (c > cutoff) {
        EXPECT_NE(te::encode(w, v)[0], te::kOovIndex) << w;
      }
    }
    // contiguous indices from 2, ranks non-increasing in frequency
    for (std::size_t i = 2; i < v.size(); ++i) {
      EXPECT_EQ(v.word_to_index.at(v.index_to_word[i]), static_cast<int>(i));
      if (i > 2) {
        EXPECT_GE(freq[v.index_to_word[i - 1]], freq[v.index_to_word[i]]);
      }
    }
  }
}

TEST(BuildVocab, ShuffledCorpusChangesOnlyTieRanks) {
  std::mt19937 gen(8);
  auto corpus = random_corpus(gen, 40);
  const auto a = te::build_vocab(corpus, 1000);
  std::shuffle(corpus.begin(), corpus.end(), gen);
  const auto b = te::build_vocab(corpus, 1000);
  ASSERT_EQ(a.size(), b.size());
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : corpus) {
    for (const auto& w : revsent::split_ws(doc)) ++freq[w];
  }
  for (std::size_t i = 2; i < a.size(); ++i) EXPECT_EQ(freq[a.index_to_word[i]], freq[b.index_to_word[i]]);
}

TEST(Vocabulary, SerializeRoundTrip) {
  auto v = te::build_vocab({"good good bad", "good ok"}, 10);
  v.max_length = 37;
  const auto back = te::deserialize(te::serialize(v));
  EXPECT_EQ(back.index_to_word, v.index_to_word);
  EXPECT_EQ(back.word_to_index, v.word_to_index);
  EXPECT_EQ(back.max_words, 10u);
  EXPECT_EQ(back.max_length, 37u);
  EXPECT_THROW(te::deserialize("#max_words\t5\n#max_length\t3\ngood\t3\n"), revsent::Error);
}
