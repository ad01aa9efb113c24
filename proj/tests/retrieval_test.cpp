#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/bm25_oracle.hpp"
#include "tabcap/error.hpp"
#include "tabcap/retrieval.hpp"
#include "tabcap/text.hpp"

using namespace tabcap;
using namespace tabcap::retrieval;

namespace {

const std::vector<std::string> kCorpus = {"the radiation energy at sea level", "the geometry of air showers",
                                          "normalized radiation energy values for energy"};
const std::vector<std::string> kQuery = {"radiation", "energy"};

}  // namespace

TEST(Index, AverageLengthAndFrequencies) {
  const auto index = build_index({"a b c d", "a b c d e f", "a b c d e f g h"});
  EXPECT_DOUBLE_EQ(index.average_length(), 6.0);
  EXPECT_EQ(index.document_frequency("a"), 3u);
  EXPECT_EQ(index.document_frequency("g"), 1u);
  EXPECT_EQ(index.document_frequency("zzz"), 0u);
  EXPECT_EQ(index.term_frequency(2, "h"), 1u);
  EXPECT_THROW(build_index({}), Error);
}

TEST(Index, TokenizesWithSharedTokenizer) {
  const auto index = build_index({"Energy, at 8.29 MeV."});
  EXPECT_EQ(index.terms(0), (std::vector<std::string>{"energy", "at", "8.29", "mev"}));
}

TEST(Bm25, OrderingOnSmallCorpus) {
  const auto index = build_index(kCorpus);
  const double s1 = bm25_score(kQuery, 0, index), s2 = bm25_score(kQuery, 1, index),
               s3 = bm25_score(kQuery, 2, index);
  EXPECT_GT(s3, s1);
  EXPECT_GT(s1, s2);
  EXPECT_EQ(s2, 0.0);
}

TEST(Bm25, HandComputedValue) {
  // s1: N=3, len 6, avg 17/3; radiation df=2, energy df=2, tf=1 each.
  const double idf2 = std::log((3 - 2 + 0.5) / (2 + 0.5) + 1);
  const double norm = 1.2 * (1 - 0.75 + 0.75 * 6.0 / (17.0 / 3.0));
  const double expected = 2 * idf2 * 2.2 / (1 + norm);
  EXPECT_NEAR(bm25_score(kQuery, 0, build_index(kCorpus)), expected, 1e-12);
}

TEST(Bm25, BadInputs) {
  const auto index = build_index(kCorpus);
  EXPECT_THROW(bm25_score(kQuery, 3, index), Error);
  EXPECT_THROW((Bm25Params{-1, 0.5}).validate(), Error);
  EXPECT_THROW((Bm25Params{1.2, 1.5}).validate(), Error);
}

TEST(Bm25, MonotoneInTfAndLength) {
  const std::vector<std::string> q = {"x"};
  double prev = 0;
  for (int tf = 1; tf <= 5; ++tf) {
    std::string s;
    for (int i = 0; i < tf; ++i) s += "x ";
    for (int i = tf; i < 6; ++i) s += "y ";
    const double v = bm25_score(q, 0, build_index({s, "z z z z z z"}));
    EXPECT_GE(v, prev);
    prev = v;
  }
  // Same tf, growing length: non-increasing.
  prev = INFINITY;
  for (int pad = 0; pad < 6; ++pad) {
    std::string s = "x";
    for (int i = 0; i < pad; ++i) s += " y";
    const double v = bm25_score(q, 0, build_index({s, "z z z"}));
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(TopN, Examples) {
  const auto index = build_index(kCorpus);
  const auto one = top_n(kQuery, 1, index);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].position, 2u);
  EXPECT_EQ(one[0].text, kCorpus[2]);
  EXPECT_EQ(top_n(kQuery, 5, index).size(), 2u);
}

TEST(TopN, TiesKeepDocumentOrder) {
  const auto index = build_index({"other words", "alpha beta", "beta alpha"});
  const std::vector<std::string> q = {"alpha"};
  const auto out = top_n(q, 3, index);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].position, 1u);
  EXPECT_EQ(out[1].position, 2u);
  EXPECT_EQ(out[0].score, out[1].score);
}

TEST(TopN, MatchesBruteForceOracle) {
  std::mt19937 rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> sentences;
    std::vector<std::vector<std::string>> raw;
    const std::size_t ns = 1 + rng() % 8;
    for (std::size_t i = 0; i < ns; ++i) {
      std::vector<std::string> words(1 + rng() % 6);
      for (auto& w : words) w = vocab[rng() % vocab.size()];
      raw.push_back(words);
      sentences.push_back(text::join(words));
    }
    std::vector<std::string> q(1 + rng() % 5);
    for (auto& w : q) w = vocab[rng() % vocab.size()];
    const std::size_t n = 1 + rng() % 4;

    const auto got = top_n(q, n, build_index(sentences));
    const auto want = oracle::rank(raw, q, n, 1.2, 0.75);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].position, want[i].position);
      EXPECT_NEAR(got[i].score, want[i].score, 1e-12);
      if (i) EXPECT_LE(got[i].score, got[i - 1].score);
      EXPECT_GT(got[i].score, 0.0);
    }
  }
}

TEST(TableQuery, WholeTableWithNumerals) {
  const table::Table t({{"Sea level", "Energy"}, {"2.04", "9.84 MeV"}});
  EXPECT_EQ(table_query(t), (std::vector<std::string>{"sea", "level", "energy", "2.04", "9.84", "mev"}));
}

TEST(Author, IndicatorExtraction) {
  EXPECT_EQ(table_indicator("Table 6. Radiation energy per refractivity setting"), "Table 6");
  EXPECT_EQ(table_indicator("Table V: Results"), "Table V");
  EXPECT_EQ(table_indicator("Table 12 lists"), "Table 12");
  EXPECT_FALSE(table_indicator("The table shows").has_value());
  EXPECT_FALSE(table_indicator("table 6. lower case").has_value());
  EXPECT_FALSE(table_indicator("Tables 6").has_value());
}

TEST(Author, Matching) {
  const std::vector<std::string> body = {"We run experiments.", "See Table 61 for more.",
                                         "Results are summarized in Table 6.", "Table 6 again."};
  EXPECT_EQ(author_match("Table 6. The table shows energies.", body),
            (std::vector<std::string>{"Results are summarized in Table 6."}));
  EXPECT_TRUE(author_match("The table shows energies.", body).empty());
  EXPECT_TRUE(author_match("Table 7: Other.", body).empty());
  const std::vector<std::string> roman = {"As Table IV shows, x.", "Table V: gains are large."};
  EXPECT_EQ(author_match("Table V. Gains.", roman), (std::vector<std::string>{"Table V: gains are large."}));
}

TEST(RetrievalConfig, ParseAndName) {
  EXPECT_EQ(RetrievalConfig::parse("none").method, Method::None);
  EXPECT_EQ(RetrievalConfig::parse("top2").n, 2u);
  EXPECT_EQ(RetrievalConfig::parse("author").name(), "author");
  EXPECT_EQ(RetrievalConfig::parse("top3").name(), "top3");
  EXPECT_THROW(RetrievalConfig::parse("top0"), Error);
  EXPECT_THROW(RetrievalConfig::parse("bm25"), Error);
}

TEST(Retrieve, Dispatch) {
  const table::Table t({{"radiation energy"}});
  EXPECT_TRUE(retrieve(RetrievalConfig::parse("none"), t, kCorpus, "Table 1. x").empty());
  EXPECT_EQ(retrieve(RetrievalConfig::parse("top1"), t, kCorpus, "Table 1. x"),
            (std::vector<std::string>{kCorpus[2]}));
  EXPECT_TRUE(retrieve(RetrievalConfig::parse("author"), t, kCorpus, "Table 1. x").empty());
}
