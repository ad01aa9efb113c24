#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tabcap/error.hpp"
#include "tabcap/table.hpp"
#include "tabcap/text.hpp"

using namespace tabcap;
using namespace tabcap::table;

namespace {

SemanticToken cell(std::string text, int x0, int y0, int x1, int y1) {
  return {std::move(text), {x0, y0, x1, y1}, {0, 0, 0}, "f", Label::Table};
}

std::vector<std::string> all_words(const Table& t) {
  std::vector<std::string> out;
  for (const auto& row : t.rows())
    for (const auto& c : row)
      for (auto& w : text::split_whitespace(c)) out.push_back(w);
  return out;
}

}  // namespace

TEST(Reconstruct, TwoByTwoGrid) {
  const std::vector<SemanticToken> tokens = {cell("b", 300, 100, 340, 110), cell("a", 100, 100, 140, 110),
                                             cell("d", 300, 120, 340, 130), cell("c", 100, 120, 140, 130)};
  const auto t = reconstruct_table(tokens);
  EXPECT_EQ(t.rows(), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
}

TEST(Reconstruct, CloseWordsShareACell) {
  // Gaps of 5 units join, the 160-unit gap splits.
  const std::vector<SemanticToken> tokens = {
      cell("refractivity", 100, 100, 184, 110), cell("at", 189, 100, 203, 110),
      cell("sea", 208, 100, 229, 110),          cell("level", 234, 100, 269, 110),
      cell("energy", 430, 100, 472, 110)};
  const auto t = reconstruct_table(tokens);
  ASSERT_EQ(t.row_count(), 1u);
  EXPECT_EQ(t.rows()[0], (std::vector<std::string>{"refractivity at sea level", "energy"}));
}

TEST(Reconstruct, RaggedRowsStayRagged) {
  const std::vector<SemanticToken> tokens = {cell("a", 100, 100, 110, 110), cell("b", 200, 100, 210, 110),
                                             cell("c", 300, 100, 310, 110), cell("d", 100, 120, 110, 130),
                                             cell("e", 200, 120, 210, 130)};
  const auto t = reconstruct_table(tokens);
  ASSERT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.rows()[0].size(), 3u);
  EXPECT_EQ(t.rows()[1].size(), 2u);
}

TEST(Reconstruct, EmptyThrows) { EXPECT_THROW(reconstruct_table({}), Error); }

TEST(TableCtor, RejectsEmpty) {
  EXPECT_THROW(Table(std::vector<std::vector<std::string>>{}), Error);
  EXPECT_THROW(Table({{"a"}, {}}), Error);
  EXPECT_EQ(Table({{"  a   b "}}).rows()[0][0], "a b");
}

TEST(Linearize, Variants) {
  const Table t({{"model", "BLEU", "ROUGE"}, {"ours", "3.2", "18"}});
  EXPECT_EQ(linearize(t, Variant::RowHeader), (std::vector<std::string>{"model", "ours"}));
  EXPECT_EQ(linearize(t, Variant::Others), (std::vector<std::string>{"BLEU", "ROUGE", "3.2", "18"}));
  EXPECT_EQ(linearize(t, Variant::Whole),
            (std::vector<std::string>{"model", "BLEU", "ROUGE", "ours", "3.2", "18"}));
}

TEST(Linearize, MultiWordCellsAndHeaderRow) {
  const Table t({{"sea level", "energy"}, {"2.04", "9.84 MeV"}});
  EXPECT_EQ(linearize(t, Variant::RowHeader), (std::vector<std::string>{"sea", "level", "2.04"}));
  EXPECT_EQ(linearize(t, Variant::RowHeader, HeaderMode::FirstRow),
            (std::vector<std::string>{"sea", "level", "energy"}));
  EXPECT_EQ(linearize(t, Variant::Others, HeaderMode::FirstRow), (std::vector<std::string>{"2.04", "9.84", "MeV"}));
}

TEST(Linearize, VariantNames) {
  for (auto v : {Variant::RowHeader, Variant::Others, Variant::Whole}) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_THROW(parse_variant("rx"), Error);
}

TEST(Linearize, PartitionProperty) {
  std::mt19937 rng(3);
  const std::vector<std::string> vocab = {"a", "b c", "1.5", "x", "(2)", "loss rate"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::vector<std::string>> rows(1 + rng() % 5);
    for (auto& row : rows) {
      row.resize(1 + rng() % 4);
      for (auto& c : row) c = vocab[rng() % vocab.size()];
    }
    const Table t(rows);
    auto joined = linearize(t, Variant::RowHeader);
    const auto others = linearize(t, Variant::Others);
    joined.insert(joined.end(), others.begin(), others.end());
    auto whole = linearize(t, Variant::Whole);
    std::sort(joined.begin(), joined.end());
    std::sort(whole.begin(), whole.end());
    EXPECT_EQ(joined, whole);
    auto words = all_words(t);
    std::sort(words.begin(), words.end());
    EXPECT_EQ(whole, words);
  }
}

TEST(Numerals, Recognized) {
  for (const char* s : {"8.29", "-30%", "(0.21)", "1,024", "2.5e-3", "10--4", "3/4", "9.84±0.04", "[12]", "+5",
                        "0.5×10", "42"})
    EXPECT_TRUE(is_numeral(s)) << s;
  for (const char* s : {"MeV", "±", "x", "", "1a", "v2", "(", "%", "1.2.3"}) EXPECT_FALSE(is_numeral(s)) << s;
}

TEST(Numerals, StripExample) {
  const std::vector<std::string> in = {"10.97", "±", "0.03", "(0.21)", "MeV"};
  EXPECT_EQ(strip_numerals(in), (std::vector<std::string>{"±", "MeV"}));
}

TEST(Numerals, StripProperties) {
  std::mt19937 rng(9);
  const std::vector<std::string> vocab = {"1", "2.5", "MeV", "-3%", "loss", "(4)", "x", "1e5", "±"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> in(rng() % 12);
    for (auto& w : in) w = vocab[rng() % vocab.size()];
    const auto once = strip_numerals(in);
    EXPECT_EQ(strip_numerals(once), once);
    EXPECT_LE(once.size(), in.size());
    for (const auto& w : once) EXPECT_FALSE(is_numeral(w));
    // Subsequence of the input.
    std::size_t j = 0;
    for (std::size_t i = 0; i < in.size() && j < once.size(); ++i)
      if (in[i] == once[j]) ++j;
    EXPECT_EQ(j, once.size());
  }
}
