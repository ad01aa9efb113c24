#include <gtest/gtest.h>

#include "tabcap/text.hpp"

using tabcap::text::tokenize;

TEST(Tokenize, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(tokenize("The Model, works!"), (std::vector<std::string>{"the", "model", "works"}));
}

TEST(Tokenize, KeepsNumerals) {
  EXPECT_EQ(tokenize("BLEU of 8.29 on 1,024 pages (T5)."),
            (std::vector<std::string>{"bleu", "of", "8.29", "on", "1,024", "pages", "t5"}));
}

TEST(Tokenize, TrailingPeriodAfterNumberIsDropped) {
  EXPECT_EQ(tokenize("in Table 6."), (std::vector<std::string>{"in", "table", "6"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize(" \t.,;").empty()); }

TEST(Text, NormalizeWhitespace) {
  EXPECT_EQ(tabcap::text::normalize_whitespace("  a \t b\n c  "), "a b c");
}
