#include <gtest/gtest.h>

#include <random>

#include "tabcap/error.hpp"
#include "tabcap/prompt.hpp"
#include "tabcap/text.hpp"

using namespace tabcap;
using namespace tabcap::prompt;

namespace {

PromptSpec example(Style style) {
  PromptSpec spec;
  spec.tabular_tokens = {"model", "T5"};
  spec.relevant_sentences = {"We compare models."};
  spec.first_caption_sentence = "Table 1. Results.";
  spec.style = style;
  spec.max_length = default_budget(style);
  return spec;
}

std::size_t occurrences(const std::string& s, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(SplitCaption, ThreeSentenceCaption) {
  const std::vector<std::string> caption = {
      "Shower inclination is held at 50 degrees with arrival from the south.",
      "Every entry averages at least 20 simulated showers that differ only in their random seeds.",
      "Errors give the uncertainty on that average, with the spread in brackets."};
  const auto split = split_caption(caption);
  EXPECT_EQ(split.first, caption[0]);
  EXPECT_EQ(split.rest, caption[1] + " " + caption[2]);
}

TEST(SplitCaption, TwoAndOne) {
  const std::vector<std::string> two = {"A b.", "C d."};
  EXPECT_EQ(split_caption(two), (CaptionSplit{"A b.", "C d."}));
  const std::vector<std::string> one = {"A b."};
  try {
    split_caption(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no target");
  }
}

TEST(Assemble, Styles) {
  EXPECT_EQ(assemble(example(Style::Separator)), "model T5 We compare models. </s> Table 1. Results.");
  EXPECT_EQ(assemble(example(Style::Plain)), "model T5 We compare models. Table 1. Results.");
  auto none = example(Style::Separator);
  none.relevant_sentences.clear();
  EXPECT_EQ(assemble(none), "model T5 </s> Table 1. Results.");
  none.tabular_tokens.clear();
  EXPECT_EQ(assemble(none), "</s> Table 1. Results.");
}

TEST(Assemble, StyleNamesAndBudgets) {
  EXPECT_EQ(parse_style("sep"), Style::Separator);
  EXPECT_EQ(to_string(Style::Plain), "plain");
  EXPECT_THROW(parse_style("t5"), Error);
  EXPECT_EQ(default_budget(Style::Separator), 512u);
  EXPECT_EQ(default_budget(Style::Plain), 1024u);
}

TEST(Truncate, UnderBudgetUnchanged) {
  const auto spec = example(Style::Separator);
  EXPECT_EQ(truncate(spec), assemble(spec));
  EXPECT_EQ(fit_to_budget(spec), spec);
}

TEST(Truncate, TabularTrimmedFirst) {
  auto spec = example(Style::Separator);
  spec.tabular_tokens.assign(600, "cell");
  const auto fitted = fit_to_budget(spec);
  // 3 sentence words + separator + 3 caption words leave 505 for the table.
  EXPECT_EQ(fitted.tabular_tokens.size(), 505u);
  EXPECT_EQ(fitted.relevant_sentences, spec.relevant_sentences);
  const auto out = truncate(spec);
  EXPECT_EQ(count_tokens(out), 512u);
  EXPECT_TRUE(out.ends_with("</s> Table 1. Results."));
}

TEST(Truncate, SentencesTrimmedFromTheBack) {
  auto spec = example(Style::Plain);
  spec.max_length = 8;
  spec.relevant_sentences = {"one two three", "four five six"};
  const auto fitted = fit_to_budget(spec);
  EXPECT_TRUE(fitted.tabular_tokens.empty());
  EXPECT_EQ(fitted.relevant_sentences, (std::vector<std::string>{"one two three", "four five"}));
  EXPECT_EQ(truncate(spec), "one two three four five Table 1. Results.");
}

TEST(Truncate, BudgetExhausted) {
  auto spec = example(Style::Separator);
  spec.first_caption_sentence = "one two three four five six seven eight nine ten";
  spec.max_length = 3;
  try {
    truncate(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "prompt budget exhausted");
  }
}

TEST(Truncate, Properties) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    PromptSpec spec;
    spec.style = rng() % 2 ? Style::Separator : Style::Plain;
    spec.tabular_tokens.assign(rng() % 30, "t");
    for (std::size_t i = rng() % 4; i > 0; --i) spec.relevant_sentences.push_back("s s s s.");
    spec.first_caption_sentence = "Table 3. Caption words here.";
    spec.max_length = 6 + rng() % 40;

    const auto out = truncate(spec);
    EXPECT_LE(count_tokens(out), spec.max_length);
    EXPECT_TRUE(out.ends_with(spec.first_caption_sentence));
    EXPECT_EQ(occurrences(out, kSeparatorToken), spec.style == Style::Separator ? 1u : 0u);
    const auto fitted = fit_to_budget(spec);
    EXPECT_EQ(fit_to_budget(fitted), fitted);
    EXPECT_EQ(assemble(fitted), out);
  }
}
