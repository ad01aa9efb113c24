#include "tabcap/prompt.hpp"

#include <algorithm>

#include "tabcap/error.hpp"
#include "tabcap/text.hpp"

namespace tabcap::prompt {

std::string_view to_string(Style style) {
  return style == Style::Separator ? "sep" : "plain";
}

Style parse_style(std::string_view name) {
  if (name == "sep") return Style::Separator;
  if (name == "plain") return Style::Plain;
  throw Error("unknown prompt style '" + std::string(name) + "' (expected sep or plain)");
}

std::size_t default_budget(Style style) { return style == Style::Separator ? 512 : 1024; }

CaptionSplit split_caption(std::span<const std::string> caption) {
  std::vector<std::string> sentences;
  for (const auto& s : caption) {
    auto normalized = text::normalize_whitespace(s);
    if (!normalized.empty()) sentences.push_back(std::move(normalized));
  }
  if (sentences.size() < 2) throw Error("no target");
  CaptionSplit split;
  split.first = sentences.front();
  split.rest = text::join(std::span<const std::string>(sentences).subspan(1), " ");
  return split;
}

std::size_t count_tokens(std::string_view text) { return text::split_whitespace(text).size(); }

std::string assemble(const PromptSpec& spec) {
  std::vector<std::string> parts;
  for (const auto& t : spec.tabular_tokens) {
    auto word = text::normalize_whitespace(t);
    if (!word.empty()) parts.push_back(std::move(word));
  }
  for (const auto& s : spec.relevant_sentences) {
    auto sentence = text::normalize_whitespace(s);
    if (!sentence.empty()) parts.push_back(std::move(sentence));
  }
  if (spec.style == Style::Separator) parts.emplace_back(kSeparatorToken);
  parts.push_back(text::normalize_whitespace(spec.first_caption_sentence));
  return text::join(parts, " ");
}

PromptSpec fit_to_budget(PromptSpec spec) {
  if (spec.max_length == 0) throw Error("prompt budget must be positive");

  // Work on whitespace tokens so the budget matches count_tokens(assemble()).
  std::vector<std::string> tabular;
  for (const auto& t : spec.tabular_tokens)
    for (auto& w : text::split_whitespace(t)) tabular.push_back(std::move(w));
  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : spec.relevant_sentences) {
    auto words = text::split_whitespace(s);
    if (!words.empty()) sentences.push_back(std::move(words));
  }

  const std::size_t fixed = count_tokens(spec.first_caption_sentence) +
                            (spec.style == Style::Separator ? 1 : 0);
  if (fixed > spec.max_length) throw Error("prompt budget exhausted");

  std::size_t total = fixed + tabular.size();
  for (const auto& s : sentences) total += s.size();

  if (total > spec.max_length) {
    std::size_t excess = total - spec.max_length;
    const std::size_t from_table = std::min(excess, tabular.size());
    tabular.resize(tabular.size() - from_table);
    excess -= from_table;
    while (excess > 0 && !sentences.empty()) {
      auto& last = sentences.back();
      const std::size_t cut = std::min(excess, last.size());
      last.resize(last.size() - cut);
      excess -= cut;
      if (last.empty()) sentences.pop_back();
    }
  }

  spec.tabular_tokens = std::move(tabular);
  spec.relevant_sentences.clear();
  for (const auto& s : sentences) spec.relevant_sentences.push_back(text::join(s, " "));
  return spec;
}

std::string truncate(const PromptSpec& spec) { return assemble(fit_to_budget(spec)); }

}  // namespace tabcap::prompt
