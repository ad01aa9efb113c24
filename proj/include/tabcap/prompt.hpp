#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabcap::prompt {

/// SeparatorStyle places the encoder-decoder end-of-segment token between
/// the context and the caption prefix; PlainStyle just concatenates.
enum class Style { Separator, Plain };

inline constexpr std::string_view kSeparatorToken = "</s>";

std::string_view to_string(Style style);  // "sep", "plain"
Style parse_style(std::string_view name);

/// Default whitespace-token budgets: 512 for Separator, 1024 for Plain.
std::size_t default_budget(Style style);

struct CaptionSplit {
  std::string first;
  std::string rest;  // generation target

  bool operator==(const CaptionSplit&) const = default;
};

/// Throws tabcap::Error("no target") for captions with fewer than two sentences.
CaptionSplit split_caption(std::span<const std::string> caption);

struct PromptSpec {
  std::vector<std::string> tabular_tokens;
  std::vector<std::string> relevant_sentences;
  std::string first_caption_sentence;
  Style style = Style::Separator;
  std::size_t max_length = 512;

  bool operator==(const PromptSpec&) const = default;
};

/// table, sentences, [</s>,] caption prefix, single-space joined.
std::string assemble(const PromptSpec& spec);

std::size_t count_tokens(std::string_view text);

/// Trims the spec to max_length whitespace tokens: tabular tail first, then
/// retrieved sentences from the back. Throws tabcap::Error("prompt budget
/// exhausted") when the caption prefix and separator alone do not fit.
PromptSpec fit_to_budget(PromptSpec spec);

/// assemble(fit_to_budget(spec)).
std::string truncate(const PromptSpec& spec);

}  // namespace tabcap::prompt
