#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabcap::text {

/// Shared tokenizer used by retrieval and every metric.
///
/// Lowercases ASCII letters and splits on whitespace and punctuation.
/// Numerals are kept, including decimal points and grouping commas that
/// sit between two digits ("8.29", "1,024"). Bytes outside ASCII are
/// treated as word characters so UTF-8 symbols survive as tokens.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

std::string join(std::span<const std::string> parts, std::string_view sep = " ");

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

bool is_ascii_upper(char c);
bool is_ascii_digit(char c);

}  // namespace tabcap::text
