#include "tabcap/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "tabcap/error.hpp"
#include "tabcap/text.hpp"

namespace tabcap::retrieval {

void Bm25Params::validate() const {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) throw Error("bm25 k1 must be >= 0");
  if (!(b >= 0.0 && b <= 1.0)) throw Error("bm25 b must lie in [0, 1]");
}

SentenceIndex::SentenceIndex(std::vector<std::string> sentences)
    : sentences_(std::move(sentences)) {
  if (sentences_.empty()) throw Error("no sentences");
  terms_.reserve(sentences_.size());
  tf_.resize(sentences_.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    terms_.push_back(text::tokenize(sentences_[i]));
    for (const auto& term : terms_.back()) ++tf_[i][term];
    for (const auto& [term, count] : tf_[i]) ++df_[term];
    total += terms_.back().size();
  }
  average_length_ = static_cast<double>(total) / static_cast<double>(sentences_.size());
}

std::size_t SentenceIndex::document_frequency(const std::string& term) const {
  const auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

std::size_t SentenceIndex::term_frequency(std::size_t id, const std::string& term) const {
  const auto& tf = tf_.at(id);
  const auto it = tf.find(term);
  return it == tf.end() ? 0 : it->second;
}

SentenceIndex build_index(std::vector<std::string> sentences) {
  return SentenceIndex(std::move(sentences));
}

double idf(std::size_t sentence_count, std::size_t document_frequency) {
  const double n = static_cast<double>(sentence_count);
  const double df = static_cast<double>(document_frequency);
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double bm25_score(std::span<const std::string> query, std::size_t sentence_id,
                  const SentenceIndex& index, const Bm25Params& params) {
  if (sentence_id >= index.size())
    throw Error("unknown sentence id " + std::to_string(sentence_id));
  const double avg = index.average_length();
  const double norm = avg > 0.0 ? static_cast<double>(index.length(sentence_id)) / avg : 1.0;
  const double saturation = params.k1 * (1.0 - params.b + params.b * norm);

  double score = 0.0;
  for (const auto& term : query) {
    const auto tf = static_cast<double>(index.term_frequency(sentence_id, term));
    if (tf == 0.0) continue;
    score += idf(index.size(), index.document_frequency(term)) * tf * (params.k1 + 1.0) /
             (tf + saturation);
  }
  return score;
}

std::vector<ScoredSentence> top_n(std::span<const std::string> query, std::size_t n,
                                  const SentenceIndex& index, const Bm25Params& params) {
  std::vector<ScoredSentence> scored;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const double s = bm25_score(query, i, index, params);
    if (s > 0.0) scored.push_back({i, s, index.sentence(i)});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredSentence& a, const ScoredSentence& b) { return a.score > b.score; });
  if (scored.size() > n) scored.resize(n);
  return scored;
}

std::vector<std::string> table_query(const table::Table& table) {
  std::vector<std::string> query;
  for (const auto& word : table::linearize(table, table::Variant::Whole))
    for (auto& term : text::tokenize(word)) query.push_back(std::move(term));
  return query;
}

namespace {

bool is_roman_char(char c) {
  return c == 'I' || c == 'V' || c == 'X' || c == 'L' || c == 'C' || c == 'D' || c == 'M';
}

// Length of an arabic or roman numeral at the start of `s`, 0 if none.
std::size_t numeral_prefix(std::string_view s) {
  std::size_t n = 0;
  if (!s.empty() && text::is_ascii_digit(s[0])) {
    while (n < s.size() && text::is_ascii_digit(s[n])) ++n;
  } else {
    while (n < s.size() && is_roman_char(s[n])) ++n;
  }
  if (n == 0) return 0;
  // A numeral must not run into a word ("Tables", "Table VIa").
  if (n < s.size() && std::isalnum(static_cast<unsigned char>(s[n]))) return 0;
  return n;
}

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) || s.front() == '~'))
    s.remove_prefix(1);
  return s;
}

// `rest` starts right after the word "Table"; returns the numeral that
// follows it, if any.
std::optional<std::string_view> numeral_after_table(std::string_view rest) {
  const std::string_view trimmed = trim_left(rest);
  if (trimmed.size() == rest.size()) return std::nullopt;  // "Tables", "Table6"
  const std::size_t n = numeral_prefix(trimmed);
  if (n == 0) return std::nullopt;
  return trimmed.substr(0, n);
}

}  // namespace

std::optional<std::string> table_indicator(std::string_view caption) {
  caption = trim_left(caption);
  if (!caption.starts_with("Table")) return std::nullopt;
  const auto number = numeral_after_table(caption.substr(5));
  if (!number) return std::nullopt;
  return "Table " + std::string(*number);
}

std::vector<std::string> author_match(std::string_view caption_first_sentence,
                                      std::span<const std::string> sentences) {
  const auto indicator = table_indicator(caption_first_sentence);
  if (!indicator) return {};
  const std::string_view number = std::string_view(*indicator).substr(6);

  for (const auto& sentence : sentences) {
    const std::string_view s = sentence;
    for (std::size_t pos = s.find("Table"); pos != std::string_view::npos;
         pos = s.find("Table", pos + 1)) {
      if (pos > 0 && std::isalnum(static_cast<unsigned char>(s[pos - 1]))) continue;
      const auto found = numeral_after_table(s.substr(pos + 5));
      if (found && *found == number) return {sentence};
    }
  }
  return {};
}

RetrievalConfig RetrievalConfig::parse(std::string_view name) {
  RetrievalConfig config;
  if (name == "none") return config;
  if (name == "author") {
    config.method = Method::Author;
    return config;
  }
  if (name.starts_with("top") && name.size() > 3) {
    std::size_t n = 0;
    for (char c : name.substr(3)) {
      if (!text::is_ascii_digit(c)) throw Error("unknown retrieval method '" + std::string(name) + "'");
      n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    config.method = Method::TopN;
    config.n = n;
    config.validate();
    return config;
  }
  throw Error("unknown retrieval method '" + std::string(name) +
              "' (expected none, topN or author)");
}

std::string RetrievalConfig::name() const {
  switch (method) {
    case Method::None:
      return "none";
    case Method::TopN:
      return "top" + std::to_string(n);
    case Method::Author:
      return "author";
  }
  return "none";
}

void RetrievalConfig::validate() const {
  if (method == Method::TopN && n < 1) throw Error("top-N retrieval requires n >= 1");
  params.validate();
}

std::vector<std::string> retrieve(const RetrievalConfig& config, const table::Table& table,
                                  std::span<const std::string> sentences,
                                  std::string_view caption_first_sentence) {
  switch (config.method) {
    case Method::None:
      return {};
    case Method::Author:
      return author_match(caption_first_sentence, sentences);
    case Method::TopN: {
      if (sentences.empty()) return {};
      const SentenceIndex index(std::vector<std::string>(sentences.begin(), sentences.end()));
      const auto query = table_query(table);
      std::vector<std::string> out;
      for (auto& hit : top_n(query, config.n, index, config.params)) out.push_back(std::move(hit.text));
      return out;
    }
  }
  return {};
}

}  // namespace tabcap::retrieval
