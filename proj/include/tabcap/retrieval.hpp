#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabcap/table.hpp"

namespace tabcap::retrieval {

/// Okapi BM25 free parameters: k1 saturates term frequency, b controls
/// length normalization.
struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  /// Throws tabcap::Error unless k1 >= 0 and 0 <= b <= 1.
  void validate() const;
};

/// Per-sentence term statistics over one page's body text.
class SentenceIndex {
 public:
  /// Tokenizes every sentence with the shared tokenizer. Throws
  /// tabcap::Error("no sentences") on an empty corpus.
  explicit SentenceIndex(std::vector<std::string> sentences);

  std::size_t size() const { return sentences_.size(); }
  const std::string& sentence(std::size_t id) const { return sentences_.at(id); }
  const std::vector<std::string>& terms(std::size_t id) const { return terms_.at(id); }
  std::size_t length(std::size_t id) const { return terms_.at(id).size(); }
  double average_length() const { return average_length_; }
  std::size_t document_frequency(const std::string& term) const;
  std::size_t term_frequency(std::size_t id, const std::string& term) const;

 private:
  std::vector<std::string> sentences_;
  std::vector<std::vector<std::string>> terms_;
  std::vector<std::unordered_map<std::string, std::size_t>> tf_;
  std::unordered_map<std::string, std::size_t> df_;
  double average_length_ = 0.0;
};

SentenceIndex build_index(std::vector<std::string> sentences);

double idf(std::size_t sentence_count, std::size_t document_frequency);

/// Sums IDF-weighted saturated term frequencies over the query tokens
/// (repeated query tokens contribute once per occurrence). Throws
/// tabcap::Error for an unknown sentence id.
double bm25_score(std::span<const std::string> query, std::size_t sentence_id,
                  const SentenceIndex& index, const Bm25Params& params = {});

struct ScoredSentence {
  std::size_t position = 0;
  double score = 0.0;
  std::string text;
};

/// At most `n` sentences with positive score, best first; equal scores keep
/// document order.
std::vector<ScoredSentence> top_n(std::span<const std::string> query, std::size_t n,
                                  const SentenceIndex& index, const Bm25Params& params = {});

/// The retrieval query for a table: every cell word, tokenized, numerals kept.
std::vector<std::string> table_query(const table::Table& table);

/// Reads a "Table 6" / "Table V" reference off the start of a caption.
std::optional<std::string> table_indicator(std::string_view caption_first_sentence);

/// First body sentence mentioning the caption's table indicator, if any.
std::vector<std::string> author_match(std::string_view caption_first_sentence,
                                      std::span<const std::string> sentences);

enum class Method { None, TopN, Author };

struct RetrievalConfig {
  Method method = Method::None;
  std::size_t n = 0;
  Bm25Params params;

  /// "none", "top1".."topN", "author".
  static RetrievalConfig parse(std::string_view name);
  std::string name() const;
  void validate() const;
};

/// Relevant sentences for one record under the given method.
std::vector<std::string> retrieve(const RetrievalConfig& config, const table::Table& table,
                                  std::span<const std::string> sentences,
                                  std::string_view caption_first_sentence);

}  // namespace tabcap::retrieval
