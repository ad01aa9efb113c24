#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tabcap::metrics {

using Tokens = std::span<const std::string>;

enum class Metric { Bleu, Rouge1, Rouge2, RougeL, Meteor };
inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::Bleu, Metric::Rouge1, Metric::Rouge2,
                                                      Metric::RougeL, Metric::Meteor};
std::string_view to_string(Metric metric);  // "BLEU", "ROUGE-1", ...

enum class RougeMode { Recall, F1 };

/// Clipped n-gram counts for n = 1..4 plus lengths; these pool by addition.
struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(Tokens candidate, Tokens reference);

/// 100 * BP * geometric mean of p1..p4. A zero count for n >= 2 is
/// smoothed to 1 / (total_n + 1); a zero unigram count yields 0.
double bleu_from_stats(const BleuStats& stats);

double bleu(Tokens candidate, Tokens reference);
double bleu(std::string_view candidate, std::string_view reference);

/// Clipped n-gram overlap. Throws UndefinedScore when the reference has
/// fewer than n tokens.
double rouge_n(Tokens candidate, Tokens reference, int n, RougeMode mode = RougeMode::Recall);
double rouge_n(std::string_view candidate, std::string_view reference, int n,
               RougeMode mode = RougeMode::Recall);

std::size_t lcs_length(Tokens a, Tokens b);

/// Longest common subsequence over the reference length. Throws
/// UndefinedScore for an empty reference.
double rouge_l(Tokens candidate, Tokens reference, RougeMode mode = RougeMode::Recall);
double rouge_l(std::string_view candidate, std::string_view reference,
               RougeMode mode = RougeMode::Recall);

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
std::string porter_stem(std::string_view word);

/// Unigram alignment: (candidate index, reference index) pairs sorted by
/// candidate index.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> links;
  std::size_t exact = 0;
  std::size_t stemmed = 0;
  std::size_t chunks = 0;
  std::size_t crossings = 0;
};

/// Exact stage then stem stage on the residue. Each stage maximizes
/// matches; ties go to fewer crossings, then fewer chunks, then the
/// lexicographically smallest link list.
Alignment meteor_align(Tokens candidate, Tokens reference);

std::size_t count_chunks(std::span<const std::pair<std::size_t, std::size_t>> sorted_links);
std::size_t count_crossings(std::span<const std::pair<std::size_t, std::size_t>> links);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

double meteor_from_counts(std::size_t matches, std::size_t chunks, std::size_t candidate_length,
                          std::size_t reference_length, const MeteorParams& params = {});
double meteor(Tokens candidate, Tokens reference, const MeteorParams& params = {});
double meteor(std::string_view candidate, std::string_view reference,
              const MeteorParams& params = {});

struct PairScores {
  double bleu = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double meteor = 0.0;

  double get(Metric metric) const;
  bool operator==(const PairScores&) const = default;
};

struct Pair {
  std::string candidate;
  std::string reference;
};

struct EvalOptions {
  RougeMode rouge_mode = RougeMode::Recall;
  MeteorParams meteor;
};

struct MetricReport {
  std::vector<PairScores> pairs;
  /// BLEU from pooled n-gram counts; the others are per-pair means.
  PairScores aggregate;
  /// Pairs whose reference was too short for ROUGE-N/L; scored as 0.
  std::size_t undefined_rouge = 0;
  RougeMode rouge_mode = RougeMode::Recall;
};

/// Throws tabcap::Error on an empty pair set.
MetricReport evaluate_corpus(std::span<const Pair> pairs, const EvalOptions& options = {});

nlohmann::json to_json(const MetricReport& report);
std::string pairs_csv(const MetricReport& report);

}  // namespace tabcap::metrics
