#include "tabcap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "tabcap/error.hpp"
#include "tabcap/text.hpp"

namespace tabcap::metrics {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Bleu:
      return "BLEU";
    case Metric::Rouge1:
      return "ROUGE-1";
    case Metric::Rouge2:
      return "ROUGE-2";
    case Metric::RougeL:
      return "ROUGE-L";
    case Metric::Meteor:
      return "METEOR";
  }
  return "";
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(Tokens tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t clipped_matches(const NgramCounts& candidate, const NgramCounts& reference) {
  std::size_t matches = 0;
  for (const auto& [gram, count] : candidate) {
    const auto it = reference.find(gram);
    if (it != reference.end()) matches += std::min(count, it->second);
  }
  return matches;
}

std::size_t ngram_total(std::size_t length, std::size_t n) { return length >= n ? length - n + 1 : 0; }

double f1(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats bleu_stats(Tokens candidate, Tokens reference) {
  BleuStats stats;
  stats.candidate_length = candidate.size();
  stats.reference_length = reference.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    stats.totals[n - 1] = ngram_total(candidate.size(), n);
    stats.matches[n - 1] = clipped_matches(count_ngrams(candidate, n), count_ngrams(reference, n));
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_length == 0 || stats.matches[0] == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double m = static_cast<double>(stats.matches[n]);
    const double t = static_cast<double>(stats.totals[n]);
    const double p = stats.matches[n] > 0 ? m / t : 1.0 / (t + 1.0);
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double bleu(Tokens candidate, Tokens reference) {
  return bleu_from_stats(bleu_stats(candidate, reference));
}

double bleu(std::string_view candidate, std::string_view reference) {
  const auto c = text::tokenize(candidate);
  const auto r = text::tokenize(reference);
  return bleu(c, r);
}

double rouge_n(Tokens candidate, Tokens reference, int n, RougeMode mode) {
  if (n < 1) throw Error("rouge n must be >= 1");
  const auto order = static_cast<std::size_t>(n);
  if (reference.size() < order)
    throw UndefinedScore("ROUGE-" + std::to_string(n) + " undefined: reference has " +
                         std::to_string(reference.size()) + " tokens");
  const double matches = static_cast<double>(
      clipped_matches(count_ngrams(candidate, order), count_ngrams(reference, order)));
  const double recall = matches / static_cast<double>(ngram_total(reference.size(), order));
  if (mode == RougeMode::Recall) return recall;
  const std::size_t cand_total = ngram_total(candidate.size(), order);
  const double precision = cand_total ? matches / static_cast<double>(cand_total) : 0.0;
  return f1(precision, recall);
}

double rouge_n(std::string_view candidate, std::string_view reference, int n, RougeMode mode) {
  const auto c = text::tokenize(candidate);
  const auto r = text::tokenize(reference);
  return rouge_n(c, r, n, mode);
}

std::size_t lcs_length(Tokens a, Tokens b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(Tokens candidate, Tokens reference, RougeMode mode) {
  if (reference.empty()) throw UndefinedScore("ROUGE-L undefined: empty reference");
  const double lcs = static_cast<double>(lcs_length(candidate, reference));
  const double recall = lcs / static_cast<double>(reference.size());
  if (mode == RougeMode::Recall) return recall;
  const double precision = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  return f1(precision, recall);
}

double rouge_l(std::string_view candidate, std::string_view reference, RougeMode mode) {
  const auto c = text::tokenize(candidate);
  const auto r = text::tokenize(reference);
  return rouge_l(c, r, mode);
}

// ---------------------------------------------------------------------------
// METEOR alignment

std::size_t count_chunks(std::span<const std::pair<std::size_t, std::size_t>> links) {
  if (links.empty()) return 0;
  std::size_t chunks = 1;
  for (std::size_t t = 1; t < links.size(); ++t) {
    const bool contiguous =
        links[t].first == links[t - 1].first + 1 && links[t].second == links[t - 1].second + 1;
    if (!contiguous) ++chunks;
  }
  return chunks;
}

std::size_t count_crossings(std::span<const std::pair<std::size_t, std::size_t>> links) {
  std::size_t crossings = 0;
  for (std::size_t a = 0; a < links.size(); ++a)
    for (std::size_t b = a + 1; b < links.size(); ++b) {
      const auto& x = links[a];
      const auto& y = links[b];
      if ((x.first < y.first && x.second > y.second) || (x.first > y.first && x.second < y.second))
        ++crossings;
    }
  return crossings;
}

namespace {

using Links = std::vector<std::pair<std::size_t, std::size_t>>;

// Above this many joint subset choices per stage the search falls back to
// per-group coordinate descent.
constexpr double kExactSearchLimit = 4096.0;

struct Ranked {
  std::size_t crossings = 0;
  std::size_t chunks = 0;
  Links links;

  bool operator<(const Ranked& o) const {
    return std::tie(crossings, chunks, links) < std::tie(o.crossings, o.chunks, o.links);
  }
};

Ranked rank(Links links) {
  std::sort(links.begin(), links.end());
  Ranked r;
  r.crossings = count_crossings(links);
  r.chunks = count_chunks(links);
  r.links = std::move(links);
  return r;
}

// Free positions sharing one match key. Within a group the minimum-crossing
// pairing is always order-preserving, so the only freedom is which
// positions of the longer side take part.
struct Group {
  std::vector<std::size_t> cand;
  std::vector<std::size_t> ref;

  bool cand_longer() const { return cand.size() > ref.size(); }
  std::size_t pick() const { return std::min(cand.size(), ref.size()); }
  std::size_t pool() const { return std::max(cand.size(), ref.size()); }
};

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  return c;
}

void append_group_links(const Group& g, const std::vector<std::size_t>& choice, Links& out) {
  for (std::size_t t = 0; t < choice.size(); ++t) {
    if (g.cand_longer())
      out.emplace_back(g.cand[choice[t]], g.ref[t]);
    else
      out.emplace_back(g.cand[t], g.ref[choice[t]]);
  }
}

Ranked evaluate(const Links& fixed, const std::vector<Group>& groups,
                const std::vector<std::vector<std::size_t>>& choices) {
  Links links = fixed;
  for (std::size_t g = 0; g < groups.size(); ++g) append_group_links(groups[g], choices[g], links);
  return rank(std::move(links));
}

Links align_stage(const std::vector<std::string>& cand_keys, const std::vector<std::string>& ref_keys,
                  const std::vector<bool>& cand_used, const std::vector<bool>& ref_used,
                  const Links& fixed) {
  std::map<std::string, Group> by_key;
  for (std::size_t i = 0; i < cand_keys.size(); ++i)
    if (!cand_used[i]) by_key[cand_keys[i]].cand.push_back(i);
  for (std::size_t j = 0; j < ref_keys.size(); ++j)
    if (!ref_used[j]) {
      auto it = by_key.find(ref_keys[j]);
      if (it != by_key.end()) it->second.ref.push_back(j);
    }

  std::vector<Group> groups;
  for (auto& [key, g] : by_key)
    if (!g.cand.empty() && !g.ref.empty()) groups.push_back(std::move(g));
  if (groups.empty()) return fixed;

  std::vector<std::vector<std::size_t>> choices;
  double space = 1.0;
  for (const auto& g : groups) {
    choices.push_back(first_combination(g.pick()));
    space *= binomial(g.pool(), g.pick());
  }

  Ranked best = evaluate(fixed, groups, choices);
  if (space <= kExactSearchLimit) {
    // Odometer over every group's subset choice.
    while (true) {
      std::size_t g = 0;
      for (; g < groups.size(); ++g) {
        if (next_combination(choices[g], groups[g].pool())) break;
        choices[g] = first_combination(groups[g].pick());
      }
      if (g == groups.size()) break;
      Ranked r = evaluate(fixed, groups, choices);
      if (r < best) best = std::move(r);
    }
    return best.links;
  }

  // Coordinate descent: re-optimize one group at a time while it helps.
  bool improved = true;
  for (int pass = 0; improved && pass < 16; ++pass) {
    improved = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (binomial(groups[g].pool(), groups[g].pick()) > kExactSearchLimit) continue;
      auto current = choices[g];
      auto trial = first_combination(groups[g].pick());
      do {
        choices[g] = trial;
        Ranked r = evaluate(fixed, groups, choices);
        if (r < best) {
          best = std::move(r);
          current = trial;
          improved = true;
        }
      } while (next_combination(trial, groups[g].pool()));
      choices[g] = current;
    }
  }
  return best.links;
}

}  // namespace

Alignment meteor_align(Tokens candidate, Tokens reference) {
  std::vector<std::string> cand_exact(candidate.begin(), candidate.end());
  std::vector<std::string> ref_exact(reference.begin(), reference.end());

  std::vector<bool> cand_used(candidate.size(), false), ref_used(reference.size(), false);
  Links links = align_stage(cand_exact, ref_exact, cand_used, ref_used, {});
  const std::size_t exact = links.size();

  for (const auto& [i, j] : links) {
    cand_used[i] = true;
    ref_used[j] = true;
  }
  std::vector<std::string> cand_stem, ref_stem;
  for (const auto& t : candidate) cand_stem.push_back(porter_stem(t));
  for (const auto& t : reference) ref_stem.push_back(porter_stem(t));
  links = align_stage(cand_stem, ref_stem, cand_used, ref_used, links);

  std::sort(links.begin(), links.end());
  Alignment a;
  a.exact = exact;
  a.stemmed = links.size() - exact;
  a.chunks = count_chunks(links);
  a.crossings = count_crossings(links);
  a.links = std::move(links);
  return a;
}

double meteor_from_counts(std::size_t matches, std::size_t chunks, std::size_t candidate_length,
                          std::size_t reference_length, const MeteorParams& params) {
  if (matches == 0) return 0.0;
  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(candidate_length);
  const double recall = m / static_cast<double>(reference_length);
  const double fmean =
      precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(chunks) / m, params.beta);
  return fmean * (1.0 - penalty);
}

double meteor(Tokens candidate, Tokens reference, const MeteorParams& params) {
  const auto a = meteor_align(candidate, reference);
  return meteor_from_counts(a.links.size(), a.chunks, candidate.size(), reference.size(), params);
}

double meteor(std::string_view candidate, std::string_view reference, const MeteorParams& params) {
  const auto c = text::tokenize(candidate);
  const auto r = text::tokenize(reference);
  return meteor(c, r, params);
}

// ---------------------------------------------------------------------------

double PairScores::get(Metric metric) const {
  switch (metric) {
    case Metric::Bleu:
      return bleu;
    case Metric::Rouge1:
      return rouge1;
    case Metric::Rouge2:
      return rouge2;
    case Metric::RougeL:
      return rougeL;
    case Metric::Meteor:
      return meteor;
  }
  return 0.0;
}

MetricReport evaluate_corpus(std::span<const Pair> pairs, const EvalOptions& options) {
  if (pairs.empty()) throw Error("no pairs to evaluate");
  MetricReport report;
  report.rouge_mode = options.rouge_mode;
  report.pairs.reserve(pairs.size());

  BleuStats pooled;
  PairScores sums;
  for (const auto& pair : pairs) {
    const auto c = text::tokenize(pair.candidate);
    const auto r = text::tokenize(pair.reference);
    const auto stats = bleu_stats(c, r);
    pooled += stats;

    PairScores s;
    s.bleu = bleu_from_stats(stats);
    bool undefined = false;
    auto guarded = [&](auto&& fn) {
      try {
        return fn();
      } catch (const UndefinedScore&) {
        undefined = true;
        return 0.0;
      }
    };
    s.rouge1 = guarded([&] { return rouge_n(c, r, 1, options.rouge_mode); });
    s.rouge2 = guarded([&] { return rouge_n(c, r, 2, options.rouge_mode); });
    s.rougeL = guarded([&] { return rouge_l(c, r, options.rouge_mode); });
    s.meteor = meteor(c, r, options.meteor);
    if (undefined) ++report.undefined_rouge;

    sums.rouge1 += s.rouge1;
    sums.rouge2 += s.rouge2;
    sums.rougeL += s.rougeL;
    sums.meteor += s.meteor;
    report.pairs.push_back(s);
  }

  const double n = static_cast<double>(pairs.size());
  report.aggregate.bleu = bleu_from_stats(pooled);
  report.aggregate.rouge1 = sums.rouge1 / n;
  report.aggregate.rouge2 = sums.rouge2 / n;
  report.aggregate.rougeL = sums.rougeL / n;
  report.aggregate.meteor = sums.meteor / n;
  return report;
}

namespace {

nlohmann::json scores_json(const PairScores& s) {
  nlohmann::json j;
  for (auto m : kAllMetrics) j[std::string(to_string(m))] = s.get(m);
  return j;
}

}  // namespace

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) pairs.push_back(scores_json(p));
  return {{"aggregate", scores_json(report.aggregate)},
          {"pairs", pairs},
          {"pair_count", report.pairs.size()},
          {"undefined_rouge", report.undefined_rouge},
          {"settings",
           {{"bleu", "corpus-level pooled 1-4 grams; zero higher-order counts smoothed to 1/(n+1)"},
            {"rouge_mode", report.rouge_mode == RougeMode::Recall ? "recall" : "f1"},
            {"meteor_matching", "exact then porter-stem; no synonym stage"},
            {"tokenizer", "lowercase, split on whitespace and punctuation, numerals kept"}}}};
}

std::string pairs_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "index";
  for (auto m : kAllMetrics) out << ',' << to_string(m);
  out << '\n' << std::setprecision(10);
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    out << i;
    for (auto m : kAllMetrics) out << ',' << report.pairs[i].get(m);
    out << '\n';
  }
  return out.str();
}

}  // namespace tabcap::metrics
