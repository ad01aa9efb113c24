#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "tabcap/docbank.hpp"
#include "tabcap/generation.hpp"
#include "tabcap/metrics.hpp"
#include "tabcap/prompt.hpp"
#include "tabcap/retrieval.hpp"
#include "tabcap/table.hpp"

namespace tabcap::harness {

/// One column of the result table: a retrieval method plus the table part
/// used for the prompt.
struct Condition {
  retrieval::RetrievalConfig retrieval;
  table::Variant variant = table::Variant::Whole;

  /// "none", "top1-rh", ..., "author".
  std::string label() const;
  /// CSV column title, e.g. "Top-2 BM25 T_r.o".
  std::string title() const;
  static Condition parse(std::string_view label);
};

/// None; Top-1/2/3 x {T_r.h, T_r.o, T_r.w}; Author.
std::vector<Condition> canonical_grid();

struct Cell {
  std::optional<double> value;
  std::string error;

  bool ok() const { return value.has_value(); }
  bool operator==(const Cell&) const = default;
};

class ResultMatrix {
 public:
  ResultMatrix() = default;
  ResultMatrix(std::vector<prompt::Style> styles, std::vector<std::string> conditions);

  const std::vector<prompt::Style>& styles() const { return styles_; }
  const std::vector<std::string>& conditions() const { return conditions_; }

  void set(prompt::Style style, const std::string& condition, metrics::Metric metric, Cell cell);
  const Cell* find(prompt::Style style, const std::string& condition,
                   metrics::Metric metric) const;
  std::size_t cell_count() const { return cells_.size(); }

  /// "style/condition/metric" for every cell not yet set.
  std::vector<std::string> missing_cells() const;
  bool complete() const { return missing_cells().empty(); }

  nlohmann::json provenance;

  nlohmann::json to_json() const;
  static ResultMatrix from_json(const nlohmann::json& j);

  bool operator==(const ResultMatrix&) const = default;

 private:
  using Key = std::tuple<prompt::Style, std::string, metrics::Metric>;
  std::vector<prompt::Style> styles_;
  std::vector<std::string> conditions_;
  std::map<Key, Cell> cells_;
};

struct GridConfig {
  std::vector<Condition> conditions = canonical_grid();
  std::vector<prompt::Style> styles = {prompt::Style::Separator, prompt::Style::Plain};
  table::HeaderMode header_mode = table::HeaderMode::FirstCell;
  /// When false, None and Author prompts carry no tabular text at all.
  bool tabular_for_untyped_conditions = true;
  /// Admit only captions with more than two sentences.
  bool strict_caption_filter = false;
  int max_new_tokens = 128;
  std::optional<std::size_t> budget_separator;
  std::optional<std::size_t> budget_plain;
  metrics::EvalOptions eval;
  /// When set, writes <dir>/<style>/<condition>/generations.jsonl.
  std::optional<std::filesystem::path> generations_dir;

  nlohmann::json snapshot() const;
};

/// Order-sensitive FNV-1a hash of the serialized corpus.
std::uint64_t corpus_hash(std::span<const docbank::PageRecord> records);

/// One prepared example: what gets sent to the backend and what it is
/// scored against.
struct PreparedExample {
  std::string record_id;
  std::string prompt;
  std::string reference;
};

/// Builds the prompt for one record under one condition and style:
/// split caption, linearize, strip numerals, retrieve, assemble, truncate.
PreparedExample prepare_example(const docbank::PageRecord& record, const Condition& condition,
                                prompt::Style style, const GridConfig& config);

/// Records usable for the caption continuation task.
std::vector<docbank::PageRecord> admissible_records(std::span<const docbank::PageRecord> corpus,
                                                    bool strict);

ResultMatrix run_grid(std::span<const docbank::PageRecord> corpus,
                      const gen::GenerationClient& client, const GridConfig& config = {});

/// One row per (style, metric), one column per condition. Error cells
/// print as "ERR". Throws tabcap::Error listing missing cells when the
/// matrix is incomplete.
std::string to_csv(const ResultMatrix& matrix);

/// Writes matrix.csv and matrix.json into `dir`.
void emit_table(const ResultMatrix& matrix, const std::filesystem::path& dir);

struct Best {
  prompt::Style style;
  metrics::Metric metric;
  std::vector<std::string> conditions;  // every condition attaining the max
  double value = 0.0;
  bool partial = false;                 // some cells were errors
};

std::vector<Best> compare_best(const ResultMatrix& matrix);

}  // namespace tabcap::harness
