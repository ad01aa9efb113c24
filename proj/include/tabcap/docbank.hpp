#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tabcap/page.hpp"
#include "tabcap/table.hpp"

namespace tabcap::docbank {

/// Tunable layout constants. Defaults follow the dataset builder's
/// documented behavior and are exposed on the CLI.
struct LayoutParams {
  double band_overlap = 0.5;
  int column_gap = 150;
  double column_mass = 0.2;
  int table_gap = 30;
  int cell_gap = 15;
};

/// One table-caption corpus entry.
struct PageRecord {
  std::string page_id;
  std::vector<std::string> sentences;
  std::vector<std::string> caption;
  std::vector<std::vector<std::string>> table;

  bool operator==(const PageRecord&) const = default;
};

/// Decodes one tab-separated annotation line:
/// text, x0, y0, x1, y1, r, g, b, font, label.
SemanticToken parse_token_line(std::string_view line, std::size_t line_number);

/// Parses every line and returns the tokens in reading order. Blank lines
/// are skipped; line numbers in errors are 1-based.
PageLayout parse_page(std::string page_id, std::span<const std::string> lines,
                      const LayoutParams& params = {});
PageLayout parse_page(std::string page_id, std::istream& in, const LayoutParams& params = {});
PageLayout read_page_file(const std::filesystem::path& path, const LayoutParams& params = {});

int detect_columns(const PageLayout& layout, const LayoutParams& params = {});
std::size_t count_tables(const PageLayout& layout, const LayoutParams& params = {});

/// Splits running text into sentences. Trailing fragments without a
/// terminator are returned too; see is_complete_sentence.
std::vector<std::string> segment_sentences(std::span<const std::string> words);
std::vector<std::string> segment_sentences(std::span<const SemanticToken> tokens);
bool is_complete_sentence(std::string_view sentence);

/// Body sentences that end in a terminator, in reading order.
std::vector<std::string> body_sentences(const PageLayout& layout);

enum class Criterion { OneColumn, SingleTable, ThreeSentences };
std::string_view describe(Criterion criterion);

struct FilterVerdict {
  bool accepted = false;
  std::optional<Criterion> failed;
  std::size_t columns = 0;
  std::size_t tables = 0;
  std::size_t sentences = 0;
};

FilterVerdict check_filter(const PageLayout& layout, const LayoutParams& params = {});
bool apply_filter(const PageLayout& layout, const LayoutParams& params = {});

/// Throws RejectedPage naming the failed criterion.
PageRecord build_record(const PageLayout& layout, const LayoutParams& params = {});

nlohmann::json to_json(const PageRecord& record);
PageRecord record_from_json(const nlohmann::json& j);
std::string serialize_record(const PageRecord& record);
PageRecord parse_record(std::string_view line);

std::vector<PageRecord> read_corpus(std::istream& in);
std::vector<PageRecord> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const PageRecord> records);

struct BuildSummary {
  std::size_t pages = 0;
  std::size_t accepted = 0;
  std::vector<std::pair<std::string, std::string>> rejected;  // page id, reason
};

/// Builds records for every *.txt annotation file in `dir` (sorted by name)
/// and writes the accepted ones as newline-delimited JSON.
BuildSummary build_dataset(const std::filesystem::path& dir, std::ostream& out,
                           const LayoutParams& params = {});

}  // namespace tabcap::docbank
