#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabcap/page.hpp"

namespace tabcap::table {

/// A ragged row/column grid of cell texts. Rows are never padded.
class Table {
 public:
  Table() = default;
  /// Normalizes cell whitespace. Throws tabcap::Error when there are no
  /// rows or a row has no cells.
  explicit Table(std::vector<std::vector<std::string>> rows);

  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::string& row_header(std::size_t row) const { return rows_.at(row).front(); }

  bool operator==(const Table&) const = default;

 private:
  std::vector<std::vector<std::string>> rows_;
};

/// Which part of the table feeds the prompt.
enum class Variant {
  RowHeader,  // first cell of every row
  Others,     // every cell except the row headers
  Whole,      // all cells
};

/// How "row header" is read off the grid.
enum class HeaderMode {
  FirstCell,  // first cell of each row
  FirstRow,   // the whole first row
};

std::string_view to_string(Variant variant);  // "rh", "ro", "rw"
Variant parse_variant(std::string_view name);

struct GridParams {
  double band_overlap = 0.5;
  int cell_gap = 15;  // horizontal gaps below this join one cell
};

/// Recovers rows from line bands and cells from horizontal gap clustering.
Table reconstruct_table(std::span<const SemanticToken> tokens, const GridParams& params = {});

/// Flattens the selected cells row-major into a word sequence.
std::vector<std::string> linearize(const Table& table, Variant variant,
                                   HeaderMode mode = HeaderMode::FirstCell);

/// True for numbers such as "8.29", "-30%", "(0.21)", "1,024", "2.5e-3",
/// "10--4", "3/4" and "9.84±0.04".
bool is_numeral(std::string_view token);

/// Drops numeral tokens and keeps everything else in order.
std::vector<std::string> strip_numerals(std::span<const std::string> tokens);

}  // namespace tabcap::table
