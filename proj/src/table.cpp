#include "tabcap/table.hpp"

#include <algorithm>

#include "tabcap/error.hpp"
#include "tabcap/text.hpp"

namespace tabcap::table {

Table::Table(std::vector<std::vector<std::string>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw Error("empty table");
  for (auto& row : rows_) {
    if (row.empty()) throw Error("table row without cells");
    for (auto& cell : row) cell = text::normalize_whitespace(cell);
  }
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::RowHeader:
      return "rh";
    case Variant::Others:
      return "ro";
    case Variant::Whole:
      return "rw";
  }
  return "rw";
}

Variant parse_variant(std::string_view name) {
  if (name == "rh") return Variant::RowHeader;
  if (name == "ro") return Variant::Others;
  if (name == "rw") return Variant::Whole;
  throw Error("unknown table variant '" + std::string(name) + "' (expected rh, ro or rw)");
}

Table reconstruct_table(std::span<const SemanticToken> tokens, const GridParams& params) {
  if (tokens.empty()) throw Error("empty table");
  const auto boxes = boxes_of(tokens);

  std::vector<std::vector<std::string>> rows;
  for (const auto& band : layout::bands(boxes, params.band_overlap)) {
    std::vector<std::string> cells;
    std::string cell;
    int right = 0;
    for (std::size_t idx : band) {
      const auto& box = boxes[idx];
      if (!cell.empty() && box.x0 - right < params.cell_gap) {
        cell += ' ';
        cell += tokens[idx].text;
        right = std::max(right, box.x1);
        continue;
      }
      if (!cell.empty()) cells.push_back(std::move(cell));
      cell = tokens[idx].text;
      right = box.x1;
    }
    if (!cell.empty()) cells.push_back(std::move(cell));
    if (!cells.empty()) rows.push_back(std::move(cells));
  }
  return Table(std::move(rows));
}

namespace {

void append_words(std::vector<std::string>& out, const std::string& cell) {
  for (auto& w : text::split_whitespace(cell)) out.push_back(std::move(w));
}

}  // namespace

std::vector<std::string> linearize(const Table& table, Variant variant, HeaderMode mode) {
  std::vector<std::string> out;
  const auto& rows = table.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const bool header = mode == HeaderMode::FirstCell ? c == 0 : r == 0;
      const bool keep = variant == Variant::Whole || (variant == Variant::RowHeader) == header;
      if (keep) append_words(out, rows[r][c]);
    }
  }
  return out;
}

namespace {

// Consumes one of the joiners that glue numeric fragments together.
bool eat_joiner(std::string_view& s) {
  for (std::string_view j : {"--", "\xC3\x97" /* × */, "\xC2\xB1" /* ± */, "/"}) {
    if (s.starts_with(j)) {
      s.remove_prefix(j.size());
      return true;
    }
  }
  return false;
}

bool eat_sign(std::string_view& s) {
  if (s.starts_with("\xE2\x88\x92")) {  // U+2212 minus
    s.remove_prefix(3);
    return true;
  }
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    s.remove_prefix(1);
    return true;
  }
  return false;
}

std::size_t eat_digits(std::string_view& s) {
  std::size_t n = 0;
  while (n < s.size() && text::is_ascii_digit(s[n])) ++n;
  s.remove_prefix(n);
  return n;
}

// sign? (digits (,ddd)* (.digits)? | .digits) ([eE] sign? digits)? %?
bool eat_number(std::string_view& s) {
  std::string_view t = s;
  eat_sign(t);
  const std::size_t int_digits = eat_digits(t);
  if (int_digits > 0) {
    while (t.size() >= 4 && t[0] == ',' && text::is_ascii_digit(t[1]) &&
           text::is_ascii_digit(t[2]) && text::is_ascii_digit(t[3]) &&
           (t.size() == 4 || !text::is_ascii_digit(t[4])))
      t.remove_prefix(4);
  }
  std::size_t frac_digits = 0;
  if (!t.empty() && t.front() == '.') {
    std::string_view u = t.substr(1);
    frac_digits = eat_digits(u);
    if (frac_digits > 0) t = u;
  }
  if (int_digits == 0 && frac_digits == 0) return false;
  if (!t.empty() && (t.front() == 'e' || t.front() == 'E')) {
    std::string_view u = t.substr(1);
    eat_sign(u);
    if (eat_digits(u) > 0) t = u;
  }
  if (!t.empty() && t.front() == '%') t.remove_prefix(1);
  s = t;
  return true;
}

bool is_numeric_core(std::string_view s) {
  if (!eat_number(s)) return false;
  while (!s.empty()) {
    if (!eat_joiner(s)) return false;
    if (!eat_number(s)) return false;
  }
  return true;
}

}  // namespace

bool is_numeral(std::string_view token) {
  if (token.size() >= 2 && ((token.front() == '(' && token.back() == ')') ||
                            (token.front() == '[' && token.back() == ']')))
    token = token.substr(1, token.size() - 2);
  return is_numeric_core(token);
}

std::vector<std::string> strip_numerals(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens)
    if (!is_numeral(t)) out.push_back(t);
  return out;
}

}  // namespace tabcap::table
