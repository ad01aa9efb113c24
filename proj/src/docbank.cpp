#include "tabcap/docbank.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "tabcap/error.hpp"
#include "tabcap/text.hpp"

namespace tabcap::docbank {

namespace {

constexpr std::size_t kFieldCount = 10;

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

int parse_int(std::string_view field, std::size_t line_number, std::string_view name) {
  int value = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last)
    throw ParseError(line_number, "field " + std::string(name) + " is not an integer: '" +
                                      std::string(field) + "'");
  return value;
}

void check_range(int value, int lo, int hi, std::size_t line_number, std::string_view name) {
  if (value < lo || value > hi)
    throw RangeError(line_number, "field " + std::string(name) + " = " + std::to_string(value) +
                                      " outside " + std::to_string(lo) + ".." +
                                      std::to_string(hi));
}

std::vector<SemanticToken> with_label(std::span<const SemanticToken> tokens, Label label) {
  std::vector<SemanticToken> out;
  for (const auto& t : tokens)
    if (t.label == label) out.push_back(t);
  return out;
}

std::vector<std::string> words_of(std::span<const SemanticToken> tokens) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto& t : tokens) words.push_back(t.text);
  return words;
}

bool is_closing_punct(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '?' || c == '!' || c == ')' ||
           c == ']' || c == '%';
  });
}

// Tokens arrive with punctuation split off ("works", "."), so rejoin them
// the way the text was typeset.
std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (const auto& raw : words) {
    const auto word = text::normalize_whitespace(raw);
    if (word.empty()) continue;
    if (out.empty()) {
      out = word;
    } else if (is_closing_punct(word) || out.back() == '(' || out.back() == '[') {
      out += word;
    } else {
      out += ' ';
      out += word;
    }
  }
  return out;
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

const std::array<std::string_view, 21> kAbbreviations = {
    "fig", "figs", "eq", "eqs", "etc", "vs",   "dr",   "mr",     "mrs", "ms", "prof",
    "e.g", "i.e",  "cf", "sec", "ref", "refs", "tab", "resp", "approx", "ch",
};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_roman(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c == 'I' || c == 'V' || c == 'X' || c == 'L' || c == 'C' || c == 'D' || c == 'M';
  });
}

bool is_number_label(std::string_view s) {
  return is_roman(s) ||
         (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return text::is_ascii_digit(c); }));
}

// "Table 6" or "Fig. 2" opening a caption is a label, not a sentence.
bool is_caption_label(std::string_view sentence_so_far) {
  const auto words = text::split_whitespace(sentence_so_far);
  if (words.size() != 2 || !is_number_label(words[1])) return false;
  const auto head = ascii_lower(words[0]);
  return head == "table" || head == "figure" || head == "fig." || head == "fig";
}

bool period_is_guarded(std::string_view s, std::size_t period, std::size_t sentence_start) {
  std::size_t ws = s.rfind(' ', period == 0 ? 0 : period - 1);
  ws = (ws == std::string_view::npos || ws < sentence_start) ? sentence_start : ws + 1;
  std::string_view word = s.substr(ws, period - ws);
  while (!word.empty() && (word.front() == '(' || word.front() == '[' || word.front() == '"'))
    word.remove_prefix(1);

  if (word.size() == 1 && text::is_ascii_upper(word[0])) return true;
  const auto lowered = ascii_lower(word);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lowered) != kAbbreviations.end())
    return true;
  if (lowered == "al" && ws >= 4 && ascii_lower(s.substr(ws - 3, 2)) == "et") return true;
  return is_caption_label(s.substr(sentence_start, period - sentence_start));
}

}  // namespace

SemanticToken parse_token_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split_tabs(line);
  if (fields.size() != kFieldCount)
    throw ParseError(line_number, "expected " + std::to_string(kFieldCount) + " fields, got " +
                                      std::to_string(fields.size()));

  SemanticToken token;
  token.text = std::string(fields[0]);
  static constexpr std::array<std::string_view, 4> kCoord = {"x0", "y0", "x1", "y1"};
  std::array<int, 4> coords{};
  for (std::size_t i = 0; i < 4; ++i) coords[i] = parse_int(fields[1 + i], line_number, kCoord[i]);
  static constexpr std::array<std::string_view, 3> kColor = {"r", "g", "b"};
  std::array<int, 3> rgb{};
  for (std::size_t i = 0; i < 3; ++i) rgb[i] = parse_int(fields[5 + i], line_number, kColor[i]);

  for (std::size_t i = 0; i < 4; ++i) check_range(coords[i], 0, 1000, line_number, kCoord[i]);
  for (std::size_t i = 0; i < 3; ++i) check_range(rgb[i], 0, 255, line_number, kColor[i]);
  if (coords[0] > coords[2] || coords[1] > coords[3])
    throw RangeError(line_number, "inverted bounding box");

  token.bbox = {coords[0], coords[1], coords[2], coords[3]};
  token.color = {rgb[0], rgb[1], rgb[2]};
  token.font = std::string(fields[8]);
  token.label = label_from_string(fields[9]);
  return token;
}

PageLayout parse_page(std::string page_id, std::span<const std::string> lines,
                      const LayoutParams& params) {
  std::vector<SemanticToken> tokens;
  tokens.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::normalize_whitespace(lines[i]).empty()) continue;
    tokens.push_back(parse_token_line(lines[i], i + 1));
  }
  return {std::move(page_id), reading_order(std::move(tokens), params.band_overlap)};
}

PageLayout parse_page(std::string page_id, std::istream& in, const LayoutParams& params) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return parse_page(std::move(page_id), lines, params);
}

PageLayout read_page_file(const std::filesystem::path& path, const LayoutParams& params) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_page(path.stem().string(), in, params);
}

int detect_columns(const PageLayout& layout, const LayoutParams& params) {
  std::vector<double> mids;
  for (const auto& t : layout.tokens)
    if (t.label == Label::Paragraph) mids.push_back(t.bbox.mid_x());
  if (mids.empty()) throw IndeterminateError("no paragraph tokens on page " + layout.page_id);

  std::sort(mids.begin(), mids.end());
  const double n = static_cast<double>(mids.size());
  const double min_side = params.column_mass * n;
  for (std::size_t i = 1; i < mids.size(); ++i) {
    if (mids[i] - mids[i - 1] < params.column_gap) continue;
    const double left = static_cast<double>(i);
    if (left >= min_side && n - left >= min_side) return 2;
  }
  return 1;
}

std::size_t count_tables(const PageLayout& layout, const LayoutParams& params) {
  const auto tables = with_label(layout.tokens, Label::Table);
  const auto boxes = boxes_of(tables);
  return layout::vertical_clusters(boxes, params.table_gap).size();
}

std::vector<std::string> segment_sentences(std::span<const std::string> words) {
  const std::string s = join_words(words);
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto sentence = text::normalize_whitespace(std::string_view(s).substr(start, end - start));
    if (!sentence.empty()) out.push_back(std::move(sentence));
    start = end;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_terminator(s[i])) continue;
    std::size_t j = i;
    while (j + 1 < s.size() && (is_terminator(s[j + 1]) || is_closer(s[j + 1]))) ++j;
    const bool at_end = j + 1 == s.size();
    const bool before_capital =
        j + 2 < s.size() && s[j + 1] == ' ' && text::is_ascii_upper(s[j + 2]);
    if (!at_end && !before_capital) {
      i = j;
      continue;
    }
    if (!at_end && s[i] == '.' && period_is_guarded(s, i, start)) {
      i = j;
      continue;
    }
    emit(j + 1);
    i = j;
  }
  emit(s.size());
  return out;
}

std::vector<std::string> segment_sentences(std::span<const SemanticToken> tokens) {
  const auto words = words_of(tokens);
  return segment_sentences(std::span<const std::string>(words));
}

bool is_complete_sentence(std::string_view sentence) {
  while (!sentence.empty() && (is_closer(sentence.back()) || sentence.back() == ' '))
    sentence.remove_suffix(1);
  return !sentence.empty() && is_terminator(sentence.back());
}

std::vector<std::string> body_sentences(const PageLayout& layout) {
  const auto paragraph = with_label(layout.tokens, Label::Paragraph);
  std::vector<std::string> out;
  for (auto& s : segment_sentences(std::span<const SemanticToken>(paragraph)))
    if (is_complete_sentence(s)) out.push_back(std::move(s));
  return out;
}

std::string_view describe(Criterion criterion) {
  switch (criterion) {
    case Criterion::OneColumn:
      return "one-column format";
    case Criterion::SingleTable:
      return "only one table in the page";
    case Criterion::ThreeSentences:
      return "three or more complete sentences";
  }
  return "";
}

FilterVerdict check_filter(const PageLayout& layout, const LayoutParams& params) {
  FilterVerdict v;
  try {
    v.columns = static_cast<std::size_t>(detect_columns(layout, params));
  } catch (const IndeterminateError&) {
    v.columns = 0;
  }
  v.tables = count_tables(layout, params);
  v.sentences = body_sentences(layout).size();

  if (v.columns != 1)
    v.failed = Criterion::OneColumn;
  else if (v.tables != 1)
    v.failed = Criterion::SingleTable;
  else if (v.sentences < 3)
    v.failed = Criterion::ThreeSentences;
  v.accepted = !v.failed.has_value();
  return v;
}

bool apply_filter(const PageLayout& layout, const LayoutParams& params) {
  return check_filter(layout, params).accepted;
}

PageRecord build_record(const PageLayout& layout, const LayoutParams& params) {
  const auto verdict = check_filter(layout, params);
  if (!verdict.accepted) {
    switch (*verdict.failed) {
      case Criterion::OneColumn:
        throw RejectedPage(verdict.columns == 0 ? "no body text" : "two-column layout");
      case Criterion::SingleTable:
        throw RejectedPage(verdict.tables == 0 ? "no table" : "multiple tables");
      case Criterion::ThreeSentences:
        throw RejectedPage("fewer than three sentences");
    }
  }

  PageRecord record;
  record.page_id = layout.page_id;
  record.sentences = body_sentences(layout);

  const auto table_tokens = with_label(layout.tokens, Label::Table);
  const auto table_boxes = boxes_of(table_tokens);
  const BBox table_box = layout::enclosing(table_boxes);

  const auto caption_tokens = with_label(layout.tokens, Label::Caption);
  const auto caption_boxes = boxes_of(caption_tokens);
  const auto groups = layout::vertical_clusters(caption_boxes, params.table_gap);
  int best_distance = std::numeric_limits<int>::max();
  const std::vector<std::size_t>* best = nullptr;
  for (const auto& group : groups) {
    std::vector<BBox> member_boxes;
    for (std::size_t idx : group) member_boxes.push_back(caption_boxes[idx]);
    const int d = layout::vertical_distance(layout::enclosing(member_boxes), table_box);
    if (d < best_distance) {
      best_distance = d;
      best = &group;
    }
  }
  if (best) {
    std::vector<SemanticToken> caption;
    for (std::size_t idx : *best) caption.push_back(caption_tokens[idx]);
    caption = reading_order(std::move(caption), params.band_overlap);
    record.caption = segment_sentences(std::span<const SemanticToken>(caption));
  }

  const auto grid = table::reconstruct_table(table_tokens, {params.band_overlap, params.cell_gap});
  record.table = grid.rows();
  return record;
}

nlohmann::json to_json(const PageRecord& record) {
  return {{"page_id", record.page_id},
          {"sentences", record.sentences},
          {"caption", record.caption},
          {"table", record.table}};
}

PageRecord record_from_json(const nlohmann::json& j) {
  try {
    PageRecord r;
    r.page_id = j.at("page_id").get<std::string>();
    r.sentences = j.at("sentences").get<std::vector<std::string>>();
    r.caption = j.at("caption").get<std::vector<std::string>>();
    r.table = j.at("table").get<std::vector<std::vector<std::string>>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed page record: ") + e.what());
  }
}

std::string serialize_record(const PageRecord& record) { return to_json(record).dump(); }

PageRecord parse_record(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed page record: ") + e.what());
  }
  return record_from_json(j);
}

std::vector<PageRecord> read_corpus(std::istream& in) {
  std::vector<PageRecord> out;
  for (std::string line; std::getline(in, line);) {
    if (text::normalize_whitespace(line).empty()) continue;
    out.push_back(parse_record(line));
  }
  return out;
}

std::vector<PageRecord> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const PageRecord> records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

BuildSummary build_dataset(const std::filesystem::path& dir, std::ostream& out,
                           const LayoutParams& params) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  BuildSummary summary;
  for (const auto& file : files) {
    ++summary.pages;
    try {
      const auto record = build_record(read_page_file(file, params), params);
      out << serialize_record(record) << '\n';
      ++summary.accepted;
    } catch (const RejectedPage& e) {
      summary.rejected.emplace_back(file.stem().string(), e.criterion());
    } catch (const ParseError& e) {
      summary.rejected.emplace_back(file.stem().string(), e.what());
    }
  }
  return summary;
}

}  // namespace tabcap::docbank
