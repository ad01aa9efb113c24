#include "tabcap/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tabcap/error.hpp"

namespace tabcap::harness {

using retrieval::Method;

std::string Condition::label() const {
  switch (retrieval.method) {
    case Method::None:
      return "none";
    case Method::Author:
      return "author";
    case Method::TopN:
      return retrieval.name() + "-" + std::string(table::to_string(variant));
  }
  return "none";
}

std::string Condition::title() const {
  switch (retrieval.method) {
    case Method::None:
      return "None";
    case Method::Author:
      return "Author";
    case Method::TopN: {
      static constexpr std::string_view kStructure[] = {"T_r.h", "T_r.o", "T_r.w"};
      return "Top-" + std::to_string(retrieval.n) + " BM25 " +
             std::string(kStructure[static_cast<int>(variant)]);
    }
  }
  return "None";
}

Condition Condition::parse(std::string_view label) {
  Condition c;
  const auto dash = label.find('-');
  c.retrieval = retrieval::RetrievalConfig::parse(label.substr(0, dash));
  if (dash != std::string_view::npos) {
    c.variant = table::parse_variant(label.substr(dash + 1));
    if (c.retrieval.method != Method::TopN)
      throw Error("condition '" + std::string(label) + "' takes no structure suffix");
  } else if (c.retrieval.method == Method::TopN) {
    throw Error("condition '" + std::string(label) + "' needs a structure suffix (-rh, -ro, -rw)");
  }
  return c;
}

std::vector<Condition> canonical_grid() {
  std::vector<Condition> grid;
  grid.push_back(Condition::parse("none"));
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto v : {table::Variant::RowHeader, table::Variant::Others, table::Variant::Whole}) {
      Condition c;
      c.retrieval.method = Method::TopN;
      c.retrieval.n = n;
      c.variant = v;
      grid.push_back(c);
    }
  grid.push_back(Condition::parse("author"));
  return grid;
}

// ---------------------------------------------------------------------------

ResultMatrix::ResultMatrix(std::vector<prompt::Style> styles, std::vector<std::string> conditions)
    : styles_(std::move(styles)), conditions_(std::move(conditions)) {}

void ResultMatrix::set(prompt::Style style, const std::string& condition, metrics::Metric metric,
                       Cell cell) {
  if (std::find(styles_.begin(), styles_.end(), style) == styles_.end())
    throw Error("style not in matrix: " + std::string(prompt::to_string(style)));
  if (std::find(conditions_.begin(), conditions_.end(), condition) == conditions_.end())
    throw Error("condition not in matrix: " + condition);
  cells_[{style, condition, metric}] = std::move(cell);
}

const Cell* ResultMatrix::find(prompt::Style style, const std::string& condition,
                               metrics::Metric metric) const {
  const auto it = cells_.find({style, condition, metric});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<std::string> ResultMatrix::missing_cells() const {
  std::vector<std::string> missing;
  for (auto style : styles_)
    for (const auto& cond : conditions_)
      for (auto metric : metrics::kAllMetrics)
        if (!find(style, cond, metric))
          missing.push_back(std::string(prompt::to_string(style)) + "/" + cond + "/" +
                            std::string(metrics::to_string(metric)));
  return missing;
}

namespace {

metrics::Metric parse_metric(std::string_view name) {
  for (auto m : metrics::kAllMetrics)
    if (metrics::to_string(m) == name) return m;
  throw Error("unknown metric '" + std::string(name) + "'");
}

}  // namespace

nlohmann::json ResultMatrix::to_json() const {
  nlohmann::json styles = nlohmann::json::array();
  for (auto s : styles_) styles.push_back(prompt::to_string(s));
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [key, cell] : cells_) {
    const auto& [style, cond, metric] = key;
    nlohmann::json c = {{"style", prompt::to_string(style)},
                        {"condition", cond},
                        {"metric", metrics::to_string(metric)}};
    c["value"] = cell.value ? nlohmann::json(*cell.value) : nlohmann::json(nullptr);
    if (!cell.error.empty()) c["error"] = cell.error;
    cells.push_back(std::move(c));
  }
  return {{"styles", styles},
          {"conditions", conditions_},
          {"metrics", {"BLEU", "ROUGE-1", "ROUGE-2", "ROUGE-L", "METEOR"}},
          {"cells", cells},
          {"provenance", provenance}};
}

ResultMatrix ResultMatrix::from_json(const nlohmann::json& j) {
  try {
    std::vector<prompt::Style> styles;
    for (const auto& s : j.at("styles")) styles.push_back(prompt::parse_style(s.get<std::string>()));
    ResultMatrix m(std::move(styles), j.at("conditions").get<std::vector<std::string>>());
    for (const auto& c : j.at("cells")) {
      Cell cell;
      if (!c.at("value").is_null()) cell.value = c.at("value").get<double>();
      if (c.contains("error")) cell.error = c.at("error").get<std::string>();
      m.set(prompt::parse_style(c.at("style").get<std::string>()),
            c.at("condition").get<std::string>(), parse_metric(c.at("metric").get<std::string>()),
            std::move(cell));
    }
    m.provenance = j.value("provenance", nlohmann::json::object());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed result matrix: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

nlohmann::json GridConfig::snapshot() const {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions) conds.push_back(c.label());
  nlohmann::json style_names = nlohmann::json::array();
  for (auto s : styles) style_names.push_back(prompt::to_string(s));
  nlohmann::json bm25 = nullptr;
  for (const auto& c : conditions)
    if (c.retrieval.method == Method::TopN) {
      bm25 = {{"k1", c.retrieval.params.k1}, {"b", c.retrieval.params.b}};
      break;
    }
  return {{"conditions", conds},
          {"styles", style_names},
          {"header_mode", header_mode == table::HeaderMode::FirstCell ? "first-cell" : "first-row"},
          {"tabular_for_none_author", tabular_for_untyped_conditions},
          {"strict_caption_filter", strict_caption_filter},
          {"max_new_tokens", max_new_tokens},
          {"budget_sep", budget_separator.value_or(prompt::default_budget(prompt::Style::Separator))},
          {"budget_plain", budget_plain.value_or(prompt::default_budget(prompt::Style::Plain))},
          {"bm25", bm25},
          {"rouge_mode", eval.rouge_mode == metrics::RougeMode::Recall ? "recall" : "f1"},
          {"meteor", {{"alpha", eval.meteor.alpha}, {"beta", eval.meteor.beta}, {"gamma", eval.meteor.gamma}}}};
}

std::uint64_t corpus_hash(std::span<const docbank::PageRecord> records) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& r : records) {
    feed(docbank::serialize_record(r));
    feed("\n");
  }
  return h;
}

std::vector<docbank::PageRecord> admissible_records(std::span<const docbank::PageRecord> corpus,
                                                    bool strict) {
  const std::size_t need = strict ? 3 : 2;
  std::vector<docbank::PageRecord> out;
  for (const auto& r : corpus)
    if (r.caption.size() >= need && !r.table.empty()) out.push_back(r);
  return out;
}

PreparedExample prepare_example(const docbank::PageRecord& record, const Condition& condition,
                                prompt::Style style, const GridConfig& config) {
  const auto split = prompt::split_caption(record.caption);
  const table::Table table(record.table);

  prompt::PromptSpec spec;
  const bool untyped = condition.retrieval.method != Method::TopN;
  if (!untyped || config.tabular_for_untyped_conditions) {
    const auto words = table::linearize(table, condition.variant, config.header_mode);
    spec.tabular_tokens = table::strip_numerals(words);
  }
  spec.relevant_sentences = retrieval::retrieve(condition.retrieval, table, record.sentences, split.first);
  spec.first_caption_sentence = split.first;
  spec.style = style;
  const auto budget = style == prompt::Style::Separator ? config.budget_separator : config.budget_plain;
  spec.max_length = budget.value_or(prompt::default_budget(style));

  return {record.page_id, prompt::truncate(spec), split.rest};
}

namespace {

void set_row(ResultMatrix& matrix, prompt::Style style, const std::string& cond,
             const metrics::PairScores* scores, const std::string& error) {
  for (auto metric : metrics::kAllMetrics) {
    Cell cell;
    if (scores)
      cell.value = scores->get(metric);
    else
      cell.error = error;
    matrix.set(style, cond, metric, std::move(cell));
  }
}

char hex_digit(unsigned v) { return "0123456789abcdef"[v & 0xF]; }

std::string hex64(std::uint64_t v) {
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(static_cast<unsigned>(v));
  return s;
}

}  // namespace

ResultMatrix run_grid(std::span<const docbank::PageRecord> corpus, const gen::GenerationClient& client,
                      const GridConfig& config) {
  if (corpus.empty()) throw Error("empty corpus");
  if (config.conditions.empty() || config.styles.empty()) throw Error("empty grid");
  const auto records = admissible_records(corpus, config.strict_caption_filter);
  if (records.empty()) throw Error("no record has a caption with a generation target");

  std::vector<std::string> labels;
  for (const auto& c : config.conditions) labels.push_back(c.label());
  ResultMatrix matrix(config.styles, labels);
  matrix.provenance = {{"corpus_hash", hex64(corpus_hash(corpus))},
                       {"corpus_records", corpus.size()},
                       {"evaluated_records", records.size()},
                       {"backend_id", client.backend_id()},
                       {"config", config.snapshot()}};

  bool first_batch = true;
  for (auto style : config.styles) {
    for (const auto& condition : config.conditions) {
      const auto label = condition.label();

      std::vector<PreparedExample> examples;
      std::vector<std::string> prep_errors(records.size());
      std::vector<gen::GenRequest> requests;
      std::vector<std::size_t> request_of(records.size(), SIZE_MAX);
      for (std::size_t i = 0; i < records.size(); ++i) {
        try {
          examples.push_back(prepare_example(records[i], condition, style, config));
          request_of[i] = requests.size();
          requests.push_back({style, examples.back().prompt, config.max_new_tokens, gen::Greedy{}});
        } catch (const Error& e) {
          examples.push_back({records[i].page_id, "", ""});
          prep_errors[i] = e.what();
        }
      }

      const auto outcomes = client.generate_batch(requests);
      if (first_batch && !outcomes.empty() &&
          std::all_of(outcomes.begin(), outcomes.end(),
                      [](const gen::GenOutcome& o) { return o.kind == gen::ErrorKind::Retryable; }))
        throw Error("generation backend unreachable: " + outcomes.front().error);
      first_batch = false;

      std::vector<metrics::Pair> pairs;
      std::size_t failures = 0;
      std::string first_error;
      std::ostringstream generations;
      for (std::size_t i = 0; i < records.size(); ++i) {
        nlohmann::json line = {{"record_id", examples[i].record_id},
                               {"prompt", examples[i].prompt},
                               {"reference", examples[i].reference}};
        std::string error = prep_errors[i];
        if (error.empty()) {
          const auto& outcome = outcomes[request_of[i]];
          if (outcome.ok()) {
            line["continuation"] = outcome.response->continuation;
            pairs.push_back({outcome.response->continuation, examples[i].reference});
          } else {
            error = outcome.error;
          }
        }
        if (!error.empty()) {
          line["continuation"] = nullptr;
          line["error"] = error;
          if (failures++ == 0) first_error = error;
        }
        generations << line.dump() << '\n';
      }

      if (config.generations_dir) {
        const auto dir = *config.generations_dir / std::string(prompt::to_string(style)) / label;
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "generations.jsonl") << generations.str();
      }

      if (failures > 0) {
        set_row(matrix, style, label, nullptr,
                std::to_string(failures) + " of " + std::to_string(records.size()) +
                    " generations failed: " + first_error);
      } else {
        const auto report = metrics::evaluate_corpus(pairs, config.eval);
        set_row(matrix, style, label, &report.aggregate, "");
      }
    }
  }
  return matrix;
}

std::string to_csv(const ResultMatrix& matrix) {
  const auto missing = matrix.missing_cells();
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error("incomplete result matrix, missing: " + list);
  }

  std::vector<std::string> titles;
  for (const auto& label : matrix.conditions()) titles.push_back(Condition::parse(label).title());

  std::ostringstream out;
  out << "model,metric";
  for (const auto& t : titles) out << ',' << t;
  out << '\n';
  for (auto style : matrix.styles()) {
    for (auto metric : metrics::kAllMetrics) {
      out << prompt::to_string(style) << ',' << metrics::to_string(metric);
      for (const auto& label : matrix.conditions()) {
        const Cell* cell = matrix.find(style, label, metric);
        if (cell->ok()) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4f", *cell->value);
          out << ',' << buf;
        } else {
          out << ",ERR";
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

void emit_table(const ResultMatrix& matrix, const std::filesystem::path& dir) {
  const auto csv = to_csv(matrix);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "matrix.csv") << csv;
  std::ofstream(dir / "matrix.json") << matrix.to_json().dump(2) << '\n';
}

std::vector<Best> compare_best(const ResultMatrix& matrix) {
  std::vector<Best> out;
  for (auto style : matrix.styles()) {
    for (auto metric : metrics::kAllMetrics) {
      Best best{style, metric, {}, 0.0, false};
      for (const auto& label : matrix.conditions()) {
        const Cell* cell = matrix.find(style, label, metric);
        if (!cell || !cell->ok()) {
          best.partial = true;
          continue;
        }
        if (best.conditions.empty() || *cell->value > best.value) {
          best.value = *cell->value;
          best.conditions = {label};
        } else if (*cell->value == best.value) {
          best.conditions.push_back(label);
        }
      }
      out.push_back(std::move(best));
    }
  }
  return out;
}

}  // namespace tabcap::harness
