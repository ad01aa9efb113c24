// Python bindings for the tabcap core. Structured results cross the
// boundary as JSON text; the tabcap package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "tabcap/docbank.hpp"
#include "tabcap/error.hpp"
#include "tabcap/generation.hpp"
#include "tabcap/harness.hpp"
#include "tabcap/metrics.hpp"
#include "tabcap/prompt.hpp"
#include "tabcap/retrieval.hpp"
#include "tabcap/table.hpp"
#include "tabcap/text.hpp"

namespace py = pybind11;
using namespace tabcap;

namespace {

metrics::RougeMode rouge_mode(const std::string& name) {
  if (name == "recall") return metrics::RougeMode::Recall;
  if (name == "f1") return metrics::RougeMode::F1;
  throw Error("unknown rouge mode '" + name + "'");
}

std::vector<docbank::PageRecord> records_from(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return docbank::read_corpus(in);
}

py::dict verdict_dict(const docbank::FilterVerdict& v) {
  py::dict d;
  d["accepted"] = v.accepted;
  d["failed"] = v.failed ? py::cast(std::string(docbank::describe(*v.failed))) : py::none();
  d["columns"] = v.columns;
  d["tables"] = v.tables;
  d["sentences"] = v.sentences;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tabcap, m) {
  m.doc() = "Table caption generation pipeline: corpus building, retrieval, prompts, metrics and the grid";

  py::register_exception<Error>(m, "TabcapError");

  m.def("tokenize", &text::tokenize, py::arg("text"));

  // Dataset building.
  m.def(
      "check_filter",
      [](const std::string& page_id, const std::vector<std::string>& lines) {
        return verdict_dict(docbank::check_filter(docbank::parse_page(page_id, lines)));
      },
      py::arg("page_id"), py::arg("lines"));
  m.def(
      "build_record",
      [](const std::string& page_id, const std::vector<std::string>& lines) {
        return docbank::serialize_record(docbank::build_record(docbank::parse_page(page_id, lines)));
      },
      py::arg("page_id"), py::arg("lines"), "Returns the record as a JSON line; raises TabcapError on rejection.");
  m.def(
      "segment_sentences",
      [](const std::vector<std::string>& words) { return docbank::segment_sentences(words); }, py::arg("words"));

  // Tables.
  m.def(
      "linearize",
      [](const std::vector<std::vector<std::string>>& rows, const std::string& variant) {
        return table::linearize(table::Table(rows), table::parse_variant(variant));
      },
      py::arg("rows"), py::arg("variant"));
  m.def("is_numeral", &table::is_numeral, py::arg("token"));
  m.def(
      "strip_numerals", [](const std::vector<std::string>& tokens) { return table::strip_numerals(tokens); },
      py::arg("tokens"));

  // Retrieval.
  m.def(
      "top_n",
      [](const std::vector<std::string>& query, std::size_t n, const std::vector<std::string>& sentences, double k1,
         double b) {
        retrieval::Bm25Params params{k1, b};
        params.validate();
        std::vector<std::tuple<std::size_t, double, std::string>> out;
        for (auto& s : retrieval::top_n(query, n, retrieval::build_index(sentences), params))
          out.emplace_back(s.position, s.score, std::move(s.text));
        return out;
      },
      py::arg("query"), py::arg("n"), py::arg("sentences"), py::arg("k1") = 1.2, py::arg("b") = 0.75);
  m.def(
      "author_match",
      [](const std::string& caption_first, const std::vector<std::string>& sentences) {
        return retrieval::author_match(caption_first, sentences);
      },
      py::arg("caption_first_sentence"), py::arg("sentences"));

  // Prompts.
  m.def(
      "assemble",
      [](const std::vector<std::string>& tabular, const std::vector<std::string>& sentences, const std::string& first,
         const std::string& style, std::size_t max_length) {
        prompt::PromptSpec spec{tabular, sentences, first, prompt::parse_style(style), max_length};
        if (spec.max_length == 0) spec.max_length = prompt::default_budget(spec.style);
        return prompt::truncate(spec);
      },
      py::arg("tabular"), py::arg("sentences"), py::arg("first_caption_sentence"), py::arg("style") = "sep",
      py::arg("max_length") = 0, "Assembles and truncates; max_length 0 picks the style's default budget.");

  // Metrics.
  m.def(
      "bleu", [](const std::string& c, const std::string& r) { return metrics::bleu(c, r); }, py::arg("candidate"),
      py::arg("reference"));
  m.def(
      "rouge_n",
      [](const std::string& c, const std::string& r, int n, const std::string& mode) {
        return metrics::rouge_n(c, r, n, rouge_mode(mode));
      },
      py::arg("candidate"), py::arg("reference"), py::arg("n"), py::arg("mode") = "recall");
  m.def(
      "rouge_l",
      [](const std::string& c, const std::string& r, const std::string& mode) {
        return metrics::rouge_l(c, r, rouge_mode(mode));
      },
      py::arg("candidate"), py::arg("reference"), py::arg("mode") = "recall");
  m.def(
      "meteor", [](const std::string& c, const std::string& r) { return metrics::meteor(c, r); },
      py::arg("candidate"), py::arg("reference"));
  m.def("porter_stem", &metrics::porter_stem, py::arg("word"));
  m.def(
      "evaluate",
      [](const std::vector<std::pair<std::string, std::string>>& pairs, const std::string& mode) {
        std::vector<metrics::Pair> ps;
        for (const auto& [c, r] : pairs) ps.push_back({c, r});
        metrics::EvalOptions options;
        options.rouge_mode = rouge_mode(mode);
        return metrics::to_json(metrics::evaluate_corpus(ps, options)).dump();
      },
      py::arg("pairs"), py::arg("rouge_mode") = "recall");

  // Grid.
  m.def(
      "run_grid",
      [](const std::string& corpus_jsonl, const std::vector<std::string>& conditions,
         const std::vector<std::string>& styles, const std::string& backend, const std::string& endpoint) {
        const auto corpus = records_from(corpus_jsonl);
        harness::GridConfig config;
        if (!conditions.empty()) {
          config.conditions.clear();
          for (const auto& c : conditions) config.conditions.push_back(harness::Condition::parse(c));
        }
        if (!styles.empty()) {
          config.styles.clear();
          for (const auto& s : styles) config.styles.push_back(prompt::parse_style(s));
        }
        std::shared_ptr<gen::Backend> impl;
        if (backend == "stub")
          impl = std::make_shared<gen::StubBackend>();
        else if (backend == "http")
          impl = std::make_shared<gen::HttpBackend>(endpoint.empty() ? gen::endpoint_from_env() : endpoint);
        else
          throw Error("unknown backend '" + backend + "'");

        py::gil_scoped_release release;
        const auto matrix = harness::run_grid(corpus, gen::GenerationClient(impl), config);
        return std::make_pair(matrix.to_json().dump(), harness::to_csv(matrix));
      },
      py::arg("corpus_jsonl"), py::arg("conditions") = std::vector<std::string>{},
      py::arg("styles") = std::vector<std::string>{}, py::arg("backend") = "stub", py::arg("endpoint") = "");
}
