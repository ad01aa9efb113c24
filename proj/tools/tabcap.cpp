// tabcap: dataset building, retrieval, prompt assembly, evaluation and the
// full experiment grid from the command line.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tabcap/docbank.hpp"
#include "tabcap/error.hpp"
#include "tabcap/generation.hpp"
#include "tabcap/harness.hpp"
#include "tabcap/metrics.hpp"
#include "tabcap/prompt.hpp"
#include "tabcap/retrieval.hpp"
#include "tabcap/table.hpp"

namespace fs = std::filesystem;
using namespace tabcap;

namespace {

std::vector<metrics::Pair> read_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<metrics::Pair> pairs;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      pairs.push_back({j.at("candidate").get<std::string>(), j.at("reference").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct BackendOptions {
  std::string backend = "stub";
  std::string endpoint;
  int timeout_ms = 30000;
  int retries = 2;
  std::size_t parallelism = 4;
};

void add_backend_options(CLI::App* cmd, BackendOptions& o) {
  cmd->add_option("--backend", o.backend, "Generation backend")->check(CLI::IsMember({"http", "stub"}));
  cmd->add_option("--endpoint", o.endpoint, "Backend URL (default: $TABCAP_ENDPOINT)");
  cmd->add_option("--timeout-ms", o.timeout_ms, "Per-request deadline")->check(CLI::PositiveNumber);
  cmd->add_option("--retries", o.retries, "Retries for transient failures")->check(CLI::NonNegativeNumber);
  cmd->add_option("--parallelism", o.parallelism, "Requests in flight")->check(CLI::PositiveNumber);
}

gen::GenerationClient make_client(const BackendOptions& o) {
  std::shared_ptr<gen::Backend> backend;
  if (o.backend == "stub")
    backend = std::make_shared<gen::StubBackend>();
  else
    backend = std::make_shared<gen::HttpBackend>(o.endpoint.empty() ? gen::endpoint_from_env() : o.endpoint);
  gen::ClientConfig config;
  config.timeout = std::chrono::milliseconds(o.timeout_ms);
  config.retries = o.retries;
  config.parallelism = o.parallelism;
  return gen::GenerationClient(std::move(backend), config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Table caption generation pipeline"};
  app.require_subcommand(1);

  // build-dataset
  std::string input_dir, output_file;
  docbank::LayoutParams layout;
  auto* build = app.add_subcommand("build-dataset", "Filter DocBank pages into a corpus");
  build->add_option("--input", input_dir, "Directory of *.txt annotation files")->required();
  build->add_option("--output", output_file, "Newline-delimited JSON corpus")->required();
  build->add_option("--band-overlap", layout.band_overlap, "Line band overlap fraction")
      ->check(CLI::Range(0.0, 1.0));
  build->add_option("--table-gap", layout.table_gap, "Vertical gap joining table tokens")
      ->check(CLI::NonNegativeNumber);
  build->add_option("--column-gap", layout.column_gap, "Gutter width for two-column detection");
  build->add_option("--cell-gap", layout.cell_gap, "Horizontal gap splitting table cells");

  // retrieve
  std::string corpus_file, method = "top1";
  retrieval::Bm25Params bm25;
  auto* retrieve = app.add_subcommand("retrieve", "Retrieve relevant body sentences per record");
  retrieve->add_option("--corpus", corpus_file, "Corpus JSONL")->required();
  retrieve->add_option("--method", method, "none, top1, top2, top3 or author")->required();
  retrieve->add_option("--k1", bm25.k1, "BM25 k1");
  retrieve->add_option("--b", bm25.b, "BM25 b");

  // assemble
  std::string records_file, variant = "rw", style = "sep";
  std::size_t max_length = 0;
  bool no_tabular = false;
  auto* assemble = app.add_subcommand("assemble", "Build model prompts per record");
  assemble->add_option("--records", records_file, "Corpus JSONL")->required();
  assemble->add_option("--variant", variant, "Table part")->check(CLI::IsMember({"rh", "ro", "rw"}));
  assemble->add_option("--method", method, "none, top1, top2, top3 or author");
  assemble->add_option("--style", style, "Prompt style")->check(CLI::IsMember({"sep", "plain"}));
  assemble->add_option("--max-length", max_length, "Token budget (default 512 sep / 1024 plain)");
  assemble->add_option("--k1", bm25.k1, "BM25 k1");
  assemble->add_option("--b", bm25.b, "BM25 b");
  assemble->add_flag("--no-tabular", no_tabular, "Omit table text for none/author");

  // evaluate
  std::string pairs_file, out_file, rouge_mode = "recall";
  auto* evaluate = app.add_subcommand("evaluate", "Score candidate/reference pairs");
  evaluate->add_option("--pairs", pairs_file, "JSONL of {candidate, reference}")->required();
  evaluate->add_option("--out", out_file, "Report JSON; per-pair CSV goes next to it")->required();
  evaluate->add_option("--rouge-mode", rouge_mode, "ROUGE aggregation")
      ->check(CLI::IsMember({"recall", "f1"}));

  // run-grid
  std::string out_dir, conditions, styles = "sep,plain";
  BackendOptions backend;
  harness::GridConfig grid;
  auto* run = app.add_subcommand("run-grid", "Run the full model x condition grid");
  run->add_option("--corpus", corpus_file, "Corpus JSONL")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--conditions", conditions, "Comma list, e.g. none,top1-rh,author");
  run->add_option("--styles", styles, "Comma list of sep, plain");
  run->add_option("--max-new-tokens", grid.max_new_tokens, "Generation length")->check(CLI::PositiveNumber);
  run->add_option("--rouge-mode", rouge_mode, "ROUGE aggregation")->check(CLI::IsMember({"recall", "f1"}));
  run->add_flag("--strict-captions", grid.strict_caption_filter, "Require more than two caption sentences");
  add_backend_options(run, backend);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      std::ofstream out(output_file);
      if (!out) throw Error("cannot write " + output_file);
      const auto summary = docbank::build_dataset(input_dir, out, layout);
      std::cerr << "pages: " << summary.pages << ", accepted: " << summary.accepted
                << ", rejected: " << summary.rejected.size() << '\n';
      for (const auto& [page, reason] : summary.rejected) std::cerr << "  " << page << ": " << reason << '\n';
      return 0;
    }

    if (*retrieve) {
      auto config = retrieval::RetrievalConfig::parse(method);
      config.params = bm25;
      config.validate();
      for (const auto& record : docbank::read_corpus(fs::path(corpus_file))) {
        nlohmann::json line = {{"record_id", record.page_id}};
        if (record.table.empty() || record.caption.empty()) {
          line["sentences"] = nlohmann::json::array();
        } else {
          line["sentences"] =
              retrieval::retrieve(config, table::Table(record.table), record.sentences, record.caption.front());
        }
        std::cout << line.dump() << '\n';
      }
      return 0;
    }

    if (*assemble) {
      harness::GridConfig config;
      auto condition = harness::Condition::parse(method == "none" || method == "author" ? method
                                                                                       : method + "-" + variant);
      condition.retrieval.params = bm25;
      condition.retrieval.validate();
      if (method == "none" || method == "author") condition.variant = table::parse_variant(variant);
      config.tabular_for_untyped_conditions = !no_tabular;
      const auto prompt_style = prompt::parse_style(style);
      if (max_length > 0) {
        config.budget_separator = max_length;
        config.budget_plain = max_length;
      }
      for (const auto& record : docbank::read_corpus(fs::path(records_file))) {
        if (record.caption.size() < 2) continue;
        const auto ex = harness::prepare_example(record, condition, prompt_style, config);
        std::cout << nlohmann::json{{"record_id", ex.record_id}, {"prompt", ex.prompt}, {"target", ex.reference}}.dump()
                  << '\n';
      }
      return 0;
    }

    if (*evaluate) {
      metrics::EvalOptions options;
      options.rouge_mode = rouge_mode == "f1" ? metrics::RougeMode::F1 : metrics::RougeMode::Recall;
      const auto report = metrics::evaluate_corpus(read_pairs(pairs_file), options);
      fs::path out_path(out_file);
      if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
      std::ofstream(out_path) << metrics::to_json(report).dump(2) << '\n';
      fs::path csv_path = out_path;
      csv_path.replace_extension(".csv");
      std::ofstream(csv_path) << metrics::pairs_csv(report);
      return 0;
    }

    if (*run) {
      if (!conditions.empty()) {
        grid.conditions.clear();
        for (const auto& label : split_list(conditions)) grid.conditions.push_back(harness::Condition::parse(label));
      }
      grid.styles.clear();
      for (const auto& s : split_list(styles)) grid.styles.push_back(prompt::parse_style(s));
      grid.eval.rouge_mode = rouge_mode == "f1" ? metrics::RougeMode::F1 : metrics::RougeMode::Recall;
      grid.generations_dir = fs::path(out_dir);

      const auto corpus = docbank::read_corpus(fs::path(corpus_file));
      const auto client = make_client(backend);
      const auto matrix = harness::run_grid(corpus, client, grid);
      harness::emit_table(matrix, out_dir);
      for (const auto& best : harness::compare_best(matrix)) {
        std::cerr << prompt::to_string(best.style) << ' ' << metrics::to_string(best.metric) << ": best ";
        for (const auto& c : best.conditions) std::cerr << c << ' ';
        std::cerr << (best.partial ? "(partial)" : "") << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "tabcap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
