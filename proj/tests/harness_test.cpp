#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures/synthetic.hpp"
#include "tabcap/error.hpp"
#include "tabcap/harness.hpp"

using namespace tabcap;
using namespace tabcap::harness;
using namespace std::chrono_literals;
using prompt::Style;

namespace {

GridConfig small_config(std::vector<std::string> labels, std::vector<Style> styles) {
  GridConfig config;
  config.conditions.clear();
  for (const auto& l : labels) config.conditions.push_back(Condition::parse(l));
  config.styles = std::move(styles);
  return config;
}

gen::GenerationClient stub_client() { return gen::GenerationClient(std::make_shared<gen::StubBackend>()); }

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ResultMatrix filled(const std::vector<std::string>& labels, double value) {
  ResultMatrix m({Style::Separator}, labels);
  for (const auto& l : labels)
    for (auto metric : metrics::kAllMetrics) m.set(Style::Separator, l, metric, Cell{value, ""});
  return m;
}

}  // namespace

TEST(Conditions, CanonicalGrid) {
  const auto grid = canonical_grid();
  std::vector<std::string> labels, titles;
  for (const auto& c : grid) {
    labels.push_back(c.label());
    titles.push_back(c.title());
    EXPECT_EQ(Condition::parse(c.label()).label(), c.label());
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"none", "top1-rh", "top1-ro", "top1-rw", "top2-rh", "top2-ro",
                                              "top2-rw", "top3-rh", "top3-ro", "top3-rw", "author"}));
  EXPECT_EQ(titles.front(), "None");
  EXPECT_EQ(titles[1], "Top-1 BM25 T_r.h");
  EXPECT_EQ(titles[9], "Top-3 BM25 T_r.w");
  EXPECT_EQ(titles.back(), "Author");
  EXPECT_THROW(Condition::parse("top1"), Error);
  EXPECT_THROW(Condition::parse("top4-xx"), Error);
}

TEST(RunGrid, FullGridIsCompleteAndDeterministic) {
  const auto corpus = fixtures::synthetic_corpus(10);
  const auto client = stub_client();
  const auto a = run_grid(corpus, client);
  const auto b = run_grid(corpus, client);
  EXPECT_EQ(a.cell_count(), 110u);
  EXPECT_TRUE(a.complete());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_EQ(a.provenance["backend_id"], "stub-reverse-20");
  EXPECT_EQ(a.provenance["corpus_hash"].get<std::string>().size(), 16u);
}

TEST(RunGrid, RestrictedGrid) {
  const auto corpus = fixtures::synthetic_corpus(6);
  const auto m = run_grid(corpus, stub_client(), small_config({"none"}, {Style::Separator}));
  EXPECT_EQ(m.cell_count(), 5u);
  EXPECT_TRUE(m.complete());
}

TEST(RunGrid, EmptyCorpusAndUnreachableBackend) {
  EXPECT_THROW(run_grid({}, stub_client()), Error);
  const auto corpus = fixtures::synthetic_corpus(3);
  gen::GenerationClient dead(std::make_shared<gen::HttpBackend>("http://127.0.0.1:1"),
                             gen::ClientConfig{300ms, 1, 1ms, 2});
  try {
    run_grid(corpus, dead, small_config({"none", "author"}, {Style::Separator}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos);
  }
}

TEST(RunGrid, FailedGenerationsBecomeErrorCells) {
  const auto corpus = fixtures::synthetic_corpus(4);
  auto stub = std::make_shared<gen::StubBackend>(gen::StubBackend::Options{
      0ms, [](const gen::GenRequest& r) { return r.style == Style::Plain; }});
  gen::GenerationClient client(stub, gen::ClientConfig{1000ms, 0, 1ms, 2});
  const auto m = run_grid(corpus, client, small_config({"none", "top1-rw"}, {Style::Separator, Style::Plain}));
  EXPECT_TRUE(m.complete());
  EXPECT_TRUE(m.find(Style::Separator, "none", metrics::Metric::Bleu)->ok());
  const Cell* bad = m.find(Style::Plain, "top1-rw", metrics::Metric::Meteor);
  ASSERT_NE(bad, nullptr);
  EXPECT_FALSE(bad->ok());
  const auto csv = lines_of(to_csv(m));
  EXPECT_EQ(csv[6], "plain,BLEU,ERR,ERR");
}

TEST(RunGrid, WritesGenerations) {
  const auto dir = std::filesystem::temp_directory_path() / "tabcap_harness_gen";
  std::filesystem::remove_all(dir);
  auto config = small_config({"top2-ro"}, {Style::Plain});
  config.generations_dir = dir;
  const auto corpus = fixtures::synthetic_corpus(5);
  run_grid(corpus, stub_client(), config);
  std::ifstream in(dir / "plain" / "top2-ro" / "generations.jsonl");
  std::size_t n = 0;
  for (std::string line; std::getline(in, line); ++n) {
    const auto j = nlohmann::json::parse(line);
    const auto ex = prepare_example(corpus[n], config.conditions[0], Style::Plain, config);
    EXPECT_EQ(j["record_id"], ex.record_id);
    EXPECT_EQ(j["prompt"], ex.prompt);
    EXPECT_EQ(j["reference"], ex.reference);
    EXPECT_EQ(j["continuation"], gen::StubBackend::continuation_for(ex.prompt, config.max_new_tokens));
  }
  EXPECT_EQ(n, 5u);
  std::filesystem::remove_all(dir);
}

TEST(PrepareExample, MatchesStagedOperations) {
  const auto record = fixtures::synthetic_corpus(1)[0];
  const GridConfig config;
  for (const auto& condition : canonical_grid()) {
    for (auto style : {Style::Separator, Style::Plain}) {
      const auto split = prompt::split_caption(record.caption);
      const table::Table table(record.table);
      prompt::PromptSpec spec;
      spec.tabular_tokens = table::strip_numerals(table::linearize(table, condition.variant));
      spec.relevant_sentences = retrieval::retrieve(condition.retrieval, table, record.sentences, split.first);
      spec.first_caption_sentence = split.first;
      spec.style = style;
      spec.max_length = prompt::default_budget(style);

      const auto ex = prepare_example(record, condition, style, config);
      EXPECT_EQ(ex.prompt, prompt::truncate(spec)) << condition.label();
      EXPECT_EQ(ex.reference, split.rest);
    }
  }
}

TEST(PrepareExample, UntypedConditionsWithoutTable) {
  docbank::PageRecord r{"p", {"Body one.", "Results in Table 2 here."}, {"Table 2. Gains.", "They are large."},
                        {{"model", "9.1"}}};
  GridConfig config;
  EXPECT_EQ(prepare_example(r, Condition::parse("none"), Style::Separator, config).prompt,
            "model </s> Table 2. Gains.");
  config.tabular_for_untyped_conditions = false;
  EXPECT_EQ(prepare_example(r, Condition::parse("none"), Style::Separator, config).prompt, "</s> Table 2. Gains.");
  EXPECT_EQ(prepare_example(r, Condition::parse("author"), Style::Plain, config).prompt,
            "Results in Table 2 here. Table 2. Gains.");
}

TEST(Admissible, CaptionFilter) {
  std::vector<docbank::PageRecord> corpus = {{"a", {}, {"One."}, {{"x"}}},
                                             {"b", {}, {"One.", "Two."}, {{"x"}}},
                                             {"c", {}, {"One.", "Two.", "Three."}, {{"x"}}}};
  EXPECT_EQ(admissible_records(corpus, false).size(), 2u);
  EXPECT_EQ(admissible_records(corpus, true).size(), 1u);
}

TEST(Emit, CsvLayout) {
  const auto m = run_grid(fixtures::synthetic_corpus(4), stub_client());
  const auto lines = lines_of(to_csv(m));
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0],
            "model,metric,None,Top-1 BM25 T_r.h,Top-1 BM25 T_r.o,Top-1 BM25 T_r.w,Top-2 BM25 T_r.h,"
            "Top-2 BM25 T_r.o,Top-2 BM25 T_r.w,Top-3 BM25 T_r.h,Top-3 BM25 T_r.o,Top-3 BM25 T_r.w,Author");
  EXPECT_EQ(lines[1].substr(0, 9), "sep,BLEU,");
  EXPECT_EQ(lines[10].substr(0, 13), "plain,METEOR,");
  for (std::size_t i = 1; i < lines.size(); ++i)
    EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), ','), 12);
}

TEST(Emit, IncompleteMatrixListsMissingCells) {
  ResultMatrix m({Style::Separator}, {"none"});
  m.set(Style::Separator, "none", metrics::Metric::Bleu, Cell{1.0, ""});
  try {
    to_csv(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sep/none/METEOR"), std::string::npos);
  }
}

TEST(Emit, JsonRoundTripAndFiles) {
  auto m = run_grid(fixtures::synthetic_corpus(3), stub_client(), small_config({"none", "author"}, {Style::Plain}));
  m.set(Style::Plain, "author", metrics::Metric::Rouge2, Cell{std::nullopt, "boom"});
  EXPECT_EQ(ResultMatrix::from_json(m.to_json()), m);

  const auto dir = std::filesystem::temp_directory_path() / "tabcap_emit";
  std::filesystem::remove_all(dir);
  emit_table(m, dir);
  std::ifstream json_in(dir / "matrix.json");
  EXPECT_EQ(ResultMatrix::from_json(nlohmann::json::parse(json_in)), m);
  EXPECT_TRUE(std::filesystem::exists(dir / "matrix.csv"));
  std::filesystem::remove_all(dir);
}

TEST(CompareBest, Cases) {
  auto m = filled({"none", "top1-rh", "author"}, 1.0);
  for (const auto& b : compare_best(m)) {
    EXPECT_EQ(b.conditions.size(), 3u);
    EXPECT_FALSE(b.partial);
  }
  m.set(Style::Separator, "none", metrics::Metric::Bleu, Cell{8.29, ""});
  m.set(Style::Separator, "author", metrics::Metric::Meteor, Cell{std::nullopt, "failed"});
  for (const auto& b : compare_best(m)) {
    if (b.metric == metrics::Metric::Bleu) {
      EXPECT_EQ(b.conditions, (std::vector<std::string>{"none"}));
      EXPECT_DOUBLE_EQ(b.value, 8.29);
    }
    if (b.metric == metrics::Metric::Meteor) {
      EXPECT_TRUE(b.partial);
      EXPECT_EQ(b.conditions.size(), 2u);
    }
  }
}

TEST(CorpusHash, OrderSensitive) {
  auto corpus = fixtures::synthetic_corpus(3);
  const auto h = corpus_hash(corpus);
  EXPECT_EQ(h, corpus_hash(corpus));
  std::swap(corpus[0], corpus[1]);
  EXPECT_NE(h, corpus_hash(corpus));
}
