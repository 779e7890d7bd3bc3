#include <doctest.h>

#include "nmfcheck/corpus.hpp"
#include "synthetic_corpus.hpp"

using namespace nmfcheck;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> w) {
  return {w.begin(), w.end()};
}

}  // namespace

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
  CHECK(tokenize("Troops, troops -- IRAQ!") == words({"troops", "troops", "iraq"}));
  CHECK(tokenize("a1b2 c_d") == words({"a1b2", "c", "d"}));
  CHECK(tokenize("  ").empty());
}

TEST_CASE("counting against a vocabulary") {
  const std::vector<DocumentRecord> docs{{"troops troops iraq", "2004", std::nullopt}};
  const auto c = build_grouped_corpus(docs, words({"troops", "iraq", "baghdad"}), false);
  REQUIRE(c.groups.size() == 1);
  CHECK(c.groups[0] == CountMatrix(3, 1, {2, 1, 0}));
  CHECK(c.combined == c.groups[0]);
}

TEST_CASE("date aggregation merges records sharing group and date") {
  const std::vector<DocumentRecord> docs{{"iraq troops", "2004", "d1"},
                                         {"iraq", "2004", "d1"},
                                         {"baghdad", "2004", "d2"},
                                         {"troops", "2004", std::nullopt}};
  const auto vocab = words({"troops", "iraq", "baghdad"});
  const auto merged = build_grouped_corpus(docs, vocab, true);
  CHECK(merged.groups[0] == CountMatrix(3, 3, {1, 0, 1, 2, 0, 0, 0, 1, 0}));
  const auto separate = build_grouped_corpus(docs, vocab, false);
  CHECK(separate.groups[0].cols() == 4);
}

TEST_CASE("groups keep first-appearance order; offsets recover each group") {
  const std::vector<DocumentRecord> docs{{"a b", "2006", std::nullopt},
                                         {"b", "2004", std::nullopt},
                                         {"a a", "2006", std::nullopt},
                                         {"c", "2005", std::nullopt}};
  const auto c = build_grouped_corpus(docs, words({"a", "b", "c"}), false);
  CHECK(c.labels == words({"2006", "2004", "2005"}));
  REQUIRE(c.offsets.size() == 3);
  CHECK(c.offsets[0] == ColumnRange{0, 2});
  for (std::size_t g = 0; g < 3; ++g) CHECK(slice_columns(c.combined, c.offsets[g]) == c.groups[g]);
}

TEST_CASE("ingestion errors") {
  const std::vector<DocumentRecord> docs{{"a", "g", std::nullopt}};
  CHECK_THROWS_AS(build_grouped_corpus(docs, std::vector<std::string>{}, false), IngestionError);
  CHECK_THROWS_AS(build_grouped_corpus(docs, words({"a", "a"}), false), IngestionError);
  const std::vector<DocumentRecord> no_group{{"a", "", std::nullopt}};
  CHECK_THROWS_AS(build_grouped_corpus(no_group, words({"a"}), false), IngestionError);
  CHECK_THROWS_AS(build_grouped_corpus(std::vector<DocumentRecord>{}, words({"a"}), false),
                  IngestionError);
  CHECK_THROWS_AS(GroupedCorpus::from_groups(words({"a"}), words({"g"}),
                                             std::vector<CountMatrix>{}),
                  IngestionError);
  CHECK_THROWS_AS(GroupedCorpus::from_groups(words({"a"}), words({"g"}),
                                             {CountMatrix(2, 1, {1, 1})}),
                  ShapeError);
}

TEST_CASE("synthetic four-group corpus: conservation and round trip") {
  synthetic::Spec spec;
  spec.zero_inflated = {false, true, false, true};
  const auto corpus = synthetic::make(spec);
  const auto c = build_grouped_corpus(corpus.records, synthetic::vocabulary(), true);
  REQUIRE(c.groups.size() == 4);
  double group_total = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    CHECK(c.groups[g].rows() == 40);
    CHECK(c.groups[g].cols() == spec.docs_per_group);
    CHECK(slice_columns(c.combined, c.offsets[g]) == c.groups[g]);
    group_total += c.groups[g].sum();
  }
  CHECK(c.combined.sum() == group_total);
  CHECK(c.combined.sum() == corpus.vocabulary_tokens);

  const auto rebuilt = GroupedCorpus::from_groups(c.vocabulary, c.labels, c.groups);
  CHECK(rebuilt.combined == c.combined);
  CHECK(rebuilt.offsets == c.offsets);
}

TEST_CASE("top_terms ranks by frequency then alphabetically") {
  const std::vector<DocumentRecord> docs{{"b a c c", "g", std::nullopt},
                                         {"a b d", "g", std::nullopt}};
  CHECK(top_terms(docs, 3) == words({"a", "b", "c"}));
  CHECK(top_terms(docs, 10).size() == 4);
}

TEST_CASE("summarize_trials") {
  const auto row = summarize_trials("x", {0.0, 0.04, 0.05, 0.5}, 0.05);
  CHECK(row.rejects == 3);
  CHECK(row.trials == 4);
  CHECK(row.mean_p_value == doctest::Approx(0.1475));
  CHECK(row.trial_p_values.size() == 4);
}

TEST_CASE("group_test shape and domain errors") {
  const auto c = GroupedCorpus::from_groups(
      words({"a", "b", "c"}), words({"big", "small"}),
      {CountMatrix(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}), CountMatrix(3, 1, {1, 2, 3})});
  DpbsConfig cfg;
  cfg.k = 2;
  cfg.b1 = 2;
  cfg.b2 = 2;
  try {
    (void)group_test(c, cfg, 1, 0.05);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("small") != std::string::npos);
  }
  cfg.k = 1;
  CHECK_THROWS_AS(group_test(c, cfg, 0, 0.05), DomainError);
  CHECK_THROWS_AS(group_test(c, cfg, 1, 1.0), DomainError);
}

TEST_CASE("group_test rows, seeds and thread independence") {
  const auto c = GroupedCorpus::from_groups(
      words({"a", "b", "c", "d"}), words({"g1", "g2"}),
      {CountMatrix(4, 3, {5, 1, 0, 2, 7, 3, 1, 0, 9, 4, 4, 2}),
       CountMatrix(4, 2, {3, 3, 8, 1, 0, 2, 6, 5})});
  DpbsConfig cfg;
  cfg.k = 1;
  cfg.b1 = 3;
  cfg.b2 = 2;
  cfg.master_seed = 4;
  const auto r = group_test(c, cfg, 3, 0.05);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].label == kCombinedLabel);
  CHECK(r.rows[2].label == "g2");
  for (const auto& row : r.rows) {
    CHECK(row.trials == 3);
    std::size_t rejects = 0;
    for (double p : row.trial_p_values) rejects += p <= r.alpha;
    CHECK(row.rejects == rejects);
  }
  DpbsConfig trial = cfg;
  trial.master_seed = derive_seed(SeedPath(cfg.master_seed, {1, 2}));
  CHECK(r.rows[2].trial_p_values[1] == dpbs_test(c.groups[1], trial).rho);

  const auto par = group_test(c, cfg, 3, 0.05, Execution{3});
  for (std::size_t m = 0; m < 3; ++m) CHECK(par.rows[m].trial_p_values == r.rows[m].trial_p_values);
}

TEST_CASE("shared Poisson process: neither combined nor groups reject often" *
          doctest::description("30 bootstrap tests at B1 = B2 = 25")) {
  synthetic::Spec spec;
  spec.groups = 2;
  spec.vocabulary_size = 20;
  spec.group_specific_topics = false;
  spec.docs_per_group = 8;
  spec.seed = 31;
  const auto corpus = synthetic::make(spec);
  const auto c = build_grouped_corpus(corpus.records, synthetic::vocabulary(20), true);
  DpbsConfig cfg;
  cfg.k = 5;
  cfg.master_seed = 17;
  const auto r = group_test(c, cfg, 10, 0.05);
  for (const auto& row : r.rows) {
    CAPTURE(row.label);
    CHECK(row.rejects <= 2);
  }
}
