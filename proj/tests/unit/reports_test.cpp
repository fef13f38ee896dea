#include "ebl/reports.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ebl/config.hpp"

using namespace ebl;

namespace {

struct CovFixture {
  TagSet ts;
  Lexicon lex;
  Grammar grammar;
  RetentionSpec spec;
  Config cfg;
  Segmenter segmenter;
  Tagger tagger;
  EblIndex index;
  EblRuntime runtime;

  static EblIndex train(const TagSet& ts, const Lexicon& lex, const Grammar& g,
                        const RetentionSpec& spec, const Segmenter& seg,
                        const Tagger& tagger) {
    TagWordLexicon tw(ts, lex);
    std::istringstream corpus(
        read_file(std::string(EBL_FIXTURE_DIR) + "/train_corpus.txt"));
    auto ranked = extract_sequences(corpus, seg, tagger);
    return build_index(select_training(ranked, 60), g, ts, tw, spec,
                       TrainerConfig{})
        .index;
  }

  CovFixture()
      : ts(TagSet::load(read_file(std::string(EBL_FIXTURE_DIR) + "/tagset.tags"))),
        lex(Lexicon::load(read_file(std::string(EBL_FIXTURE_DIR) + "/lexicon.lex"), ts)),
        grammar(Grammar::load(read_file(std::string(EBL_FIXTURE_DIR) + "/grammar.gram"))),
        spec(load_retention(read_file(std::string(EBL_FIXTURE_DIR) + "/retention.spec"),
                            ts.feature_vocabulary())),
        cfg(Config::load_file(std::string(EBL_FIXTURE_DIR) + "/config.cfg")),
        segmenter(Segmenter::from_config(cfg)),
        tagger(Tagger::from_config(ts, lex, cfg)),
        index(train(ts, lex, grammar, spec, segmenter, tagger)),
        runtime(index, ts, lex, tagger, RuntimeConfig::from_config(cfg)) {}
};

CovFixture& fx() {
  static CovFixture f;
  return f;
}

}  // namespace

TEST_CASE("coverage: constructed test set hits 8/10 and instantiates 7/8") {
  auto& f = fx();
  CoverageRun run = run_coverage(
      f.runtime, f.segmenter,
      read_file(std::string(EBL_FIXTURE_DIR) + "/coverage_corpus.txt"));
  const CoverageReport& r = run.report;
  CHECK(r.total_multiword == 10);
  CHECK(r.sequence_found == 8);
  CHECK(r.parse_found == 7);
  REQUIRE(r.sequence_ratio());
  REQUIRE(r.parse_ratio());
  CHECK(std::abs(*r.sequence_ratio() - 0.800) < 1e-9);
  CHECK(std::abs(*r.parse_ratio() - 0.875) < 1e-9);
  CHECK(r.single_word == 2);
  CHECK(r.recovered_by_deletion == 1);
  CHECK(!r.third_stage);
  CHECK(!r.overall_third_stage());
}

TEST_CASE("coverage: empty test file reports n/a") {
  auto& f = fx();
  CoverageRun run = run_coverage(f.runtime, f.segmenter, "");
  CHECK(run.report.total_multiword == 0);
  CHECK(!run.report.sequence_ratio());
  CHECK(!run.report.parse_ratio());
  CHECK(run.report.text().find("n/a") != std::string::npos);
}

TEST_CASE("coverage: report renders the three conditional rows") {
  auto& f = fx();
  CoverageRun run = run_coverage(
      f.runtime, f.segmenter,
      read_file(std::string(EBL_FIXTURE_DIR) + "/coverage_corpus.txt"));
  std::string text = run.report.text();
  CHECK(text.find("POS sequence found (overall)") != std::string::npos);
  CHECK(text.find("Parse found (when sequence already found)") != std::string::npos);
  CHECK(text.find("Translation found (when parse already found)") !=
        std::string::npos);
  CHECK(text.find("80.0%") != std::string::npos);
  CHECK(text.find("87.5%") != std::string::npos);
}

TEST_CASE("coverage: third stage plugs in and multiplies through") {
  auto& f = fx();
  // A predicate that accepts clauses with an instantiated subject.
  ThirdStagePredicate pred = [](const FeatureStructure& fs) {
    return fs.at(FeaturePath::parse("subj")) != kNoNode;
  };
  CoverageRun run = run_coverage(
      f.runtime, f.segmenter,
      read_file(std::string(EBL_FIXTURE_DIR) + "/coverage_corpus.txt"), pred);
  REQUIRE(run.report.third_stage);
  auto overall = run.report.overall_third_stage();
  REQUIRE(overall);
  CHECK(std::abs(*overall - *run.report.sequence_ratio() *
                                *run.report.parse_ratio() *
                                *run.report.third_stage_ratio()) < 1e-12);
}

TEST_CASE("conditional product reproduces the cascade arithmetic") {
  double overall = conditional_product(0.786, 0.879, 0.899);
  CHECK(std::abs(overall - 0.621) <= 0.001);
}

TEST_CASE("bench: measures both parsers over identical segments") {
  auto& f = fx();
  BenchRun run = run_bench(f.runtime, f.grammar, f.ts, f.lex, f.tagger,
                           f.segmenter,
                           "THE DOG RUNS.\nHE RUNS.\nSHE SEES THE DOG.\n",
                           /*warmup=*/1, /*iterations=*/2);
  CHECK(run.report.segments == 3);
  REQUIRE(run.segments.size() == 3);
  for (const auto& st : run.segments) {
    CHECK(st.chart_ms > 0.0);
    CHECK(st.ebl_ms > 0.0);
    CHECK(st.ebl_status == "instantiated");
    CHECK(st.chart_parses >= 1);
  }
  CHECK(run.report.speedup_ratio > 0.0);
  CHECK(run.report.text().find("Chart parser") != std::string::npos);
}

TEST_CASE("bench: zero iterations is a usage error") {
  auto& f = fx();
  CHECK_THROWS_AS(run_bench(f.runtime, f.grammar, f.ts, f.lex, f.tagger,
                            f.segmenter, "OKAY.\n", 0, 0),
                  ConfigError);
}
