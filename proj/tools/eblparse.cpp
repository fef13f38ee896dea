// eblparse: train a tag-sequence-keyed index of generalized parses from a
// corpus, then parse, measure coverage, and benchmark against the chart
// parser. See README.md for the file formats.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ebl/reports.hpp"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMisses = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct CommonPaths {
  std::string tagset;
  std::string lexicon;
  std::string grammar;
  std::string retention;
  std::string index;
  std::string config;
  std::string emit;  // "" or "jsonl"

  bool jsonl() const { return emit == "jsonl"; }
};

struct Loaded {
  ebl::TagSet ts;
  ebl::Lexicon lex;
  ebl::RetentionSpec spec;
  ebl::Config cfg;
  ebl::Segmenter segmenter;
  ebl::Tagger tagger;

  explicit Loaded(const CommonPaths& p)
      : ts(ebl::TagSet::load(ebl::read_file(p.tagset))),
        lex(ebl::Lexicon::load(ebl::read_file(p.lexicon), ts)),
        spec(ebl::load_retention(ebl::read_file(p.retention),
                                 ts.feature_vocabulary())),
        cfg(p.config.empty() ? ebl::Config() : ebl::Config::load_file(p.config)),
        segmenter(ebl::Segmenter::from_config(cfg)),
        tagger(ebl::Tagger::from_config(ts, lex, cfg)) {}
};

void add_common(CLI::App* cmd, CommonPaths& p, bool tagset, bool grammar,
                bool retention, bool index) {
  if (tagset) {
    cmd->add_option("--tagset", p.tagset, "tagset file")->required();
    cmd->add_option("--lexicon", p.lexicon, "lexicon file")->required();
  }
  if (grammar) cmd->add_option("--grammar", p.grammar, "grammar file")->required();
  if (retention)
    cmd->add_option("--retention", p.retention, "retention spec file")->required();
  if (index) cmd->add_option("--index", p.index, "index file")->required();
  cmd->add_option("--config", p.config, "key=value configuration file");
  cmd->add_option("--emit", p.emit, "machine-readable output format")
      ->check(CLI::IsMember({"jsonl"}));
}

// ---------------------------------------------------------------------------

int cmd_train(const CommonPaths& p, const std::string& corpus_path, long top,
              const std::string& out_path, std::string uncovered_path) {
  Loaded art(p);
  ebl::Grammar grammar = ebl::Grammar::load(ebl::read_file(p.grammar));
  ebl::TagWordLexicon tagwords(art.ts, art.lex);

  std::ifstream corpus(corpus_path);
  if (!corpus) throw ebl::ConfigError("cannot read corpus: " + corpus_path);
  auto ranked = ebl::extract_sequences(corpus, art.segmenter, art.tagger);
  auto training = ebl::select_training(ranked, top);
  if (training.empty())
    std::cerr << "warning: no training sequences selected; writing an empty index\n";

  ebl::TrainResult result =
      ebl::build_index(training, grammar, art.ts, tagwords, art.spec,
                       ebl::TrainerConfig::from_config(art.cfg));
  ebl::save_index_file(result.index, out_path);

  if (uncovered_path.empty()) uncovered_path = out_path + ".uncovered";
  std::ofstream uncovered(uncovered_path);
  if (!uncovered)
    throw ebl::DataError("cannot write uncovered log: " + uncovered_path);
  for (const auto& u : result.uncovered)
    uncovered << u.seq.to_string() << "\t" << u.reason << "\n";

  ebl::IndexStats stats = ebl::index_stats(result.index);
  if (p.jsonl()) {
    json rec{{"report",
              {{"trained", result.index.meta.trained},
               {"parsed", result.index.meta.parsed},
               {"keys", stats.keys},
               {"parses", stats.parses},
               {"uncovered", result.uncovered.size()},
               {"index", out_path}}}};
    std::cout << rec.dump() << "\n";
  } else {
    std::cout << "trained sequences: " << result.index.meta.trained << "\n"
              << "parsed sequences:  " << result.index.meta.parsed << "\n"
              << "index keys:        " << stats.keys << "\n"
              << "stored parses:     " << stats.parses << "\n"
              << "uncovered:         " << result.uncovered.size() << " (see "
              << uncovered_path << ")\n"
              << "index written to:  " << out_path << "\n";
  }
  return kExitOk;
}

json result_record(const std::string& segment_text, const ebl::ParseResult& r) {
  json rec{{"segment", segment_text}, {"status", ebl::to_string(r.status)}};
  rec["attempts"] = r.attempts;
  rec["deletions"] = r.used_deletions;
  if (r.fs) rec["fs"] = ebl::render(*r.fs);
  return rec;
}

int cmd_parse(const CommonPaths& p, const std::string& input_path) {
  Loaded art(p);
  ebl::EblIndex index = ebl::load_index_file(p.index, &art.ts, &art.spec);
  ebl::EblRuntime runtime(index, art.ts, art.lex, art.tagger,
                          ebl::RuntimeConfig::from_config(art.cfg));

  std::ifstream file;
  std::istream* in = &std::cin;
  if (!input_path.empty()) {
    file.open(input_path);
    if (!file) throw ebl::ConfigError("cannot read input: " + input_path);
    in = &file;
  }

  std::string line;
  while (std::getline(*in, line)) {
    for (const ebl::Segment& seg : art.segmenter.segment(line)) {
      ebl::ParseResult r = runtime.parse_segment(seg);
      if (p.jsonl()) {
        std::cout << result_record(seg.text(), r).dump() << "\n";
      } else {
        std::cout << seg.text() << "\t" << ebl::to_string(r.status)
                  << "\tattempts=" << r.attempts;
        if (!r.used_deletions.empty()) {
          std::cout << "\tdeleted=";
          for (size_t i = 0; i < r.used_deletions.size(); ++i)
            std::cout << (i ? "," : "") << r.used_deletions[i];
        }
        if (r.fs) std::cout << "\t" << ebl::render(*r.fs);
        std::cout << "\n";
      }
    }
  }
  return kExitOk;
}

int cmd_coverage(const CommonPaths& p, const std::string& test_path) {
  Loaded art(p);
  ebl::EblIndex index = ebl::load_index_file(p.index, &art.ts, &art.spec);
  ebl::EblRuntime runtime(index, art.ts, art.lex, art.tagger,
                          ebl::RuntimeConfig::from_config(art.cfg));

  ebl::CoverageRun run =
      ebl::run_coverage(runtime, art.segmenter, ebl::read_file(test_path));
  const ebl::CoverageReport& r = run.report;

  if (p.jsonl()) {
    for (const auto& s : run.segments) {
      json rec{{"segment", s.text},
               {"line", s.line},
               {"multiword", s.multiword},
               {"sequence_found", s.sequence_found},
               {"parse_found", s.parse_found},
               {"recovered_by_deletion", s.recovered_by_deletion}};
      rec["deletions"] = s.used_deletions;
      std::cout << rec.dump() << "\n";
    }
    json rep{{"report",
              {{"total_multiword", r.total_multiword},
               {"sequence_found", r.sequence_found},
               {"parse_found", r.parse_found},
               {"single_word", r.single_word},
               {"recovered_by_deletion", r.recovered_by_deletion}}}};
    auto& rj = rep["report"];
    if (auto v = r.sequence_ratio()) rj["sequence_ratio"] = *v;
    if (auto v = r.parse_ratio()) rj["parse_ratio"] = *v;
    if (auto v = r.third_stage_ratio()) rj["third_stage_ratio"] = *v;
    if (auto v = r.overall_third_stage()) rj["overall_third_stage"] = *v;
    std::cout << rep.dump() << "\n";
    std::cerr << r.text();
  } else {
    std::cout << r.text();
  }
  return r.parse_found < r.total_multiword ? kExitMisses : kExitOk;
}

int cmd_bench(const CommonPaths& p, const std::string& test_path, long warmup,
              long iterations) {
  Loaded art(p);
  ebl::Grammar grammar = ebl::Grammar::load(ebl::read_file(p.grammar));
  ebl::EblIndex index = ebl::load_index_file(p.index, &art.ts, &art.spec);
  ebl::EblRuntime runtime(index, art.ts, art.lex, art.tagger,
                          ebl::RuntimeConfig::from_config(art.cfg));

  ebl::BenchRun run =
      ebl::run_bench(runtime, grammar, art.ts, art.lex, art.tagger,
                     art.segmenter, ebl::read_file(test_path), warmup, iterations);

  bool misses = false;
  for (const auto& s : run.segments) misses = misses || s.ebl_status != "instantiated";

  if (p.jsonl()) {
    for (const auto& s : run.segments) {
      json rec{{"segment", s.text},
               {"chart_ms", s.chart_ms},
               {"ebl_ms", s.ebl_ms},
               {"chart_parses", s.chart_parses},
               {"ebl_status", s.ebl_status}};
      std::cout << rec.dump() << "\n";
    }
    json rep{{"report",
              {{"segments", run.report.segments},
               {"chart_mean_ms", run.report.chart.mean_ms},
               {"chart_median_ms", run.report.chart.median_ms},
               {"chart_p95_ms", run.report.chart.p95_ms},
               {"ebl_mean_ms", run.report.ebl.mean_ms},
               {"ebl_median_ms", run.report.ebl.median_ms},
               {"ebl_p95_ms", run.report.ebl.p95_ms},
               {"speedup_ratio", run.report.speedup_ratio}}}};
    std::cout << rep.dump() << "\n";
    std::cerr << run.report.text();
  } else {
    std::cout << run.report.text();
  }
  return misses ? kExitMisses : kExitOk;
}

int cmd_stats(const CommonPaths& p, std::optional<long> parsed,
              std::optional<long> keys, std::optional<long> parses) {
  ebl::IndexStats stats;
  if (!p.index.empty()) {
    ebl::EblIndex index = ebl::load_index_file(p.index);
    stats = ebl::index_stats(index);
  } else if (parsed && keys && parses) {
    stats = ebl::index_stats(*parsed, *keys, *parses);
  } else {
    throw ebl::ConfigError(
        "stats needs --index or all of --parsed/--keys/--parses");
  }
  if (p.jsonl()) {
    json rec{{"keys", stats.keys},
             {"parses", stats.parses},
             {"avg_parses_per_key", stats.avg_parses_per_key},
             {"key_reduction_ratio", stats.key_reduction_ratio}};
    std::cout << rec.dump() << "\n";
  } else {
    char buf[64];
    std::cout << "keys:               " << stats.keys << "\n";
    std::cout << "parses:             " << stats.parses << "\n";
    std::snprintf(buf, sizeof buf, "%.2f", stats.avg_parses_per_key);
    std::cout << "avg parses per key: " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.2f%%", stats.key_reduction_ratio * 100.0);
    std::cout << "key reduction:      " << buf << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EBL-specialized parsing toolkit"};
  app.require_subcommand(1);

  CommonPaths train_p, parse_p, cov_p, bench_p, stats_p;
  std::string corpus, train_out, train_uncovered, parse_input, cov_test, bench_test;
  long top = 0, warmup = 1, iterations = 3;
  std::optional<long> st_parsed, st_keys, st_parses;

  CLI::App* train = app.add_subcommand("train", "build an index from a corpus");
  add_common(train, train_p, true, true, true, false);
  train->add_option("--corpus", corpus, "training corpus")->required();
  train->add_option("--top", top, "how many ranked sequences to train on")
      ->required();
  train->add_option("--out", train_out, "index output path")->required();
  train->add_option("--uncovered", train_uncovered,
                    "uncovered-sequence log (default <out>.uncovered)");

  CLI::App* parse = app.add_subcommand("parse", "parse lines with the index");
  add_common(parse, parse_p, true, false, true, true);
  parse->add_option("--input", parse_input, "input file (default stdin)");

  CLI::App* coverage =
      app.add_subcommand("coverage", "three-level coverage over a test file");
  add_common(coverage, cov_p, true, false, true, true);
  coverage->add_option("--test", cov_test, "test corpus")->required();

  CLI::App* bench =
      app.add_subcommand("bench", "time chart parsing against the index");
  add_common(bench, bench_p, true, true, true, true);
  bench->add_option("--test", bench_test, "test corpus")->required();
  bench->add_option("--warmup", warmup, "untimed rounds per segment");
  bench->add_option("--iterations", iterations, "timed rounds per segment");

  CLI::App* stats = app.add_subcommand("stats", "index statistics");
  stats->add_option("--index", stats_p.index, "index file");
  stats->add_option("--parsed", st_parsed, "parsed sequence count");
  stats->add_option("--keys", st_keys, "key count");
  stats->add_option("--parses", st_parses, "stored parse count");
  stats->add_option("--emit", stats_p.emit, "machine-readable output format")
      ->check(CLI::IsMember({"jsonl"}));

  try {
    app.parse(argc, argv);
    if (*train)
      return cmd_train(train_p, corpus, top, train_out, train_uncovered);
    if (*parse) return cmd_parse(parse_p, parse_input);
    if (*coverage) return cmd_coverage(cov_p, cov_test);
    if (*bench) return cmd_bench(bench_p, bench_test, warmup, iterations);
    if (*stats) return cmd_stats(stats_p, st_parsed, st_keys, st_parses);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  } catch (const ebl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ebl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
