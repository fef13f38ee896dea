#include "ebl/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace ebl {

std::optional<double> CoverageReport::sequence_ratio() const {
  if (total_multiword == 0) return std::nullopt;
  return static_cast<double>(sequence_found) / total_multiword;
}

std::optional<double> CoverageReport::parse_ratio() const {
  if (sequence_found == 0) return std::nullopt;
  return static_cast<double>(parse_found) / sequence_found;
}

std::optional<double> CoverageReport::third_stage_ratio() const {
  if (!third_stage || parse_found == 0) return std::nullopt;
  return static_cast<double>(*third_stage) / parse_found;
}

std::optional<double> CoverageReport::overall_third_stage() const {
  auto a = sequence_ratio();
  auto b = parse_ratio();
  auto c = third_stage_ratio();
  if (!a || !b || !c) return std::nullopt;
  return conditional_product(*a, *b, *c);
}

double conditional_product(double sequence_ratio, double parse_ratio,
                           double third_stage_ratio) {
  return sequence_ratio * parse_ratio * third_stage_ratio;
}

namespace {

std::string pct(std::optional<double> ratio) {
  if (!ratio) return "n/a";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << (*ratio * 100.0) << "%";
  return out.str();
}

std::string ms(double v) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << v;
  return out.str();
}

}  // namespace

std::string CoverageReport::text() const {
  std::ostringstream out;
  out << "Coverage                                       Performance\n";
  out << "POS sequence found (overall)                   " << pct(sequence_ratio())
      << "  (" << sequence_found << "/" << total_multiword << ")\n";
  out << "Parse found (when sequence already found)      " << pct(parse_ratio())
      << "  (" << parse_found << "/" << sequence_found << ")\n";
  out << "Translation found (when parse already found)   "
      << pct(third_stage_ratio());
  if (third_stage) out << "  (" << *third_stage << "/" << parse_found << ")";
  out << "\n";
  out << "Overall third stage                            "
      << pct(overall_third_stage()) << "\n";
  out << "Single-word segments (excluded)                " << single_word << "\n";
  out << "Recovered via deletions                        " << recovered_by_deletion
      << "\n";
  return out.str();
}

CoverageRun run_coverage(const EblRuntime& runtime, const Segmenter& segmenter,
                         const std::string& test_text,
                         const ThirdStagePredicate& third_stage) {
  CoverageRun run;
  if (third_stage) run.report.third_stage = 0;

  std::istringstream in(test_text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (const Segment& seg : segmenter.segment(line)) {
      SegmentCoverage sc;
      sc.text = seg.text();
      sc.line = lineno;
      sc.multiword = seg.words.size() >= 2;
      if (!sc.multiword) {
        ++run.report.single_word;
        run.segments.push_back(std::move(sc));
        continue;
      }
      ++run.report.total_multiword;
      ParseResult res = runtime.parse_segment(seg);
      if (res.undeleted_key_found) {
        sc.sequence_found = true;
        ++run.report.sequence_found;
      }
      if (res.status == ParseStatus::Instantiated) {
        if (res.used_deletions.empty()) {
          sc.parse_found = true;
          ++run.report.parse_found;
          if (third_stage && third_stage(*res.fs)) {
            sc.third_stage = true;
            ++*run.report.third_stage;
          }
        } else {
          sc.recovered_by_deletion = true;
          sc.used_deletions = res.used_deletions;
          ++run.report.recovered_by_deletion;
        }
      }
      run.segments.push_back(std::move(sc));
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Benchmark

std::string TimingReport::text() const {
  std::ostringstream out;
  out << "Parser          mean ms    median ms   p95 ms\n";
  out << "Chart parser    " << ms(chart.mean_ms) << "      " << ms(chart.median_ms)
      << "       " << ms(chart.p95_ms) << "\n";
  out << "EBL parser      " << ms(ebl.mean_ms) << "      " << ms(ebl.median_ms)
      << "       " << ms(ebl.p95_ms) << "\n";
  out << "Segments: " << segments << "\n";
  out.setf(std::ios::fixed);
  out.precision(1);
  out << "Speedup (chart mean / EBL mean): " << speedup_ratio << "x\n";
  return out.str();
}

namespace {

ParserTiming summarize(std::vector<double> samples) {
  ParserTiming t;
  if (samples.empty()) return t;
  double sum = 0.0;
  for (double v : samples) sum += v;
  t.mean_ms = sum / samples.size();
  std::sort(samples.begin(), samples.end());
  t.median_ms = samples[samples.size() / 2];
  size_t p95 = static_cast<size_t>(std::ceil(samples.size() * 0.95));
  t.p95_ms = samples[std::min(samples.size() - 1, p95 == 0 ? 0 : p95 - 1)];
  return t;
}

}  // namespace

BenchRun run_bench(const EblRuntime& runtime, const Grammar& g, const TagSet& ts,
                   const Lexicon& lex, const Tagger& tagger,
                   const Segmenter& segmenter, const std::string& test_text,
                   long warmup, long iterations) {
  if (iterations < 1) throw ConfigError("bench: iterations must be >= 1");
  (void)ts;

  std::vector<Segment> segments;
  {
    std::istringstream in(test_text);
    std::string line;
    while (std::getline(in, line))
      for (Segment& s : segmenter.segment(line)) segments.push_back(std::move(s));
  }

  TagWordLexicon tagwords(ts, lex);
  // Per-slot lexical candidates, as the runtime sees them (lexicon order,
  // tag-word entry for unknown words).
  auto slot_entries = [&](const Segment& seg) {
    std::vector<std::vector<FeatureStructure>> slots;
    TagSequence tags = tagger.tag(seg);
    for (size_t i = 0; i < seg.words.size(); ++i) {
      std::vector<FeatureStructure> cell;
      for (const auto& e : lex.lookup_tagged(seg.words[i], tags.tags[i]))
        cell.push_back(e.fs);
      if (cell.empty()) cell.push_back(tagwords.entry(tags.tags[i]));
      slots.push_back(std::move(cell));
    }
    return slots;
  };
  // Full chart search over homograph combinations; time spent on failed
  // combinations stays on the clock (cumulative parse-module accounting).
  auto chart_parse = [&](const std::vector<std::vector<FeatureStructure>>& slots) {
    std::vector<size_t> pick(slots.size(), 0);
    auto advance = [&]() -> bool {
      size_t i = slots.size();
      while (i > 0) {
        --i;
        if (++pick[i] < slots[i].size()) return true;
        pick[i] = 0;
      }
      return false;
    };
    do {
      std::vector<FeatureStructure> leaves;
      leaves.reserve(slots.size());
      for (size_t i = 0; i < slots.size(); ++i) leaves.push_back(slots[i][pick[i]]);
      long n = static_cast<long>(parse(g, leaves).size());
      if (n > 0) return n;
    } while (advance());
    return 0L;
  };

  using Clock = std::chrono::steady_clock;
  BenchRun run;
  run.segments.reserve(segments.size());

  for (const Segment& seg : segments) {
    SegmentTiming st;
    st.text = seg.text();
    auto slots = slot_entries(seg);

    for (long i = 0; i < warmup; ++i) {
      chart_parse(slots);
      runtime.parse_segment(seg);
    }

    auto t0 = Clock::now();
    long chart_parses = 0;
    for (long i = 0; i < iterations; ++i) chart_parses = chart_parse(slots);
    auto t1 = Clock::now();
    ParseResult last;
    for (long i = 0; i < iterations; ++i) last = runtime.parse_segment(seg);
    auto t2 = Clock::now();

    auto ms_of = [&](auto d) {
      return std::chrono::duration<double, std::milli>(d).count();
    };
    st.chart_ms = ms_of(t1 - t0) / iterations;
    st.ebl_ms = ms_of(t2 - t1) / iterations;
    st.chart_parses = chart_parses;
    st.ebl_status = to_string(last.status);
    run.segments.push_back(std::move(st));
  }

  std::vector<double> chart_ms, ebl_ms;
  for (const auto& st : run.segments) {
    chart_ms.push_back(st.chart_ms);
    ebl_ms.push_back(st.ebl_ms);
  }
  run.report.chart = summarize(chart_ms);
  run.report.ebl = summarize(ebl_ms);
  run.report.segments = static_cast<long>(run.segments.size());
  run.report.speedup_ratio = run.report.ebl.mean_ms > 0.0
                                 ? run.report.chart.mean_ms / run.report.ebl.mean_ms
                                 : 0.0;
  return run;
}

}  // namespace ebl
