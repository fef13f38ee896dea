#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ebl/runtime.hpp"

namespace ebl {

/// Three-level coverage cascade over multi-word segments: key found in the
/// index; a stored parse unifies with the real lexical items; a pluggable
/// third stage succeeds. Single-word segments are excluded from the
/// headline ratios and reported separately, as are deletion recoveries.
struct CoverageReport {
  long total_multiword = 0;
  long sequence_found = 0;          // level 1
  long parse_found = 0;             // level 2, conditional on level 1
  std::optional<long> third_stage;  // level 3, conditional on level 2
  long single_word = 0;
  long recovered_by_deletion = 0;   // instantiated only after deletions

  std::optional<double> sequence_ratio() const;
  std::optional<double> parse_ratio() const;        // parse_found / sequence_found
  std::optional<double> third_stage_ratio() const;  // third_stage / parse_found
  std::optional<double> overall_third_stage() const;

  std::string text() const;
};

/// Product identity behind the report's overall row: the overall third-stage
/// rate equals the product of the three conditional ratios.
double conditional_product(double sequence_ratio, double parse_ratio,
                           double third_stage_ratio);

struct SegmentCoverage {
  std::string text;
  long line = 0;
  bool multiword = false;
  bool sequence_found = false;
  bool parse_found = false;
  bool third_stage = false;
  bool recovered_by_deletion = false;
  std::vector<size_t> used_deletions;
};

using ThirdStagePredicate = std::function<bool(const FeatureStructure&)>;

struct CoverageRun {
  CoverageReport report;
  std::vector<SegmentCoverage> segments;
};

/// Runs the cascade over every segment of `test_text`. Level 1 and 2 are
/// counted without deletions; deletion recoveries are counted separately.
/// `third_stage` may be null (reported as n/a).
CoverageRun run_coverage(const EblRuntime& runtime, const Segmenter& segmenter,
                         const std::string& test_text,
                         const ThirdStagePredicate& third_stage = nullptr);

struct ParserTiming {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

struct TimingReport {
  ParserTiming chart;
  ParserTiming ebl;
  long segments = 0;
  double speedup_ratio = 0.0;  // chart mean / ebl mean

  std::string text() const;
};

struct SegmentTiming {
  std::string text;
  double chart_ms = 0.0;
  double ebl_ms = 0.0;
  std::string ebl_status;
  long chart_parses = 0;
};

struct BenchRun {
  TimingReport report;
  std::vector<SegmentTiming> segments;
};

/// Times chart-parser full parses against EBL parse_segment over identical
/// segments (steady clock; `warmup` untimed rounds, then `iterations` timed
/// rounds, per-segment mean). The chart side parses each word's first
/// lexicon entry for the tagged tag (tag-word fallback for unknown words).
BenchRun run_bench(const EblRuntime& runtime, const Grammar& g, const TagSet& ts,
                   const Lexicon& lex, const Tagger& tagger,
                   const Segmenter& segmenter, const std::string& test_text,
                   long warmup, long iterations);

}  // namespace ebl
