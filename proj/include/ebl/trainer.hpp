#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/chart.hpp"
#include "ebl/config.hpp"
#include "ebl/segmenter.hpp"

namespace ebl {

/// A macro-rule: one whole training parse pruned to the retention spec and
/// stored under its generalized tag-sequence key. slot_tags keep the
/// specific (un-generalized) tags; slot_anchors name the node of root_fs
/// where each position's lexical entry unifies at run time.
struct GeneralizedParse {
  TagSequence key;
  std::vector<std::string> slot_tags;
  FeatureStructure root_fs;
  std::vector<NodeId> slot_anchors;

  bool operator==(const GeneralizedParse&) const = default;
};

struct IndexMeta {
  std::string tagset_fingerprint;
  std::string retention_fingerprint;
  long trained = 0;  // training sequences processed
  long parsed = 0;   // training sequences with at least one parse
  long stored = 0;   // generalized parses stored

  bool operator==(const IndexMeta&) const = default;
};

struct IndexStats {
  long keys = 0;
  long parses = 0;
  double avg_parses_per_key = 0.0;   // parses / keys, 0 when empty
  double key_reduction_ratio = 0.0;  // 1 - keys / parsed
};

struct EblIndex {
  std::map<TagSequence, std::vector<GeneralizedParse>> entries;
  IndexMeta meta;

  const std::vector<GeneralizedParse>* find(const TagSequence& key) const;
  bool operator==(const EblIndex&) const = default;
};

struct RankedSequence {
  TagSequence seq;
  long count = 0;
};

/// Counts distinct tag sequences over all segments of the corpus, sorted by
/// count descending with ties broken by first occurrence.
std::vector<RankedSequence> extract_sequences(std::istream& corpus,
                                              const Segmenter& seg,
                                              const Tagger& tagger);

/// The first min(n, |ranked|) sequences.
std::vector<TagSequence> select_training(const std::vector<RankedSequence>& ranked,
                                         long n);

/// Prunes a training parse to the retention spec, tracing each leaf anchor
/// through the restriction. Faults when an anchor node was pruned entirely:
/// that is a configuration error (the retention spec must keep per-slot
/// anchor paths for every trainable construction).
GeneralizedParse generalize_parse(const ParseTree& tree, const TagSet& ts,
                                  const RetentionSpec& spec,
                                  const TagSequence& seq);

struct TrainerConfig {
  long cap_base = 2;
  long cap_per_generalizable = 2;
  static TrainerConfig from_config(const Config& cfg);
};

/// Per-key storage cap: base + per_generalizable x (number of positions
/// whose tag class has declared subclasses).
long max_parses_per_key(const TagSequence& key, const TagSet& ts,
                        const TrainerConfig& cfg);

struct UncoveredSequence {
  TagSequence seq;
  std::string reason;
};

struct TrainResult {
  EblIndex index;
  std::vector<UncoveredSequence> uncovered;
};

/// Parses each training sequence as tag-words, generalizes every parse in
/// enumeration order, deduplicates structurally equivalent parses, and
/// stores them under generalized keys up to each key's cap. Deterministic.
TrainResult build_index(const std::vector<TagSequence>& training,
                        const Grammar& g, const TagSet& ts,
                        const TagWordLexicon& tagwords, const RetentionSpec& spec,
                        const TrainerConfig& cfg);

IndexStats index_stats(const EblIndex& idx);
IndexStats index_stats(long parsed, long keys, long parses);

/// Text index format, one parse per line under lexicographically sorted
/// keys; save/load round-trips exactly, and identical inputs produce
/// byte-identical files.
std::string save_index(const EblIndex& idx);
void save_index_file(const EblIndex& idx, const std::string& path);

/// Parses an index. When a tagset or retention spec is supplied, their
/// fingerprints must match the file's or the load faults naming both.
EblIndex load_index(std::string_view text, const TagSet* ts = nullptr,
                    const RetentionSpec* spec = nullptr);
EblIndex load_index_file(const std::string& path, const TagSet* ts = nullptr,
                         const RetentionSpec* spec = nullptr);

}  // namespace ebl
