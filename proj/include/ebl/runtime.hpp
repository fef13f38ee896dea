#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ebl/config.hpp"
#include "ebl/segmenter.hpp"
#include "ebl/trainer.hpp"

namespace ebl {

enum class ParseStatus { Instantiated, LookupMiss, UnifyFail };

std::string to_string(ParseStatus s);

struct ParseResult {
  ParseStatus status = ParseStatus::LookupMiss;
  std::optional<FeatureStructure> fs;  // present iff Instantiated
  std::vector<size_t> used_deletions;  // deleted positions (original indices)
  long attempts = 0;                   // instantiate calls tried
  // Which lexicon entry (index into the per-slot candidate list) filled each
  // surviving slot; parallel to the undeleted positions. Empty on failure.
  std::vector<size_t> used_entries;
  // Whether the undeleted tag sequence was in the index (level-1 coverage).
  bool undeleted_key_found = false;
};

/// Candidates stored under generalize_key(seq), filtered to parses whose
/// slot tags are position-wise compatible with seq (equal, or sharing the
/// slot's class). Index order is preserved. Empty result = miss.
std::vector<const GeneralizedParse*> lookup(const EblIndex& idx, const TagSet& ts,
                                            const TagSequence& seq);

/// Unifies each entry into its slot anchor, left to right, on a working
/// copy of gp.root_fs. Failure (normal outcome) names the position.
struct InstantiateFailure {
  size_t position = 0;
};
struct InstantiateOutcome {
  std::optional<FeatureStructure> fs;
  size_t failed_position = 0;  // meaningful when !fs
};
InstantiateOutcome instantiate(const GeneralizedParse& gp,
                               const std::vector<LexicalEntry>& entries);

/// All sequences obtainable by deleting 1..max_deletions deletable
/// positions, ordered by fewer deletions first, then leftmost deletions
/// first. No duplicates.
struct DeletionCandidate {
  TagSequence seq;
  std::vector<size_t> deleted;
};
std::vector<DeletionCandidate> deletion_candidates(const TagSet& ts,
                                                   const TagSequence& seq,
                                                   long max_deletions);

struct RuntimeConfig {
  long max_deletions = 2;
  long time_budget_ms = 50;  // bounds only the deletion fallback search
  static RuntimeConfig from_config(const Config& cfg);
};

/// The run-time parser: tag, look up, instantiate with homograph entry
/// combinations (lexicon order, rightmost varying fastest), and on a lookup
/// miss retry over deletion candidates. First success wins.
class EblRuntime {
 public:
  EblRuntime(const EblIndex& idx, const TagSet& ts, const Lexicon& lex,
             const Tagger& tagger, RuntimeConfig cfg = {});

  ParseResult parse_segment(const Segment& seg) const;
  /// The candidate lexical entries for one position (homographs in lexicon
  /// order; unknown words fall back to the tag-word entry).
  std::vector<LexicalEntry> slot_entries(const std::string& word,
                                         const std::string& tag) const;

 private:
  const EblIndex& idx_;
  const TagSet& ts_;
  const Lexicon& lex_;
  const Tagger& tagger_;
  TagWordLexicon tagwords_;
  RuntimeConfig cfg_;
};

}  // namespace ebl
