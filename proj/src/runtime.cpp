#include "ebl/runtime.hpp"

#include <chrono>
#include <functional>

namespace ebl {

std::string to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::Instantiated: return "instantiated";
    case ParseStatus::LookupMiss: return "lookup_miss";
    case ParseStatus::UnifyFail: return "unify_fail";
  }
  return "unknown";
}

std::vector<const GeneralizedParse*> lookup(const EblIndex& idx, const TagSet& ts,
                                            const TagSequence& seq) {
  std::vector<const GeneralizedParse*> out;
  const auto* bucket = idx.find(ts.generalize_key(seq));
  if (!bucket) return out;
  for (const GeneralizedParse& gp : *bucket) {
    if (gp.slot_tags.size() != seq.size()) continue;
    bool ok = true;
    for (size_t i = 0; ok && i < seq.size(); ++i)
      ok = ts.compatible(gp.slot_tags[i], seq.tags[i]);
    if (ok) out.push_back(&gp);
  }
  return out;
}

InstantiateOutcome instantiate(const GeneralizedParse& gp,
                               const std::vector<LexicalEntry>& entries) {
  if (entries.size() != gp.slot_tags.size())
    throw DataError("instantiate: expected " +
                    std::to_string(gp.slot_tags.size()) + " entries, got " +
                    std::to_string(entries.size()));
  FeatureStructure work = gp.root_fs;
  std::vector<NodeId> anchors = gp.slot_anchors;
  for (size_t i = 0; i < entries.size(); ++i) {
    auto unified = unify_at(work, anchors[i], entries[i].fs);
    if (!unified) return {std::nullopt, i};
    for (auto& a : anchors) a = unified->map_a[a];
    work = std::move(unified->fs);
  }
  return {std::move(work), 0};
}

std::vector<DeletionCandidate> deletion_candidates(const TagSet& ts,
                                                   const TagSequence& seq,
                                                   long max_deletions) {
  if (max_deletions < 1)
    throw ConfigError("deletion_candidates: max_deletions must be >= 1");
  std::vector<size_t> deletable;
  for (size_t i = 0; i < seq.size(); ++i)
    if (ts.deletable(seq.tags[i])) deletable.push_back(i);

  std::vector<DeletionCandidate> out;
  long limit = std::min<long>(max_deletions, static_cast<long>(deletable.size()));
  // Never delete the whole segment.
  limit = std::min<long>(limit, static_cast<long>(seq.size()) - 1);

  std::vector<size_t> combo;
  auto emit = [&] {
    DeletionCandidate cand;
    cand.deleted = combo;
    size_t next = 0;
    for (size_t i = 0; i < seq.size(); ++i) {
      if (next < combo.size() && combo[next] == i) ++next;
      else cand.seq.tags.push_back(seq.tags[i]);
    }
    out.push_back(std::move(cand));
  };
  // Size-k position tuples in lexicographic order: leftmost deletions first.
  std::function<void(size_t, long)> choose = [&](size_t from, long remaining) {
    if (remaining == 0) {
      emit();
      return;
    }
    for (size_t j = from; j < deletable.size(); ++j) {
      combo.push_back(deletable[j]);
      choose(j + 1, remaining - 1);
      combo.pop_back();
    }
  };
  for (long k = 1; k <= limit; ++k) choose(0, k);
  return out;
}

RuntimeConfig RuntimeConfig::from_config(const Config& cfg) {
  RuntimeConfig rc;
  rc.max_deletions = cfg.get_long("runtime.max_deletions", rc.max_deletions);
  rc.time_budget_ms = cfg.get_long("runtime.time_budget_ms", rc.time_budget_ms);
  return rc;
}

EblRuntime::EblRuntime(const EblIndex& idx, const TagSet& ts, const Lexicon& lex,
                       const Tagger& tagger, RuntimeConfig cfg)
    : idx_(idx), ts_(ts), lex_(lex), tagger_(tagger), tagwords_(ts, lex),
      cfg_(cfg) {}

std::vector<LexicalEntry> EblRuntime::slot_entries(const std::string& word,
                                                   const std::string& tag) const {
  std::vector<LexicalEntry> entries = lex_.lookup_tagged(word, tag);
  if (entries.empty())
    entries.push_back(LexicalEntry{word, tag, tagwords_.entry(tag)});
  return entries;
}

namespace {

// Tries every candidate parse against every combination of homograph
// entries (lexicon order, rightmost position varying fastest). Returns the
// first success; `attempts` counts instantiate calls across the whole
// parse_segment run.
std::optional<std::pair<FeatureStructure, std::vector<size_t>>> try_candidates(
    const std::vector<const GeneralizedParse*>& candidates,
    const std::vector<std::vector<LexicalEntry>>& slots, long& attempts) {
  const size_t n = slots.size();
  for (const GeneralizedParse* gp : candidates) {
    std::vector<size_t> pick(n, 0);
    auto advance = [&]() -> bool {  // rightmost position varies fastest
      size_t i = n;
      while (i > 0) {
        --i;
        if (++pick[i] < slots[i].size()) return true;
        pick[i] = 0;
      }
      return false;
    };
    do {
      std::vector<LexicalEntry> chosen;
      chosen.reserve(n);
      for (size_t i = 0; i < n; ++i) chosen.push_back(slots[i][pick[i]]);
      ++attempts;
      auto outcome = instantiate(*gp, chosen);
      if (outcome.fs) return std::make_pair(std::move(*outcome.fs), pick);
    } while (advance());
  }
  return std::nullopt;
}

}  // namespace

ParseResult EblRuntime::parse_segment(const Segment& seg) const {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.time_budget_ms);

  ParseResult result;
  if (seg.words.empty()) return result;

  TagSequence seq = tagger_.tag(seg);
  std::vector<std::vector<LexicalEntry>> slots;
  slots.reserve(seq.size());
  for (size_t i = 0; i < seq.size(); ++i)
    slots.push_back(slot_entries(seg.words[i], seq.tags[i]));

  auto candidates = lookup(idx_, ts_, seq);
  result.undeleted_key_found = !candidates.empty();
  if (!candidates.empty()) {
    auto hit = try_candidates(candidates, slots, result.attempts);
    if (hit) {
      result.status = ParseStatus::Instantiated;
      result.fs = std::move(hit->first);
      result.used_entries = std::move(hit->second);
    } else {
      // The key was present; deletions only apply to index misses.
      result.status = ParseStatus::UnifyFail;
    }
    return result;
  }

  // Lookup miss: retry over deletion candidates.
  bool any_key_found = false;
  if (cfg_.max_deletions >= 1 && seq.size() >= 2) {
    for (const DeletionCandidate& cand :
         deletion_candidates(ts_, seq, cfg_.max_deletions)) {
      if (Clock::now() > deadline) {
        result.status = ParseStatus::LookupMiss;  // budget exhausted
        return result;
      }
      auto reduced = lookup(idx_, ts_, cand.seq);
      if (reduced.empty()) continue;
      any_key_found = true;
      std::vector<std::vector<LexicalEntry>> reduced_slots;
      size_t next = 0;
      for (size_t i = 0; i < seq.size(); ++i) {
        if (next < cand.deleted.size() && cand.deleted[next] == i) ++next;
        else reduced_slots.push_back(slots[i]);
      }
      auto hit = try_candidates(reduced, reduced_slots, result.attempts);
      if (hit) {
        result.status = ParseStatus::Instantiated;
        result.fs = std::move(hit->first);
        result.used_deletions = cand.deleted;
        result.used_entries = std::move(hit->second);
        return result;
      }
    }
  }
  result.status =
      any_key_found ? ParseStatus::UnifyFail : ParseStatus::LookupMiss;
  return result;
}

}  // namespace ebl
