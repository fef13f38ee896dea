#include "ebl/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace ebl {

const std::vector<GeneralizedParse>* EblIndex::find(const TagSequence& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<RankedSequence> extract_sequences(std::istream& corpus,
                                              const Segmenter& seg,
                                              const Tagger& tagger) {
  std::map<TagSequence, size_t> position;  // sequence -> index in `ranked`
  std::vector<RankedSequence> ranked;      // first-occurrence order
  std::string line;
  long lineno = 0;
  while (std::getline(corpus, line)) {
    ++lineno;
    for (const Segment& s : seg.segment(line)) {
      TagSequence tags = tagger.tag(s);
      auto [it, inserted] = position.emplace(tags, ranked.size());
      if (inserted) ranked.push_back({std::move(tags), 1});
      else ++ranked[it->second].count;
    }
  }
  if (corpus.bad())
    throw DataError("corpus unreadable at line " + std::to_string(lineno + 1));
  // Stable sort keeps first-occurrence order among equal counts.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSequence& a, const RankedSequence& b) {
                     return a.count > b.count;
                   });
  return ranked;
}

std::vector<TagSequence> select_training(const std::vector<RankedSequence>& ranked,
                                         long n) {
  if (n < 0) throw ConfigError("select_training: negative count");
  std::vector<TagSequence> out;
  size_t take = std::min<size_t>(ranked.size(), static_cast<size_t>(n));
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(ranked[i].seq);
  return out;
}

GeneralizedParse generalize_parse(const ParseTree& tree, const TagSet& ts,
                                  const RetentionSpec& spec,
                                  const TagSequence& seq) {
  if (tree.leaf_anchors.size() != seq.size())
    throw DataError("generalize_parse: tree does not match the tag sequence");

  Restricted restricted = restrict_traced(tree.root_fs, spec);
  GeneralizedParse gp;
  gp.key = ts.generalize_key(seq);
  gp.slot_tags = seq.tags;
  gp.root_fs = std::move(restricted.fs);
  gp.slot_anchors.reserve(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    NodeId in_root = tree.leaf_anchors[i];
    NodeId kept = in_root == kNoNode ? kNoNode : restricted.map[in_root];
    if (kept == kNoNode)
      throw ConfigError(
          "generalize_parse: anchor for slot " + std::to_string(i) + " (tag '" +
          seq.tags[i] +
          "') was pruned; the retention spec must keep per-slot anchor paths");
    gp.slot_anchors.push_back(kept);
  }
  return gp;
}

TrainerConfig TrainerConfig::from_config(const Config& cfg) {
  TrainerConfig tc;
  tc.cap_base = cfg.get_long("trainer.cap_base", tc.cap_base);
  tc.cap_per_generalizable =
      cfg.get_long("trainer.cap_per_generalizable", tc.cap_per_generalizable);
  return tc;
}

long max_parses_per_key(const TagSequence& key, const TagSet& ts,
                        const TrainerConfig& cfg) {
  long generalizable = 0;
  for (const auto& t : key.tags)
    if (ts.class_has_subclasses(t)) ++generalizable;
  return cfg.cap_base + cfg.cap_per_generalizable * generalizable;
}

TrainResult build_index(const std::vector<TagSequence>& training,
                        const Grammar& g, const TagSet& ts,
                        const TagWordLexicon& tagwords, const RetentionSpec& spec,
                        const TrainerConfig& cfg) {
  TrainResult result;
  EblIndex& idx = result.index;
  idx.meta.tagset_fingerprint = ts.fingerprint();
  idx.meta.retention_fingerprint = spec.fingerprint();
  idx.meta.trained = static_cast<long>(training.size());

  for (const TagSequence& seq : training) {
    std::vector<ParseTree> parses = parse_tags(g, tagwords, seq);
    if (parses.empty()) {
      result.uncovered.push_back({seq, "no_parse"});
      continue;
    }
    ++idx.meta.parsed;
    for (const ParseTree& tree : parses) {
      GeneralizedParse gp = generalize_parse(tree, ts, spec, seq);
      auto& bucket = idx.entries[gp.key];
      if (static_cast<long>(bucket.size()) >= max_parses_per_key(gp.key, ts, cfg))
        break;
      // Two parses are redundant when they restrict to the same structure
      // with the same anchors; slot tags only differ within one key class.
      bool duplicate = false;
      for (const auto& have : bucket)
        duplicate = duplicate || (have.root_fs == gp.root_fs &&
                                  have.slot_anchors == gp.slot_anchors);
      if (!duplicate) {
        ++idx.meta.stored;
        bucket.push_back(std::move(gp));
      }
    }
    // A key touched only by capped-out insertions may exist with no parse
    // stored for this sequence; that is fine, the key already serves it.
  }

  // Drop keys that ended up empty (possible only if a cap of 0 is configured).
  for (auto it = idx.entries.begin(); it != idx.entries.end();) {
    if (it->second.empty()) it = idx.entries.erase(it);
    else ++it;
  }
  return result;
}

IndexStats index_stats(long parsed, long keys, long parses) {
  IndexStats s;
  s.keys = keys;
  s.parses = parses;
  s.avg_parses_per_key = keys == 0 ? 0.0 : static_cast<double>(parses) / keys;
  s.key_reduction_ratio =
      parsed == 0 ? 0.0 : 1.0 - static_cast<double>(keys) / parsed;
  return s;
}

IndexStats index_stats(const EblIndex& idx) {
  long parses = 0;
  for (const auto& [_, bucket] : idx.entries) parses += static_cast<long>(bucket.size());
  return index_stats(idx.meta.parsed, static_cast<long>(idx.entries.size()),
                     parses);
}

// ---------------------------------------------------------------------------
// Index file format

std::string save_index(const EblIndex& idx) {
  std::string out;
  out += "eblindex-version 1\n";
  out += "tagset-fp " + idx.meta.tagset_fingerprint + "\n";
  out += "retention-fp " + idx.meta.retention_fingerprint + "\n";
  out += "counts " + std::to_string(idx.meta.trained) + " " +
         std::to_string(idx.meta.parsed) + " " +
         std::to_string(idx.entries.size()) + " " +
         std::to_string(idx.meta.stored) + "\n";
  for (const auto& [key, bucket] : idx.entries) {
    out += "key " + key.to_string() + "\n";
    for (const GeneralizedParse& gp : bucket) {
      out += "parse slots=";
      for (size_t i = 0; i < gp.slot_tags.size(); ++i) {
        if (i) out += ',';
        out += gp.slot_tags[i];
      }
      out += " anchors=";
      for (size_t i = 0; i < gp.slot_anchors.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(gp.slot_anchors[i]);
      }
      out += " fs=" + render(gp.root_fs) + "\n";
    }
  }
  out += "end\n";
  return out;
}

void save_index_file(const EblIndex& idx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write index file: " + path);
  out << save_index(idx);
  if (!out) throw DataError("failed writing index file: " + path);
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t p = s.find(sep, start);
    if (p == std::string_view::npos) p = s.size();
    if (p > start) out.emplace_back(s.substr(start, p - start));
    if (p == s.size()) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

EblIndex load_index(std::string_view text, const TagSet* ts,
                    const RetentionSpec* spec) {
  EblIndex idx;
  std::istringstream in{std::string(text)};
  std::string line;
  long declared_keys = 0;
  long declared_stored = 0;
  bool saw_end = false;

  auto next = [&](const char* what) {
    if (!std::getline(in, line))
      throw DataError(std::string("unexpected end of index (expected ") + what + ")");
    return line;
  };

  {
    std::istringstream ls(next("version header"));
    std::string head, version;
    if (!(ls >> head >> version) || head != "eblindex-version")
      throw DataError("not an ebl index file (missing version header)");
    if (version != "1")
      throw DataError("unsupported index version '" + version + "'");
  }
  {
    std::istringstream ls(next("tagset fingerprint"));
    std::string head;
    if (!(ls >> head >> idx.meta.tagset_fingerprint) || head != "tagset-fp")
      throw DataError("malformed index: expected tagset-fp");
  }
  {
    std::istringstream ls(next("retention fingerprint"));
    std::string head;
    if (!(ls >> head >> idx.meta.retention_fingerprint) || head != "retention-fp")
      throw DataError("malformed index: expected retention-fp");
  }
  {
    std::istringstream ls(next("counts"));
    std::string head;
    if (!(ls >> head >> idx.meta.trained >> idx.meta.parsed >> declared_keys >>
          declared_stored) ||
        head != "counts")
      throw DataError("malformed index: expected counts line");
  }

  if (ts && ts->fingerprint() != idx.meta.tagset_fingerprint)
    throw DataError("index tagset fingerprint " + idx.meta.tagset_fingerprint +
                    " does not match the supplied tagset (" + ts->fingerprint() +
                    ")");
  if (spec && spec->fingerprint() != idx.meta.retention_fingerprint)
    throw DataError("index retention fingerprint " +
                    idx.meta.retention_fingerprint +
                    " does not match the supplied retention spec (" +
                    spec->fingerprint() + ")");

  TagSequence current_key;
  bool have_key = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "end") {
      saw_end = true;
      break;
    }
    if (head == "key") {
      current_key.tags.clear();
      std::string tag;
      while (ls >> tag) current_key.tags.push_back(tag);
      if (current_key.empty()) throw DataError("malformed index: empty key");
      have_key = true;
      idx.entries[current_key];
    } else if (head == "parse") {
      if (!have_key) throw DataError("malformed index: parse before any key");
      std::string slots_attr, anchors_attr;
      if (!(ls >> slots_attr >> anchors_attr) ||
          slots_attr.rfind("slots=", 0) != 0 ||
          anchors_attr.rfind("anchors=", 0) != 0)
        throw DataError("malformed index: expected slots= and anchors=");
      std::string rest;
      std::getline(ls, rest);
      size_t fs_pos = rest.find("fs=");
      if (fs_pos == std::string::npos)
        throw DataError("malformed index: missing fs=");
      GeneralizedParse gp;
      gp.key = current_key;
      gp.slot_tags = split(slots_attr.substr(6), ',');
      for (const auto& a : split(anchors_attr.substr(8), ',')) {
        try {
          gp.slot_anchors.push_back(std::stoi(a));
        } catch (const std::exception&) {
          throw DataError("malformed index: bad anchor '" + a + "'");
        }
      }
      try {
        gp.root_fs = parse_fs(std::string_view(rest).substr(fs_pos + 3));
      } catch (const FsSyntaxError& e) {
        throw DataError(std::string("malformed index parse line: ") + e.what());
      }
      if (gp.slot_tags.size() != gp.slot_anchors.size() ||
          gp.slot_tags.size() != current_key.size())
        throw DataError("malformed index: slot arity mismatch under key '" +
                        current_key.to_string() + "'");
      for (NodeId a : gp.slot_anchors)
        if (a < 0 || a >= gp.root_fs.size())
          throw DataError("malformed index: anchor out of range under key '" +
                          current_key.to_string() + "'");
      idx.entries[current_key].push_back(std::move(gp));
      ++idx.meta.stored;
    } else {
      throw DataError("malformed index: unknown line '" + line + "'");
    }
  }
  if (!saw_end) throw DataError("unexpected end of index");
  if (declared_keys != static_cast<long>(idx.entries.size()))
    throw DataError("index declares " + std::to_string(declared_keys) +
                    " keys but contains " + std::to_string(idx.entries.size()));
  if (declared_stored != idx.meta.stored)
    throw DataError("index declares " + std::to_string(declared_stored) +
                    " parses but contains " + std::to_string(idx.meta.stored));
  return idx;
}

EblIndex load_index_file(const std::string& path, const TagSet* ts,
                         const RetentionSpec* spec) {
  return load_index(read_file(path), ts, spec);
}

}  // namespace ebl
