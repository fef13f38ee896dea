#include "ebl/fs.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace ebl {

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FeaturePath / RetentionSpec

FeaturePath FeaturePath::parse(std::string_view dotted) {
  FeaturePath p;
  size_t start = 0;
  while (start <= dotted.size()) {
    size_t dot = dotted.find('.', start);
    if (dot == std::string_view::npos) dot = dotted.size();
    std::string_view seg = dotted.substr(start, dot - start);
    if (seg.empty())
      throw DataError("empty segment in feature path '" + std::string(dotted) + "'");
    p.segments.emplace_back(seg);
    if (dot == dotted.size()) break;
    start = dot + 1;
  }
  return p;
}

std::string FeaturePath::to_string() const {
  std::string out;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (i) out += '.';
    out += segments[i];
  }
  return out;
}

void RetentionSpec::validate() const {
  if (coindex_paths.empty())
    throw ConfigError("retention spec declares no coindex paths");
  if (value_paths.empty())
    throw ConfigError("retention spec declares no value paths");
  std::set<FeaturePath> coindex(coindex_paths.begin(), coindex_paths.end());
  for (const auto& vp : value_paths) {
    if (!coindex.count(vp))
      throw ConfigError("value path '" + vp.to_string() +
                        "' is not among the coindex paths");
  }
}

std::string RetentionSpec::canonical_text() const {
  std::set<std::string> co, va;
  for (const auto& p : coindex_paths) co.insert(p.to_string());
  for (const auto& p : value_paths) va.insert(p.to_string());
  std::string out;
  for (const auto& p : co) out += "coindex " + p + "\n";
  for (const auto& p : va) out += "value " + p + "\n";
  return out;
}

std::string RetentionSpec::fingerprint() const {
  return to_hex(fnv1a64(canonical_text()));
}

RetentionSpec load_retention(std::string_view text,
                             const std::set<std::string>& vocabulary) {
  RetentionSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::vector<std::string> problems;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind, path_text;
    if (!(ls >> kind) || kind[0] == '#') continue;
    if (!(ls >> path_text)) {
      problems.push_back("line " + std::to_string(lineno) + ": missing path");
      continue;
    }
    if (kind != "coindex" && kind != "value") {
      problems.push_back("line " + std::to_string(lineno) +
                         ": unknown directive '" + kind + "'");
      continue;
    }
    FeaturePath path;
    try {
      path = FeaturePath::parse(path_text);
    } catch (const DataError& e) {
      problems.push_back("line " + std::to_string(lineno) + ": " + e.what());
      continue;
    }
    for (const auto& seg : path.segments) {
      if (!vocabulary.count(seg))
        problems.push_back("line " + std::to_string(lineno) + ": feature '" +
                           seg + "' not in the declared vocabulary");
    }
    if (kind == "coindex") spec.coindex_paths.push_back(path);
    else spec.value_paths.push_back(path);
  }
  if (!problems.empty()) {
    std::string msg = "invalid retention spec:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// FeatureStructure / FsBuilder

NodeId FeatureStructure::Node::arc(std::string_view feature) const {
  auto it = std::lower_bound(
      arcs.begin(), arcs.end(), feature,
      [](const auto& a, std::string_view f) { return a.first < f; });
  if (it == arcs.end() || it->first != feature) return kNoNode;
  return it->second;
}

FeatureStructure::FeatureStructure() { nodes_.resize(1); }

FeatureStructure FeatureStructure::make_top() { return FeatureStructure(); }

FeatureStructure FeatureStructure::make_atom(std::string symbol) {
  FeatureStructure fs;
  fs.nodes_[0].kind = FsKind::Atom;
  fs.nodes_[0].atom = std::move(symbol);
  return fs;
}

NodeId FeatureStructure::at(NodeId from, const FeaturePath& path) const {
  NodeId cur = from;
  for (const auto& seg : path.segments) {
    if (cur == kNoNode) return kNoNode;
    cur = node(cur).arc(seg);
  }
  return cur;
}

std::optional<std::string> FeatureStructure::atom_at(const FeaturePath& path) const {
  NodeId n = at(path);
  if (n == kNoNode || node(n).kind != FsKind::Atom) return std::nullopt;
  return node(n).atom;
}

NodeId FsBuilder::add_top() {
  slots_.emplace_back();
  return static_cast<NodeId>(slots_.size()) - 1;
}

NodeId FsBuilder::add_atom(std::string symbol) {
  NodeId id = add_top();
  slots_[id].atom = std::move(symbol);
  return id;
}

void FsBuilder::set_atom(NodeId id, std::string symbol) {
  if (!slots_[id].arcs.empty())
    throw DataError("cannot give an atomic value to a node with arcs");
  if (slots_[id].atom)
    throw DataError("node already has an atomic value");
  slots_[id].atom = std::move(symbol);
}

void FsBuilder::add_arc(NodeId from, std::string feature, NodeId to) {
  if (slots_[from].atom)
    throw DataError("cannot add arc '" + feature + "' to an atomic node");
  if (has_arc(from, feature))
    throw DataError("duplicate feature '" + feature + "'");
  slots_[from].arcs.emplace_back(std::move(feature), to);
}

bool FsBuilder::has_arc(NodeId from, std::string_view feature) const {
  for (const auto& [f, _] : slots_[from].arcs)
    if (f == feature) return true;
  return false;
}

NodeId FsBuilder::import(const FeatureStructure& fs) {
  NodeId base = static_cast<NodeId>(slots_.size());
  for (int i = 0; i < fs.size(); ++i) {
    const auto& n = fs.node(i);
    Slot s;
    if (n.kind == FsKind::Atom) s.atom = n.atom;
    for (const auto& [f, c] : n.arcs) s.arcs.emplace_back(f, base + c);
    slots_.push_back(std::move(s));
  }
  return base + fs.root();
}

FeatureStructure FsBuilder::build(NodeId root, std::vector<NodeId>* remap) const {
  FeatureStructure out;
  out.nodes_.clear();
  std::vector<NodeId> ids(slots_.size(), kNoNode);
  std::vector<int> state(slots_.size(), 0);  // 0 unseen, 1 on stack, 2 done

  std::function<NodeId(NodeId)> visit = [&](NodeId s) -> NodeId {
    if (state[s] == 1) throw DataError("cyclic feature structure");
    if (state[s] == 2) return ids[s];
    state[s] = 1;
    NodeId id = static_cast<NodeId>(out.nodes_.size());
    out.nodes_.emplace_back();
    ids[s] = id;
    auto arcs = slots_[s].arcs;
    std::sort(arcs.begin(), arcs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (slots_[s].atom) {
      out.nodes_[id].kind = FsKind::Atom;
      out.nodes_[id].atom = *slots_[s].atom;
    } else if (!arcs.empty()) {
      out.nodes_[id].kind = FsKind::Complex;
      for (const auto& [f, c] : arcs) {
        NodeId child = visit(c);
        out.nodes_[id].arcs.emplace_back(f, child);
      }
    }
    state[s] = 2;
    return id;
  };

  out.root_ = visit(root);
  if (remap) *remap = std::move(ids);
  return out;
}

// ---------------------------------------------------------------------------
// UnifyEngine

NodeId UnifyEngine::find(NodeId x) const {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

NodeId UnifyEngine::add(const FeatureStructure& fs) {
  NodeId base = static_cast<NodeId>(slots_.size());
  for (int i = 0; i < fs.size(); ++i) {
    const auto& n = fs.node(i);
    Slot s;
    if (n.kind == FsKind::Atom) s.atom = n.atom;
    for (const auto& [f, c] : n.arcs) s.arcs.emplace(f, base + c);
    slots_.push_back(std::move(s));
    parent_.push_back(base + i);
  }
  return base;
}

bool UnifyEngine::merge(NodeId x, NodeId y) {
  std::vector<std::pair<NodeId, NodeId>> work{{x, y}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    a = find(a);
    b = find(b);
    if (a == b) continue;
    Slot& sa = slots_[a];
    Slot& sb = slots_[b];
    if (sa.atom && sb.atom && *sa.atom != *sb.atom) return false;
    if (!sa.atom && sb.atom) sa.atom = sb.atom;
    for (const auto& [f, c] : sb.arcs) {
      auto it = sa.arcs.find(f);
      if (it == sa.arcs.end()) sa.arcs.emplace(f, c);
      else work.emplace_back(it->second, c);
    }
    if (sa.atom && !sa.arcs.empty()) return false;  // atom vs complex
    parent_[b] = a;
  }
  return true;
}

std::optional<UnifyEngine::Extraction> UnifyEngine::extract(NodeId root) const {
  std::vector<int> state(slots_.size(), 0);
  std::vector<NodeId> built(slots_.size(), kNoNode);
  FsBuilder builder;
  bool cyclic = false;

  std::function<NodeId(NodeId)> visit = [&](NodeId s) -> NodeId {
    s = find(s);
    if (state[s] == 1) {
      cyclic = true;
      return kNoNode;
    }
    if (state[s] == 2) return built[s];
    state[s] = 1;
    const Slot& slot = slots_[s];
    NodeId id = slot.atom ? builder.add_atom(*slot.atom) : builder.add_top();
    for (const auto& [f, c] : slot.arcs) {
      NodeId child = visit(c);
      if (cyclic) return kNoNode;
      builder.add_arc(id, f, child);
    }
    state[s] = 2;
    built[s] = id;
    return id;
  };

  NodeId broot = visit(root);
  if (cyclic) return std::nullopt;
  std::vector<NodeId> remap;
  Extraction ex{builder.build(broot, &remap), {}};
  ex.map.assign(slots_.size(), kNoNode);
  for (size_t i = 0; i < slots_.size(); ++i) {
    NodeId rep = find(static_cast<NodeId>(i));
    if (built[rep] != kNoNode) ex.map[i] = remap[built[rep]];
  }
  return ex;
}

// ---------------------------------------------------------------------------
// unify / subsumes / generalize / restrict

std::optional<TracedUnify> unify_at(const FeatureStructure& a, NodeId site,
                                    const FeatureStructure& b) {
  UnifyEngine engine;
  NodeId base_a = engine.add(a);
  NodeId base_b = engine.add(b);
  if (!engine.merge(base_a + site, base_b + b.root())) return std::nullopt;
  auto ex = engine.extract(base_a + a.root());
  if (!ex) return std::nullopt;
  TracedUnify out;
  out.fs = std::move(ex->fs);
  out.map_a.assign(ex->map.begin() + base_a, ex->map.begin() + base_a + a.size());
  out.map_b.assign(ex->map.begin() + base_b, ex->map.begin() + base_b + b.size());
  return out;
}

std::optional<TracedUnify> unify_traced(const FeatureStructure& a,
                                        const FeatureStructure& b) {
  return unify_at(a, a.root(), b);
}

std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b) {
  auto t = unify_traced(a, b);
  if (!t) return std::nullopt;
  return std::move(t->fs);
}

bool subsumes(const FeatureStructure& a, const FeatureStructure& b) {
  std::vector<NodeId> image(a.size(), kNoNode);
  std::vector<std::pair<NodeId, NodeId>> work{{a.root(), b.root()}};
  image[a.root()] = b.root();
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    switch (nx.kind) {
      case FsKind::Top:
        break;
      case FsKind::Atom:
        if (ny.kind != FsKind::Atom || nx.atom != ny.atom) return false;
        break;
      case FsKind::Complex: {
        if (ny.kind != FsKind::Complex) return false;
        for (const auto& [f, cx] : nx.arcs) {
          NodeId cy = ny.arc(f);
          if (cy == kNoNode) return false;
          if (image[cx] == kNoNode) {
            image[cx] = cy;
            work.emplace_back(cx, cy);
          } else if (image[cx] != cy) {
            return false;  // reentrancy in a not shared in b
          }
        }
        break;
      }
    }
  }
  return true;
}

bool equivalent(const FeatureStructure& a, const FeatureStructure& b) {
  return subsumes(a, b) && subsumes(b, a);
}

FeatureStructure generalize(const FeatureStructure& a,
                            const FeatureStructure& b) {
  FsBuilder builder;
  std::map<std::pair<NodeId, NodeId>, NodeId> memo;
  std::function<NodeId(NodeId, NodeId)> visit = [&](NodeId x, NodeId y) -> NodeId {
    auto key = std::make_pair(x, y);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    NodeId id = builder.add_top();
    memo.emplace(key, id);
    const auto& nx = a.node(x);
    const auto& ny = b.node(y);
    if (nx.kind == FsKind::Atom && ny.kind == FsKind::Atom && nx.atom == ny.atom) {
      builder.set_atom(id, nx.atom);
    } else if (nx.kind == FsKind::Complex && ny.kind == FsKind::Complex) {
      for (const auto& [f, cx] : nx.arcs) {
        NodeId cy = ny.arc(f);
        if (cy != kNoNode) builder.add_arc(id, f, visit(cx, cy));
      }
    }
    return id;
  };
  NodeId root = visit(a.root(), b.root());
  return builder.build(root);
}

Restricted restrict_traced(const FeatureStructure& fs, const RetentionSpec& spec) {
  spec.validate();

  struct Trie {
    std::map<std::string, Trie> kids;
    bool value_end = false;
  };
  Trie trie;
  for (const auto& p : spec.coindex_paths) {
    Trie* t = &trie;
    for (const auto& seg : p.segments) t = &t->kids[seg];
  }
  for (const auto& p : spec.value_paths) {
    Trie* t = &trie;
    for (const auto& seg : p.segments) t = &t->kids[seg];
    t->value_end = true;
  }

  // Phase 1: per source node, union the retained arcs and value marks over
  // every retained path that reaches it.
  struct Marks {
    std::set<std::string> arcs;
    bool keep_value = false;
  };
  std::map<NodeId, Marks> marks;
  std::set<std::pair<const Trie*, NodeId>> seen;
  std::function<void(const Trie&, NodeId)> walk = [&](const Trie& t, NodeId n) {
    if (!seen.emplace(&t, n).second) return;
    Marks& m = marks[n];
    if (t.value_end && fs.node(n).kind == FsKind::Atom) m.keep_value = true;
    for (const auto& [f, kid] : t.kids) {
      NodeId child = fs.node(n).arc(f);
      if (child == kNoNode) continue;  // path absent: skipped silently
      m.arcs.insert(f);
      walk(kid, child);
    }
  };
  walk(trie, fs.root());

  // Phase 2: materialize, sharing one result node per source node.
  FsBuilder builder;
  std::map<NodeId, NodeId> built;
  std::function<NodeId(NodeId)> materialize = [&](NodeId n) -> NodeId {
    auto it = built.find(n);
    if (it != built.end()) return it->second;
    const Marks& m = marks.at(n);
    NodeId id = m.keep_value ? builder.add_atom(fs.node(n).atom) : builder.add_top();
    built.emplace(n, id);
    for (const auto& f : m.arcs)
      builder.add_arc(id, f, materialize(fs.node(n).arc(f)));
    return id;
  };
  NodeId root = materialize(fs.root());

  std::vector<NodeId> remap;
  Restricted out{builder.build(root, &remap), {}};
  out.map.assign(fs.size(), kNoNode);
  for (const auto& [src, bid] : built) out.map[src] = remap[bid];
  return out;
}

FeatureStructure restrict_to(const FeatureStructure& fs, const RetentionSpec& spec) {
  return restrict_traced(fs, spec).fs;
}

// ---------------------------------------------------------------------------
// render / parse

std::string render(const FeatureStructure& fs) {
  std::vector<int> indegree(fs.size(), 0);
  for (int i = 0; i < fs.size(); ++i)
    for (const auto& [_, c] : fs.node(i).arcs) ++indegree[c];

  std::vector<int> tag(fs.size(), 0);
  int next_tag = 1;
  std::string out;
  std::function<void(NodeId)> emit = [&](NodeId n) {
    if (indegree[n] >= 2) {
      if (tag[n] != 0) {  // later occurrence: bare reference
        out += '#';
        out += std::to_string(tag[n]);
        return;
      }
      tag[n] = next_tag++;
      out += '#';
      out += std::to_string(tag[n]);
      if (fs.node(n).kind == FsKind::Top) return;  // bare tag means top
      out += ' ';
    }
    const auto& node = fs.node(n);
    switch (node.kind) {
      case FsKind::Top:
        out += "[]";
        break;
      case FsKind::Atom:
        out += node.atom;
        break;
      case FsKind::Complex: {
        out += '[';
        bool first = true;
        for (const auto& [f, c] : node.arcs) {
          if (!first) out += ", ";
          first = false;
          out += f;
          out += ':';
          emit(c);
        }
        out += ']';
        break;
      }
    }
  };
  emit(fs.root());
  return out;
}

AvmReader::AvmReader(std::string_view text) : text_(text) {}

void AvmReader::skip_ws() {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
    ++pos_;
}

void AvmReader::fail(const std::string& msg, size_t where) const {
  int line = 1, col = 1;
  for (size_t i = 0; i < where && i < text_.size(); ++i) {
    if (text_[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw FsSyntaxError(msg, line, col);
}

static bool is_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string AvmReader::read_symbol() {
  skip_ws();
  size_t start = pos_;
  while (pos_ < text_.size() && is_symbol_char(text_[pos_])) ++pos_;
  if (pos_ == start) fail("expected a symbol", start);
  return std::string(text_.substr(start, pos_ - start));
}

bool AvmReader::at_end() {
  skip_ws();
  return pos_ >= text_.size();
}

void AvmReader::expect_end() {
  if (!at_end()) fail("trailing input after feature structure", pos_);
}

void AvmReader::expect(std::string_view token) {
  if (!try_consume(token))
    fail("expected '" + std::string(token) + "'", pos_);
}

bool AvmReader::try_consume(std::string_view token) {
  skip_ws();
  if (text_.substr(pos_, token.size()) != token) return false;
  pos_ += token.size();
  return true;
}

NodeId AvmReader::read_node() {
  skip_ws();
  if (pos_ >= text_.size()) fail("unexpected end of input", pos_);

  int tag_id = -1;
  NodeId node = kNoNode;
  if (text_[pos_] == '#') {
    size_t tag_pos = pos_;
    ++pos_;
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected digits after '#'", tag_pos);
    tag_id = std::stoi(std::string(text_.substr(start, pos_ - start)));
    auto it = tags_.find(tag_id);
    if (it == tags_.end()) {
      node = builder_.add_top();
      tags_.emplace(tag_id, node);
    } else {
      node = it->second;
    }
    skip_ws();
    // Content is optional after a tag; a bare tag is a reference (or top).
    bool content_follows =
        pos_ < text_.size() && (text_[pos_] == '[' || is_symbol_char(text_[pos_]));
    if (!content_follows) return node;
    if (!defined_tags_.insert(tag_id).second)
      fail("duplicate definition of #" + std::to_string(tag_id), pos_);
  }

  if (node == kNoNode) node = builder_.add_top();

  if (text_[pos_] == '[') {
    size_t open = pos_;
    ++pos_;
    skip_ws();
    if (try_consume("]")) return node;  // "[]" is top
    while (true) {
      size_t fpos = pos_;
      std::string feature = read_symbol();
      expect(":");
      if (builder_.has_arc(node, feature))
        fail("duplicate feature '" + feature + "'", fpos);
      NodeId child = read_node();
      builder_.add_arc(node, feature, child);
      skip_ws();
      if (try_consume(",")) continue;
      if (try_consume("]")) break;
      if (pos_ >= text_.size()) fail("unclosed '['", open);
      fail("expected ',' or ']'", pos_);
    }
    return node;
  }

  std::string symbol = read_symbol();
  builder_.set_atom(node, std::move(symbol));
  return node;
}

FeatureStructure AvmReader::finish(NodeId root, std::vector<NodeId>* remap) {
  try {
    return builder_.build(root, remap);
  } catch (const DataError&) {
    fail("cyclic reference through #n tags", pos_);
  }
}

FeatureStructure parse_fs(std::string_view text) {
  AvmReader reader(text);
  NodeId root = reader.read_node();
  reader.expect_end();
  return reader.finish(root);
}

}  // namespace ebl
