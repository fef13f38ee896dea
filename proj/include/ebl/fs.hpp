#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/common.hpp"

namespace ebl {

using NodeId = int;
constexpr NodeId kNoNode = -1;

enum class FsKind { Top, Atom, Complex };

/// A feature path: an ordered list of feature names addressing a node from
/// the root. The empty path addresses the root itself.
struct FeaturePath {
  std::vector<std::string> segments;

  static FeaturePath parse(std::string_view dotted);
  std::string to_string() const;

  auto operator<=>(const FeaturePath&) const = default;
};

/// Which information survives when a parse is pruned for storage:
/// coindex_paths keep node identity (reentrancy); value_paths additionally
/// keep the atomic value at the path. value_paths must be a subset of
/// coindex_paths and both must be non-empty.
struct RetentionSpec {
  std::vector<FeaturePath> coindex_paths;
  std::vector<FeaturePath> value_paths;

  // Throws ConfigError on an invariant violation.
  void validate() const;
  // Canonical rendering used for the index fingerprint.
  std::string canonical_text() const;
  std::string fingerprint() const;
};

// Loads a retention spec from its line-oriented text form
// ("coindex <path>" / "value <path>", "#" comments). Path segments are
// checked against the supplied feature vocabulary.
RetentionSpec load_retention(std::string_view text,
                             const std::set<std::string>& vocabulary);

/// A rooted acyclic attribute-value graph. Nodes are atomic (a symbol),
/// complex (outgoing feature arcs), or top (unconstrained). Two paths may
/// share a node (reentrancy). Instances are immutable and canonical: nodes
/// are numbered in depth-first first-visit order with arcs sorted by feature
/// name, so isomorphic structures compare equal and render identically.
class FeatureStructure {
 public:
  struct Node {
    FsKind kind = FsKind::Top;
    std::string atom;                                // kind == Atom
    std::vector<std::pair<std::string, NodeId>> arcs;  // kind == Complex

    NodeId arc(std::string_view feature) const;  // kNoNode if absent
    bool operator==(const Node&) const = default;
  };

  FeatureStructure();  // a single top node
  static FeatureStructure make_top();
  static FeatureStructure make_atom(std::string symbol);

  NodeId root() const { return root_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Node reached from `from` along `path`, or kNoNode.
  NodeId at(NodeId from, const FeaturePath& path) const;
  NodeId at(const FeaturePath& path) const { return at(root_, path); }
  /// Atomic symbol at `path`, or nullopt when the path is absent or the
  /// node is not atomic.
  std::optional<std::string> atom_at(const FeaturePath& path) const;

  // Canonical identity: equality coincides with isomorphism.
  bool operator==(const FeatureStructure&) const = default;

 private:
  friend class FsBuilder;
  std::vector<Node> nodes_;
  NodeId root_ = 0;
};

/// Mutable staging area for constructing feature structures. build()
/// canonicalizes (drops unreachable nodes, renumbers depth-first) and
/// validates acyclicity.
class FsBuilder {
 public:
  NodeId add_top();
  NodeId add_atom(std::string symbol);
  void set_atom(NodeId id, std::string symbol);  // top -> atom
  void add_arc(NodeId from, std::string feature, NodeId to);
  bool has_arc(NodeId from, std::string_view feature) const;

  /// Copies all of `fs` into the builder; returns the copied root.
  NodeId import(const FeatureStructure& fs);

  /// remap, when non-null, receives builder-id -> canonical-id (kNoNode for
  /// nodes unreachable from root). Throws DataError on a cycle.
  FeatureStructure build(NodeId root, std::vector<NodeId>* remap = nullptr) const;

 private:
  struct Slot {
    std::optional<std::string> atom;
    std::vector<std::pair<std::string, NodeId>> arcs;
  };
  std::vector<Slot> slots_;
};

/// Low-level graph unification over several structures at once. Used by
/// unify/unify_at and by the chart parser's rule application. A failed
/// merge poisons the engine; discard it.
class UnifyEngine {
 public:
  /// Copies fs into the engine; node i of fs becomes engine node base+i.
  NodeId add(const FeatureStructure& fs);
  /// Destructive merge of the two equivalence classes. Returns false on an
  /// atomic clash or an atom-vs-complex clash.
  bool merge(NodeId x, NodeId y);

  struct Extraction {
    FeatureStructure fs;
    std::vector<NodeId> map;  // engine node -> result node (kNoNode if dropped)
  };
  /// Builds the canonical structure reachable from `root`. Returns nullopt
  /// when the merged graph is cyclic at or below `root` (occurs-check
  /// failure: no acyclic unifier exists).
  std::optional<Extraction> extract(NodeId root) const;

 private:
  struct Slot {
    std::optional<std::string> atom;
    std::map<std::string, NodeId> arcs;
  };
  NodeId find(NodeId x) const;
  std::vector<Slot> slots_;
  mutable std::vector<NodeId> parent_;
};

/// Most general common specialization of a and b, or nullopt on clash.
/// Inputs are never modified.
std::optional<FeatureStructure> unify(const FeatureStructure& a,
                                      const FeatureStructure& b);

struct TracedUnify {
  FeatureStructure fs;
  std::vector<NodeId> map_a;  // node of a -> node of result
  std::vector<NodeId> map_b;  // node of b -> node of result
};
std::optional<TracedUnify> unify_traced(const FeatureStructure& a,
                                        const FeatureStructure& b);

/// Unifies b's root into node `site` of a; the result stays rooted at a's
/// root. This is how lexical entries are folded into a stored parse.
std::optional<TracedUnify> unify_at(const FeatureStructure& a, NodeId site,
                                    const FeatureStructure& b);

/// True iff every path, atomic value, and reentrancy constraint of a also
/// holds in b (a is at least as general as b).
bool subsumes(const FeatureStructure& a, const FeatureStructure& b);

/// Mutual subsumption.
bool equivalent(const FeatureStructure& a, const FeatureStructure& b);

/// Anti-unification: the least general structure subsuming both. Keeps an
/// arc only where both inputs have it, an atomic value only where both
/// agree (a shared arc with differing values keeps the arc over a top
/// node), and a reentrancy only where both inputs share it.
FeatureStructure generalize(const FeatureStructure& a,
                            const FeatureStructure& b);

struct Restricted {
  FeatureStructure fs;
  std::vector<NodeId> map;  // source node -> result node (kNoNode if pruned)
};

/// Prunes fs to the retention spec: only arcs lying on prefixes of
/// coindex_paths survive. A node reached by several retained paths keeps its
/// identity (one result node per source node); atomic values survive only at
/// value_paths. Paths absent from fs are skipped silently. The result always
/// subsumes fs.
Restricted restrict_traced(const FeatureStructure& fs, const RetentionSpec& spec);
FeatureStructure restrict_to(const FeatureStructure& fs, const RetentionSpec& spec);

/// Canonical text form. Atoms are bare symbols, complex nodes are
/// "[feat:value, ...]" with features in lexicographic order, top is "[]".
/// Shared nodes carry "#n" tags numbered by first visit, with the node's
/// content following the tag at its first occurrence.
std::string render(const FeatureStructure& fs);

/// Inverse of render. Accepts whitespace between tokens, atoms matching
/// [A-Za-z0-9_]+, and "#n" references in any order as long as at most one
/// occurrence of a tag carries content. Faults with line/column diagnostics
/// on syntax errors or cyclic references.
FeatureStructure parse_fs(std::string_view text);

/// Sequential reader for one or more AVMs inside a larger piece of text,
/// all sharing one #n tag scope. The grammar loader uses this to parse
/// "mother := daughter1 daughter2" with rule-internal co-indexing.
class AvmReader {
 public:
  explicit AvmReader(std::string_view text);

  /// Consumes one AVM; returns its builder node.
  NodeId read_node();
  /// Consumes `token` (after whitespace) or throws.
  void expect(std::string_view token);
  /// True if `token` is next; consumes it when present.
  bool try_consume(std::string_view token);
  bool at_end();
  /// Throws unless all input has been consumed.
  void expect_end();

  FsBuilder& builder() { return builder_; }
  /// Finalizes a structure rooted at `root`. Throws FsSyntaxError if a
  /// cycle was formed through tags.
  FeatureStructure finish(NodeId root, std::vector<NodeId>* remap = nullptr);

 private:
  void skip_ws();
  [[noreturn]] void fail(const std::string& msg, size_t where) const;
  std::string read_symbol();

  std::string_view text_;
  size_t pos_ = 0;
  FsBuilder builder_;
  std::map<int, NodeId> tags_;
  std::set<int> defined_tags_;
};

}  // namespace ebl
