#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebl/fs.hpp"
#include "ebl/tagset.hpp"

namespace ebl {

/// A unary or binary grammar rule. Mother and daughters are stored as one
/// shared graph so rule-internal co-indexing (#n across the rule text)
/// survives; the scheme's synthetic root has arcs "m", "1" and, for binary
/// rules, "2".
struct Rule {
  std::string name;
  int arity = 0;
  FeatureStructure scheme;
};

class Grammar {
 public:
  /// Grammar file: "start <avm>" plus
  /// "rule <name> -> <avm mother> := <avm d1> [<avm d2>]" lines.
  static Grammar load(std::string_view text);

  const std::vector<Rule>& rules() const { return rules_; }
  const FeatureStructure& start() const { return start_; }

 private:
  std::vector<Rule> rules_;
  FeatureStructure start_;
};

/// One rule application: the mother structure plus, for each daughter, the
/// map from daughter nodes to mother nodes (kNoNode where dropped).
struct RuleApplication {
  FeatureStructure mother;
  std::vector<std::vector<NodeId>> daughter_maps;
};
std::optional<RuleApplication> apply_rule(
    const Rule& rule, const std::vector<const FeatureStructure*>& daughters);

/// A derivation node: a rule application over a span, or a leaf.
struct TreeNode {
  std::string rule;  // empty for leaves
  int start = 0;
  int end = 0;
  std::vector<TreeNode> children;
};

struct ParseTree {
  FeatureStructure root_fs;
  TreeNode derivation;
  std::vector<FeatureStructure> leaves;   // position-ordered input structures
  std::vector<NodeId> leaf_anchors;       // leaf root's node in root_fs (kNoNode if dropped)
};

/// Bottom-up unification chart parser. Returns every complete parse whose
/// root unifies with the grammar's start constraint, enumerated
/// deterministically (spans by length then start; within a span, split
/// point, then rule declaration order, then left/right edge order; unary
/// closure rounds after binary filling). Unary chains are bounded by the
/// number of unary rules.
std::vector<ParseTree> parse(const Grammar& g,
                             const std::vector<FeatureStructure>& leaves);

/// parse() over the tag-word entries of `seq`: training parses see the most
/// general instance of each tag class instead of real words.
std::vector<ParseTree> parse_tags(const Grammar& g, const TagWordLexicon& tagwords,
                                  const TagSequence& seq);

/// Re-runs the recorded rule applications of `tree` bottom-up. Returns the
/// reproduced root structure; used to check replay determinism.
FeatureStructure replay(const Grammar& g, const ParseTree& tree);

/// Canonical one-line rendering of a derivation, e.g.
/// "(s_main (np_pron 0) (vp_v 1))"; leaf nodes print their position.
std::string skeleton(const TreeNode& node);

}  // namespace ebl
