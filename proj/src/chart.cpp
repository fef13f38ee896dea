#include "ebl/chart.hpp"

#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace ebl {

// ---------------------------------------------------------------------------
// Grammar loading

namespace {

constexpr const char* kMother = "m";
constexpr const char* kDaughter1 = "1";
constexpr const char* kDaughter2 = "2";

Rule parse_rule(const std::string& name, std::string_view body, int lineno) {
  AvmReader reader(body);
  try {
    NodeId mother = reader.read_node();
    reader.expect(":=");
    NodeId d1 = reader.read_node();
    NodeId d2 = kNoNode;
    if (!reader.at_end()) d2 = reader.read_node();
    reader.expect_end();

    NodeId root = reader.builder().add_top();
    reader.builder().add_arc(root, kMother, mother);
    reader.builder().add_arc(root, kDaughter1, d1);
    if (d2 != kNoNode) reader.builder().add_arc(root, kDaughter2, d2);

    Rule rule;
    rule.name = name;
    rule.arity = d2 == kNoNode ? 1 : 2;
    rule.scheme = reader.finish(root);
    return rule;
  } catch (const FsSyntaxError& e) {
    throw DataError("rule '" + name + "' (line " + std::to_string(lineno) +
                    "): " + e.what());
  }
}

}  // namespace

Grammar Grammar::load(std::string_view text) {
  Grammar g;
  bool have_start = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::vector<std::string> problems;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    std::string rest;
    std::getline(ls, rest);
    if (head == "start") {
      if (have_start) {
        problems.push_back("line " + std::to_string(lineno) + ": duplicate start");
        continue;
      }
      try {
        g.start_ = parse_fs(rest);
        have_start = true;
      } catch (const FsSyntaxError& e) {
        problems.push_back("start (line " + std::to_string(lineno) + "): " +
                           e.what());
      }
    } else if (head == "rule") {
      std::istringstream rs(rest);
      std::string name, arrow;
      if (!(rs >> name >> arrow) || arrow != "->") {
        problems.push_back("line " + std::to_string(lineno) +
                           ": expected 'rule <name> -> ...'");
        continue;
      }
      std::string body;
      std::getline(rs, body);
      try {
        g.rules_.push_back(parse_rule(name, body, lineno));
      } catch (const DataError& e) {
        problems.push_back(e.what());
      }
    } else {
      problems.push_back("line " + std::to_string(lineno) +
                         ": unknown directive '" + head + "'");
    }
  }
  if (!have_start && problems.empty())
    problems.push_back("grammar declares no start constraint");
  if (!problems.empty()) {
    std::string msg = "invalid grammar:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Rule application

std::optional<RuleApplication> apply_rule(
    const Rule& rule, const std::vector<const FeatureStructure*>& daughters) {
  if (static_cast<int>(daughters.size()) != rule.arity)
    throw DataError("rule '" + rule.name + "' expects " +
                    std::to_string(rule.arity) + " daughters");

  UnifyEngine engine;
  NodeId scheme_base = engine.add(rule.scheme);
  const auto& scheme_root = rule.scheme.node(rule.scheme.root());
  NodeId mother_node = scheme_base + scheme_root.arc(kMother);
  NodeId d_nodes[2] = {scheme_base + scheme_root.arc(kDaughter1), kNoNode};
  if (rule.arity == 2) d_nodes[1] = scheme_base + scheme_root.arc(kDaughter2);

  std::vector<NodeId> bases;
  for (const FeatureStructure* d : daughters) bases.push_back(engine.add(*d));
  for (size_t i = 0; i < daughters.size(); ++i) {
    if (!engine.merge(d_nodes[i], bases[i] + daughters[i]->root()))
      return std::nullopt;
  }
  auto ex = engine.extract(mother_node);
  if (!ex) return std::nullopt;

  RuleApplication out;
  out.mother = std::move(ex->fs);
  for (size_t i = 0; i < daughters.size(); ++i) {
    out.daughter_maps.emplace_back(ex->map.begin() + bases[i],
                                   ex->map.begin() + bases[i] + daughters[i]->size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chart parsing

namespace {

struct Edge {
  FeatureStructure fs;
  int rule = -1;  // index into grammar rules, -1 for leaves
  int left = -1;  // edge pool indices
  int right = -1;
  int start = 0;
  int end = 0;
  int unary_depth = 0;
  std::vector<NodeId> anchors;  // per covered position, node of fs
};

ParseTree materialize(const std::vector<Edge>& pool, const Grammar& g, int edge_id,
                      const std::vector<FeatureStructure>& leaves) {
  std::function<TreeNode(int)> tree = [&](int id) {
    const Edge& e = pool[id];
    TreeNode node;
    node.start = e.start;
    node.end = e.end;
    if (e.rule >= 0) {
      node.rule = g.rules()[e.rule].name;
      node.children.push_back(tree(e.left));
      if (e.right >= 0) node.children.push_back(tree(e.right));
    }
    return node;
  };
  const Edge& top = pool[edge_id];
  ParseTree out;
  out.root_fs = top.fs;
  out.derivation = tree(edge_id);
  out.leaves = leaves;
  out.leaf_anchors = top.anchors;
  return out;
}

}  // namespace

std::vector<ParseTree> parse(const Grammar& g,
                             const std::vector<FeatureStructure>& leaves) {
  if (leaves.empty()) throw DataError("parse: empty input");
  const int n = static_cast<int>(leaves.size());

  int unary_rules = 0;
  for (const auto& r : g.rules())
    if (r.arity == 1) ++unary_rules;

  std::vector<Edge> pool;
  // cells[start][length-1] -> edge ids in creation order
  std::vector<std::vector<std::vector<int>>> cells(
      n, std::vector<std::vector<int>>(n));

  auto add_edge = [&](Edge e) {
    int id = static_cast<int>(pool.size());
    cells[e.start][e.end - e.start - 1].push_back(id);
    pool.push_back(std::move(e));
    return id;
  };

  // Applies every unary rule to newly added edges of one cell until no new
  // edge appears; chain depth is capped by the number of unary rules.
  auto unary_closure = [&](int start, int len, size_t first_new) {
    std::deque<int> queue(cells[start][len - 1].begin() + first_new,
                          cells[start][len - 1].end());
    while (!queue.empty()) {
      int child_id = queue.front();
      queue.pop_front();
      if (pool[child_id].unary_depth >= unary_rules) continue;
      for (size_t ri = 0; ri < g.rules().size(); ++ri) {
        const Rule& rule = g.rules()[ri];
        if (rule.arity != 1) continue;
        auto applied = apply_rule(rule, {&pool[child_id].fs});
        if (!applied) continue;
        Edge e;
        e.fs = std::move(applied->mother);
        e.rule = static_cast<int>(ri);
        e.left = child_id;
        e.start = start;
        e.end = start + len;
        e.unary_depth = pool[child_id].unary_depth + 1;
        e.anchors.reserve(len);
        for (NodeId a : pool[child_id].anchors)
          e.anchors.push_back(a == kNoNode ? kNoNode : applied->daughter_maps[0][a]);
        queue.push_back(add_edge(std::move(e)));
      }
    }
  };

  for (int i = 0; i < n; ++i) {
    Edge leaf;
    leaf.fs = leaves[i];
    leaf.start = i;
    leaf.end = i + 1;
    leaf.anchors = {leaves[i].root()};
    add_edge(std::move(leaf));
    unary_closure(i, 1, 0);
  }

  for (int len = 2; len <= n; ++len) {
    for (int start = 0; start + len <= n; ++start) {
      for (int split = 1; split < len; ++split) {
        for (size_t ri = 0; ri < g.rules().size(); ++ri) {
          const Rule& rule = g.rules()[ri];
          if (rule.arity != 2) continue;
          // Snapshot sizes: cells being filled are never on this span.
          const auto& left_ids = cells[start][split - 1];
          const auto& right_ids = cells[start + split][len - split - 1];
          for (int li : left_ids) {
            for (int ri2 : right_ids) {
              auto applied = apply_rule(rule, {&pool[li].fs, &pool[ri2].fs});
              if (!applied) continue;
              Edge e;
              e.fs = std::move(applied->mother);
              e.rule = static_cast<int>(ri);
              e.left = li;
              e.right = ri2;
              e.start = start;
              e.end = start + len;
              e.anchors.reserve(len);
              for (NodeId a : pool[li].anchors)
                e.anchors.push_back(a == kNoNode ? kNoNode
                                                 : applied->daughter_maps[0][a]);
              for (NodeId a : pool[ri2].anchors)
                e.anchors.push_back(a == kNoNode ? kNoNode
                                                 : applied->daughter_maps[1][a]);
              add_edge(std::move(e));
            }
          }
        }
      }
      unary_closure(start, len, 0);
    }
  }

  std::vector<ParseTree> parses;
  for (int id : cells[0][n - 1]) {
    if (unify(g.start(), pool[id].fs)) parses.push_back(materialize(pool, g, id, leaves));
  }
  return parses;
}

std::vector<ParseTree> parse_tags(const Grammar& g, const TagWordLexicon& tagwords,
                                  const TagSequence& seq) {
  if (seq.empty()) throw DataError("parse_tags: empty tag sequence");
  std::vector<FeatureStructure> leaves;
  leaves.reserve(seq.size());
  for (const auto& t : seq.tags) leaves.push_back(tagwords.entry(t));
  return parse(g, leaves);
}

FeatureStructure replay(const Grammar& g, const ParseTree& tree) {
  std::map<std::string, const Rule*> by_name;
  for (const auto& r : g.rules()) by_name.emplace(r.name, &r);

  std::function<FeatureStructure(const TreeNode&)> run =
      [&](const TreeNode& node) -> FeatureStructure {
    if (node.rule.empty()) return tree.leaves[node.start];
    auto it = by_name.find(node.rule);
    if (it == by_name.end())
      throw DataError("replay: unknown rule '" + node.rule + "'");
    std::vector<FeatureStructure> kids;
    for (const auto& c : node.children) kids.push_back(run(c));
    std::vector<const FeatureStructure*> ptrs;
    for (const auto& k : kids) ptrs.push_back(&k);
    auto applied = apply_rule(*it->second, ptrs);
    if (!applied)
      throw DataError("replay: rule '" + node.rule + "' no longer applies");
    return applied->mother;
  };
  return run(tree.derivation);
}

std::string skeleton(const TreeNode& node) {
  if (node.rule.empty()) return std::to_string(node.start);
  std::string out = "(" + node.rule;
  for (const auto& c : node.children) out += " " + skeleton(c);
  out += ")";
  return out;
}

}  // namespace ebl
