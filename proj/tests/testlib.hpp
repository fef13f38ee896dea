#pragma once

// Shared test helpers: a deterministic random feature-structure generator,
// a constraint-weakening generator, and a path-enumeration subsumption
// oracle kept independent of the library's homomorphism-based check.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ebl/fs.hpp"

namespace ebltest {

using ebl::FeatureStructure;
using ebl::FsKind;
using ebl::NodeId;

// Mutable node-graph mirror used by the generators. Arcs always point from
// lower to higher index, so any edit respecting that stays acyclic.
struct Draft {
  struct Node {
    std::optional<std::string> atom;
    std::vector<std::pair<std::string, int>> arcs;
  };
  std::vector<Node> nodes;

  static Draft from(const FeatureStructure& fs) {
    Draft d;
    d.nodes.resize(fs.size());
    for (int i = 0; i < fs.size(); ++i) {
      const auto& n = fs.node(i);
      if (n.kind == FsKind::Atom) d.nodes[i].atom = n.atom;
      for (const auto& [f, c] : n.arcs) d.nodes[i].arcs.emplace_back(f, c);
    }
    return d;
  }

  FeatureStructure build() const {
    ebl::FsBuilder b;
    std::vector<NodeId> ids;
    for (const auto& n : nodes)
      ids.push_back(n.atom ? b.add_atom(*n.atom) : b.add_top());
    for (size_t i = 0; i < nodes.size(); ++i)
      for (const auto& [f, c] : nodes[i].arcs) b.add_arc(ids[i], f, ids[c]);
    return b.build(ids.empty() ? b.add_top() : ids[0]);
  }
};

class FsGen {
 public:
  explicit FsGen(unsigned seed) : rng_(seed) {}

  std::mt19937& rng() { return rng_; }

  // Random structure of bounded depth/branching with reentrancy injected by
  // redirecting tree arcs to later-created nodes (provably acyclic).
  FeatureStructure generate(int max_depth = 6, int max_branch = 4,
                            double reentrancy_rate = 0.2) {
    Draft d;
    grow(d, max_depth, max_branch);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (size_t u = 0; u < d.nodes.size(); ++u) {
      for (auto& [f, c] : d.nodes[u].arcs) {
        if (u + 2 < d.nodes.size() && coin(rng_) < reentrancy_rate) {
          std::uniform_int_distribution<size_t> pick(u + 1, d.nodes.size() - 1);
          c = static_cast<int>(pick(rng_));
        }
      }
    }
    return d.build();
  }

  // A structure that subsumes fs by construction: arcs dropped, atoms
  // cleared, or shared nodes split, `ops` times.
  FeatureStructure weaken(const FeatureStructure& fs, int ops) {
    Draft d = Draft::from(fs);
    std::uniform_int_distribution<int> which(0, 2);
    for (int i = 0; i < ops; ++i) {
      switch (which(rng_)) {
        case 0: drop_arc(d); break;
        case 1: clear_atom(d); break;
        case 2: split_share(d); break;
      }
    }
    return d.build();
  }

 private:
  void grow(Draft& d, int depth, int branch) {
    // Creates one node (preorder position = index) and possibly children.
    int id = static_cast<int>(d.nodes.size());
    d.nodes.emplace_back();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    double r = coin(rng_);
    if (depth == 0 || r < 0.5) {
      if (r < 0.15 && depth != 0) return;  // top
      d.nodes[id].atom = atoms_[pick(atoms_.size())];
      return;
    }
    int n_arcs = 1 + static_cast<int>(pick(static_cast<size_t>(branch)));
    std::vector<std::string> feats = features_;
    std::shuffle(feats.begin(), feats.end(), rng_);
    for (int a = 0; a < n_arcs && a < static_cast<int>(feats.size()); ++a) {
      int child = static_cast<int>(d.nodes.size());
      grow(d, depth - 1, branch);
      d.nodes[id].arcs.emplace_back(feats[a], child);
    }
    if (d.nodes[id].arcs.empty()) d.nodes[id].atom = atoms_[pick(atoms_.size())];
  }

  void drop_arc(Draft& d) {
    std::vector<size_t> with_arcs;
    for (size_t i = 0; i < d.nodes.size(); ++i)
      if (!d.nodes[i].arcs.empty() && i != 0) with_arcs.push_back(i);
    // Dropping below the root keeps the root path structure interesting;
    // allow root drops only when nothing else has arcs.
    if (with_arcs.empty() && !d.nodes[0].arcs.empty()) with_arcs.push_back(0);
    if (with_arcs.empty()) return;
    auto& node = d.nodes[with_arcs[pick(with_arcs.size())]];
    node.arcs.erase(node.arcs.begin() + pick(node.arcs.size()));
  }

  void clear_atom(Draft& d) {
    std::vector<size_t> atoms;
    for (size_t i = 0; i < d.nodes.size(); ++i)
      if (d.nodes[i].atom) atoms.push_back(i);
    if (atoms.empty()) return;
    d.nodes[atoms[pick(atoms.size())]].atom.reset();
  }

  void split_share(Draft& d) {
    std::vector<int> indegree(d.nodes.size(), 0);
    for (const auto& n : d.nodes)
      for (const auto& [f, c] : n.arcs) ++indegree[c];
    std::vector<std::pair<size_t, size_t>> shared_arcs;  // (node, arc idx)
    for (size_t i = 0; i < d.nodes.size(); ++i)
      for (size_t a = 0; a < d.nodes[i].arcs.size(); ++a)
        if (indegree[d.nodes[i].arcs[a].second] >= 2)
          shared_arcs.emplace_back(i, a);
    if (shared_arcs.empty()) return;
    auto [ni, ai] = shared_arcs[pick(shared_arcs.size())];
    int target = d.nodes[ni].arcs[ai].second;
    int copy = static_cast<int>(d.nodes.size());
    d.nodes.push_back(d.nodes[target]);  // shallow copy keeps arc targets
    d.nodes[ni].arcs[ai].second = copy;
  }

  size_t pick(size_t n) {
    std::uniform_int_distribution<size_t> dist(0, n - 1);
    return dist(rng_);
  }

  std::mt19937 rng_;
  std::vector<std::string> features_ = {"agr", "cat",  "comp", "filler",
                                        "gap", "head", "num",  "per"};
  std::vector<std::string> atoms_ = {"sg", "pl",  "np", "vp", "none",
                                     "acc", "nom", "x",  "y"};
};

// ---------------------------------------------------------------------------
// Independent subsumption oracle: enumerates every arc-path of `a` and
// checks path existence, atomic values, and pairwise reentrancy in `b`.

inline void enumerate_paths(const FeatureStructure& fs, NodeId node,
                            std::vector<std::string>& prefix,
                            std::vector<std::pair<std::vector<std::string>, NodeId>>& out) {
  out.emplace_back(prefix, node);
  for (const auto& [f, c] : fs.node(node).arcs) {
    prefix.push_back(f);
    enumerate_paths(fs, c, prefix, out);
    prefix.pop_back();
  }
}

inline bool oracle_subsumes(const FeatureStructure& a, const FeatureStructure& b) {
  std::vector<std::pair<std::vector<std::string>, NodeId>> paths;
  std::vector<std::string> prefix;
  enumerate_paths(a, a.root(), prefix, paths);

  std::map<NodeId, std::vector<NodeId>> images;  // a-node -> b-nodes reached
  for (const auto& [path, a_node] : paths) {
    NodeId b_node = b.at(ebl::FeaturePath{path});
    if (b_node == ebl::kNoNode) return false;  // path missing in b
    const auto& na = a.node(a_node);
    if (na.kind == FsKind::Atom) {
      const auto& nb = b.node(b_node);
      if (nb.kind != FsKind::Atom || nb.atom != na.atom) return false;
    }
    images[a_node].push_back(b_node);
  }
  // Reentrancy: all paths to one a-node must land on one b-node.
  for (const auto& [a_node, b_nodes] : images)
    for (NodeId bn : b_nodes)
      if (bn != b_nodes.front()) return false;
  return true;
}

inline FeatureStructure fs_of(std::string_view text) { return ebl::parse_fs(text); }

}  // namespace ebltest
