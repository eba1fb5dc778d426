#pragma once

#include <vector>

#include "cutofflab/errors.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

inline constexpr long long kDefaultOracleCap = 5000;

/// Concrete adjacency-list realization of a TreeProfile, used as the
/// substrate for brute-force oracles. Vertices are numbered breadth-first,
/// so each level occupies a contiguous index range.
struct ExplicitTree {
  int n = 0;
  int height = 0;
  std::vector<std::vector<int>> adj;
  std::vector<int> level;
  std::vector<int> parent;       // -1 for the root
  std::vector<int> level_first;  // first vertex index of each level

  int degree(int v) const { return static_cast<int>(adj[static_cast<size_t>(v)].size()); }

  /// Children of v in BFS order (all neighbors except the parent).
  std::vector<int> children_of(int v) const {
    std::vector<int> out;
    for (int u : adj[static_cast<size_t>(v)])
      if (u != parent[static_cast<size_t>(v)]) out.push_back(u);
    return out;
  }
};

inline ExplicitTree explicit_tree(const TreeProfile& p, long long oracle_cap = kDefaultOracleCap) {
  if (p.vertex_count > oracle_cap)
    throw OracleTooLarge("tree " + p.id() + " has " + std::to_string(p.vertex_count) +
                         " vertices, above the oracle cap " + std::to_string(oracle_cap));
  ExplicitTree t;
  t.n = static_cast<int>(p.vertex_count);
  t.height = p.height;
  t.adj.resize(static_cast<size_t>(t.n));
  t.level.resize(static_cast<size_t>(t.n));
  t.parent.assign(static_cast<size_t>(t.n), -1);
  t.level_first.resize(static_cast<size_t>(p.num_levels()));

  int next = 0;
  for (int k = 0; k <= p.height; ++k) {
    t.level_first[static_cast<size_t>(k)] = next;
    next += static_cast<int>(p.level_sizes[static_cast<size_t>(k)]);
  }
  for (int k = 0; k <= p.height; ++k) {
    const int first = t.level_first[static_cast<size_t>(k)];
    const int count = static_cast<int>(p.level_sizes[static_cast<size_t>(k)]);
    for (int i = 0; i < count; ++i) {
      const int v = first + i;
      t.level[static_cast<size_t>(v)] = k;
      if (k < p.height) {
        const int c = p.children[static_cast<size_t>(k)];
        const int child_first = t.level_first[static_cast<size_t>(k + 1)] + i * c;
        for (int j = 0; j < c; ++j) {
          const int w = child_first + j;
          t.adj[static_cast<size_t>(v)].push_back(w);
          t.adj[static_cast<size_t>(w)].push_back(v);
          t.parent[static_cast<size_t>(w)] = v;
        }
      }
    }
  }
  // BFS order lists the parent before the children, so each adjacency list
  // holds the parent first (pushed while processing the previous level).
  return t;
}

/// Recover the profile from an explicit tree via level sizes; verifies that
/// per-level degrees are constant and match the derived profile.
inline TreeProfile profile_from_tree(const ExplicitTree& t) {
  std::vector<int> children;
  for (int k = 0; k < t.height; ++k) {
    const int first = t.level_first[static_cast<size_t>(k)];
    const int next_first = t.level_first[static_cast<size_t>(k + 1)];
    const int count = (k + 1 < static_cast<int>(t.level_first.size()) - 1
                           ? t.level_first[static_cast<size_t>(k + 2)]
                           : t.n) -
                      next_first;
    const int this_count = next_first - first;
    if (count % this_count != 0)
      throw Error("explicit tree level sizes are not spherically symmetric");
    children.push_back(count / this_count);
  }
  TreeProfile p = build_profile(children);
  for (int v = 0; v < t.n; ++v) {
    const int k = t.level[static_cast<size_t>(v)];
    if (t.degree(v) != p.level_degrees[static_cast<size_t>(k)])
      throw Error("explicit tree degree mismatch at vertex " + std::to_string(v));
  }
  return p;
}

}  // namespace cutofflab
