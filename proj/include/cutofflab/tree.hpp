#pragma once

#include <string>
#include <vector>

#include "cutofflab/errors.hpp"

namespace cutofflab {

/// A finite spherically symmetric rooted tree, described by the number of
/// children of a vertex at each level. Every structural quantity (level
/// sizes, degrees, edge count, stationary masses) is derived from the
/// children counts, so a TreeProfile is valid by construction.
struct TreeProfile {
  std::vector<int> children;            // c_0..c_{h-1}, all >= 1
  int height = 0;                       // h
  std::vector<long long> level_sizes;   // n_0..n_h, n_0 = 1, n_{k+1} = n_k c_k
  std::vector<int> level_degrees;       // deg_0 = c_0, deg_k = c_k+1, deg_h = 1
  long long edge_count = 0;             // sum_{k>=1} n_k
  long long vertex_count = 1;           // sum_k n_k

  int num_levels() const { return height + 1; }

  bool is_segment() const {
    for (int c : children)
      if (c != 1) return false;
    return true;
  }

  /// Stationary mass of one vertex at level k, deg_k / (2|E|).
  double pi_vertex(int k) const {
    require_walk();
    return static_cast<double>(level_degrees[static_cast<size_t>(k)]) /
           (2.0 * static_cast<double>(edge_count));
  }

  /// Total stationary mass of level k.
  double pi_level(int k) const {
    return static_cast<double>(level_sizes[static_cast<size_t>(k)]) * pi_vertex(k);
  }

  /// Number of level-j descendants of a single level-k vertex (j >= k).
  /// Exact: level sizes are products of children counts.
  long long descendants_at(int k, int j) const {
    return level_sizes[static_cast<size_t>(j)] / level_sizes[static_cast<size_t>(k)];
  }

  /// Stationary mass of the whole subtree rooted at one level-k vertex,
  /// the vertex itself included.
  double subtree_mass(int k) const {
    double total = 0.0;
    for (int j = k; j <= height; ++j)
      total += static_cast<double>(descendants_at(k, j)) * pi_vertex(j);
    return total;
  }

  /// Compact identifier, e.g. "2-2-1"; "." for the single-vertex tree.
  std::string id() const {
    if (children.empty()) return ".";
    std::string s;
    for (size_t i = 0; i < children.size(); ++i) {
      if (i > 0) s += '-';
      s += std::to_string(children[i]);
    }
    return s;
  }

  void require_walk() const {
    if (height == 0)
      throw DegenerateTree("single-vertex tree: the lazy walk and its spectral quantities are undefined");
  }
};

/// Symmetry class of an ordered vertex pair (x, y): the levels of x, of y,
/// and of their nearest common ancestor q.
struct VertexPair {
  int lx = 0;
  int ly = 0;
  int lq = 0;
};

inline TreeProfile build_profile(const std::vector<int>& children_counts) {
  for (int c : children_counts)
    if (c <= 0)
      throw NonPositiveChildrenCount("children count " + std::to_string(c) + " must be >= 1");

  TreeProfile p;
  p.children = children_counts;
  p.height = static_cast<int>(children_counts.size());
  p.level_sizes.resize(children_counts.size() + 1);
  p.level_sizes[0] = 1;
  for (size_t k = 0; k < children_counts.size(); ++k) {
    long long next = 0;
    if (__builtin_mul_overflow(p.level_sizes[k], static_cast<long long>(children_counts[k]), &next))
      throw Error("level sizes overflow 64-bit integers; tree too large");
    p.level_sizes[k + 1] = next;
  }
  p.level_degrees.resize(p.level_sizes.size());
  if (p.height == 0) {
    p.level_degrees[0] = 0;
  } else {
    p.level_degrees[0] = children_counts[0];
    for (int k = 1; k < p.height; ++k)
      p.level_degrees[static_cast<size_t>(k)] = children_counts[static_cast<size_t>(k)] + 1;
    p.level_degrees[static_cast<size_t>(p.height)] = 1;
  }
  p.edge_count = 0;
  p.vertex_count = 0;
  for (size_t k = 0; k < p.level_sizes.size(); ++k) {
    if (__builtin_add_overflow(p.vertex_count, p.level_sizes[k], &p.vertex_count))
      throw Error("vertex count overflows 64-bit integers; tree too large");
    if (k >= 1) p.edge_count += p.level_sizes[k];
  }
  return p;
}

/// All children-count sequences of length 1..max_h with entries in
/// 1..max_children, ordered by length and lexicographically within a length.
inline std::vector<TreeProfile> enumerate_profiles(int max_h, int max_children) {
  if (max_h < 1 || max_children < 1)
    throw PreconditionViolated("enumerate_profiles requires max_h >= 1 and max_children >= 1");
  std::vector<TreeProfile> out;
  for (int h = 1; h <= max_h; ++h) {
    std::vector<int> c(static_cast<size_t>(h), 1);
    while (true) {
      out.push_back(build_profile(c));
      int k = h - 1;
      while (k >= 0 && c[static_cast<size_t>(k)] == max_children) {
        c[static_cast<size_t>(k)] = 1;
        --k;
      }
      if (k < 0) break;
      ++c[static_cast<size_t>(k)];
    }
  }
  return out;
}

/// Level of v*, the anchor vertex of the main theorem's case split:
/// 0 when the root already has two children, otherwise the first branching
/// level, and h for a pure segment.
inline int special_level(const TreeProfile& p) {
  p.require_walk();
  if (p.children[0] >= 2) return 0;
  for (int k = 1; k < p.height; ++k)
    if (p.children[static_cast<size_t>(k)] >= 2) return k;
  return p.height;
}

/// Level of the coupling lemma's v*: the root when deg_0 >= 2 or the tree is
/// a segment, else the closest branching point to the root.
inline int coupling_anchor_level(const TreeProfile& p) {
  p.require_walk();
  if (p.children[0] >= 2) return 0;
  for (int k = 1; k < p.height; ++k)
    if (p.children[static_cast<size_t>(k)] >= 2) return k;
  return 0;
}

/// Throws InvalidPair unless (lx, ly, lq) names a realizable ordered pair of
/// distinct-or-equal vertices: the common ancestor must be at or above both,
/// and two strictly diverging branches require a branching level at lq.
inline void validate_pair(const TreeProfile& p, const VertexPair& v) {
  p.require_walk();
  const auto bad = [&](const std::string& why) {
    throw InvalidPair("pair (" + std::to_string(v.lx) + "," + std::to_string(v.ly) + "," +
                      std::to_string(v.lq) + ") on tree " + p.id() + ": " + why);
  };
  if (v.lx < 0 || v.ly < 0 || v.lq < 0) bad("negative level");
  if (v.lx > p.height || v.ly > p.height) bad("level exceeds height");
  if (v.lq > v.lx || v.lq > v.ly) bad("common ancestor below an endpoint");
  if (v.lx > v.lq && v.ly > v.lq && p.children[static_cast<size_t>(v.lq)] < 2)
    bad("branches diverge at a non-branching level");
}

inline bool pair_is_same_vertex(const VertexPair& v) {
  return v.lx == v.ly && v.lq == v.lx;
}

/// Throws unless the pair names two distinct vertices.
inline void validate_distinct_pair(const TreeProfile& p, const VertexPair& v) {
  validate_pair(p, v);
  if (pair_is_same_vertex(v))
    throw InvalidPair("pair (" + std::to_string(v.lx) + "," + std::to_string(v.ly) + "," +
                      std::to_string(v.lq) + ") describes a single vertex");
}

/// pi(G_{x,y}): stationary mass of the components of T \ {x} that do not
/// contain y. With x an ancestor of y this is everything outside x's branch
/// toward y; otherwise it is the open subtree hanging below x.
inline double pi_offpath_mass(const TreeProfile& p, const VertexPair& v) {
  validate_distinct_pair(p, v);
  if (v.lq == v.lx) {
    // x is a strict ancestor of y; remove x and the child subtree leading to y.
    return 1.0 - p.pi_vertex(v.lx) - p.subtree_mass(v.lx + 1);
  }
  // y lies outside the subtree of x.
  return p.subtree_mass(v.lx) - p.pi_vertex(v.lx);
}

}  // namespace cutofflab
