#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cutofflab/errors.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

/// Birth-and-death projection of the lazy walk obtained by identifying all
/// vertices at the same level. State k carries the n_k vertices of level k.
struct CollapsedChain {
  int height = 0;
  std::vector<double> up;    // toward the root; up[0] = 0
  std::vector<double> down;  // away from the root; down[h] = 0
  std::vector<double> hold;
  std::vector<int> degree;
  std::vector<long long> multiplicity;  // n_k
  std::vector<double> stat_mass;        // n_k deg_k / (2|E|)
  long long edge_count = 0;

  int num_states() const { return height + 1; }
};

inline CollapsedChain collapse(const TreeProfile& p) {
  p.require_walk();
  CollapsedChain c;
  c.height = p.height;
  c.edge_count = p.edge_count;
  const int m = p.num_levels();
  c.up.assign(static_cast<size_t>(m), 0.0);
  c.down.assign(static_cast<size_t>(m), 0.0);
  c.hold.assign(static_cast<size_t>(m), 0.0);
  c.degree = p.level_degrees;
  c.multiplicity = p.level_sizes;
  c.stat_mass.resize(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double deg = p.level_degrees[static_cast<size_t>(k)];
    if (k >= 1) c.up[static_cast<size_t>(k)] = 1.0 / (2.0 * deg);
    if (k < p.height)
      c.down[static_cast<size_t>(k)] = p.children[static_cast<size_t>(k)] / (2.0 * deg);
    c.hold[static_cast<size_t>(k)] = 1.0 - c.up[static_cast<size_t>(k)] - c.down[static_cast<size_t>(k)];
    c.stat_mass[static_cast<size_t>(k)] =
        static_cast<double>(p.level_sizes[static_cast<size_t>(k)]) * p.pi_vertex(k);
  }
  return c;
}

enum class StateKind { Path, Bush };

enum class Absorb { None, X, Y };

struct QuotientState {
  StateKind kind = StateKind::Path;
  int level = 0;
  int attach = -1;  // for bushes: index of the path state they hang from
  long long multiplicity = 0;
  double stat_mass = 0.0;
};

struct Transition {
  int to = 0;
  double prob = 0.0;
};

/// Symmetry-reduced chain over a spine (the minimal subtree containing the
/// root and the marked vertices) plus collapsed off-spine bushes. Lumping is
/// exact: the stabilizer of the marked set acts transitively on each bush
/// class, so the projected walk is Markov with these transition weights.
struct QuotientChain {
  std::vector<QuotientState> states;
  std::vector<std::vector<Transition>> trans;  // includes the lazy self-loop
  int root_state = 0;
  int x_state = -1;
  int y_state = -1;
  int absorbing_state = -1;  // -1 when no state is absorbing
  long long vertex_count = 0;

  int num_states() const { return static_cast<int>(states.size()); }

  /// Index of the bush state at absolute level `level` hanging from path
  /// state `attach`, or -1 when that bush class is empty.
  int find_bush(int attach, int level) const {
    if (attach < 0 || attach >= static_cast<int>(bush_base_.size())) return -1;
    const int base = bush_base_[static_cast<size_t>(attach)];
    if (base < 0) return -1;
    const int attach_level = states[static_cast<size_t>(attach)].level;
    if (level <= attach_level) return -1;
    const int idx = base + (level - attach_level - 1);
    if (idx >= num_states()) return -1;
    return idx;
  }

  std::vector<int> bush_base_;  // per path state; -1 when it has no bushes
};

namespace detail {

// Shared builder. ly < 0 marks a single vertex at level lx (lq == lx).
inline QuotientChain build_quotient_impl(const TreeProfile& p, int lx, int ly, int lq,
                                         Absorb absorb) {
  p.require_walk();
  QuotientChain q;
  q.vertex_count = p.vertex_count;
  const int h = p.height;
  const bool has_y = ly >= 0;
  const int x_branch_len = lx - lq;
  const int y_branch_len = has_y ? ly - lq : 0;
  const int path_count = lq + 1 + x_branch_len + y_branch_len;

  // Path states: root..q, then the branch to x, then the branch to y.
  struct PathInfo {
    int level;
    int parent;
    std::vector<int> spine_children;
    int off_count;
  };
  std::vector<PathInfo> path(static_cast<size_t>(path_count));
  const auto y_index = [&](int level) { return lx + (level - lq); };
  for (int k = 0; k <= lq; ++k) {
    PathInfo& s = path[static_cast<size_t>(k)];
    s.level = k;
    s.parent = k - 1;
    int spine_below = 0;
    if (k < lq) {
      s.spine_children.push_back(k + 1);
      spine_below = 1;
    } else {
      if (x_branch_len > 0) s.spine_children.push_back(lq + 1);
      if (y_branch_len > 0) s.spine_children.push_back(y_index(lq + 1));
      spine_below = static_cast<int>(s.spine_children.size());
    }
    s.off_count = (k < h) ? p.children[static_cast<size_t>(k)] - spine_below : 0;
  }
  for (int k = lq + 1; k <= lx; ++k) {
    PathInfo& s = path[static_cast<size_t>(k)];
    s.level = k;
    s.parent = k - 1;  // x-branch indices coincide with levels
    const int spine_below = (k < lx) ? 1 : 0;
    if (k < lx) s.spine_children.push_back(k + 1);
    s.off_count = (k < h) ? p.children[static_cast<size_t>(k)] - spine_below : 0;
  }
  for (int k = lq + 1; has_y && k <= ly; ++k) {
    PathInfo& s = path[static_cast<size_t>(y_index(k))];
    s.level = k;
    s.parent = (k == lq + 1) ? lq : y_index(k - 1);
    const int spine_below = (k < ly) ? 1 : 0;
    if (k < ly) s.spine_children.push_back(y_index(k + 1));
    s.off_count = (k < h) ? p.children[static_cast<size_t>(k)] - spine_below : 0;
  }

  for (int s = 0; s < path_count; ++s) {
    QuotientState st;
    st.kind = StateKind::Path;
    st.level = path[static_cast<size_t>(s)].level;
    st.multiplicity = 1;
    st.stat_mass = p.pi_vertex(st.level);
    q.states.push_back(st);
  }
  q.bush_base_.assign(static_cast<size_t>(path_count), -1);
  for (int s = 0; s < path_count; ++s) {
    const PathInfo& info = path[static_cast<size_t>(s)];
    if (info.off_count <= 0) continue;
    q.bush_base_[static_cast<size_t>(s)] = static_cast<int>(q.states.size());
    for (int j = info.level + 1; j <= h; ++j) {
      QuotientState st;
      st.kind = StateKind::Bush;
      st.level = j;
      st.attach = s;
      st.multiplicity = info.off_count * p.descendants_at(info.level + 1, j);
      st.stat_mass = static_cast<double>(st.multiplicity) * p.pi_vertex(j);
      q.states.push_back(st);
    }
  }

  q.root_state = 0;
  q.x_state = (x_branch_len > 0) ? lx : lq;
  q.y_state = has_y ? ((y_branch_len > 0) ? y_index(ly) : lq) : -1;
  if (absorb == Absorb::X) q.absorbing_state = q.x_state;
  if (absorb == Absorb::Y) {
    if (!has_y) throw InvalidPair("cannot absorb at y: no y vertex was marked");
    q.absorbing_state = q.y_state;
  }

  q.trans.resize(q.states.size());
  for (int s = 0; s < q.num_states(); ++s) {
    auto& row = q.trans[static_cast<size_t>(s)];
    if (s == q.absorbing_state) {
      row.push_back({s, 1.0});
      continue;
    }
    const QuotientState& st = q.states[static_cast<size_t>(s)];
    const double deg = p.level_degrees[static_cast<size_t>(st.level)];
    const double step = 1.0 / (2.0 * deg);
    row.push_back({s, 0.5});
    if (st.kind == StateKind::Path) {
      const PathInfo& info = path[static_cast<size_t>(s)];
      if (info.parent >= 0) row.push_back({info.parent, step});
      for (int c : info.spine_children) row.push_back({c, step});
      if (info.off_count > 0)
        row.push_back({q.find_bush(s, st.level + 1), info.off_count * step});
    } else {
      const int attach_level = q.states[static_cast<size_t>(st.attach)].level;
      const int up_state = (st.level - 1 > attach_level) ? q.find_bush(st.attach, st.level - 1)
                                                         : st.attach;
      row.push_back({up_state, step});
      if (st.level < h)
        row.push_back({q.find_bush(st.attach, st.level + 1),
                       p.children[static_cast<size_t>(st.level)] * step});
    }
  }
  return q;
}

}  // namespace detail

/// Quotient for an ordered symmetry-class pair (x, y); optionally makes one
/// endpoint absorbing.
inline QuotientChain build_quotient(const TreeProfile& p, const VertexPair& v,
                                    Absorb absorb = Absorb::None) {
  validate_pair(p, v);
  if (pair_is_same_vertex(v))
    return detail::build_quotient_impl(p, v.lx, -1, v.lx, absorb == Absorb::None ? Absorb::None : Absorb::X);
  return detail::build_quotient_impl(p, v.lx, v.ly, v.lq, absorb);
}

/// Quotient with a single marked vertex at the given level (spine = the
/// root path to it). With level 0 this is the collapsed chain itself.
inline QuotientChain build_quotient_to_level(const TreeProfile& p, int level,
                                             bool absorb_marked = false) {
  if (level < 0 || level > p.height)
    throw InvalidPair("marked level " + std::to_string(level) + " outside 0.." +
                      std::to_string(p.height));
  return detail::build_quotient_impl(p, level, -1, level,
                                     absorb_marked ? Absorb::X : Absorb::None);
}

namespace detail {
inline void check_distribution(size_t expected, const std::vector<double>& dist) {
  if (dist.size() != expected)
    throw DimensionMismatch("distribution has " + std::to_string(dist.size()) +
                            " entries, chain has " + std::to_string(expected) + " states");
  double sum = 0.0;
  for (double v : dist) sum += v;
  if (std::abs(sum - 1.0) > 1e-12)
    throw PreconditionViolated("distribution sums to " + std::to_string(sum) + ", not 1");
}
}  // namespace detail

/// One step of the lumped walk: returns dist * P over orbit-total masses.
inline std::vector<double> apply_step(const QuotientChain& q, const std::vector<double>& dist) {
  detail::check_distribution(q.states.size(), dist);
  std::vector<double> out(dist.size(), 0.0);
  for (size_t s = 0; s < dist.size(); ++s) {
    const double mass = dist[s];
    if (mass == 0.0) continue;
    for (const Transition& t : q.trans[s]) out[static_cast<size_t>(t.to)] += mass * t.prob;
  }
  return out;
}

inline std::vector<double> apply_step(const CollapsedChain& c, const std::vector<double>& dist) {
  detail::check_distribution(static_cast<size_t>(c.num_states()), dist);
  std::vector<double> out(dist.size(), 0.0);
  for (int k = 0; k <= c.height; ++k) {
    const double mass = dist[static_cast<size_t>(k)];
    if (mass == 0.0) continue;
    out[static_cast<size_t>(k)] += mass * c.hold[static_cast<size_t>(k)];
    if (k > 0) out[static_cast<size_t>(k - 1)] += mass * c.up[static_cast<size_t>(k)];
    if (k < c.height) out[static_cast<size_t>(k + 1)] += mass * c.down[static_cast<size_t>(k)];
  }
  return out;
}

/// Structured text dump for debugging.
inline std::string dump(const QuotientChain& q) {
  std::ostringstream os;
  os << "quotient chain: " << q.num_states() << " states, " << q.vertex_count << " vertices\n";
  for (int s = 0; s < q.num_states(); ++s) {
    const QuotientState& st = q.states[static_cast<size_t>(s)];
    os << "  [" << s << "] " << (st.kind == StateKind::Path ? "path" : "bush") << " level="
       << st.level;
    if (st.kind == StateKind::Bush) os << " attach=" << st.attach;
    os << " mult=" << st.multiplicity << " mass=" << st.stat_mass;
    if (s == q.x_state) os << " (x)";
    if (s == q.y_state) os << " (y)";
    if (s == q.absorbing_state) os << " (absorbing)";
    os << "\n    ->";
    for (const Transition& t : q.trans[static_cast<size_t>(s)])
      os << " " << t.to << ":" << t.prob;
    os << "\n";
  }
  return os.str();
}

}  // namespace cutofflab
