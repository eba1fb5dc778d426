#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

enum class MomentMethod { LinearSystem, Fill, MonteCarlo };

struct HittingMoments {
  double e = 0.0;    // E(tau)
  double e2 = 0.0;   // E(tau^2)
  double var = 0.0;  // E2 - E^2
  MomentMethod method = MomentMethod::LinearSystem;
};

/// One-step-toward-target passage moments on a tree-structured chain.
///
/// The state graph of a quotient chain is a tree, so the absorbing systems
/// (I-Q)e = 1 and (I-Q)s = 1 + 2Qe are solved by direct elimination in
/// leaf-to-target order with zero fill-in. Writing m(s), m2(s) for the first
/// two moments of the passage time from s to its neighbor next(s) on the
/// path to the target, elimination of the already-processed subtree behind
/// s gives
///   m(s)  = (1 + sum_c p_c m(c)) / p_next
///   m2(s) = (1 + 2 m(s)(1 - p_next)
///              + sum_c p_c (m2(c) + 2 m(c)(1 + m(s)))) / p_next
/// with c running over the non-target-side neighbors. Every operand is
/// nonnegative, so the solve is forward-stable (no cancellation); this is
/// what lets segment hitting times reproduce the 2*l^2 closed form to
/// machine precision.
struct PassageTable {
  std::vector<int> next;  // neighbor toward the target; -1 at the target
  std::vector<double> m;
  std::vector<double> m2;
  int target = -1;
};

inline PassageTable passage_table(const QuotientChain& q, int target) {
  const int n = q.num_states();
  if (target < 0 || target >= n) throw InvalidPair("passage target out of range");
  if (q.absorbing_state >= 0 && q.absorbing_state != target)
    throw SingularSystem("chain absorbs away from the passage target");

  PassageTable tab;
  tab.target = target;
  tab.next.assign(static_cast<size_t>(n), -2);
  tab.m.assign(static_cast<size_t>(n), 0.0);
  tab.m2.assign(static_cast<size_t>(n), 0.0);

  // Undirected adjacency (transition graphs are symmetric by reversibility).
  std::vector<std::vector<int>> nbr(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    for (const Transition& t : q.trans[static_cast<size_t>(s)])
      if (t.to != s) {
        nbr[static_cast<size_t>(s)].push_back(t.to);
        nbr[static_cast<size_t>(t.to)].push_back(s);
      }
  for (auto& v : nbr) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  order.push_back(target);
  tab.next[static_cast<size_t>(target)] = -1;
  for (size_t i = 0; i < order.size(); ++i) {
    const int s = order[i];
    for (int u : nbr[static_cast<size_t>(s)])
      if (tab.next[static_cast<size_t>(u)] == -2) {
        tab.next[static_cast<size_t>(u)] = s;
        order.push_back(u);
      }
  }
  if (static_cast<int>(order.size()) != n)
    throw SingularSystem("state graph is not connected");

  const auto prob_to = [&](int s, int to) {
    for (const Transition& t : q.trans[static_cast<size_t>(s)])
      if (t.to == to) return t.prob;
    return 0.0;
  };

  for (size_t i = order.size(); i-- > 1;) {
    const int s = order[i];
    const int nx = tab.next[static_cast<size_t>(s)];
    const double p_next = prob_to(s, nx);
    if (p_next <= 0.0) throw SingularSystem("vanishing transition toward the target");
    double acc1 = 1.0;
    for (int c : nbr[static_cast<size_t>(s)]) {
      if (c == nx) continue;
      acc1 += prob_to(s, c) * tab.m[static_cast<size_t>(c)];
    }
    const double ms = acc1 / p_next;
    double acc2 = 1.0 + 2.0 * ms * (1.0 - p_next);
    for (int c : nbr[static_cast<size_t>(s)]) {
      if (c == nx) continue;
      acc2 += prob_to(s, c) *
              (tab.m2[static_cast<size_t>(c)] + 2.0 * tab.m[static_cast<size_t>(c)] * (1.0 + ms));
    }
    tab.m[static_cast<size_t>(s)] = ms;
    tab.m2[static_cast<size_t>(s)] = acc2 / p_next;
  }
  return tab;
}

/// Hitting moments from `start` to the table's target: successive passage
/// legs are independent by the strong Markov property, so expectations and
/// variances add along the path.
inline HittingMoments moments_from(const PassageTable& tab, int start) {
  HittingMoments h;
  double e = 0.0, var = 0.0;
  for (int s = start; s != tab.target; s = tab.next[static_cast<size_t>(s)]) {
    const double m = tab.m[static_cast<size_t>(s)];
    e += m;
    var += tab.m2[static_cast<size_t>(s)] - m * m;
  }
  h.e = e;
  h.var = var;
  h.e2 = var + e * e;
  h.method = MomentMethod::LinearSystem;
  return h;
}

/// Same elimination specialized to the collapsed (path-graph) chain.
inline PassageTable collapsed_passage(const CollapsedChain& c, int target) {
  const int n = c.num_states();
  if (target < 0 || target >= n) throw InvalidPair("passage target out of range");
  PassageTable tab;
  tab.target = target;
  tab.next.assign(static_cast<size_t>(n), -1);
  tab.m.assign(static_cast<size_t>(n), 0.0);
  tab.m2.assign(static_cast<size_t>(n), 0.0);
  for (int k = c.height; k > target; --k) {  // moving down toward the target
    tab.next[static_cast<size_t>(k)] = k - 1;
    const double p_next = c.up[static_cast<size_t>(k)];
    const double p_away = c.down[static_cast<size_t>(k)];  // 0 at k = h
    const double m_away = (k < c.height) ? tab.m[static_cast<size_t>(k + 1)] : 0.0;
    const double m2_away = (k < c.height) ? tab.m2[static_cast<size_t>(k + 1)] : 0.0;
    const double ms = (1.0 + p_away * m_away) / p_next;
    tab.m[static_cast<size_t>(k)] = ms;
    tab.m2[static_cast<size_t>(k)] =
        (1.0 + 2.0 * ms * (1.0 - p_next) + p_away * (m2_away + 2.0 * m_away * (1.0 + ms))) / p_next;
  }
  for (int k = 0; k < target; ++k) {  // moving up toward the target
    tab.next[static_cast<size_t>(k)] = k + 1;
    const double p_next = c.down[static_cast<size_t>(k)];
    const double p_away = c.up[static_cast<size_t>(k)];  // 0 at k = 0
    const double m_away = (k > 0) ? tab.m[static_cast<size_t>(k - 1)] : 0.0;
    const double m2_away = (k > 0) ? tab.m2[static_cast<size_t>(k - 1)] : 0.0;
    const double ms = (1.0 + p_away * m_away) / p_next;
    tab.m[static_cast<size_t>(k)] = ms;
    tab.m2[static_cast<size_t>(k)] =
        (1.0 + 2.0 * ms * (1.0 - p_next) + p_away * (m2_away + 2.0 * m_away * (1.0 + ms))) / p_next;
  }
  return tab;
}

inline HittingMoments collapsed_hitting(const CollapsedChain& c, int start, int target) {
  return moments_from(collapsed_passage(c, target), start);
}

/// First and second moments of the hitting time of y started from x,
/// computed on the pair quotient with y absorbing.
inline HittingMoments hitting_moments(const TreeProfile& p, const VertexPair& v) {
  validate_distinct_pair(p, v);
  const QuotientChain q = build_quotient(p, v, Absorb::Y);
  return moments_from(passage_table(q, q.y_state), q.x_state);
}

/// Return-time moments for a vertex at the given level. The expectation is
/// the exact identity 2|E|/deg; the second moment conditions on the first
/// step, with the neighbor hitting moments taken from the quotient with the
/// vertex absorbing.
inline HittingMoments return_moments(const TreeProfile& p, int level) {
  p.require_walk();
  if (level < 0 || level > p.height)
    throw InvalidPair("return level " + std::to_string(level) + " outside 0.." +
                      std::to_string(p.height));
  const QuotientChain q = build_quotient_to_level(p, level, /*absorb_marked=*/true);
  const PassageTable tab = passage_table(q, q.x_state);

  const double deg = p.level_degrees[static_cast<size_t>(level)];
  const double e_identity = 2.0 * static_cast<double>(p.edge_count) / deg;

  double e_mix = 1.0;   // the held step contributes tau = 1 with probability 1/2
  double e2_mix = 1.0;  // completed below via E(1 + tau_Z)^2
  const double step = 1.0 / (2.0 * deg);
  if (level > 0) {
    const int par = level - 1;  // path states are indexed by level here
    e_mix += step * tab.m[static_cast<size_t>(par)];
    e2_mix += step * tab.m2[static_cast<size_t>(par)];
  }
  if (level < p.height) {
    const int bush = q.find_bush(q.x_state, level + 1);
    const double p_children = p.children[static_cast<size_t>(level)] * step;
    e_mix += p_children * tab.m[static_cast<size_t>(bush)];
    e2_mix += p_children * tab.m2[static_cast<size_t>(bush)];
  }
  e2_mix += 2.0 * (e_mix - 1.0);
  if (std::abs(e_mix - e_identity) > 1e-9 * e_identity)
    throw SingularSystem("return-time identity violated: mixture " + std::to_string(e_mix) +
                         " vs 2|E|/deg " + std::to_string(e_identity));

  HittingMoments h;
  h.e = e_identity;
  h.e2 = e2_mix;
  h.var = h.e2 - h.e * h.e;
  h.method = MomentMethod::LinearSystem;
  return h;
}

/// E_pi(tau_D) and pi(D) for D = complement of b of the r sibling subtrees
/// hanging at v*, the anchor of the main-theorem partition. Exits from the
/// excluded union B pass through v*, so per-level hitting times on the
/// collapsed chain give the exact stationary average.
struct SetHitting {
  double e_pi_tau = 0.0;
  double pi_d = 0.0;
  double pi_b = 0.0;
  int branch_count = 0;  // r
  int anchor_level = 0;  // level of v*
};

inline SetHitting stationary_set_hitting(const TreeProfile& p, int excluded_subtrees) {
  p.require_walk();
  if (p.is_segment()) throw NoBranching("tree " + p.id() + " is a segment: no sibling subtrees");
  const int ell = special_level(p);
  const int r = p.children[static_cast<size_t>(ell)];
  if (r < 2) throw NoBranching("anchor vertex of " + p.id() + " has fewer than 2 subtrees");
  const int b = excluded_subtrees;
  if (b < 1 || b > r - 1)
    throw PreconditionViolated("excluded subtree count " + std::to_string(b) + " outside 1.." +
                               std::to_string(r - 1));

  const CollapsedChain c = collapse(p);
  const PassageTable tab = collapsed_passage(c, ell);
  SetHitting out;
  out.branch_count = r;
  out.anchor_level = ell;
  double e_sum = 0.0;   // sum over levels j > ell within one subtree, cumulative
  double pi_b = 0.0;
  double e_pi = 0.0;
  for (int j = ell + 1; j <= p.height; ++j) {
    e_sum += tab.m[static_cast<size_t>(j)];  // E_j(tau_ell) accumulates passage legs
    const double mass_j =
        static_cast<double>(b) * static_cast<double>(p.descendants_at(ell + 1, j)) * p.pi_vertex(j);
    pi_b += mass_j;
    e_pi += mass_j * e_sum;
  }
  out.pi_b = pi_b;
  out.pi_d = 1.0 - pi_b;
  out.e_pi_tau = e_pi;
  return out;
}

}  // namespace cutofflab
