#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/hitting.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

inline constexpr long long kDefaultMixingCap = 10'000'000;

/// Total variation distance (1/2) sum w |a - b|; weights default to 1.
inline double tv_distance(const std::vector<double>& a, const std::vector<double>& b,
                          const std::vector<double>& weights = {}) {
  if (a.size() != b.size() || (!weights.empty() && weights.size() != a.size()))
    throw DimensionMismatch("tv_distance: vectors of sizes " + std::to_string(a.size()) + ", " +
                            std::to_string(b.size()));
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w * std::abs(a[i] - b[i]);
  }
  return 0.5 * total;
}

/// Time-evolution of the walk started at one representative vertex per
/// level, on its exact root-path quotient. Distributions are orbit totals,
/// so TV against the orbit stationary masses equals the full-tree TV.
class LevelEvolver {
 public:
  LevelEvolver(const TreeProfile& p, int start_level)
      : chain_(build_quotient_to_level(p, start_level)) {
    dist_.assign(static_cast<size_t>(chain_.num_states()), 0.0);
    dist_[static_cast<size_t>(chain_.x_state)] = 1.0;
    stat_.reserve(dist_.size());
    for (const QuotientState& s : chain_.states) stat_.push_back(s.stat_mass);
  }

  void advance(long long steps) {
    for (long long i = 0; i < steps; ++i) dist_ = apply_step(chain_, dist_);
    t_ += steps;
  }

  double distance() const { return tv_distance(dist_, stat_); }
  long long time() const { return t_; }
  const QuotientChain& chain() const { return chain_; }
  const std::vector<double>& distribution() const { return dist_; }

 private:
  QuotientChain chain_;
  std::vector<double> dist_;
  std::vector<double> stat_;
  long long t_ = 0;
};

/// TV distance to stationarity after t steps from a level-start_level start.
inline double distance_at(const TreeProfile& p, int start_level, long long t) {
  LevelEvolver ev(p, start_level);
  ev.advance(t);
  return ev.distance();
}

struct WorstDistance {
  double d = 0.0;
  int argmax_level = 0;
};

namespace detail {

inline WorstDistance worst_of(const std::vector<LevelEvolver>& evs) {
  WorstDistance w{-1.0, 0};
  for (size_t k = 0; k < evs.size(); ++k) {
    const double d = evs[k].distance();
    if (d > w.d) {
      w.d = d;
      w.argmax_level = static_cast<int>(k);
    }
  }
  return w;
}

}  // namespace detail

/// Worst-case-over-starts TV distance at time t. Level representatives
/// suffice: level-preserving automorphisms act transitively within levels.
inline WorstDistance worst_distance(const TreeProfile& p, long long t) {
  p.require_walk();
  std::vector<LevelEvolver> evs;
  evs.reserve(static_cast<size_t>(p.num_levels()));
  for (int k = 0; k <= p.height; ++k) evs.emplace_back(p, k);
  for (auto& ev : evs) ev.advance(t);
  return detail::worst_of(evs);
}

/// Smallest t with worst-case TV distance <= eps, by doubling to bracket and
/// then binary search on the monotone distance profile.
inline long long mixing_time(const TreeProfile& p, double eps = 0.25,
                             long long cap = kDefaultMixingCap) {
  p.require_walk();
  if (!(eps > 0.0 && eps < 1.0))
    throw PreconditionViolated("epsilon must lie in (0,1), got " + std::to_string(eps));

  std::vector<LevelEvolver> evs;
  for (int k = 0; k <= p.height; ++k) evs.emplace_back(p, k);
  if (detail::worst_of(evs).d <= eps) return 0;

  std::vector<LevelEvolver> checkpoint = evs;  // at time lo, distance > eps
  long long lo = 0;
  long long hi = 1;
  while (true) {
    for (auto& ev : evs) ev.advance(hi - ev.time());
    if (detail::worst_of(evs).d <= eps) break;
    checkpoint = evs;
    lo = hi;
    hi *= 2;
    if (hi > cap)
      throw NonConvergence("no mixing below the step cap " + std::to_string(cap) + " on tree " +
                           p.id());
  }
  while (lo + 1 < hi) {
    const long long mid = lo + (hi - lo) / 2;
    std::vector<LevelEvolver> probe = checkpoint;
    for (auto& ev : probe) ev.advance(mid - lo);
    if (detail::worst_of(probe).d <= eps) {
      hi = mid;
    } else {
      lo = mid;
      checkpoint = std::move(probe);
    }
  }
  return hi;
}

/// Coupling upper bound 4(E_o(tau_v*) + 2 E_v(tau_v*)) with v at level h and
/// v* the coupling anchor (root, or the branching point closest to it).
inline double coupling_bound(const TreeProfile& p) {
  const int anchor = coupling_anchor_level(p);
  const CollapsedChain c = collapse(p);
  const double from_root = (anchor > 0) ? collapsed_hitting(c, 0, anchor).e : 0.0;
  const double from_leaf = collapsed_hitting(c, p.height, anchor).e;
  return 4.0 * (from_root + 2.0 * from_leaf);
}

inline const std::vector<double>& default_epsilon_grid() {
  static const std::vector<double> grid{0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99};
  return grid;
}

/// d(t) rows up to the largest grid crossing, plus t_mix for every epsilon
/// in the grid, from a single evolution sweep.
struct MixProfile {
  std::vector<double> d;            // d[t], t = 0..T
  std::vector<int> argmax_level;    // worst start level at each t
  std::vector<double> epsilons;     // as given
  std::vector<long long> t_mix;     // aligned with epsilons
};

inline MixProfile mix_profile(const TreeProfile& p, const std::vector<double>& eps_grid,
                              long long cap = kDefaultMixingCap) {
  p.require_walk();
  double eps_min = 1.0;
  for (double e : eps_grid) {
    if (!(e > 0.0 && e < 1.0))
      throw PreconditionViolated("epsilon must lie in (0,1), got " + std::to_string(e));
    eps_min = std::min(eps_min, e);
  }
  MixProfile out;
  out.epsilons = eps_grid;
  out.t_mix.assign(eps_grid.size(), -1);
  if (eps_grid.empty()) return out;

  std::vector<LevelEvolver> evs;
  for (int k = 0; k <= p.height; ++k) evs.emplace_back(p, k);
  for (long long t = 0;; ++t) {
    if (t > cap)
      throw NonConvergence("no mixing below the step cap " + std::to_string(cap) + " on tree " +
                           p.id());
    if (t > 0)
      for (auto& ev : evs) ev.advance(1);
    const WorstDistance w = detail::worst_of(evs);
    out.d.push_back(w.d);
    out.argmax_level.push_back(w.argmax_level);
    for (size_t i = 0; i < eps_grid.size(); ++i)
      if (out.t_mix[i] < 0 && w.d <= eps_grid[i]) out.t_mix[i] = t;
    if (w.d <= eps_min) break;
  }
  return out;
}

}  // namespace cutofflab
