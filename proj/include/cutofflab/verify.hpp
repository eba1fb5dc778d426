#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/explicit_tree.hpp"
#include "cutofflab/hitting.hpp"
#include "cutofflab/mixing.hpp"
#include "cutofflab/spectral.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

// The only constants asserted from the paper; everything they bound is
// recomputed by this library.
inline constexpr double kTheoremMixRelConstant = 144.0;
inline constexpr double kTheoremHittingConstant = 484.0;
inline constexpr double kAncestorHittingConstant = 121.0;
inline constexpr double kConcaveLemmaConstant = 7.0;

inline constexpr double kInequalityTolerance = 1e-9;

/// One verified inequality. For >=-style checks margin = lhs - rhs; for
/// agreement checks (lhs below a tolerance rhs) margin = rhs - lhs. In both
/// conventions pass means margin >= -tolerance-slack.
struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string tree_id;
  long long n = 0;
  int h = 0;
  long long t_mix = 0;
  double t_rel = 0.0;
  double ratio = 0.0;           // t_mix / t_rel
  double min_pair_ratio = 0.0;  // min over pairs and returns of Var/E^2
  std::vector<CheckRecord> checks;
  double elapsed_ms = 0.0;  // informational; never serialized

  bool all_pass() const {
    for (const CheckRecord& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct VerifyOptions {
  long long oracle_cap = kDefaultOracleCap;
  double tolerance = kInequalityTolerance;
  long long mixing_cap = kDefaultMixingCap;
};

/// All representative symmetry classes of ordered vertex pairs: levels
/// (lx, ly) with a branching-feasible common-ancestor level lq, the
/// same-vertex class excluded.
inline std::vector<VertexPair> representative_pairs(const TreeProfile& p) {
  std::vector<VertexPair> out;
  for (int lq = 0; lq <= p.height; ++lq)
    for (int lx = lq; lx <= p.height; ++lx)
      for (int ly = lq; ly <= p.height; ++ly) {
        const VertexPair v{lx, ly, lq};
        if (pair_is_same_vertex(v)) continue;
        if (lx > lq && ly > lq && p.children[static_cast<size_t>(lq)] < 2) continue;
        out.push_back(v);
      }
  return out;
}

namespace detail {

inline CheckRecord check_ge(const std::string& name, double lhs, double rhs, double tol) {
  CheckRecord c;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = lhs - rhs;
  c.pass = lhs >= rhs * (1.0 - tol);
  return c;
}

inline CheckRecord check_le(const std::string& name, double lhs, double rhs) {
  CheckRecord c;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = rhs - lhs;
  c.pass = lhs <= rhs;
  return c;
}

}  // namespace detail

/// Runs every tree-level inequality of the paper and records lhs, rhs,
/// margin, and pass per check.
inline VerifyReport check_tree(const TreeProfile& p, const VerifyOptions& opt = {}) {
  p.require_walk();
  const auto t_start = std::chrono::steady_clock::now();
  VerifyReport rep;
  rep.tree_id = p.id();
  rep.n = p.vertex_count;
  rep.h = p.height;

  const Relaxation rel = lambda2(p);
  rep.t_rel = rel.t_rel;
  rep.t_mix = mixing_time(p, 0.25, opt.mixing_cap);
  rep.ratio = static_cast<double>(rep.t_mix) / rep.t_rel;
  const double tol = opt.tolerance;

  // Theorem: t_rel >= t_mix / 144.
  rep.checks.push_back(detail::check_ge("theorem_mix_rel", rep.t_rel,
                                        static_cast<double>(rep.t_mix) / kTheoremMixRelConstant,
                                        tol));

  // Hitting-time nonconcentration over every representative pair, with the
  // sharper ancestor-target and off-path bounds collected along the way.
  double min_pair = std::numeric_limits<double>::infinity();
  double min_ancestor = std::numeric_limits<double>::infinity();
  double min_offpath = std::numeric_limits<double>::infinity();
  bool has_ancestor = false, has_offpath = false;
  for (const VertexPair& v : representative_pairs(p)) {
    const HittingMoments hm = hitting_moments(p, v);
    const double ratio = hm.var / (hm.e * hm.e);
    min_pair = std::min(min_pair, ratio);
    if (v.lq == v.ly && v.lx > v.ly) {  // y is a strict ancestor of x
      has_ancestor = true;
      min_ancestor = std::min(min_ancestor, ratio);
    }
    const double off_mass = pi_offpath_mass(p, v);
    if (off_mass > 0.0) {
      has_offpath = true;
      min_offpath = std::min(min_offpath, hm.var / (off_mass * off_mass * hm.e * hm.e));
    }
  }
  rep.checks.push_back(
      detail::check_ge("theorem_hitting_pairs", min_pair, 1.0 / kTheoremHittingConstant, tol));
  if (has_ancestor)
    rep.checks.push_back(detail::check_ge("ancestor_hitting", min_ancestor,
                                          1.0 / kAncestorHittingConstant, tol));
  if (has_offpath)
    rep.checks.push_back(detail::check_ge("offpath_variance", min_offpath, 1.0, tol));

  // Return times are covered by the same theorem.
  double min_return = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= p.height; ++level) {
    const HittingMoments hm = return_moments(p, level);
    min_return = std::min(min_return, hm.var / (hm.e * hm.e));
  }
  rep.checks.push_back(
      detail::check_ge("theorem_hitting_returns", min_return, 1.0 / kTheoremHittingConstant, tol));
  rep.min_pair_ratio = std::min(min_pair, min_return);

  // Birth-and-death nonconcentration from every start of the collapsed
  // chain (our level chains always have birth >= death away from the root).
  const CollapsedChain chain = collapse(p);
  {
    const PassageTable tab = collapsed_passage(chain, 0);
    double min_bd = std::numeric_limits<double>::infinity();
    double e = 0.0, var = 0.0;
    for (int k = 1; k <= p.height; ++k) {
      e += tab.m[static_cast<size_t>(k)];
      var += tab.m2[static_cast<size_t>(k)] - tab.m[static_cast<size_t>(k)] * tab.m[static_cast<size_t>(k)];
      min_bd = std::min(min_bd, var / (e * e));
    }
    rep.checks.push_back(
        detail::check_ge("birth_death_starts", min_bd, 1.0 / kAncestorHittingConstant, tol));
  }

  // Coupling upper bound on the mixing time.
  rep.checks.push_back(detail::check_ge("coupling_bound", coupling_bound(p),
                                        static_cast<double>(rep.t_mix), tol));

  // Stationary set-hitting lower bound on t_rel, for every feasible number
  // of excluded subtrees.
  if (!p.is_segment()) {
    const int r = p.children[static_cast<size_t>(special_level(p))];
    for (int b = 1; b <= r - 1; ++b) {
      const SetHitting sh = stationary_set_hitting(p, b);
      rep.checks.push_back(detail::check_ge("set_hitting_b" + std::to_string(b), rep.t_rel,
                                            sh.pi_d / sh.pi_b * sh.e_pi_tau, tol));
    }
  }

  // Ramp test function lower bound on t_rel.
  if (special_level(p) >= 1)
    rep.checks.push_back(detail::check_ge("g2_bound", rep.t_rel, g2_lower_bound(p), tol));

  // Fill geometric decomposition against the elimination solve.
  {
    const HittingMoments fill = fill_moments(chain, p.height, 0);
    const HittingMoments lin = collapsed_hitting(chain, p.height, 0);
    const double rel_err = std::max(std::abs(fill.e - lin.e) / lin.e,
                                    std::abs(fill.var - lin.var) / lin.var);
    rep.checks.push_back(detail::check_le("fill_agreement", rel_err, 1e-8));
  }

  // Radial + Dirichlet decomposition against the dense oracle.
  if (p.vertex_count <= opt.oracle_cap) {
    const std::vector<double> dec = rel.spectrum.flattened();
    const std::vector<double> dense = dense_spectrum(explicit_tree(p, opt.oracle_cap)).flattened();
    double max_diff = std::numeric_limits<double>::infinity();
    if (dec.size() == dense.size()) {
      max_diff = 0.0;
      for (size_t i = 0; i < dec.size(); ++i)
        max_diff = std::max(max_diff, std::abs(dec[i] - dense[i]));
    }
    rep.checks.push_back(detail::check_le("spectral_oracle", max_diff, 1e-9));
  }

  rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  return rep;
}

struct ConcaveCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// E_w(f^2) >= f(h+1)^2 / 7 for concave increasing f with f(0) = 0 and a
/// weight vector increasing on 0..h with w(0) <= w(h+1). Pure predicate on
/// sequences; preconditions are enforced, not assumed.
inline ConcaveCheck check_concave_lemma(const std::vector<double>& f,
                                        const std::vector<double>& w) {
  const size_t len = f.size();
  if (len < 3) throw PreconditionViolated("need h >= 1, i.e. at least 3 points");
  if (w.size() != len)
    throw PreconditionViolated("f and w must have equal length");
  if (f[0] != 0.0) throw PreconditionViolated("f(0) must be 0");
  for (size_t i = 0; i + 1 < len; ++i)
    if (f[i + 1] < f[i]) throw PreconditionViolated("f is not increasing");
  for (size_t i = 0; i + 2 < len; ++i)
    if (f[i + 1] - f[i] < f[i + 2] - f[i + 1] - 1e-12 * std::abs(f[i + 2]))
      throw PreconditionViolated("f is not concave");
  double total = 0.0;
  for (double x : w) {
    if (x < 0.0) throw PreconditionViolated("w has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionViolated("w does not sum to 1");
  for (size_t i = 0; i + 2 < len; ++i)
    if (w[i] > w[i + 1]) throw PreconditionViolated("w(0..h) is not increasing");
  if (w[0] > w[len - 1]) throw PreconditionViolated("w(0) must be <= w(h+1)");

  ConcaveCheck c;
  for (size_t i = 0; i < len; ++i) c.lhs += w[i] * f[i] * f[i];
  c.rhs = f[len - 1] * f[len - 1] / kConcaveLemmaConstant;
  c.pass = c.lhs >= c.rhs * (1.0 - kInequalityTolerance);
  return c;
}

/// One family member of a cutoff diagnostic table.
struct CutoffRow {
  int index = 0;
  std::string tree_id;
  long long n = 0;
  double t_rel = 0.0;
  std::vector<long long> t_mix;     // aligned with the epsilon grid
  double ratio_precutoff = 0.0;     // t_mix(0.25) / t_mix(0.75) when both present
  double ratio_criterion = 0.0;     // t_mix(0.25) / t_rel when present
};

/// Finite-n cutoff diagnostics for a tree family. Ratios are reported; the
/// only assertion that belongs here is the per-row bounded mix/rel ratio,
/// which callers check against kTheoremMixRelConstant.
inline std::vector<CutoffRow> cutoff_table(const std::vector<TreeProfile>& family,
                                           const std::vector<double>& eps_grid,
                                           long long mixing_cap = kDefaultMixingCap) {
  std::vector<CutoffRow> rows;
  int index = 0;
  for (const TreeProfile& p : family) {
    CutoffRow row;
    row.index = index++;
    row.tree_id = p.id();
    row.n = p.vertex_count;
    row.t_rel = lambda2(p).t_rel;
    const MixProfile mp = mix_profile(p, eps_grid, mixing_cap);
    row.t_mix = mp.t_mix;
    long long t_quarter = -1, t_three_quarter = -1;
    for (size_t i = 0; i < eps_grid.size(); ++i) {
      if (eps_grid[i] == 0.25) t_quarter = mp.t_mix[i];
      if (eps_grid[i] == 0.75) t_three_quarter = mp.t_mix[i];
    }
    if (t_quarter >= 0) row.ratio_criterion = static_cast<double>(t_quarter) / row.t_rel;
    if (t_quarter >= 0 && t_three_quarter >= 0)
      row.ratio_precutoff = (t_quarter == 0 && t_three_quarter == 0)
                                ? 1.0
                                : static_cast<double>(t_quarter) /
                                      static_cast<double>(t_three_quarter);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cutofflab
