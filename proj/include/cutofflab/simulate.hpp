#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/hitting.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

/// SplitMix64: a counter-based generator (the output is a finalizer hash of
/// an additive counter), seedable and cheap to split. Each Monte Carlo
/// sample draws from its own stream keyed by (seed, sample index), so
/// results do not depend on scheduling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct SampleStats {
  long long count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double se = 0.0;        // standard error of the mean
  std::uint64_t seed = 0;
};

struct RSStats {
  long long count = 0;
  double mean_r = 0.0;
  double mean_s = 0.0;
  double var_r = 0.0;
  double var_s = 0.0;
  double cov_rs = 0.0;
  double se_mean_r = 0.0;
  double se_mean_s = 0.0;
  double se_cov = 0.0;    // asymptotic SE of the covariance estimate
  double se_var_s = 0.0;  // asymptotic SE of the S-variance estimate
  std::uint64_t seed = 0;
};

namespace detail {

inline int sample_transition(const std::vector<Transition>& row, SplitMix64& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (const Transition& t : row) {
    acc += t.prob;
    if (u < acc) return t.to;
  }
  return row.back().to;  // u landed in the rounding slack of the row sum
}

inline long long simulate_absorption(const QuotientChain& q, int start, SplitMix64& rng) {
  long long steps = 0;
  int state = start;
  while (state != q.absorbing_state) {
    state = sample_transition(q.trans[static_cast<size_t>(state)], rng);
    ++steps;
  }
  return steps;
}

}  // namespace detail

/// Monte Carlo hitting-time estimates on the pair quotient with y absorbing.
/// Deterministic given (inputs, seed).
inline SampleStats sample_hitting(const TreeProfile& p, const VertexPair& v, long long n_samples,
                                  std::uint64_t seed) {
  validate_distinct_pair(p, v);
  if (n_samples < 1) throw PreconditionViolated("need at least one sample");
  const QuotientChain q = build_quotient(p, v, Absorb::Y);

  // Step counts are integers, so exact integer accumulators make the
  // reduction independent of sample order.
  unsigned __int128 sum = 0, sum_sq = 0;
  for (long long i = 0; i < n_samples; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
    const long long tau = detail::simulate_absorption(q, q.x_state, rng);
    sum += static_cast<unsigned __int128>(tau);
    sum_sq += static_cast<unsigned __int128>(tau) * static_cast<unsigned __int128>(tau);
  }
  SampleStats st;
  st.count = n_samples;
  st.seed = seed;
  const long double n = static_cast<long double>(n_samples);
  const long double mean = static_cast<long double>(sum) / n;
  st.mean = static_cast<double>(mean);
  if (n_samples > 1) {
    const long double ss = static_cast<long double>(sum_sq) - n * mean * mean;
    st.variance = static_cast<double>(ss / (n - 1));
    st.variance = std::max(0.0, st.variance);
  }
  st.se = std::sqrt(st.variance / static_cast<double>(n_samples));
  return st;
}

/// Per-trajectory split tau_y = R + S: S counts the steps spent inside
/// G_{x,y} (the components of T \ {x} away from y), R the rest. Requires x
/// to be an ancestor of y (lq == lx). Empty G is a degenerate success with
/// S identically zero.
inline RSStats sample_rs(const TreeProfile& p, const VertexPair& v, long long n_samples,
                         std::uint64_t seed) {
  validate_distinct_pair(p, v);
  if (v.lq != v.lx)
    throw InvalidPair("the R+S split decomposes at x: the pair must have lq == lx");
  if (n_samples < 1) throw PreconditionViolated("need at least one sample");
  const QuotientChain q = build_quotient(p, v, Absorb::Y);

  // In G_{x,y}: strict ancestors of x, and every bush hanging at or above x.
  // Path states from x toward y and their bushes are on y's side.
  std::vector<char> in_g(static_cast<size_t>(q.num_states()), 0);
  for (int s = 0; s < q.num_states(); ++s) {
    const QuotientState& st = q.states[static_cast<size_t>(s)];
    if (st.kind == StateKind::Path) {
      in_g[static_cast<size_t>(s)] = st.level < v.lx ? 1 : 0;
    } else {
      in_g[static_cast<size_t>(s)] =
          q.states[static_cast<size_t>(st.attach)].level <= v.lx ? 1 : 0;
    }
  }

  const long long dist = (v.lx - v.lq) + (v.ly - v.lq);
  std::vector<long long> rs_r(static_cast<size_t>(n_samples));
  std::vector<long long> rs_s(static_cast<size_t>(n_samples));
  for (long long i = 0; i < n_samples; ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
    long long r = 0, s = 0;
    int state = q.x_state;
    while (state != q.y_state) {
      if (in_g[static_cast<size_t>(state)])
        ++s;
      else
        ++r;
      state = detail::sample_transition(q.trans[static_cast<size_t>(state)], rng);
    }
    if (r < dist) throw SingularSystem("sampled R below the graph distance: lumping bug");
    rs_r[static_cast<size_t>(i)] = r;
    rs_s[static_cast<size_t>(i)] = s;
  }

  RSStats st;
  st.count = n_samples;
  st.seed = seed;
  const long double n = static_cast<long double>(n_samples);
  long double sum_r = 0, sum_s = 0;
  for (long long i = 0; i < n_samples; ++i) {
    sum_r += rs_r[static_cast<size_t>(i)];
    sum_s += rs_s[static_cast<size_t>(i)];
  }
  const long double mr = sum_r / n, ms = sum_s / n;
  long double ss_r = 0, ss_s = 0, ss_rs = 0, quad_s = 0, quad_rs = 0;
  for (long long i = 0; i < n_samples; ++i) {
    const long double dr = rs_r[static_cast<size_t>(i)] - mr;
    const long double ds = rs_s[static_cast<size_t>(i)] - ms;
    ss_r += dr * dr;
    ss_s += ds * ds;
    ss_rs += dr * ds;
    quad_s += ds * ds * ds * ds;
    quad_rs += dr * ds * dr * ds;
  }
  st.mean_r = static_cast<double>(mr);
  st.mean_s = static_cast<double>(ms);
  if (n_samples > 1) {
    st.var_r = static_cast<double>(ss_r / (n - 1));
    st.var_s = static_cast<double>(ss_s / (n - 1));
    st.cov_rs = static_cast<double>(ss_rs / (n - 1));
  }
  st.se_mean_r = std::sqrt(st.var_r / static_cast<double>(n_samples));
  st.se_mean_s = std::sqrt(st.var_s / static_cast<double>(n_samples));
  // Asymptotic SEs of the second-moment estimators.
  const long double var_prod = quad_rs / n - (ss_rs / n) * (ss_rs / n);
  const long double var_sq = quad_s / n - (ss_s / n) * (ss_s / n);
  st.se_cov = static_cast<double>(std::sqrt(std::max<long double>(0, var_prod) / n));
  st.se_var_s = static_cast<double>(std::sqrt(std::max<long double>(0, var_sq) / n));
  return st;
}

}  // namespace cutofflab
