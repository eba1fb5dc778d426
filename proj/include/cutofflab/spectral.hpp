#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/explicit_tree.hpp"
#include "cutofflab/hitting.hpp"
#include "cutofflab/tree.hpp"

namespace cutofflab {

enum class SpectrumSource { DenseOracle, Decomposition };

/// Eigenvalues sorted descending, with multiplicities.
struct Spectrum {
  std::vector<double> values;
  std::vector<long long> multiplicities;
  SpectrumSource source = SpectrumSource::Decomposition;

  long long weighted_count() const {
    long long total = 0;
    for (long long m : multiplicities) total += m;
    return total;
  }

  /// Values repeated by multiplicity, descending.
  std::vector<double> flattened() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(weighted_count()));
    for (size_t i = 0; i < values.size(); ++i)
      for (long long j = 0; j < multiplicities[i]; ++j) out.push_back(values[i]);
    return out;
  }
};

namespace detail {

// Eigenvalues of a reversible tridiagonal chain block via its symmetrization:
// offdiag(j) = sqrt(P(j,j+1) P(j+1,j)). Descending order.
inline std::vector<double> tridiag_eigenvalues(const std::vector<double>& diag,
                                               const std::vector<double>& offdiag) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e(n - 1);
  for (int i = 0; i + 1 < n; ++i) e(i) = offdiag[static_cast<size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw EigensolveFailure("tridiagonal eigensolve did not converge");
  std::vector<double> vals(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  // Lazy-chain blocks have exact spectrum inside [0, 1]; trim rounding spill.
  for (double& v : vals) v = std::min(1.0, std::max(0.0, v));
  std::sort(vals.rbegin(), vals.rend());
  return vals;
}

}  // namespace detail

/// Spectrum of the collapsed (radial) chain.
inline Spectrum collapsed_spectrum(const CollapsedChain& c) {
  const int n = c.num_states();
  std::vector<double> diag(c.hold.begin(), c.hold.end());
  std::vector<double> off(static_cast<size_t>(std::max(0, n - 1)));
  for (int k = 0; k + 1 < n; ++k)
    off[static_cast<size_t>(k)] =
        std::sqrt(c.down[static_cast<size_t>(k)] * c.up[static_cast<size_t>(k + 1)]);
  Spectrum s;
  s.values = detail::tridiag_eigenvalues(diag, off);
  s.multiplicities.assign(s.values.size(), 1);
  s.source = SpectrumSource::Decomposition;
  return s;
}

/// Substochastic spectrum of the collapsed chain restricted to levels k..h,
/// with the upward transition out of level k killed. All values lie in
/// [1/2, 1) at the top and [0, 1) overall.
inline Spectrum dirichlet_spectrum(const TreeProfile& p, int k) {
  p.require_walk();
  if (k < 1 || k > p.height)
    throw PreconditionViolated("dirichlet level " + std::to_string(k) + " outside 1.." +
                               std::to_string(p.height));
  const CollapsedChain c = collapse(p);
  const int n = p.height - k + 1;
  std::vector<double> diag(static_cast<size_t>(n), 0.0);
  std::vector<double> off(static_cast<size_t>(std::max(0, n - 1)));
  for (int j = 0; j < n; ++j) diag[static_cast<size_t>(j)] = c.hold[static_cast<size_t>(k + j)];
  for (int j = 0; j + 1 < n; ++j)
    off[static_cast<size_t>(j)] =
        std::sqrt(c.down[static_cast<size_t>(k + j)] * c.up[static_cast<size_t>(k + j + 1)]);
  Spectrum s;
  s.values = detail::tridiag_eigenvalues(diag, off);
  s.multiplicities.assign(s.values.size(), 1);
  s.source = SpectrumSource::Decomposition;
  return s;
}

/// Full spectrum of the lazy walk on the explicit tree via the similarity
/// D^{1/2} P D^{-1/2} with D = diag(pi); every returned eigenpair is
/// residual-checked against the unsymmetrized operator.
inline Spectrum dense_spectrum(const ExplicitTree& t) {
  const int n = t.n;
  if (n < 2) throw DegenerateTree("dense spectrum needs at least one edge");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    P(v, v) = 0.5;
    const double step = 0.5 / t.degree(v);
    for (int u : t.adj[static_cast<size_t>(v)]) P(v, u) = step;
  }
  Eigen::VectorXd sqrt_pi(n);
  for (int v = 0; v < n; ++v) sqrt_pi(v) = std::sqrt(static_cast<double>(t.degree(v)));
  Eigen::MatrixXd S = sqrt_pi.asDiagonal() * P * sqrt_pi.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose());  // symmetrize away rounding
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw EigensolveFailure("dense eigensolve did not converge");

  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return solver.eigenvalues()(a) > solver.eigenvalues()(b);
  });

  Spectrum s;
  s.source = SpectrumSource::DenseOracle;
  s.values.reserve(static_cast<size_t>(n));
  for (int i : idx) {
    const double lambda = solver.eigenvalues()(i);
    Eigen::VectorXd v = sqrt_pi.cwiseInverse().asDiagonal() * solver.eigenvectors().col(i);
    v /= v.norm();
    const double resid = (P * v - lambda * v).lpNorm<Eigen::Infinity>();
    if (resid > 1e-8)
      throw EigensolveFailure("eigenpair residual " + std::to_string(resid) + " above 1e-8");
    s.values.push_back(std::min(1.0, std::max(0.0, lambda)));
  }
  s.multiplicities.assign(s.values.size(), 1);
  return s;
}

struct Relaxation {
  double lambda2 = 0.0;
  double t_rel = 0.0;
  Spectrum spectrum;
};

/// Full spectrum assembled from the symmetry decomposition: the collapsed
/// chain carries the radial modes; each level k with n_k > n_{k-1}
/// contributes the Dirichlet spectrum at k with multiplicity n_k - n_{k-1}
/// (sibling-difference modes vanish above their branching level). The
/// multiplicity count must come out to n exactly.
inline Relaxation lambda2(const TreeProfile& p) {
  p.require_walk();
  Spectrum full;
  full.source = SpectrumSource::Decomposition;
  const Spectrum radial = collapsed_spectrum(collapse(p));
  for (size_t i = 0; i < radial.values.size(); ++i) {
    full.values.push_back(radial.values[i]);
    full.multiplicities.push_back(1);
  }
  for (int k = 1; k <= p.height; ++k) {
    const long long extra =
        p.level_sizes[static_cast<size_t>(k)] - p.level_sizes[static_cast<size_t>(k - 1)];
    if (extra <= 0) continue;
    const Spectrum dir = dirichlet_spectrum(p, k);
    for (double v : dir.values) {
      full.values.push_back(v);
      full.multiplicities.push_back(extra);
    }
  }
  if (full.weighted_count() != p.vertex_count)
    throw DecompositionMismatch("decomposition yields " + std::to_string(full.weighted_count()) +
                                " eigenvalues for " + std::to_string(p.vertex_count) + " vertices");

  std::vector<size_t> idx(full.values.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return full.values[a] > full.values[b]; });
  Spectrum sorted;
  sorted.source = full.source;
  for (size_t i : idx) {
    sorted.values.push_back(full.values[i]);
    sorted.multiplicities.push_back(full.multiplicities[i]);
  }

  Relaxation r;
  r.spectrum = sorted;
  r.lambda2 = (sorted.multiplicities[0] > 1) ? sorted.values[0] : sorted.values[1];
  r.t_rel = 1.0 / (1.0 - r.lambda2);
  return r;
}

/// Fill decomposition of the absorption time at level 0 started from h: the
/// hitting time is a sum of independent geometrics with parameters 1-gamma_i,
/// gamma_i the eigenvalues of the chain restricted to {1,...,h}.
inline HittingMoments fill_moments(const CollapsedChain& c, int start, int target = 0) {
  if (target != 0) throw InvalidStart("fill decomposition requires target level 0");
  if (start != c.height)
    throw InvalidStart("fill decomposition requires the start at level h = " +
                       std::to_string(c.height));
  const int n = c.height;
  std::vector<double> diag(static_cast<size_t>(n));
  std::vector<double> off(static_cast<size_t>(std::max(0, n - 1)));
  for (int j = 0; j < n; ++j) diag[static_cast<size_t>(j)] = c.hold[static_cast<size_t>(1 + j)];
  for (int j = 0; j + 1 < n; ++j)
    off[static_cast<size_t>(j)] =
        std::sqrt(c.down[static_cast<size_t>(1 + j)] * c.up[static_cast<size_t>(2 + j)]);
  const std::vector<double> gamma = detail::tridiag_eigenvalues(diag, off);
  HittingMoments h;
  h.method = MomentMethod::Fill;
  for (double g : gamma) {
    const double gap = 1.0 - g;
    h.e += 1.0 / gap;
    h.var += g / (gap * gap);
  }
  h.e2 = h.var + h.e * h.e;
  return h;
}

/// Rayleigh-quotient lower bound Var_pi(g2)/E(g2) for the ramp test function
/// g2 (identity on the initial segment up to v_ell, constant below). Only
/// non-constant when the root has a single child.
inline double g2_lower_bound(const TreeProfile& p) {
  const int ell = special_level(p);
  if (ell == 0)
    throw ConstantTestFunction("g2 is constant when the root has two or more children");
  // Levels 0..ell each hold one vertex; everything deeper maps to ell.
  double mean = 0.0, second = 0.0, seg_mass = 0.0;
  for (int i = 0; i <= ell; ++i) {
    const double mass = p.pi_vertex(i);
    seg_mass += mass;
    mean += i * mass;
    second += static_cast<double>(i) * i * mass;
  }
  const double rest = 1.0 - seg_mass;
  mean += ell * rest;
  second += static_cast<double>(ell) * ell * rest;
  const double var = second - mean * mean;
  const double dirichlet = static_cast<double>(ell) / (4.0 * static_cast<double>(p.edge_count));
  return var / dirichlet;
}

}  // namespace cutofflab
