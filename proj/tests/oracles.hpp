// Brute-force reference computations for the test suite. Everything here
// works on the explicit tree with dense linear algebra, deliberately
// independent of the symmetry-reduced code paths it is used to check.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cutofflab/chain.hpp"
#include "cutofflab/explicit_tree.hpp"
#include "cutofflab/tree.hpp"

namespace oracles {

using cutofflab::ExplicitTree;
using cutofflab::QuotientChain;
using cutofflab::StateKind;
using cutofflab::TreeProfile;
using cutofflab::VertexPair;

inline Eigen::MatrixXd lazy_matrix(const ExplicitTree& t) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(t.n, t.n);
  for (int v = 0; v < t.n; ++v) {
    P(v, v) = 0.5;
    const double step = 0.5 / t.degree(v);
    for (int u : t.adj[static_cast<size_t>(v)]) P(v, u) = step;
  }
  return P;
}

inline Eigen::VectorXd stationary(const ExplicitTree& t) {
  Eigen::VectorXd pi(t.n);
  double total = 0.0;
  for (int v = 0; v < t.n; ++v) total += t.degree(v);
  for (int v = 0; v < t.n; ++v) pi(v) = t.degree(v) / total;
  return pi;
}

inline Eigen::VectorXd evolve(const Eigen::MatrixXd& P, int start, long long steps) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(P.rows());
  d(start) = 1.0;
  for (long long i = 0; i < steps; ++i) d = P.transpose() * d;
  return d;
}

inline double tv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).lpNorm<1>();
}

/// Worst-case-start TV distance at time t, maximized over all n vertices.
inline double worst_tv(const ExplicitTree& t, long long steps) {
  const Eigen::MatrixXd P = lazy_matrix(t);
  const Eigen::VectorXd pi = stationary(t);
  double worst = 0.0;
  for (int v = 0; v < t.n; ++v) worst = std::max(worst, tv(evolve(P, v, steps), pi));
  return worst;
}

/// Smallest t with worst-case TV <= eps, by plain forward scan.
inline long long mixing_time_scan(const ExplicitTree& t, double eps, long long cap = 100000) {
  const Eigen::MatrixXd P = lazy_matrix(t);
  const Eigen::VectorXd pi = stationary(t);
  std::vector<Eigen::VectorXd> dists;
  for (int v = 0; v < t.n; ++v) dists.push_back(evolve(P, v, 0));
  for (long long step = 0; step <= cap; ++step) {
    double worst = 0.0;
    for (const auto& d : dists) worst = std::max(worst, tv(d, pi));
    if (worst <= eps) return step;
    for (auto& d : dists) d = P.transpose() * d;
  }
  throw std::runtime_error("mixing_time_scan: cap exceeded");
}

/// First two hitting-time moments of vertex y from x via the dense
/// two-solve on the absorbing restriction: (I-Q)e = 1, (I-Q)s = 1 + 2Qe.
struct DenseMoments {
  double e = 0.0;
  double e2 = 0.0;
  double var = 0.0;
};

inline DenseMoments dense_hitting(const ExplicitTree& t, int x, int y) {
  const Eigen::MatrixXd P = lazy_matrix(t);
  const int n = t.n;
  std::vector<int> index(static_cast<size_t>(n), -1);
  std::vector<int> back;
  for (int v = 0; v < n; ++v)
    if (v != y) {
      index[static_cast<size_t>(v)] = static_cast<int>(back.size());
      back.push_back(v);
    }
  const int m = static_cast<int>(back.size());
  Eigen::MatrixXd Q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Q(i, j) = P(back[static_cast<size_t>(i)], back[static_cast<size_t>(j)]);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m) - Q;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd e = lu.solve(ones);
  const Eigen::VectorXd s = lu.solve(ones + 2.0 * Q * e);
  DenseMoments out;
  if (x == y) return out;
  out.e = e(index[static_cast<size_t>(x)]);
  out.e2 = s(index[static_cast<size_t>(x)]);
  out.var = out.e2 - out.e * out.e;
  return out;
}

/// Concrete representatives (x, y, q) of a symmetry class in BFS numbering:
/// q on the leftmost root path, x through child 0, y through child 1 when
/// the branches split (child 0 when x == q).
struct ConcretePair {
  int x = 0;
  int y = 0;
  int q = 0;
};

inline int descend(const ExplicitTree& t, int from, int child_index, int levels) {
  int v = from;
  for (int i = 0; i < levels; ++i) {
    const auto kids = t.children_of(v);
    v = kids.at(static_cast<size_t>(i == 0 ? child_index : 0));
  }
  return v;
}

inline ConcretePair concrete_pair(const ExplicitTree& t, const VertexPair& pair) {
  ConcretePair out;
  out.q = descend(t, 0, 0, pair.lq);
  out.x = (pair.lx == pair.lq) ? out.q : descend(t, out.q, 0, pair.lx - pair.lq);
  const int y_first_child = (pair.lx > pair.lq) ? 1 : 0;
  out.y = (pair.ly == pair.lq) ? out.q : descend(t, out.q, y_first_child, pair.ly - pair.lq);
  return out;
}

/// Maps every explicit vertex to its quotient state, given the concrete
/// marked vertices the quotient's spine was anchored at.
inline std::vector<int> classify_vertices(const ExplicitTree& t, const QuotientChain& q,
                                          int x_vertex, int y_vertex) {
  const int n = t.n;
  // Spine vertices in path-state order: root..q, branch to x, branch to y.
  std::vector<int> spine_state(static_cast<size_t>(n), -1);
  const auto root_path = [&](int v) {
    std::vector<int> path;
    for (int u = v; u != -1; u = t.parent[static_cast<size_t>(u)]) path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
  };
  const std::vector<int> to_x = root_path(x_vertex);
  for (size_t i = 0; i < to_x.size(); ++i) spine_state[static_cast<size_t>(to_x[i])] = static_cast<int>(i);
  if (y_vertex >= 0) {
    const std::vector<int> to_y = root_path(y_vertex);
    size_t lq = 0;
    while (lq + 1 < to_y.size() && lq + 1 < to_x.size() && to_y[lq + 1] == to_x[lq + 1]) ++lq;
    for (size_t i = lq + 1; i < to_y.size(); ++i)
      spine_state[static_cast<size_t>(to_y[i])] =
          static_cast<int>(to_x.size() - 1 + (i - lq));
  }
  std::vector<int> state(static_cast<size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (spine_state[static_cast<size_t>(v)] >= 0) {
      state[static_cast<size_t>(v)] = spine_state[static_cast<size_t>(v)];
      continue;
    }
    int u = v;
    while (spine_state[static_cast<size_t>(u)] < 0) u = t.parent[static_cast<size_t>(u)];
    state[static_cast<size_t>(v)] =
        q.find_bush(spine_state[static_cast<size_t>(u)], t.level[static_cast<size_t>(v)]);
    if (state[static_cast<size_t>(v)] < 0)
      throw std::runtime_error("classify_vertices: vertex fell outside every bush class");
  }
  return state;
}

/// pi(G_{x,y}) by deleting x and summing stationary mass over every
/// component that does not contain y.
inline double component_mass(const ExplicitTree& t, int x, int y) {
  const Eigen::VectorXd pi = stationary(t);
  std::vector<char> seen(static_cast<size_t>(t.n), 0);
  seen[static_cast<size_t>(x)] = 1;
  std::vector<int> stack{y};
  seen[static_cast<size_t>(y)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : t.adj[static_cast<size_t>(v)])
      if (!seen[static_cast<size_t>(u)]) {
        seen[static_cast<size_t>(u)] = 1;
        stack.push_back(u);
      }
  }
  double mass = 0.0;
  for (int v = 0; v < t.n; ++v)
    if (!seen[static_cast<size_t>(v)]) mass += pi(v);
  return mass;
}

}  // namespace oracles
