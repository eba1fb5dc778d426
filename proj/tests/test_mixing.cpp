#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cutofflab/mixing.hpp"
#include "oracles.hpp"

using namespace cutofflab;

TEST_CASE("tv_distance arithmetic") {
  CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(1.0));
  CHECK(tv_distance({0.25, 0.75}, {0.25, 0.75}) == Catch::Approx(0.0).margin(0.0));
  CHECK(tv_distance({0.5, 0.5}, {0.75, 0.25}) == Catch::Approx(0.25));
  CHECK(tv_distance({0.5, 0.25}, {0.25, 0.5}, {2.0, 2.0}) == Catch::Approx(0.5));
  CHECK_THROWS_AS(tv_distance({1.0}, {0.5, 0.5}), DimensionMismatch);
}

TEST_CASE("distance_at on K2 and against the explicit oracle") {
  const TreeProfile k2 = build_profile({1});
  CHECK(distance_at(k2, 0, 0) == Catch::Approx(0.5));
  CHECK(distance_at(k2, 0, 1) == Catch::Approx(0.0).margin(1e-15));

  const TreeProfile p = build_profile({2, 2});
  const ExplicitTree t = explicit_tree(p);
  const Eigen::MatrixXd P = oracles::lazy_matrix(t);
  const Eigen::VectorXd pi = oracles::stationary(t);
  for (int level = 0; level <= p.height; ++level) {
    const int start = oracles::descend(t, 0, 0, level);
    for (long long step : {0LL, 1LL, 5LL, 17LL}) {
      const double expected = oracles::tv(oracles::evolve(P, start, step), pi);
      CHECK(distance_at(p, level, step) == Catch::Approx(expected).margin(1e-12));
    }
  }
}

TEST_CASE("worst-case distance at time zero is 1 - min pi") {
  for (const TreeProfile& p : enumerate_profiles(3, 3)) {
    double min_pi = 1.0;
    for (int k = 0; k <= p.height; ++k) min_pi = std::min(min_pi, p.pi_vertex(k));
    CHECK(worst_distance(p, 0).d == Catch::Approx(1.0 - min_pi).margin(1e-12));
  }
}

TEST_CASE("d(t) is nonincreasing in t over the whole corpus") {
  for (const TreeProfile& p : enumerate_profiles(3, 3)) {
    std::vector<LevelEvolver> evs;
    for (int k = 0; k <= p.height; ++k) evs.emplace_back(p, k);
    double prev = 1.0;
    for (long long t = 0; t <= 200; ++t) {
      double worst = 0.0;
      for (auto& ev : evs) worst = std::max(worst, ev.distance());
      REQUIRE(worst <= prev + 1e-12);
      prev = worst;
      for (auto& ev : evs) ev.advance(1);
    }
  }
}

TEST_CASE("mixing_time against the brute-force scan") {
  CHECK(mixing_time(build_profile({1})) == 1);

  for (const TreeProfile& p : enumerate_profiles(3, 2)) {
    const ExplicitTree t = explicit_tree(p);
    for (double eps : {0.25, 0.1, 0.6}) {
      CHECK(mixing_time(p, eps) == oracles::mixing_time_scan(t, eps));
    }
  }
}

TEST_CASE("mixing_time is monotone in epsilon and validates it") {
  const TreeProfile p = build_profile({2, 2});
  CHECK(mixing_time(p, 0.49) <= mixing_time(p, 0.01));
  CHECK_THROWS_AS(mixing_time(p, 0.0), PreconditionViolated);
  CHECK_THROWS_AS(mixing_time(p, 1.0), PreconditionViolated);
  CHECK_THROWS_AS(mixing_time(build_profile({})), DegenerateTree);
  CHECK_THROWS_AS(mixing_time(build_profile({1, 1, 1, 1}), 0.01, 4), NonConvergence);
}

TEST_CASE("coupling bound on the worked examples and over a corpus") {
  CHECK(coupling_bound(build_profile({1})) == Catch::Approx(16.0).margin(1e-12));
  CHECK(coupling_bound(build_profile({1, 1})) == Catch::Approx(64.0).margin(1e-9));
  for (const TreeProfile& p : enumerate_profiles(4, 3))
    CHECK(coupling_bound(p) >= static_cast<double>(mixing_time(p)));
}

TEST_CASE("mix_profile crossings agree with the bracketed search") {
  for (const TreeProfile& p : {build_profile({2, 2}), build_profile({1, 1, 2})}) {
    const auto grid = default_epsilon_grid();
    const MixProfile mp = mix_profile(p, grid);
    for (size_t i = 0; i < grid.size(); ++i)
      CHECK(mp.t_mix[i] == mixing_time(p, grid[i]));
  }
}
