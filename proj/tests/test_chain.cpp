#include <catch2/catch_amalgamated.hpp>

#include "cutofflab/chain.hpp"
#include "cutofflab/tree.hpp"
#include "cutofflab/verify.hpp"
#include "oracles.hpp"

using namespace cutofflab;

TEST_CASE("collapse reproduces the level transition probabilities") {
  const CollapsedChain c = collapse(build_profile({2, 2}));
  CHECK(c.down[0] == Catch::Approx(0.5));
  CHECK(c.up[1] == Catch::Approx(1.0 / 6.0));
  CHECK(c.down[1] == Catch::Approx(1.0 / 3.0));
  CHECK(c.hold[1] == Catch::Approx(0.5));
  CHECK(c.up[2] == Catch::Approx(0.5));

  const CollapsedChain k2 = collapse(build_profile({1}));
  CHECK(k2.down[0] == Catch::Approx(0.5));
  CHECK(k2.up[1] == Catch::Approx(0.5));

  CHECK_THROWS_AS(collapse(build_profile({})), DegenerateTree);
}

TEST_CASE("collapsed chains are lazy and in detailed balance with level masses") {
  for (const TreeProfile& p : enumerate_profiles(4, 3)) {
    const CollapsedChain c = collapse(p);
    double mass = 0.0;
    for (int k = 0; k <= c.height; ++k) {
      CHECK(c.hold[static_cast<size_t>(k)] >= 0.5 - 1e-15);
      CHECK(c.up[static_cast<size_t>(k)] + c.down[static_cast<size_t>(k)] +
                c.hold[static_cast<size_t>(k)] ==
            Catch::Approx(1.0).margin(1e-15));
      mass += c.stat_mass[static_cast<size_t>(k)];
      if (k < c.height) {
        const double flow_down = c.stat_mass[static_cast<size_t>(k)] * c.down[static_cast<size_t>(k)];
        const double flow_up =
            c.stat_mass[static_cast<size_t>(k + 1)] * c.up[static_cast<size_t>(k + 1)];
        CHECK(flow_down == Catch::Approx(flow_up).margin(1e-14));
      }
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("quotient state counts and multiplicities on the worked examples") {
  // Star with one marked leaf: identical to the explicit 3-vertex tree.
  const QuotientChain star = build_quotient_to_level(build_profile({2}), 1);
  CHECK(star.num_states() == 3);
  CHECK(star.vertex_count == 3);

  // Binary depth-2 tree with one marked leaf.
  const QuotientChain q = build_quotient_to_level(build_profile({2, 2}), 2);
  REQUIRE(q.num_states() == 6);
  long long mult = 0;
  for (const QuotientState& s : q.states) mult += s.multiplicity;
  CHECK(mult == 7);
  CHECK(q.states[static_cast<size_t>(q.find_bush(0, 2))].multiplicity == 2);

  // A segment quotients to itself.
  const QuotientChain seg = build_quotient_to_level(build_profile({1, 1}), 2);
  CHECK(seg.num_states() == 3);
}

TEST_CASE("quotient rows are stochastic and orbit masses balance in reverse") {
  for (const TreeProfile& p : enumerate_profiles(3, 3)) {
    for (const VertexPair& v : representative_pairs(p)) {
      const QuotientChain q = build_quotient(p, v);
      double mass = 0.0;
      long long mult = 0;
      for (const QuotientState& s : q.states) {
        mass += s.stat_mass;
        mult += s.multiplicity;
      }
      CHECK(mass == Catch::Approx(1.0).margin(1e-12));
      CHECK(mult == p.vertex_count);
      for (int s = 0; s < q.num_states(); ++s) {
        double row = 0.0;
        for (const Transition& t : q.trans[static_cast<size_t>(s)]) {
          row += t.prob;
          if (t.to != s) {
            // detailed balance of orbit masses
            double back = 0.0;
            for (const Transition& r : q.trans[static_cast<size_t>(t.to)])
              if (r.to == s) back = r.prob;
            CHECK(q.states[static_cast<size_t>(s)].stat_mass * t.prob ==
                  Catch::Approx(q.states[static_cast<size_t>(t.to)].stat_mass * back)
                      .margin(1e-14));
          }
        }
        CHECK(row == Catch::Approx(1.0).margin(1e-14));
      }
    }
  }
}

TEST_CASE("apply_step matches the worked examples") {
  const QuotientChain k2 = build_quotient_to_level(build_profile({1}), 0);
  const auto step = apply_step(k2, {1.0, 0.0});
  CHECK(step[0] == Catch::Approx(0.5));
  CHECK(step[1] == Catch::Approx(0.5));

  const CollapsedChain c = collapse(build_profile({2, 2}));
  const auto down = apply_step(c, {0.0, 0.0, 1.0});
  CHECK(down[0] == Catch::Approx(0.0).margin(0.0));
  CHECK(down[1] == Catch::Approx(0.5));
  CHECK(down[2] == Catch::Approx(0.5));

  const QuotientChain abs = build_quotient(build_profile({1, 1}), {0, 2, 0}, Absorb::Y);
  std::vector<double> delta(static_cast<size_t>(abs.num_states()), 0.0);
  delta[static_cast<size_t>(abs.y_state)] = 1.0;
  CHECK(apply_step(abs, delta) == delta);
}

TEST_CASE("apply_step validates its input distribution") {
  const CollapsedChain c = collapse(build_profile({2}));
  CHECK_THROWS_AS(apply_step(c, {1.0}), DimensionMismatch);
  CHECK_THROWS_AS(apply_step(c, {0.7, 0.2}), PreconditionViolated);
}

TEST_CASE("lumping is exact: quotient evolution equals the explicit push-forward") {
  // Single-vertex marks at every level and every representative pair, on
  // every tree with at most 3 levels of branching at width <= 3.
  for (const TreeProfile& p : enumerate_profiles(3, 3)) {
    const ExplicitTree t = explicit_tree(p);
    const Eigen::MatrixXd P = oracles::lazy_matrix(t);

    std::vector<std::pair<QuotientChain, oracles::ConcretePair>> setups;
    for (int level = 0; level <= p.height; ++level) {
      oracles::ConcretePair cp;
      cp.x = oracles::descend(t, 0, 0, level);
      cp.y = -1;
      setups.emplace_back(build_quotient_to_level(p, level), cp);
    }
    for (const VertexPair& v : representative_pairs(p))
      setups.emplace_back(build_quotient(p, v), oracles::concrete_pair(t, v));

    for (const auto& [q, cp] : setups) {
      const std::vector<int> cls = oracles::classify_vertices(t, q, cp.x, cp.y);
      Eigen::VectorXd full = Eigen::VectorXd::Zero(t.n);
      full(cp.x) = 1.0;
      std::vector<double> lumped(static_cast<size_t>(q.num_states()), 0.0);
      lumped[static_cast<size_t>(q.x_state)] = 1.0;
      for (long long step = 0; step <= 20; ++step) {
        std::vector<double> pushed(static_cast<size_t>(q.num_states()), 0.0);
        for (int vtx = 0; vtx < t.n; ++vtx)
          pushed[static_cast<size_t>(cls[static_cast<size_t>(vtx)])] += full(vtx);
        for (int s = 0; s < q.num_states(); ++s)
          REQUIRE(lumped[static_cast<size_t>(s)] ==
                  Catch::Approx(pushed[static_cast<size_t>(s)]).margin(1e-12));
        full = P.transpose() * full;
        lumped = apply_step(q, lumped);
      }
    }
  }
}

TEST_CASE("quotient debug dump lists every state") {
  const QuotientChain q = build_quotient(build_profile({2, 2}), {1, 2, 1});
  const std::string text = dump(q);
  CHECK(text.find("quotient chain") != std::string::npos);
  CHECK(text.find("(x)") != std::string::npos);
  CHECK(text.find("(y)") != std::string::npos);
}
