#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nearstable;
using testutil::HyperBuilder;
using testutil::triangle;
using testutil::vec;

TEST(SaturationGadget, ZeroCapacitiesLeaveInstanceUnchanged) {
  auto inst = triangle();
  inst.capacity = vec({0, 0, 0});
  EXPECT_EQ(add_saturation_gadget(inst), inst);
}

TEST(SaturationGadget, TriangleGetsOneSingletonPerVertex) {
  const auto g = add_saturation_gadget(triangle());
  ASSERT_EQ(g.num_edges(), 6);
  EXPECT_EQ(g.edge_ids[3], "~a#1");
  EXPECT_EQ(g.edges[4], std::vector<int>{1});
  EXPECT_EQ(g.max_edge_size(), 2);
  // the gadget edge is last in its vertex's order
  EXPECT_TRUE(g.prefs[0].prefers(2, 3));
  EXPECT_TRUE(validate(g).empty());
}

TEST(SaturationGadget, CopiesAreRankedInOrder) {
  auto inst = triangle();
  inst.capacity[1] = 3;
  const auto g = add_saturation_gadget(inst);
  ASSERT_EQ(g.num_edges(), 8);
  EXPECT_EQ(g.prefs[1].flatten(), (std::vector<int>{1, 0, 4, 5, 6}));
}

TEST(BuildShmScarf, TriangleIsSixByThree) {
  const auto s = build_shm_scarf(triangle());
  EXPECT_EQ(s.problem.rows(), 6);
  EXPECT_EQ(s.problem.cols(), 3);
  EXPECT_EQ(s.problem.bound, RationalVector(6, Rational(1)));
  EXPECT_EQ(s.problem.row_orders[0], (std::vector<int>{0, 2}));
  EXPECT_EQ(s.row_labels[3], "edge ab");
}

TEST(BuildShmScarf, SingleVertexWithGadget) {
  const auto inst = add_saturation_gadget(HyperBuilder({"v"}).edge("e", {"v"}).pref("v", {{"e"}}).build());
  auto only_gadget = inst;
  only_gadget.edges.erase(only_gadget.edges.begin());
  only_gadget.edge_ids.erase(only_gadget.edge_ids.begin());
  only_gadget.prefs[0] = WeakOrder::strict({0});
  const auto s = build_shm_scarf(only_gadget);
  EXPECT_EQ(s.problem.matrix, (std::vector<RationalVector>{vec({1}), vec({1})}));
  EXPECT_EQ(s.problem.bound, vec({1, 1}));
}

TEST(BuildShmScarf, ZeroCapacityVertexDropsItsEdges) {
  auto inst = triangle();
  inst.capacity[0] = 0;
  const auto s = build_shm_scarf(inst);
  EXPECT_EQ(s.column_edge, std::vector<int>{1});
  EXPECT_EQ(s.problem.rows(), 3);
}

TEST(BuildShmScarf, RequiresStrictPreferences) {
  auto inst = triangle();
  inst.prefs[0] = WeakOrder({{0, 2}});
  EXPECT_THROW(build_shm_scarf(inst), PreconditionError);
}

// Dominating points of the Scarf problem are stable fractional matchings.
TEST(BuildShmScarf, DominatingPointsAreFractionallyStable) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 2 + static_cast<int>(seed % 2);
    cfg.max_vertices = 3;
    cfg.max_edges = 4;
    const auto inst = break_ties(generate_shm(cfg));
    const auto s = build_shm_scarf(inst);
    const auto pt = solve_scarf(s.problem);
    const auto x = expand_columns(s, pt.x, inst.num_edges());
    EXPECT_TRUE(testutil::shm_within_capacity(inst, inst.capacity, x));
    EXPECT_TRUE(testutil::shm_blocking(inst, inst.capacity, x).empty()) << "seed " << seed;
  }
}

TEST(RoundShm, IntegralPointIsLeftAlone) {
  const auto inst = add_saturation_gadget(HyperBuilder({"a", "b"}).edge("ab", {"a", "b"}).pref("a", {{"ab"}}).pref("b", {{"ab"}}).build());
  const auto x = vec({1, 0, 0});
  const auto r = round_shm(inst, x);
  EXPECT_EQ(r.z, x);
  EXPECT_TRUE(r.trace.empty());
}

TEST(RoundShm, TriangleKeepsTwoEdges) {
  const auto g = add_saturation_gadget(triangle());
  const auto half = make_rational(1, 2);
  const auto x = vec({half, half, half, 0, 0, 0});
  const auto r = round_shm(g, x);
  ASSERT_TRUE(all_integral(r.z));
  EXPECT_EQ(r.z[0] + r.z[1] + r.z[2], 2);
  for (int e = 3; e < 6; ++e) EXPECT_EQ(r.z[e], 0);
  Rational load = 0;
  for (int e = 0; e < 6; ++e) load += r.z[e] * static_cast<long>(g.edges[e].size());
  EXPECT_EQ(load, 4);  // sum of q plus one
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace[0].deleted_row, "a");
  EXPECT_EQ(r.trace[0].fractional, 3);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i].objective, r.trace[i - 1].objective);
}

TEST(RoundShm, UnsaturatedStartIsRejected) {
  EXPECT_THROW(round_shm(add_saturation_gadget(triangle()), RationalVector(6)), PreconditionError);
}

TEST(ComputeShmCapacities, Examples) {
  const auto inst = triangle();
  const auto half = make_rational(1, 2);
  const auto rev = compute_shm_capacities(inst, vec({half, half, half}), vec({1, 1, 0}));
  EXPECT_EQ(rev.revised, vec({1, 2, 1}));
  EXPECT_EQ(rev.max_deviation(), 1);
  EXPECT_EQ(rev.sum_deviation(), 1);

  const auto y = vec({1, 0, 0});
  EXPECT_EQ(compute_shm_capacities(inst, y, y).revised, vec({1, 1, 1}));  // c is slack: max(q, 0)

  auto roomy = inst;
  roomy.capacity = vec({2, 2, 2});
  EXPECT_EQ(compute_shm_capacities(roomy, y, y).revised, vec({2, 2, 2}));
}

TEST(ComputeShmCapacities, GadgetEdgesCountBeforeStripping) {
  const auto g = add_saturation_gadget(triangle());
  const auto z = vec({1, 0, 0, 0, 0, 1});
  const auto rev = compute_shm_capacities(g, z, z);
  EXPECT_EQ(rev.revised, vec({1, 1, 1}));
}

TEST(StripGadget, RealEdgesPassThrough) { EXPECT_EQ(strip_gadget(vec({1, 0, 1, 0, 0, 0}), 3), vec({1, 0, 1})); }

// v holds only its gadget copy; w has no room, so vw cannot block either
// before or after stripping.
TEST(StripGadget, GadgetOnlyMatchingBecomesEmptyAndStaysStable) {
  const auto inst = HyperBuilder({"v", "w"}).edge("vw", {"v", "w"}).pref("v", {{"vw"}}).pref("w", {{"vw"}}).cap("w", 0).build();
  const auto g = add_saturation_gadget(inst);
  ASSERT_EQ(g.num_edges(), 2);
  const auto z = vec({0, 1});
  const auto q = vec({1, 0});
  EXPECT_TRUE(verify_shm(g, q, z).stable());
  const auto m = strip_gadget(z, inst.num_edges());
  EXPECT_EQ(m, vec({0}));
  EXPECT_TRUE(verify_shm(inst, q, m).stable());
  EXPECT_TRUE(testutil::shm_blocking(inst, q, m).empty());
}

TEST(VerifyShm, EmptyMatchingIsBlockedEverywhere) {
  const auto inst = triangle();
  const auto r = verify_shm(inst, inst.capacity, RationalVector(3));
  EXPECT_EQ(r.blocking_edges, (std::vector<int>{0, 1, 2}));
}

TEST(VerifyShm, TriangleWithRaisedCapacityIsStable) {
  const auto r = verify_shm(triangle(), vec({1, 2, 1}), vec({1, 1, 0}));
  EXPECT_TRUE(r.stable());
  EXPECT_FALSE(verify_shm(triangle(), vec({1, 1, 1}), vec({1, 1, 0})).stable());
}

TEST(VerifyShm, OverCapacityIsReported) {
  const auto r = verify_shm(triangle(), vec({1, 1, 1}), vec({1, 1, 0}));
  EXPECT_EQ(r.over_capacity, std::vector<int>{1});
}

TEST(VerifyShm, WeakOrdersNeedStrictImprovement) {
  auto inst = triangle();
  inst.prefs[0] = WeakOrder({{0, 2}});
  // ca would need a to drop ab, which a ranks equally
  const auto r = verify_shm(inst, vec({1, 1, 1}), vec({1, 0, 0}));
  EXPECT_EQ(r.blocking_edges, std::vector<int>{1});
}

TEST(VerifyShm, DeferredAcceptanceOutcomesAreStable) {
  for (const auto& mk : testutil::all_2x2()) {
    const auto inst = testutil::marriage_hypergraph(mk);
    const auto m = testutil::marriage_vector(mk, testutil::deferred_acceptance(mk));
    EXPECT_TRUE(verify_shm(inst, inst.capacity, m).stable());
  }
}

TEST(VerifyShm, AgreesWithReferenceCheckerOnAllSubsets) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.max_vertices = 4;
    cfg.max_edges = 6;
    cfg.tie_rate = 0.5;
    const auto inst = generate_shm(cfg);
    const int m = inst.num_edges();
    for (int mask = 0; mask < (1 << m); ++mask) {
      RationalVector x(m);
      for (int e = 0; e < m; ++e) x[e] = mask >> e & 1;
      EXPECT_EQ(verify_shm(inst, inst.capacity, x).blocking_edges, testutil::shm_blocking(inst, inst.capacity, x));
    }
  }
}

TEST(SolveShm, BipartiteInstanceKeepsCapacities) {
  for (const auto& mk : testutil::all_2x2()) {
    const auto inst = testutil::marriage_hypergraph(mk);
    const auto sol = solve_shm(inst);
    EXPECT_EQ(sol.revision.revised, inst.capacity);
    EXPECT_TRUE(sol.certificate.pass());
    EXPECT_TRUE(testutil::marriage_stable(mk, [&] {
      std::vector<int> wife(2, -1);
      for (int e = 0; e < 4; ++e)
        if (sol.matching[e] == 1) wife[e / 2] = e % 2;
      return wife;
    }()));
  }
}

TEST(SolveShm, TriangleWithinBoundsAndStable) {
  const auto sol = solve_shm(triangle());
  const auto& c = sol.certificate;
  EXPECT_TRUE(c.pass());
  EXPECT_EQ(c.ell, 2);
  EXPECT_EQ(c.max_deviation, 1);
  EXPECT_EQ(c.sum_deviation, 1);
  EXPECT_EQ(sol.x_star, vec({make_rational(1, 2), make_rational(1, 2), make_rational(1, 2), 0, 0, 0}));
  EXPECT_EQ(sum(sol.matching), 2);
  EXPECT_TRUE(testutil::shm_blocking(triangle(), sol.revision.revised, sol.matching).empty());
  EXPECT_TRUE(all_integral(sol.z));
}

TEST(SolveShm, InvalidInstanceIsAnInputError) {
  auto inst = triangle();
  inst.capacity[0] = make_rational(1, 2);
  EXPECT_THROW(solve_shm(inst), InputError);
}

TEST(SolveShm, SupportContainmentOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 3;
    const auto sol = solve_shm(generate_shm(cfg));
    for (std::size_t e = 0; e < sol.z.size(); ++e) {
      if (sgn(sol.z[e]) > 0) { EXPECT_GT(sol.x_star[e], 0); }
      if (sol.x_star[e] == 1) { EXPECT_EQ(sol.z[e], 1); }
    }
    EXPECT_TRUE(sol.certificate.pass()) << "seed " << seed;
  }
}

// Most random instances already have an integral starting point; this sweep
// keeps only the fractional ones and checks them against brute force.
TEST(SolveShm, FractionalStartsAgreeWithEnumeration) {
  int fractional = 0;
  for (int ell = 2; ell <= 3; ++ell)
    for (std::uint64_t seed = 1; seed <= 1500; ++seed) {
      GeneratorConfig cfg;
      cfg.seed = seed;
      cfg.ell = ell;
      const auto inst = generate_shm(cfg);
      const auto sol = solve_shm(inst);
      if (all_integral(sol.x_star)) continue;
      ++fractional;
      EXPECT_TRUE(sol.certificate.pass()) << "seed " << seed;
      EXPECT_FALSE(sol.trace.empty());
      EXPECT_TRUE(testutil::shm_blocking(inst, sol.revision.revised, sol.matching).empty()) << "seed " << seed;
      if (inst.num_edges() > 12) continue;
      std::vector<long> q_prime;
      for (const auto& x : sol.revision.revised) q_prime.push_back(to_long(x));
      const auto near = enumerate_near_feasible(inst, ell - 1, ell - 1);
      EXPECT_TRUE(std::any_of(near.begin(), near.end(), [&](const NearFeasible& nf) { return nf.capacity == q_prime; }))
          << "seed " << seed;
    }
  EXPECT_GE(fractional, 100);
}
