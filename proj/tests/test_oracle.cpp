#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nearstable;
using testutil::triangle;
using testutil::vec;

TEST(EnumerateStable, TriangleHasNoStableMatching) {
  const auto inst = triangle();
  EXPECT_TRUE(enumerate_stable(inst, inst.capacity).empty());
}

TEST(EnumerateStable, AlignedTwoByTwoGivesTheDeferredAcceptanceMatching) {
  testutil::Marriage mk{2, {{0, 1}, {0, 1}}, {{0, 1}, {0, 1}}};
  const auto inst = testutil::marriage_hypergraph(mk);
  const auto all = enumerate_stable(inst, inst.capacity);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], testutil::marriage_vector(mk, testutil::deferred_acceptance(mk)));
}

TEST(EnumerateStable, MatchesPermutationSearchOnAllTwoByTwo) {
  for (const auto& mk : testutil::all_2x2()) {
    const auto inst = testutil::marriage_hypergraph(mk);
    std::vector<RationalVector> expected;
    for (const auto& wife : testutil::all_stable_marriages(mk)) expected.push_back(testutil::marriage_vector(mk, wife));
    auto got = enumerate_stable(inst, inst.capacity);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);
  }
}

TEST(EnumerateStable, ZeroCapacitiesLeaveOnlyTheEmptyMatching) {
  const auto inst = triangle();
  const auto all = enumerate_stable(inst, vec({0, 0, 0}));
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], RationalVector(3));
}

TEST(EnumerateStable, SizeCapIsAResourceLimit) {
  GeneratorConfig cfg;
  cfg.max_edges = 15;
  const auto inst = generate_shm(cfg);
  const int cap = inst.num_edges() - 1;
  EXPECT_THROW(enumerate_stable(inst, inst.capacity, cap), ResourceLimitError);
  EXPECT_THROW(enumerate_near_feasible(inst, 1, std::nullopt, cap), ResourceLimitError);
  EXPECT_NO_THROW(enumerate_stable(inst, inst.capacity, cap + 1));
}

TEST(EnumerateNearFeasible, TriangleWithUnitSlack) {
  const auto inst = triangle();
  const auto found = enumerate_near_feasible(inst, 1, 1);
  ASSERT_FALSE(found.empty());
  bool has_example = false;
  for (const auto& nf : found) {
    if (nf.capacity == std::vector<long>{1, 2, 1}) has_example = true;
    RationalVector q(nf.capacity.begin(), nf.capacity.end());
    EXPECT_TRUE(testutil::shm_blocking(inst, q, nf.matching).empty());
    EXPECT_TRUE(testutil::shm_within_capacity(inst, q, nf.matching));
  }
  EXPECT_TRUE(has_example);
  const auto sol = solve_shm(inst);
  std::vector<long> q_prime;
  for (const auto& x : sol.revision.revised) q_prime.push_back(to_long(x));
  EXPECT_TRUE(std::any_of(found.begin(), found.end(), [&](const NearFeasible& nf) { return nf.capacity == q_prime; }));
}

TEST(EnumerateNearFeasible, TriangleWithoutSlackIsEmpty) {
  EXPECT_TRUE(enumerate_near_feasible(triangle(), 0).empty());
}

TEST(EnumerateNearFeasible, StableInstanceKeepsItsCapacities) {
  for (const auto& mk : testutil::all_2x2()) {
    const auto inst = testutil::marriage_hypergraph(mk);
    const auto found = enumerate_near_feasible(inst, 0);
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found[0].capacity, (std::vector<long>{1, 1, 1, 1}));
  }
}

// Every capacity vector within the bound is tried directly against the
// reference checker and compared with the oracle's answer.
TEST(EnumerateNearFeasible, AgreesWithDirectSearch) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.max_vertices = 4;
    cfg.max_edges = 5;
    const auto inst = generate_shm(cfg);
    const int n = inst.num_vertices(), m = inst.num_edges();
    const long bound = 1;
    std::set<std::vector<long>> expected;
    std::vector<long> q(n);
    auto rec = [&](auto&& self, int v) -> void {
      if (v == n) {
        RationalVector qr(q.begin(), q.end());
        for (int mask = 0; mask < (1 << m); ++mask) {
          RationalVector x(m);
          for (int e = 0; e < m; ++e) x[e] = mask >> e & 1;
          if (testutil::shm_within_capacity(inst, qr, x) && testutil::shm_blocking(inst, qr, x).empty()) {
            expected.insert(q);
            return;
          }
        }
        return;
      }
      const long base = to_long(inst.capacity[v]);
      for (long value = std::max(0L, base - bound); value <= base + bound; ++value) {
        q[v] = value;
        self(self, v + 1);
      }
    };
    rec(rec, 0);
    std::set<std::vector<long>> got;
    for (const auto& nf : enumerate_near_feasible(inst, bound)) got.insert(nf.capacity);
    EXPECT_EQ(got, expected) << "seed " << seed;
  }
}

TEST(EnumerateStableCacq, MatchesReferenceChecker) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 2;
    cfg.max_students = 3;
    const auto inst = normalize_cacq(generate_cacq(cfg));
    RationalVector quotas;
    for (const auto& s : inst.sets) quotas.push_back(s.quota);
    const auto all = enumerate_stable(inst, quotas);
    std::size_t expected = 0;
    for (int mask = 0; mask < (1 << inst.num_edges()); ++mask) {
      RationalVector x(inst.num_edges());
      for (int e = 0; e < inst.num_edges(); ++e) x[e] = mask >> e & 1;
      if (testutil::cacq_within_quotas(inst, quotas, x) && testutil::cacq_blocking(inst, quotas, x).empty()) ++expected;
    }
    EXPECT_EQ(all.size(), expected) << "seed " << seed;
  }
}

TEST(Generator, SameSeedSameInstance) {
  GeneratorConfig cfg;
  cfg.seed = 1;
  EXPECT_EQ(generate_fixtures(cfg), generate_fixtures(cfg));
  EXPECT_EQ(generate_shm(cfg), generate_shm(cfg));
  EXPECT_EQ(generate_cacq(cfg), generate_cacq(cfg));
  const auto a = generate_smf(cfg), b = generate_smf(cfg);
  EXPECT_EQ(a.instance, b.instance);
  EXPECT_EQ(a.flow, b.flow);
  auto other = cfg;
  other.seed = 2;
  EXPECT_NE(generate_shm(cfg), generate_shm(other));
}

TEST(Generator, RngIsTheStandardMersenneTwister) {
  Rng rng(5489);
  // the standard requires the 10000th output of a default-seeded mt19937_64
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next();
  EXPECT_EQ(x, 9981545732273789042ULL);
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const long v = r.uniform(-2, 5);
    EXPECT_GE(v, -2);
    EXPECT_LE(v, 5);
  }
}

TEST(Generator, InstancesAreValidAndWithinLimits) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 3;
    const auto shm = generate_shm(cfg);
    EXPECT_TRUE(validate(shm).empty());
    EXPECT_EQ(shm.max_edge_size(), 3);
    EXPECT_LE(shm.num_vertices(), cfg.max_vertices);
    EXPECT_LE(shm.num_edges(), cfg.max_edges);
    cfg.max_vertices = 10;
    const auto fx = generate_fixtures(cfg);
    EXPECT_TRUE(validate(fx).empty());
    EXPECT_LE(fx.max_edge_size(), 2);
  }
}

TEST(Generator, CacqCollegesSitInTheirSingletonAndAtMostOneMoreSet) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 2;
    const auto inst = generate_cacq(cfg);
    EXPECT_TRUE(validate(inst).empty());
    EXPECT_LE(inst.num_students(), cfg.max_students);
    EXPECT_LE(inst.num_colleges(), cfg.max_colleges);
    int common = 0;
    for (const auto& s : inst.sets) common += s.colleges.size() > 1;
    EXPECT_LE(common, cfg.max_common_sets);
    const auto norm = normalize_cacq(inst);
    EXPECT_LE(norm.max_sets_per_college(), 2);
    for (int c = 0; c < norm.num_colleges(); ++c) {
      int singleton = 0;
      for (const auto& s : norm.sets) singleton += s.colleges == std::vector<int>{c};
      EXPECT_EQ(singleton, 1);
    }
  }
}

TEST(Generator, SmfFlowsPassTheChecker) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.commodities = 2;
    cfg.max_edges = 14;
    const auto fc = generate_smf(cfg);
    EXPECT_TRUE(validate(fc.instance).empty());
    EXPECT_TRUE(validate_flow(fc.instance, fc.flow).empty());
    EXPECT_LE(fc.instance.num_vertices(), cfg.max_vertices);
    EXPECT_LE(fc.instance.num_arcs(), cfg.max_edges);
    EXPECT_TRUE(verify_flow(fc.instance, fc.flow).stable()) << "seed " << seed;
    for (const auto& fj : fc.flow)
      for (const auto& x : fj) EXPECT_LE(x.get_den(), 8);
  }
}
