#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nearstable;
using testutil::vec;

namespace {

// Both students prefer c1, both colleges prefer s1, and c1, c2 share a
// common quota of 1.
const char* kTwoByTwo = R"({
  "kind": "cacq", "version": 1,
  "students": ["s1", "s2"],
  "colleges": [
    {"id": "c1", "quota": 1, "preferences": [["s1"], ["s2"]]},
    {"id": "c2", "quota": 1, "preferences": [["s1"], ["s2"]]}
  ],
  "edges": [["s1", "c1"], ["s1", "c2"], ["s2", "c1"], ["s2", "c2"]],
  "sets": [{"id": "F", "colleges": ["c1", "c2"], "quota": 1, "master": [["s1"], ["s2"]]}],
  "student_preferences": {"s1": [["c1"], ["c2"]], "s2": [["c1"], ["c2"]]}
})";

CacqInstance two_by_two() { return cacq_from_json(parse_json(kTwoByTwo)); }

CacqInstance random_instance(std::uint64_t seed, int ell, int students = 6) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.ell = ell;
  cfg.max_students = students;
  return generate_cacq(cfg);
}

RationalVector quotas_of(const CacqInstance& inst) {
  RationalVector q;
  for (const auto& s : inst.sets) q.push_back(s.quota);
  return q;
}

}  // namespace

TEST(BuildCacqScarf, TwoByTwoHasFiveRowsAndFourColumns) {
  const auto s = build_cacq_scarf(normalize_cacq(two_by_two()));
  EXPECT_EQ(s.problem.rows(), 5);
  EXPECT_EQ(s.problem.cols(), 4);
  EXPECT_EQ(s.row_labels, (std::vector<std::string>{"set F", "set {c1}", "set {c2}", "student s1", "student s2"}));
  EXPECT_EQ(s.problem.bound, vec({1, 1, 1, 1, 1}));
}

TEST(BuildCacqScarf, SetRowTieBrokenByStudentPreference) {
  auto inst = normalize_cacq(two_by_two());
  EXPECT_EQ(build_cacq_scarf(inst).problem.row_orders[0], (std::vector<int>{0, 1, 2, 3}));
  inst.student_prefs[0] = WeakOrder::strict({1, 0});
  EXPECT_EQ(build_cacq_scarf(inst).problem.row_orders[0], (std::vector<int>{1, 0, 2, 3}));
}

TEST(BuildCacqScarf, RequiresStrictOrders) {
  auto inst = normalize_cacq(two_by_two());
  inst.sets[0].master = WeakOrder({{0, 1}});
  EXPECT_THROW(build_cacq_scarf(inst), PreconditionError);
}

TEST(BuildCacqScarf, DominatingPointsAreFractionallyStable) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = break_ties(normalize_cacq(random_instance(seed, 1 + seed % 2, 2)));
    const auto s = build_cacq_scarf(inst);
    const auto x = expand_columns(s, solve_scarf(s.problem).x, inst.num_edges());
    EXPECT_TRUE(testutil::cacq_within_quotas(inst, quotas_of(inst), x));
    EXPECT_TRUE(testutil::cacq_blocking(inst, quotas_of(inst), x).empty()) << "seed " << seed;
  }
}

TEST(RoundCacq, IntegralPointIsLeftAlone) {
  const auto inst = normalize_cacq(two_by_two());
  const auto x = vec({1, 0, 0, 0});
  const auto r = round_cacq(inst, x);
  EXPECT_EQ(r.z, x);
  EXPECT_TRUE(r.trace.empty());
}

TEST(RoundCacq, TwoByTwoAssignsAtMostOneStudent) {
  const auto inst = normalize_cacq(two_by_two());
  const auto half = make_rational(1, 2);
  // a feasible fractional start that spreads the common quota
  const auto r = round_cacq(inst, vec({half, 0, half, 0}));
  ASSERT_TRUE(all_integral(r.z));
  EXPECT_LE(sum(r.z), 1);
  // the empty singleton {c2} is slack, so it goes first
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace[0].deleted_set, "{c2}");
  EXPECT_FALSE(r.trace[0].tight);
}

TEST(ComputeCacqQuotas, IntegralPointKeepsQuotas) {
  const auto inst = normalize_cacq(two_by_two());
  const auto x = vec({1, 0, 0, 0});
  const auto rev = compute_cacq_quotas(inst, x, x);
  EXPECT_EQ(rev.revised, quotas_of(inst));
  EXPECT_EQ(rev.max_deviation(), 0);
}

TEST(ComputeCacqQuotas, SlackSetKeepsItsQuota) {
  auto inst = normalize_cacq(two_by_two());
  inst.sets[0].quota = 2;
  const auto x = vec({1, 0, 0, 0});
  EXPECT_EQ(compute_cacq_quotas(inst, x, x).revised[0], 2);
}

TEST(ComputeCacqQuotas, NamesTheFailedHypothesis) {
  const auto inst = normalize_cacq(two_by_two());
  const auto x = vec({1, 0, 0, 0});
  try {
    compute_cacq_quotas(inst, x, vec({0, 1, 0, 0}));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("support containment"), std::string::npos);
  }
  try {
    compute_cacq_quotas(inst, x, vec({0, 0, 0, 0}));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("fully assigned"), std::string::npos);
  }
  const auto half = make_rational(1, 2);
  EXPECT_THROW(compute_cacq_quotas(inst, vec({half, half, 0, 0}), vec({1, 1, 0, 0})), PreconditionError);
}

TEST(VerifyCacq, EmptyMatchingIsBlockedEverywhere) {
  const auto inst = normalize_cacq(two_by_two());
  EXPECT_EQ(verify_cacq(inst, quotas_of(inst), RationalVector(4)).blocking_edges, (std::vector<int>{0, 1, 2, 3}));
}

TEST(VerifyCacq, CommonQuotaFilledByBetterStudentIsStable) {
  const auto inst = normalize_cacq(two_by_two());
  const auto r = verify_cacq(inst, quotas_of(inst), vec({1, 0, 0, 0}));
  EXPECT_TRUE(r.stable());
  // with s2 placed instead, s1 displaces s2 from F and takes either college
  const auto worse = verify_cacq(inst, quotas_of(inst), vec({0, 0, 1, 0}));
  EXPECT_EQ(worse.blocking_edges, (std::vector<int>{0, 1}));
}

TEST(VerifyCacq, ReportsQuotaViolations) {
  const auto inst = normalize_cacq(two_by_two());
  const auto r = verify_cacq(inst, quotas_of(inst), vec({1, 0, 0, 1}));
  EXPECT_EQ(r.over_quota_sets, std::vector<int>{0});
  EXPECT_FALSE(r.feasible());
  EXPECT_FALSE(verify_cacq(inst, quotas_of(inst), vec({1, 1, 0, 0})).over_quota_students.empty());
}

TEST(VerifyCacq, DeferredAcceptanceIsStableWithoutCommonSets) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto strict = break_ties(normalize_cacq(random_instance(seed, 1)));
    ASSERT_EQ(strict.max_sets_per_college(), 1);
    const auto m = testutil::college_admission_da(strict);
    EXPECT_TRUE(verify_cacq(strict, quotas_of(strict), m).stable()) << "seed " << seed;
  }
}

TEST(VerifyCacq, AgreesWithReferenceChecker) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = normalize_cacq(random_instance(seed, 2, 3));
    const int m = inst.num_edges();
    ASSERT_LE(m, 12);
    for (int mask = 0; mask < (1 << m); ++mask) {
      RationalVector x(m);
      for (int e = 0; e < m; ++e) x[e] = mask >> e & 1;
      EXPECT_EQ(verify_cacq(inst, quotas_of(inst), x).blocking_edges,
                testutil::cacq_blocking(inst, quotas_of(inst), x));
    }
  }
}

TEST(SolveCacq, TwoByTwoKeepsQuotas) {
  const auto sol = solve_cacq(two_by_two());
  EXPECT_EQ(sol.matching, vec({1, 0, 0, 0}));
  EXPECT_EQ(sol.revision.revised, quotas_of(sol.normalized));
  EXPECT_TRUE(sol.certificate.pass());
  EXPECT_EQ(sol.certificate.ell, 2);
}

TEST(SolveCacq, SingleSetInstancesStayWithinOne) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto sol = solve_cacq(random_instance(seed, 1));
    EXPECT_LE(sol.certificate.max_deviation, 1);
    EXPECT_TRUE(sol.certificate.pass()) << "seed " << seed;
  }
}

TEST(SolveCacq, TwoSetsPerCollegeStayWithinThree) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto sol = solve_cacq(random_instance(seed, 2, 5));
    EXPECT_LE(sol.certificate.max_deviation, 3);
    EXPECT_TRUE(sol.certificate.pass()) << "seed " << seed;
    EXPECT_TRUE(testutil::cacq_blocking(sol.normalized, sol.revision.revised, sol.matching).empty());
    for (int e = 0; e < sol.normalized.num_edges(); ++e)
      if (sgn(sol.matching[e]) > 0) { EXPECT_GT(sol.x_star[e], 0); }
  }
}

TEST(SolveCacq, InconsistentMasterListIsAnInputError) {
  auto inst = two_by_two();
  inst.sets[0].master = WeakOrder::strict({1, 0});
  EXPECT_THROW(solve_cacq(inst), InputError);
}

// With a college in its singleton and one other set, the constraint matrix is
// totally unimodular and the starting point is already integral. Overlapping
// sets are needed to reach the rounding loop, and even then it is rare.
TEST(SolveCacq, OverlappingSetsReachTheRoundingLoop) {
  int fractional = 0;
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 3;
    cfg.tie_rate = 0;
    cfg.max_students = 10;
    cfg.max_colleges = 6;
    cfg.max_common_sets = 4;
    const auto sol = solve_cacq(generate_cacq(cfg));
    const int ell = sol.normalized.max_sets_per_college();
    EXPECT_LE(ell, 3);
    EXPECT_LE(sol.certificate.max_deviation, 2 * ell - 1);
    EXPECT_TRUE(sol.certificate.pass()) << "seed " << seed;
    if (all_integral(sol.x_star)) continue;
    ++fractional;
    EXPECT_FALSE(sol.trace.empty());
    EXPECT_TRUE(testutil::cacq_blocking(sol.normalized, sol.revision.revised, sol.matching).empty()) << "seed " << seed;
  }
  EXPECT_GE(fractional, 3);
}

TEST(SolveCacq, TwoSetsPerCollegeStartIntegral) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto sol = solve_cacq(random_instance(seed, 2));
    EXPECT_TRUE(all_integral(sol.x_star)) << "seed " << seed;
  }
}
