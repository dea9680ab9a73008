#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nearstable;
using testutil::triangle;

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("1/2"), make_rational(1, 2));
  EXPECT_EQ(parse_rational("2/4"), make_rational(1, 2));
  EXPECT_EQ(parse_rational("0.125"), make_rational(1, 8));
  EXPECT_EQ(parse_rational("-3e-2"), make_rational(-3, 100));
  EXPECT_EQ(parse_rational("1.5E1"), Rational(15));
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational(".5"), make_rational(1, 2));
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "1/0", "a", "1/2/3", "1.", "1e", "--1", "0x10", "1/-2"})
    EXPECT_THROW(parse_rational(bad), InputError) << bad;
}

TEST(Rational, FloorCeilAndGaps) {
  const auto x = make_rational(-7, 3);
  EXPECT_EQ(floor_of(x), -3);
  EXPECT_EQ(ceil_of(x), -2);
  EXPECT_EQ(up_gap(x), make_rational(1, 3));
  EXPECT_EQ(down_gap(x), make_rational(2, 3));
  EXPECT_EQ(up_gap(Rational(4)), 0);
}

TEST(WeakOrder, RanksAndTies) {
  WeakOrder w({{3}, {1, 4}, {0}});
  EXPECT_TRUE(w.prefers(3, 1));
  EXPECT_TRUE(w.tied(1, 4));
  EXPECT_FALSE(w.prefers(1, 4));
  EXPECT_FALSE(w.prefers(0, 3));
  EXPECT_FALSE(w.contains(2));
  EXPECT_FALSE(w.is_strict());
  EXPECT_EQ(w.universe(), (std::vector<int>{0, 1, 3, 4}));
  EXPECT_TRUE(WeakOrder({{1}, {1}}).has_duplicates_or_empty_groups());
  EXPECT_TRUE(WeakOrder({{1}, {}}).has_duplicates_or_empty_groups());
}

TEST(BreakTies, StrictInputIsUnchanged) {
  const auto w = WeakOrder::strict({2, 0, 1});
  EXPECT_EQ(break_ties(w), w);
}

TEST(BreakTies, TieGroupOrderedByIndex) {
  const WeakOrder w({{5, 2}, {7}});
  const auto r = break_ties(w);
  EXPECT_TRUE(r.is_strict());
  EXPECT_TRUE(r.prefers(2, 5));
  EXPECT_TRUE(r.prefers(5, 7));
}

TEST(BreakTies, RefinesEveryStrictComparison) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> items(8);
    std::iota(items.begin(), items.end(), 0);
    const auto w = random_weak_order(rng, items, 0.5);
    const auto r = break_ties(w);
    ASSERT_TRUE(r.is_strict());
    for (int a : items)
      for (int b : items)
        if (w.prefers(a, b)) { EXPECT_TRUE(r.prefers(a, b)); }
  }
}

TEST(Validate, TriangleIsWellFormed) { EXPECT_TRUE(validate(triangle()).empty()); }

TEST(Validate, DanglingVertexReference) {
  auto inst = triangle();
  inst.edges[1] = {1, 7};
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "edge bc");
  EXPECT_NE(v[0].rule.find("unknown vertex"), std::string::npos);
}

TEST(Validate, FractionalOrNegativeCapacity) {
  auto inst = triangle();
  inst.capacity[0] = make_rational(1, 2);
  inst.capacity[2] = -1;
  EXPECT_EQ(validate(inst).size(), 2u);
}

TEST(Validate, PreferenceMustCoverIncidentEdges) {
  auto inst = triangle();
  inst.prefs[0] = WeakOrder::strict({0});
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "vertex a");
}

namespace {

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

}  // namespace

TEST(Validate, MasterListContradictingCollegeOrder) {
  auto inst = two_by_two();
  inst.sets[0].master = WeakOrder::strict({1, 0});
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 2u);
  for (const auto& x : v) EXPECT_NE(x.rule.find("inconsistent"), std::string::npos);
  inst.sets[0].colleges = {0};
  inst.sets[0].quota = 1;
  const auto single = validate(inst);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].rule, "master list is inconsistent with college c1");
}

TEST(Validate, FlowSelfLoopAndMissingPreferences) {
  FlowInstance inst;
  inst.vertex_ids = {"s", "t"};
  inst.commodities = {{"k", 0, 1}};
  inst.arcs = {{"a", 0, 0, 1, {1}, WeakOrder::strict({0})}};
  inst.vertex_prefs = {{WeakOrder::strict({0})}, {WeakOrder()}};
  const auto v = validate(inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "self-loop");
}

TEST(Normalize, AddsSingletonsWithoutSets) {
  auto inst = two_by_two();
  inst.sets.clear();
  const auto norm = normalize_cacq(inst);
  ASSERT_EQ(norm.num_sets(), 2);
  EXPECT_EQ(norm.sets[0].id, "{c1}");
  EXPECT_EQ(norm.sets[1].colleges, std::vector<int>{1});
  EXPECT_EQ(norm.sets[1].quota, inst.colleges[1].quota);
  EXPECT_EQ(norm.sets[1].master, inst.colleges[1].pref);
  EXPECT_EQ(norm.max_sets_per_college(), 1);
  EXPECT_TRUE(validate(norm).empty());
}

TEST(Normalize, Idempotent) {
  const auto once = normalize_cacq(two_by_two());
  EXPECT_EQ(normalize_cacq(once), once);
}

TEST(Normalize, FacultySetGivesEllTwo) {
  const auto norm = normalize_cacq(two_by_two());
  EXPECT_EQ(norm.num_sets(), 3);
  EXPECT_EQ(norm.max_sets_per_college(), 2);
}

// Every matching that is stable after tie-breaking is stable for the
// original weak orders.
TEST(BreakTies, StabilityTransfersToOriginalInstance) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.ell = 2 + static_cast<int>(seed % 2);
    cfg.max_vertices = 5;
    cfg.max_edges = 8;
    cfg.tie_rate = 0.6;
    const auto inst = generate_shm(cfg);
    const auto strict = break_ties(inst);
    for (const auto& m : enumerate_stable(strict, strict.capacity)) {
      EXPECT_TRUE(testutil::shm_blocking(inst, inst.capacity, m).empty()) << "seed " << seed;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}
