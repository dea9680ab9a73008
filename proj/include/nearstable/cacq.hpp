#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/model.hpp"
#include "nearstable/polytope.hpp"
#include "nearstable/scarf.hpp"
#include "nearstable/shm.hpp"

namespace nearstable {

struct CacqReport {
  std::vector<int> over_quota_students;
  std::vector<int> over_quota_sets;
  std::vector<int> blocking_edges;
  bool feasible() const { return over_quota_students.empty() && over_quota_sets.empty(); }
  bool stable() const { return feasible() && blocking_edges.empty(); }
};

namespace detail {

inline std::vector<std::vector<int>> sets_of_college(const CacqInstance& inst) {
  std::vector<std::vector<int>> out(inst.colleges.size());
  for (int j = 0; j < inst.num_sets(); ++j)
    for (int c : inst.sets[j].colleges) out[c].push_back(j);
  return out;
}

inline std::vector<std::vector<int>> edges_of_set(const CacqInstance& inst) {
  auto membership = sets_of_college(inst);
  std::vector<std::vector<int>> out(inst.sets.size());
  for (int e = 0; e < inst.num_edges(); ++e)
    for (int j : membership[inst.edges[e].college]) out[j].push_back(e);
  return out;
}

inline std::vector<std::vector<int>> edges_of_student(const CacqInstance& inst) {
  std::vector<std::vector<int>> out(inst.students.size());
  for (int e = 0; e < inst.num_edges(); ++e) out[inst.edges[e].student].push_back(e);
  return out;
}

}  // namespace detail

/// Blocking edges and quota violations of a matching. `quotas` is indexed by
/// set; the instance is expected to be normalized so every college has its
/// singleton set.
inline CacqReport verify_cacq(const CacqInstance& inst, const RationalVector& quotas, const RationalVector& matching) {
  CacqReport report;
  const auto by_student = detail::edges_of_student(inst);
  const auto by_set = detail::edges_of_set(inst);
  const auto membership = detail::sets_of_college(inst);
  RationalVector student_load(inst.num_students()), set_load(inst.num_sets());
  for (int s = 0; s < inst.num_students(); ++s) {
    for (int e : by_student[s]) student_load[s] += matching[e];
    if (student_load[s] > 1) report.over_quota_students.push_back(s);
  }
  for (int j = 0; j < inst.num_sets(); ++j) {
    for (int e : by_set[j]) set_load[j] += matching[e];
    if (set_load[j] > quotas[j]) report.over_quota_sets.push_back(j);
  }
  for (int e = 0; e < inst.num_edges(); ++e) {
    const auto [s, c] = inst.edges[e];
    bool student_wants = student_load[s] < 1;
    for (int other : by_student[s])
      if (!student_wants && sgn(matching[other]) > 0 && inst.student_prefs[s].prefers(e, other)) student_wants = true;
    if (!student_wants) continue;
    bool admitted = true;
    for (int j : membership[c]) {
      if (set_load[j] < quotas[j]) continue;
      bool displaces = false;
      for (int other : by_set[j])
        if (sgn(matching[other]) > 0 && inst.sets[j].master.prefers(s, inst.edges[other].student)) {
          displaces = true;
          break;
        }
      if (!displaces) {
        admitted = false;
        break;
      }
    }
    if (admitted) report.blocking_edges.push_back(e);
  }
  return report;
}

struct CacqScarf {
  ScarfProblem problem;
  std::vector<int> column_edge;
  std::vector<std::string> row_labels;
};

/// Set rows (rhs q(C_j)) then student rows (rhs 1). A set row ranks edge
/// {s, c} by the master list, and two edges of the same student by that
/// student's order. Sets with quota 0 pin all their edges to 0.
inline CacqScarf build_cacq_scarf(const CacqInstance& inst) {
  for (const auto& s : inst.sets)
    if (!s.master.is_strict()) throw PreconditionError("build_cacq_scarf: master lists must be strict");
  for (const auto& p : inst.student_prefs)
    if (!p.is_strict()) throw PreconditionError("build_cacq_scarf: student preferences must be strict");
  const auto membership = detail::sets_of_college(inst);
  CacqScarf out;
  std::vector<int> edge_column(inst.num_edges(), -1);
  for (int e = 0; e < inst.num_edges(); ++e) {
    bool live = true;
    for (int j : membership[inst.edges[e].college])
      if (sgn(inst.sets[j].quota) == 0) live = false;
    if (!live) continue;
    edge_column[e] = static_cast<int>(out.column_edge.size());
    out.column_edge.push_back(e);
  }
  const int m = static_cast<int>(out.column_edge.size());
  auto& p = out.problem;
  const auto by_set = detail::edges_of_set(inst);
  for (int j = 0; j < inst.num_sets(); ++j) {
    const auto& set = inst.sets[j];
    if (sgn(set.quota) == 0) continue;
    std::vector<int> cols;
    for (int e : by_set[j])
      if (edge_column[e] >= 0) cols.push_back(e);
    if (cols.empty()) continue;
    std::sort(cols.begin(), cols.end(), [&](int a, int b) {
      int sa = inst.edges[a].student, sb = inst.edges[b].student;
      if (sa != sb) return *set.master.rank(sa) < *set.master.rank(sb);
      return *inst.student_prefs[sa].rank(a) < *inst.student_prefs[sa].rank(b);
    });
    RationalVector row(m);
    std::vector<int> order;
    for (int e : cols) {
      row[edge_column[e]] = 1;
      order.push_back(edge_column[e]);
    }
    p.matrix.push_back(std::move(row));
    p.bound.push_back(set.quota);
    p.row_orders.push_back(std::move(order));
    out.row_labels.push_back("set " + set.id);
  }
  for (int s = 0; s < inst.num_students(); ++s) {
    RationalVector row(m);
    std::vector<int> order;
    for (int e : inst.student_prefs[s].flatten()) {
      if (edge_column[e] < 0) continue;
      row[edge_column[e]] = 1;
      order.push_back(edge_column[e]);
    }
    if (order.empty()) continue;
    p.matrix.push_back(std::move(row));
    p.bound.push_back(Rational(1));
    p.row_orders.push_back(std::move(order));
    out.row_labels.push_back("student " + inst.students[s]);
  }
  return out;
}

inline RationalVector expand_columns(const CacqScarf& s, const RationalVector& x, int num_edges) {
  RationalVector out(num_edges);
  for (std::size_t c = 0; c < s.column_edge.size(); ++c) out[s.column_edge[c]] = x[c];
  return out;
}

/// Students whose row is tight at x*; the rounding keeps them fully assigned.
inline std::vector<bool> pinned_students(const CacqInstance& inst, const RationalVector& x_star) {
  const auto by_student = detail::edges_of_student(inst);
  std::vector<bool> pinned(inst.num_students(), false);
  for (int s = 0; s < inst.num_students(); ++s) {
    Rational load = 0;
    for (int e : by_student[s]) load += x_star[e];
    pinned[s] = load == 1;
  }
  return pinned;
}

struct CacqRoundStep {
  std::string deleted_set;
  bool tight = false;  // at the current z when deleted
  int fractional_mass = 0;
  int fractional = 0;  // fractional components before the deletion
};

struct CacqRounding {
  RationalVector z;
  std::vector<CacqRoundStep> trace;
};

/// Drops set rows one at a time (non-tight rows with fractional mass at most
/// 2l-1 first, then tight rows with mass at most 2l, lowest set first) and
/// moves to a vertex of the remaining system. Student rows are never dropped.
inline CacqRounding round_cacq(const CacqInstance& inst, const RationalVector& x_star) {
  const int ell = inst.max_sets_per_college();
  const int m = inst.num_edges();
  const auto by_set = detail::edges_of_set(inst);
  const auto by_student = detail::edges_of_student(inst);
  const auto pinned = pinned_students(inst, x_star);

  CacqRounding out;
  out.z = x_star;
  auto& z = out.z;
  std::vector<bool> active(inst.num_sets(), true);

  while (!all_integral(z)) {
    if (out.trace.size() > inst.sets.size()) throw InternalError("round_cacq: more deletions than set rows");
    CacqRoundStep step;
    step.fractional = detail::count_fractional(z);
    auto mass_and_tight = [&](int j) {
      int mass = 0;
      Rational load = 0;
      for (int e : by_set[j]) {
        load += z[e];
        if (!is_integer(z[e])) ++mass;
      }
      return std::pair{mass, load == inst.sets[j].quota};
    };
    int chosen = -1;
    for (int pass = 0; pass < 2 && chosen < 0; ++pass) {
      const bool want_tight = pass == 1;
      const int limit = want_tight ? 2 * ell : 2 * ell - 1;
      for (int j = 0; j < inst.num_sets() && chosen < 0; ++j) {
        if (!active[j]) continue;
        auto [mass, tight] = mass_and_tight(j);
        if (tight == want_tight && mass <= limit) {
          chosen = j;
          step.tight = tight;
          step.fractional_mass = mass;
        }
      }
    }
    if (chosen < 0) throw InternalError("round_cacq: no set row can be deleted while z is fractional");
    active[chosen] = false;
    step.deleted_set = inst.sets[chosen].id;

    LinearSystem sys(m);
    for (int e = 0; e < m; ++e) {
      sys.upper[e] = Rational(1);
      if (is_integer(z[e])) sys.fixed[e] = z[e];
    }
    for (int j = 0; j < inst.num_sets(); ++j) {
      if (!active[j]) continue;
      RationalVector row(m);
      for (int e : by_set[j]) row[e] = 1;
      sys.add_row(std::move(row), Relation::LessEqual, inst.sets[j].quota);
    }
    for (int s = 0; s < inst.num_students(); ++s) {
      if (by_student[s].empty()) continue;
      RationalVector row(m);
      for (int e : by_student[s]) row[e] = 1;
      sys.add_row(std::move(row), pinned[s] ? Relation::Equal : Relation::LessEqual, Rational(1));
    }
    z = extreme_point(sys, std::nullopt, z);
    out.trace.push_back(std::move(step));
  }
  return out;
}

/// Revised common quotas for an integral y: Q_C y at sets tight under x*,
/// max(q(C), Q_C y) elsewhere. Throws PreconditionError when y does not stay
/// inside the support of x* or drops a student that x* fully assigns.
inline CapacityRevision compute_cacq_quotas(const CacqInstance& inst, const RationalVector& x_star,
                                            const RationalVector& y) {
  for (int e = 0; e < inst.num_edges(); ++e) {
    if (!is_integer(y[e]) || sgn(y[e]) < 0)
      throw PreconditionError("compute_cacq_quotas: y is not a nonnegative integer vector");
    if (sgn(x_star[e]) == 0 && sgn(y[e]) != 0)
      throw PreconditionError("compute_cacq_quotas: support containment violated (x*[e] = 0 but y[e] > 0)");
  }
  const auto by_student = detail::edges_of_student(inst);
  const auto pinned = pinned_students(inst, x_star);
  for (int s = 0; s < inst.num_students(); ++s) {
    Rational load = 0;
    for (int e : by_student[s]) load += y[e];
    if (pinned[s] && load != 1)
      throw PreconditionError("compute_cacq_quotas: student " + inst.students[s] +
                              " is fully assigned at x* but not in y");
    if (load > 1)
      throw PreconditionError("compute_cacq_quotas: student " + inst.students[s] + " is assigned twice");
  }
  const auto by_set = detail::edges_of_set(inst);
  CapacityRevision rev;
  for (int j = 0; j < inst.num_sets(); ++j) {
    Rational at_star = 0, at_y = 0;
    for (int e : by_set[j]) {
      at_star += x_star[e];
      at_y += y[e];
    }
    const auto& q = inst.sets[j].quota;
    rev.keys.push_back(inst.sets[j].id);
    rev.original.push_back(q);
    rev.revised.push_back(at_star == q ? at_y : std::max(q, at_y));
  }
  return rev;
}

struct CacqCertificate {
  int ell = 0;
  Rational max_deviation;
  std::vector<bool> tight_at_x_star;  // per set
  bool bound_ok = false;
  bool pinned_matched = false;
  CacqReport report;
  bool pass() const { return bound_ok && pinned_matched && report.stable(); }
};

struct CacqSolution {
  CacqInstance normalized;
  CapacityRevision revision;
  RationalVector matching;
  RationalVector x_star;
  std::vector<CacqRoundStep> trace;
  std::size_t scarf_pivots = 0;
  CacqCertificate certificate;
};

inline CacqSolution solve_cacq(const CacqInstance& inst, const SolveOptions& opts = {}) {
  require_valid(validate(inst));
  CacqSolution sol;
  sol.normalized = normalize_cacq(inst);
  const auto strict = break_ties(sol.normalized);
  const auto scarf = build_cacq_scarf(strict);
  const auto point = solve_scarf(scarf.problem, opts.scarf);
  sol.scarf_pivots = point.pivots;
  sol.x_star = expand_columns(scarf, point.x, strict.num_edges());
  auto rounding = round_cacq(strict, sol.x_star);
  sol.matching = std::move(rounding.z);
  sol.trace = std::move(rounding.trace);
  sol.revision = compute_cacq_quotas(strict, sol.x_star, sol.matching);

  auto& cert = sol.certificate;
  const auto& norm = sol.normalized;
  cert.ell = norm.max_sets_per_college();
  cert.max_deviation = sol.revision.max_deviation();
  cert.bound_ok = cert.max_deviation <= 2 * cert.ell - 1;
  const auto by_set = detail::edges_of_set(norm);
  for (int j = 0; j < norm.num_sets(); ++j) {
    Rational load = 0;
    for (int e : by_set[j]) load += sol.x_star[e];
    cert.tight_at_x_star.push_back(load == norm.sets[j].quota);
  }
  const auto pinned = pinned_students(norm, sol.x_star);
  const auto by_student = detail::edges_of_student(norm);
  cert.pinned_matched = true;
  for (int s = 0; s < norm.num_students(); ++s) {
    Rational load = 0;
    for (int e : by_student[s]) load += sol.matching[e];
    if (pinned[s] && load != 1) cert.pinned_matched = false;
  }
  cert.report = verify_cacq(norm, sol.revision.revised, sol.matching);
  return sol;
}

}  // namespace nearstable
