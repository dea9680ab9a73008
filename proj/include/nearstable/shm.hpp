#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/model.hpp"
#include "nearstable/polytope.hpp"
#include "nearstable/scarf.hpp"

namespace nearstable {

// ---------------------------------------------------------------------------
// Stability checking

struct ShmReport {
  std::vector<int> over_capacity;  // vertices
  std::vector<int> blocking_edges;
  bool stable() const { return over_capacity.empty() && blocking_edges.empty(); }
};

/// Lists capacity violations and every blocking edge of a (possibly
/// fractional) matching. Works directly on weak orders.
inline ShmReport verify_shm(const HypergraphInstance& inst, const RationalVector& capacity,
                            const RationalVector& matching) {
  ShmReport report;
  const auto inc = inst.incidence();
  RationalVector load(inst.num_vertices());
  for (int v = 0; v < inst.num_vertices(); ++v) {
    for (int e : inc[v]) load[v] += matching[e];
    if (load[v] > capacity[v]) report.over_capacity.push_back(v);
  }
  for (int f = 0; f < inst.num_edges(); ++f) {
    if (matching[f] >= 1) continue;
    bool blocks = true;
    for (int v : inst.edges[f]) {
      if (load[v] < capacity[v]) continue;
      bool has_worse = false;
      for (int e : inc[v])
        if (sgn(matching[e]) > 0 && inst.prefs[v].prefers(f, e)) {
          has_worse = true;
          break;
        }
      if (!has_worse) {
        blocks = false;
        break;
      }
    }
    if (blocks) report.blocking_edges.push_back(f);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Saturation gadget

/// Appends q(v) singleton edges {v} to every vertex, ranked below all of v's
/// real edges in order. Real edges keep their indices.
inline HypergraphInstance add_saturation_gadget(const HypergraphInstance& inst) {
  HypergraphInstance out = inst;
  for (int v = 0; v < inst.num_vertices(); ++v) {
    auto groups = inst.prefs[v].groups();
    const long copies = to_long(inst.capacity[v]);
    for (long j = 1; j <= copies; ++j) {
      groups.push_back({out.num_edges()});
      out.edges.push_back({v});
      out.edge_ids.push_back("~" + inst.vertex_ids[v] + "#" + std::to_string(j));
    }
    out.prefs[v] = WeakOrder(std::move(groups));
  }
  return out;
}

/// Restriction of a matching on the gadgeted instance to the real edges.
inline RationalVector strip_gadget(const RationalVector& matching, int real_edges) {
  return RationalVector(matching.begin(), matching.begin() + real_edges);
}

// ---------------------------------------------------------------------------
// Scarf matrix

struct ShmScarf {
  ScarfProblem problem;
  std::vector<int> column_edge;  // column -> edge
  std::vector<std::string> row_labels;
};

/// Vertex rows (rhs q(v)) over incidence, then one identity row per edge.
/// Edges touching a vertex with q(v) = 0 are left out; they stay at 0.
inline ShmScarf build_shm_scarf(const HypergraphInstance& inst) {
  for (const auto& p : inst.prefs)
    if (!p.is_strict()) throw PreconditionError("build_shm_scarf: preferences must be strict");
  ShmScarf out;
  std::vector<int> edge_column(inst.num_edges(), -1);
  for (int e = 0; e < inst.num_edges(); ++e) {
    bool live = true;
    for (int v : inst.edges[e])
      if (sgn(inst.capacity[v]) == 0) live = false;
    if (!live) continue;
    edge_column[e] = static_cast<int>(out.column_edge.size());
    out.column_edge.push_back(e);
  }
  const int m = static_cast<int>(out.column_edge.size());
  auto& p = out.problem;
  for (int v = 0; v < inst.num_vertices(); ++v) {
    if (sgn(inst.capacity[v]) == 0) continue;
    RationalVector row(m);
    std::vector<int> order;
    for (int e : inst.prefs[v].flatten()) {
      if (edge_column[e] < 0) continue;
      row[edge_column[e]] = 1;
      order.push_back(edge_column[e]);
    }
    if (order.empty()) continue;
    p.matrix.push_back(std::move(row));
    p.bound.push_back(inst.capacity[v]);
    p.row_orders.push_back(std::move(order));
    out.row_labels.push_back("vertex " + inst.vertex_ids[v]);
  }
  for (int c = 0; c < m; ++c) {
    RationalVector row(m);
    row[c] = 1;
    p.matrix.push_back(std::move(row));
    p.bound.push_back(Rational(1));
    p.row_orders.push_back({c});
    out.row_labels.push_back("edge " + inst.edge_ids[out.column_edge[c]]);
  }
  return out;
}

/// Full edge vector from a Scarf solution; edges without a column are 0.
inline RationalVector expand_columns(const ShmScarf& s, const RationalVector& x, int num_edges) {
  RationalVector out(num_edges);
  for (std::size_t c = 0; c < s.column_edge.size(); ++c) out[s.column_edge[c]] = x[c];
  return out;
}

// ---------------------------------------------------------------------------
// Iterative rounding

struct ShmRoundStep {
  std::string deleted_row;  // vertex id, or "aggregate"
  int fractional = 0;       // fractional components before the deletion
  Rational objective;       // sum_e z[e]*|e| after the re-solve
};

struct ShmRounding {
  RationalVector z;
  std::vector<ShmRoundStep> trace;
};

namespace detail {

inline int count_fractional(const RationalVector& z) {
  int n = 0;
  for (const auto& v : z)
    if (!is_integer(v)) ++n;
  return n;
}

}  // namespace detail

/// Rounds a dominating point whose vertex rows are all tight. Rows are
/// dropped one at a time (lowest vertex first; the aggregate row only when
/// at most one component is fractional) and the remaining system is
/// re-solved for a vertex maximizing sum_e z[e]*|e|.
inline ShmRounding round_shm(const HypergraphInstance& inst, const RationalVector& x_star,
                             const TraceSink& lp_trace = {}) {
  const int n = inst.num_vertices(), m = inst.num_edges();
  const int ell = inst.max_edge_size();
  const auto inc = inst.incidence();
  RationalVector size_weight(m);
  for (int e = 0; e < m; ++e) size_weight[e] = static_cast<long>(inst.edges[e].size());
  Rational aggregate_target = sum(inst.capacity);

  for (int v = 0; v < n; ++v) {
    Rational load = 0;
    for (int e : inc[v]) load += x_star[e];
    if (load != inst.capacity[v])
      throw PreconditionError("round_shm: vertex " + inst.vertex_ids[v] + " is not saturated at x*");
  }

  ShmRounding out;
  out.z = x_star;
  std::vector<bool> active(n, true);
  bool aggregate_active = true;
  auto& z = out.z;

  while (!all_integral(z)) {
    if (out.trace.size() > static_cast<std::size_t>(n) + 1)
      throw InternalError("round_shm: more deletions than rows");
    ShmRoundStep step;
    step.fractional = detail::count_fractional(z);
    int chosen = -1;
    for (int v = 0; v < n && chosen < 0; ++v) {
      if (!active[v]) continue;
      int mass = 0;
      for (int e : inc[v])
        if (!is_integer(z[e])) ++mass;
      if (mass <= ell) chosen = v;
    }
    if (chosen >= 0) {
      active[chosen] = false;
      step.deleted_row = inst.vertex_ids[chosen];
    } else if (aggregate_active && step.fractional <= 1) {
      aggregate_active = false;
      step.deleted_row = "aggregate";
    } else {
      throw InternalError("round_shm: no row can be deleted while z is fractional");
    }

    LinearSystem sys(m);
    for (int e = 0; e < m; ++e) {
      sys.upper[e] = Rational(1);
      if (is_integer(z[e])) sys.fixed[e] = z[e];
    }
    for (int v = 0; v < n; ++v) {
      if (!active[v]) continue;
      RationalVector row(m);
      for (int e : inc[v]) row[e] = 1;
      sys.add_row(std::move(row), Relation::Equal, inst.capacity[v]);
    }
    if (aggregate_active) sys.add_row(size_weight, Relation::Equal, aggregate_target);
    z = extreme_point(sys, size_weight, z, lp_trace);
    step.objective = dot(size_weight, z);
    out.trace.push_back(std::move(step));
  }
  return out;
}

/// Revised capacities under which the integral vector y is a stable matching:
/// A_v y at rows tight under x*, max(q(v), A_v y) elsewhere.
inline CapacityRevision compute_shm_capacities(const HypergraphInstance& inst, const RationalVector& x_star,
                                               const RationalVector& y) {
  CapacityRevision rev;
  rev.keys = inst.vertex_ids;
  rev.original = inst.capacity;
  const auto inc = inst.incidence();
  for (int v = 0; v < inst.num_vertices(); ++v) {
    Rational at_star = 0, at_y = 0;
    for (int e : inc[v]) {
      at_star += x_star[e];
      at_y += y[e];
    }
    rev.revised.push_back(at_star == inst.capacity[v] ? at_y : std::max(inst.capacity[v], at_y));
  }
  return rev;
}

// ---------------------------------------------------------------------------
// End-to-end

struct ShmCertificate {
  int ell = 0;
  Rational max_deviation;
  Rational sum_deviation;           // on the gadgeted instance
  Rational stripped_sum_deviation;  // sum_v |M(v)| - sum_v q(v) for the real-edge matching
  bool max_bound_ok = false;
  bool sum_bound_ok = false;
  bool gadget_stable = false;  // rounded z is stable on the gadgeted, tie-broken instance
  ShmReport report;            // final matching on the original instance
  bool pass() const { return max_bound_ok && sum_bound_ok && gadget_stable && report.stable(); }
};

struct ShmSolution {
  CapacityRevision revision;
  RationalVector matching;  // over the original edges
  RationalVector x_star;    // over the gadgeted edges
  RationalVector z;         // over the gadgeted edges
  std::vector<ShmRoundStep> trace;
  std::size_t scarf_pivots = 0;
  ShmCertificate certificate;
};

struct SolveOptions {
  ScarfOptions scarf;
  TraceSink lp_trace;
};

inline ShmSolution solve_shm(const HypergraphInstance& inst, const SolveOptions& opts = {}) {
  require_valid(validate(inst));
  const auto strict = break_ties(inst);
  const auto gadgeted = add_saturation_gadget(strict);
  const auto scarf = build_shm_scarf(gadgeted);
  const auto point = solve_scarf(scarf.problem, opts.scarf);

  ShmSolution sol;
  sol.scarf_pivots = point.pivots;
  sol.x_star = expand_columns(scarf, point.x, gadgeted.num_edges());
  auto rounding = round_shm(gadgeted, sol.x_star, opts.lp_trace);
  sol.z = std::move(rounding.z);
  sol.trace = std::move(rounding.trace);
  sol.revision = compute_shm_capacities(gadgeted, sol.x_star, sol.z);
  sol.matching = strip_gadget(sol.z, inst.num_edges());

  auto& cert = sol.certificate;
  cert.ell = inst.max_edge_size();
  cert.max_deviation = sol.revision.max_deviation();
  cert.sum_deviation = sol.revision.sum_deviation();
  Rational stripped_load = 0;
  for (int e = 0; e < inst.num_edges(); ++e) stripped_load += sol.matching[e] * static_cast<long>(inst.edges[e].size());
  cert.stripped_sum_deviation = stripped_load - sum(inst.capacity);
  const Rational slack = cert.ell - 1;
  cert.max_bound_ok = cert.max_deviation <= slack;
  cert.sum_bound_ok = sgn(cert.sum_deviation) >= 0 && cert.sum_deviation <= slack;
  cert.gadget_stable = verify_shm(gadgeted, sol.revision.revised, sol.z).stable();
  cert.report = verify_shm(inst, sol.revision.revised, sol.matching);
  return sol;
}

}  // namespace nearstable
