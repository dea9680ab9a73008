#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/model.hpp"

namespace nearstable {

struct BlockingWalk {
  int commodity = -1;
  std::vector<int> vertices;
  std::vector<int> arcs;

  friend bool operator==(const BlockingWalk&, const BlockingWalk&) = default;
};

struct KirchhoffViolation {
  int commodity;
  int vertex;
};

struct CapacityViolation {
  int arc;
  int commodity;  // -1 for the aggregate capacity
};

struct FlowReport {
  std::vector<KirchhoffViolation> kirchhoff;
  std::vector<CapacityViolation> capacity;
  std::optional<BlockingWalk> walk;
  bool feasible() const { return kirchhoff.empty() && capacity.empty(); }
  bool stable() const { return feasible() && !walk.has_value(); }
};

inline std::string describe(const FlowInstance& inst, const BlockingWalk& w) {
  std::string out = "commodity " + inst.commodities[w.commodity].id + ": " + inst.vertex_ids[w.vertices[0]];
  for (std::size_t i = 0; i < w.arcs.size(); ++i)
    out += " -[" + inst.arcs[w.arcs[i]].id + "]-> " + inst.vertex_ids[w.vertices[i + 1]];
  return out;
}

/// Net outflow of commodity j at its source.
inline Rational flow_size(const FlowInstance& inst, const MultiFlow& f, int j) {
  Rational size = 0;
  const int s = inst.commodities[j].source;
  for (int a = 0; a < inst.num_arcs(); ++a) {
    if (inst.arcs[a].tail == s) size += f[j][a];
    if (inst.arcs[a].head == s) size -= f[j][a];
  }
  return size;
}

inline Rational total_flow_size(const FlowInstance& inst, const MultiFlow& f) {
  Rational total = 0;
  for (int j = 0; j < inst.num_commodities(); ++j) total += flow_size(inst, f, j);
  return total;
}

namespace detail {

inline Rational arc_total(const MultiFlow& f, int a) {
  Rational t = 0;
  for (const auto& fj : f) t += fj[a];
  return t;
}

inline bool kirchhoff_holds(const FlowInstance& inst, const RationalVector& fj, int j, int v) {
  const auto& com = inst.commodities[j];
  if (v == com.source || v == com.sink) return true;
  Rational balance = 0;
  for (int a = 0; a < inst.num_arcs(); ++a) {
    if (inst.arcs[a].tail == v) balance += fj[a];
    if (inst.arcs[a].head == v) balance -= fj[a];
  }
  return sgn(balance) == 0;
}

inline std::optional<BlockingWalk> find_blocking_walk(const FlowInstance& inst, const MultiFlow& f, int j) {
  const int m = inst.num_arcs();
  const auto& com = inst.commodities[j];
  std::vector<bool> usable(m, false);
  for (int a = 0; a < m; ++a) {
    const auto& arc = inst.arcs[a];
    if (f[j][a] >= arc.commodity_capacity[j]) continue;
    bool room = arc_total(f, a) < arc.capacity;
    for (int other = 0; other < inst.num_commodities() && !room; ++other)
      if (other != j && sgn(f[other][a]) > 0 && arc.pref.prefers(j, other)) room = true;
    usable[a] = room;
  }
  auto starts_walk = [&](int a) {
    const int v = inst.arcs[a].tail;
    if (v == com.source) return true;
    for (int b = 0; b < m; ++b)
      if (inst.arcs[b].tail == v && sgn(f[j][b]) > 0 && inst.vertex_prefs[v][j].prefers(a, b)) return true;
    return false;
  };
  auto ends_walk = [&](int a) {
    const int v = inst.arcs[a].head;
    if (v == com.sink) return true;
    for (int b = 0; b < m; ++b)
      if (inst.arcs[b].head == v && sgn(f[j][b]) > 0 && inst.vertex_prefs[v][j].prefers(a, b)) return true;
    return false;
  };

  std::vector<int> parent(m, -2);
  std::deque<int> queue;
  for (int a = 0; a < m; ++a)
    if (usable[a] && starts_walk(a)) {
      parent[a] = -1;
      queue.push_back(a);
    }
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    if (ends_walk(a)) {
      BlockingWalk w;
      w.commodity = j;
      for (int x = a; x != -1; x = parent[x]) w.arcs.push_back(x);
      std::reverse(w.arcs.begin(), w.arcs.end());
      w.vertices.push_back(inst.arcs[w.arcs[0]].tail);
      for (int x : w.arcs) w.vertices.push_back(inst.arcs[x].head);
      return w;
    }
    for (int b = 0; b < m; ++b)
      if (usable[b] && parent[b] == -2 && inst.arcs[b].tail == inst.arcs[a].head) {
        parent[b] = a;
        queue.push_back(b);
      }
  }
  return std::nullopt;
}

}  // namespace detail

/// Feasibility (Kirchhoff, both capacity families) and a search for a
/// blocking walk, commodity by commodity. Reports the first walk found.
inline FlowReport verify_flow(const FlowInstance& inst, const MultiFlow& f) {
  FlowReport report;
  const int k = inst.num_commodities();
  for (int j = 0; j < k; ++j)
    for (int v = 0; v < inst.num_vertices(); ++v)
      if (!detail::kirchhoff_holds(inst, f[j], j, v)) report.kirchhoff.push_back({j, v});
  for (int a = 0; a < inst.num_arcs(); ++a) {
    for (int j = 0; j < k; ++j)
      if (f[j][a] > inst.arcs[a].commodity_capacity[j]) report.capacity.push_back({a, j});
    if (detail::arc_total(f, a) > inst.arcs[a].capacity) report.capacity.push_back({a, -1});
  }
  for (int j = 0; j < k && !report.walk; ++j) report.walk = detail::find_blocking_walk(inst, f, j);
  return report;
}

// ---------------------------------------------------------------------------
// Fractional cycles and paths

struct AugmentingStructure {
  enum class Kind { Cycle, Path };
  Kind kind = Kind::Cycle;
  std::vector<int> arcs;
  std::vector<bool> forward;  // arc direction agrees with the traversal
  Rational up;                // step that makes some arc integral going forward
  Rational down;              // same, going backward

  bool is_cycle() const { return kind == Kind::Cycle; }
};

/// Greedy undirected walk over fractional arcs of g^j. Starts at s^j when a
/// fractional arc touches it, always extends along the lowest unused
/// fractional arc, and stops at t^j (path) or on revisiting a vertex (cycle).
/// A closed walk back to s^j counts as a cycle.
inline AugmentingStructure find_fractional_structure(const FlowInstance& inst, const RationalVector& gj, int j) {
  const int m = inst.num_arcs();
  const auto& com = inst.commodities[j];
  auto fractional_at = [&](int v, const std::vector<bool>& used) {
    for (int a = 0; a < m; ++a)
      if (!used[a] && !is_integer(gj[a]) && (inst.arcs[a].tail == v || inst.arcs[a].head == v)) return a;
    return -1;
  };
  std::vector<bool> used(m, false);
  int start = com.source;
  bool stop_at_sink = true;
  if (fractional_at(start, used) < 0) {
    int lowest = -1;
    for (int a = 0; a < m && lowest < 0; ++a)
      if (!is_integer(gj[a])) lowest = a;
    if (lowest < 0) throw PreconditionError("find_fractional_structure: flow is integral");
    start = inst.arcs[lowest].tail;
    stop_at_sink = false;
  }

  std::vector<int> path_vertices{start};
  std::vector<int> path_arcs;
  std::vector<int> position(inst.num_vertices(), -1);
  position[start] = 0;
  int v = start;
  while (true) {
    const int a = fractional_at(v, used);
    if (a < 0)
      throw InternalError("find_fractional_structure: walk stuck at vertex " + inst.vertex_ids[v] +
                          " (flow violates Kirchhoff)");
    used[a] = true;
    const int next = inst.arcs[a].tail == v ? inst.arcs[a].head : inst.arcs[a].tail;
    path_arcs.push_back(a);
    path_vertices.push_back(next);
    v = next;
    AugmentingStructure out;
    std::size_t from = 0;
    if (position[v] >= 0) {
      out.kind = AugmentingStructure::Kind::Cycle;
      from = static_cast<std::size_t>(position[v]);
    } else if (stop_at_sink && v == com.sink) {
      out.kind = AugmentingStructure::Kind::Path;
    } else {
      position[v] = static_cast<int>(path_vertices.size()) - 1;
      continue;
    }
    bool have_up = false, have_down = false;
    for (std::size_t i = from; i < path_arcs.size(); ++i) {
      const int x = path_arcs[i];
      const bool fwd = inst.arcs[x].tail == path_vertices[i];
      out.arcs.push_back(x);
      out.forward.push_back(fwd);
      const Rational up = fwd ? up_gap(gj[x]) : down_gap(gj[x]);
      const Rational down = fwd ? down_gap(gj[x]) : up_gap(gj[x]);
      if (!have_up || up < out.up) out.up = up, have_up = true;
      if (!have_down || down < out.down) out.down = down, have_down = true;
    }
    return out;
  }
}

inline void augment(RationalVector& gj, const AugmentingStructure& x, const Rational& step) {
  for (std::size_t i = 0; i < x.arcs.size(); ++i) {
    if (x.forward[i]) gj[x.arcs[i]] += step;
    else gj[x.arcs[i]] -= step;
  }
}

enum class RoundingMode { Default, Balanced };

struct FlowRoundStep {
  int commodity;
  bool cycle;
  Rational step;  // signed: positive moves along the traversal direction
};

struct FlowRounding {
  MultiFlow g;
  std::vector<FlowRoundStep> trace;
};

/// Rounds each commodity in turn by augmenting along fractional cycles and
/// s-t paths until integral.
inline FlowRounding round_flow(const FlowInstance& inst, const MultiFlow& f, RoundingMode mode) {
  FlowRounding out;
  out.g = f;
  auto& g = out.g;
  const Rational f_total = total_flow_size(inst, f);
  for (int j = 0; j < inst.num_commodities(); ++j) {
    const Rational fj_size = flow_size(inst, f, j);
    std::size_t guard = 0;
    while (!all_integral(g[j])) {
      if (++guard > static_cast<std::size_t>(inst.num_arcs()) + 1)
        throw InternalError("round_flow: augmentation did not make progress");
      const auto x = find_fractional_structure(inst, g[j], j);
      bool increase;
      if (x.is_cycle()) {
        increase = x.up < x.down;
      } else if (mode == RoundingMode::Default) {
        increase = !(flow_size(inst, g, j) > fj_size);
      } else {
        const Rational gj_size = flow_size(inst, g, j);
        if (total_flow_size(inst, g) < f_total) increase = !(gj_size > fj_size + 1);
        else increase = gj_size < fj_size - 1;
      }
      const Rational step = increase ? x.up : Rational(-x.down);
      augment(g[j], x, step);
      out.trace.push_back({j, x.is_cycle(), step});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Capacities

struct FlowCapacities {
  CapacityRevision aggregate;                  // keyed by arc
  std::vector<CapacityRevision> per_commodity;  // [j], keyed by arc
};

/// Capacities under which the integral g inherits the stability of f: tight
/// capacities follow g, the others are max(g, c).
inline FlowCapacities compute_flow_capacities(const FlowInstance& inst, const MultiFlow& f, const MultiFlow& g) {
  const int k = inst.num_commodities(), m = inst.num_arcs();
  for (int j = 0; j < k; ++j)
    for (int a = 0; a < m; ++a) {
      if (!is_integer(g[j][a]) || sgn(g[j][a]) < 0)
        throw PreconditionError("compute_flow_capacities: g is not a nonnegative integral flow");
      if (sgn(f[j][a]) == 0 && sgn(g[j][a]) != 0)
        throw PreconditionError("compute_flow_capacities: support containment violated on arc " + inst.arcs[a].id);
    }
  FlowCapacities out;
  out.per_commodity.resize(k);
  for (int a = 0; a < m; ++a) {
    const auto& arc = inst.arcs[a];
    out.aggregate.keys.push_back(arc.id);
    out.aggregate.original.push_back(arc.capacity);
    const Rational f_total = detail::arc_total(f, a), g_total = detail::arc_total(g, a);
    out.aggregate.revised.push_back(f_total == arc.capacity ? g_total : std::max(g_total, Rational(ceil_of(arc.capacity))));
    for (int j = 0; j < k; ++j) {
      auto& rev = out.per_commodity[j];
      const Rational& c = arc.commodity_capacity[j];
      rev.keys.push_back(arc.id);
      rev.original.push_back(c);
      rev.revised.push_back(f[j][a] == c ? g[j][a] : std::max(g[j][a], Rational(ceil_of(c))));
    }
  }
  return out;
}

inline FlowInstance with_capacities(const FlowInstance& inst, const FlowCapacities& caps) {
  FlowInstance out = inst;
  for (int a = 0; a < out.num_arcs(); ++a) {
    out.arcs[a].capacity = caps.aggregate.revised[a];
    for (int j = 0; j < out.num_commodities(); ++j) out.arcs[a].commodity_capacity[j] = caps.per_commodity[j].revised[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end

/// The input flow is not stable; carries the blocking walk when there is one.
class UnstableFlowError : public PreconditionError {
 public:
  UnstableFlowError(const std::string& what, std::optional<BlockingWalk> walk)
      : PreconditionError(what), walk_(std::move(walk)) {}
  const std::optional<BlockingWalk>& walk() const { return walk_; }

 private:
  std::optional<BlockingWalk> walk_;
};

struct FlowCertificate {
  RoundingMode mode = RoundingMode::Default;
  int commodities = 0;
  Rational max_deviation;  // aggregate capacities
  RationalVector f_sizes, g_sizes;
  Rational f_total, g_total;
  bool commodity_capacities_unchanged = false;
  bool capacity_bound_ok = false;   // |c' - c| <= k-1
  bool commodity_drift_ok = false;  // < 1 (balanced: < 2)
  bool aggregate_drift_ok = false;  // < k (balanced: < 1)
  FlowReport report;                // g under the revised capacities
  bool pass() const {
    return commodity_capacities_unchanged && capacity_bound_ok && commodity_drift_ok && aggregate_drift_ok &&
           report.stable();
  }
};

struct FlowSolution {
  MultiFlow g;
  FlowCapacities capacities;
  std::vector<FlowRoundStep> trace;
  FlowCertificate certificate;
};

inline FlowSolution round_stable_flow(const FlowInstance& inst, const MultiFlow& f,
                                      RoundingMode mode = RoundingMode::Default) {
  require_valid(validate(inst));
  require_valid(validate_flow(inst, f));
  const auto input = verify_flow(inst, f);
  if (!input.feasible()) throw UnstableFlowError("round_stable_flow: input flow is infeasible", std::nullopt);
  if (input.walk)
    throw UnstableFlowError("round_stable_flow: input flow is not stable, blocking walk " + describe(inst, *input.walk),
                            input.walk);

  FlowSolution sol;
  auto rounding = round_flow(inst, f, mode);
  sol.g = std::move(rounding.g);
  sol.trace = std::move(rounding.trace);
  sol.capacities = compute_flow_capacities(inst, f, sol.g);

  auto& cert = sol.certificate;
  const int k = inst.num_commodities();
  cert.mode = mode;
  cert.commodities = k;
  cert.max_deviation = sol.capacities.aggregate.max_deviation();
  cert.capacity_bound_ok = cert.max_deviation <= k - 1;
  cert.commodity_capacities_unchanged = true;
  for (const auto& rev : sol.capacities.per_commodity)
    if (rev.revised != rev.original) cert.commodity_capacities_unchanged = false;
  const Rational per_bound = mode == RoundingMode::Default ? 1 : 2;
  cert.commodity_drift_ok = true;
  for (int j = 0; j < k; ++j) {
    cert.f_sizes.push_back(flow_size(inst, f, j));
    cert.g_sizes.push_back(flow_size(inst, sol.g, j));
    if (abs(cert.f_sizes[j] - cert.g_sizes[j]) >= per_bound) cert.commodity_drift_ok = false;
  }
  cert.f_total = sum(cert.f_sizes);
  cert.g_total = sum(cert.g_sizes);
  const Rational aggregate_bound = mode == RoundingMode::Default ? Rational(k) : Rational(1);
  cert.aggregate_drift_ok = abs(cert.f_total - cert.g_total) < aggregate_bound;
  cert.report = verify_flow(with_capacities(inst, sol.capacities), sol.g);
  return sol;
}

}  // namespace nearstable
