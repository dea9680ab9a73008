#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"

namespace nearstable {

struct Violation {
  std::string entity;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

/// Throws InputError listing every violation, if any.
inline void require_valid(const Violations& v) {
  if (v.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& x : v) msg += "\n  " + x.entity + ": " + x.rule;
  throw InputError(msg);
}

namespace detail {

inline bool valid_index(int i, int n) { return i >= 0 && i < n; }

inline void check_capacity(Violations& out, const std::string& entity, const Rational& q) {
  if (!is_integer(q)) out.push_back({entity, "capacity " + to_string(q) + " is not an integer"});
  else if (q < 0) out.push_back({entity, "capacity " + to_string(q) + " is negative"});
}

inline void check_universe(Violations& out, const std::string& entity, const WeakOrder& order,
                           std::vector<int> expected) {
  if (order.has_duplicates_or_empty_groups()) {
    out.push_back({entity, "preference list repeats an alternative or has an empty tie group"});
    return;
  }
  std::sort(expected.begin(), expected.end());
  expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
  if (order.universe() != expected)
    out.push_back({entity, "preference list does not rank exactly its incident alternatives"});
}

}  // namespace detail

inline Violations validate(const HypergraphInstance& inst) {
  Violations out;
  const int n = inst.num_vertices();
  if (inst.edges.empty()) out.push_back({"instance", "hypergraph has no edges"});
  if (static_cast<int>(inst.edge_ids.size()) != inst.num_edges())
    out.push_back({"instance", "edge id list and edge list differ in length"});
  bool dangling = false;
  for (int e = 0; e < inst.num_edges(); ++e) {
    const auto& edge = inst.edges[e];
    std::string name = "edge " + (e < static_cast<int>(inst.edge_ids.size()) ? inst.edge_ids[e] : std::to_string(e));
    if (edge.empty()) out.push_back({name, "edge is empty"});
    std::set<int> seen;
    for (int v : edge) {
      if (!detail::valid_index(v, n)) {
        out.push_back({name, "references an unknown vertex"});
        dangling = true;
      } else if (!seen.insert(v).second) {
        out.push_back({name, "lists a vertex twice"});
      }
    }
  }
  if (static_cast<int>(inst.capacity.size()) != n) {
    out.push_back({"instance", "capacity list does not cover every vertex"});
    return out;
  }
  if (static_cast<int>(inst.prefs.size()) != n) {
    out.push_back({"instance", "preference list does not cover every vertex"});
    return out;
  }
  auto inc = inst.incidence();
  for (int v = 0; v < n; ++v) {
    std::string name = "vertex " + inst.vertex_ids[v];
    detail::check_capacity(out, name, inst.capacity[v]);
    if (!dangling) detail::check_universe(out, name, inst.prefs[v], inc[v]);
  }
  return out;
}

inline Violations validate(const CacqInstance& inst) {
  Violations out;
  const int ns = inst.num_students(), nc = inst.num_colleges();
  std::set<std::pair<int, int>> pairs;
  bool dangling = false;
  for (int e = 0; e < inst.num_edges(); ++e) {
    auto [s, c] = inst.edges[e];
    std::string name = "edge " + std::to_string(e);
    if (!detail::valid_index(s, ns) || !detail::valid_index(c, nc)) {
      out.push_back({name, "references an unknown student or college"});
      dangling = true;
    } else if (!pairs.insert({s, c}).second) {
      out.push_back({name, "duplicate acceptability edge"});
    }
  }
  if (dangling) return out;
  std::vector<std::vector<int>> students_of(nc), edges_of(ns);
  for (int e = 0; e < inst.num_edges(); ++e) {
    students_of[inst.edges[e].college].push_back(inst.edges[e].student);
    edges_of[inst.edges[e].student].push_back(e);
  }
  if (static_cast<int>(inst.student_prefs.size()) != ns) {
    out.push_back({"instance", "preference list does not cover every student"});
    return out;
  }
  for (int s = 0; s < ns; ++s)
    detail::check_universe(out, "student " + inst.students[s], inst.student_prefs[s], edges_of[s]);
  for (int c = 0; c < nc; ++c) {
    std::string name = "college " + inst.colleges[c].id;
    detail::check_capacity(out, name, inst.colleges[c].quota);
    detail::check_universe(out, name, inst.colleges[c].pref, students_of[c]);
  }
  for (const auto& set : inst.sets) {
    std::string name = "set " + set.id;
    detail::check_capacity(out, name, set.quota);
    if (set.colleges.empty()) out.push_back({name, "set has no colleges"});
    std::set<int> members;
    bool bad = false;
    for (int c : set.colleges) {
      if (!detail::valid_index(c, nc)) {
        out.push_back({name, "references an unknown college"});
        bad = true;
      } else if (!members.insert(c).second) {
        out.push_back({name, "lists a college twice"});
      }
    }
    if (bad) continue;
    if (set.master.has_duplicates_or_empty_groups()) {
      out.push_back({name, "master list repeats a student or has an empty tie group"});
      continue;
    }
    for (int s : set.master.universe())
      if (!detail::valid_index(s, ns)) out.push_back({name, "master list references an unknown student"});
    bool covered = true;
    for (int c : set.colleges)
      for (int s : students_of[c])
        if (!set.master.contains(s)) covered = false;
    if (!covered) out.push_back({name, "master list misses a student acceptable to a member college"});
    if (set.colleges.size() == 1 && set.quota != inst.colleges[set.colleges[0]].quota)
      out.push_back({name, "singleton set quota differs from its college quota"});
    for (int c : set.colleges) {
      const auto& order = inst.colleges[c].pref;
      auto ranked = order.universe();
      bool consistent = true;
      for (std::size_t i = 0; i < ranked.size() && consistent; ++i)
        for (std::size_t k = 0; k < ranked.size() && consistent; ++k) {
          int a = ranked[i], b = ranked[k];
          if (!set.master.contains(a) || !set.master.contains(b)) continue;
          if (order.prefers(a, b) && !set.master.prefers(a, b)) consistent = false;
          if (a != b && order.tied(a, b) && !set.master.tied(a, b)) consistent = false;
        }
      if (!consistent)
        out.push_back({name, "master list is inconsistent with college " + inst.colleges[c].id});
    }
  }
  return out;
}

inline Violations validate(const FlowInstance& inst) {
  Violations out;
  const int n = inst.num_vertices(), k = inst.num_commodities();
  if (k == 0) out.push_back({"instance", "no commodities"});
  bool dangling = false;
  for (const auto& arc : inst.arcs) {
    std::string name = "arc " + arc.id;
    if (!detail::valid_index(arc.tail, n) || !detail::valid_index(arc.head, n)) {
      out.push_back({name, "references an unknown vertex"});
      dangling = true;
      continue;
    }
    if (arc.tail == arc.head) out.push_back({name, "self-loop"});
    detail::check_capacity(out, name, arc.capacity);
    if (static_cast<int>(arc.commodity_capacity.size()) != k) {
      out.push_back({name, "commodity capacity list does not cover every commodity"});
    } else {
      for (int j = 0; j < k; ++j)
        detail::check_capacity(out, name + " commodity " + inst.commodities[j].id, arc.commodity_capacity[j]);
    }
    std::vector<int> all(k);
    for (int j = 0; j < k; ++j) all[j] = j;
    detail::check_universe(out, name, arc.pref, all);
  }
  for (const auto& com : inst.commodities) {
    std::string name = "commodity " + com.id;
    if (!detail::valid_index(com.source, n) || !detail::valid_index(com.sink, n)) {
      out.push_back({name, "references an unknown terminal"});
      dangling = true;
    } else if (com.source == com.sink) {
      out.push_back({name, "source equals sink"});
    }
  }
  if (dangling) return out;
  if (static_cast<int>(inst.vertex_prefs.size()) != n) {
    out.push_back({"instance", "vertex preferences do not cover every vertex"});
    return out;
  }
  for (int v = 0; v < n; ++v) {
    auto incident = inst.out_arcs(v);
    auto in = inst.in_arcs(v);
    incident.insert(incident.end(), in.begin(), in.end());
    if (static_cast<int>(inst.vertex_prefs[v].size()) != k) {
      out.push_back({"vertex " + inst.vertex_ids[v], "preferences do not cover every commodity"});
      continue;
    }
    for (int j = 0; j < k; ++j)
      detail::check_universe(out, "vertex " + inst.vertex_ids[v] + " commodity " + inst.commodities[j].id,
                             inst.vertex_prefs[v][j], incident);
  }
  return out;
}

/// Shape and sign checks for a flow given alongside an instance.
inline Violations validate_flow(const FlowInstance& inst, const MultiFlow& f) {
  Violations out;
  if (static_cast<int>(f.size()) != inst.num_commodities()) {
    out.push_back({"flow", "does not cover every commodity"});
    return out;
  }
  for (int j = 0; j < inst.num_commodities(); ++j) {
    if (static_cast<int>(f[j].size()) != inst.num_arcs()) {
      out.push_back({"flow " + inst.commodities[j].id, "does not cover every arc"});
      continue;
    }
    for (int a = 0; a < inst.num_arcs(); ++a)
      if (f[j][a] < 0)
        out.push_back({"flow " + inst.commodities[j].id + " on arc " + inst.arcs[a].id, "negative value"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tie-breaking. Ties are broken by ascending declared index of the alternative.

inline HypergraphInstance break_ties(const HypergraphInstance& inst) {
  HypergraphInstance out = inst;
  for (auto& p : out.prefs) p = break_ties(p);
  return out;
}

inline CacqInstance break_ties(const CacqInstance& inst) {
  CacqInstance out = inst;
  for (auto& p : out.student_prefs) p = break_ties(p);
  for (auto& c : out.colleges) c.pref = break_ties(c.pref);
  for (auto& s : out.sets) s.master = break_ties(s.master);
  return out;
}

inline FlowInstance break_ties(const FlowInstance& inst) {
  FlowInstance out = inst;
  for (auto& arc : out.arcs) arc.pref = break_ties(arc.pref);
  for (auto& per_vertex : out.vertex_prefs)
    for (auto& p : per_vertex) p = break_ties(p);
  return out;
}

/// Adds the singleton set {c} (quota and master list taken from c) for every
/// college that lacks one. Idempotent.
inline CacqInstance normalize_cacq(const CacqInstance& inst) {
  CacqInstance out = inst;
  std::vector<bool> has_singleton(inst.colleges.size(), false);
  for (const auto& s : inst.sets)
    if (s.colleges.size() == 1 && detail::valid_index(s.colleges[0], inst.num_colleges()))
      has_singleton[s.colleges[0]] = true;
  for (int c = 0; c < inst.num_colleges(); ++c)
    if (!has_singleton[c])
      out.sets.push_back({"{" + inst.colleges[c].id + "}", {c}, inst.colleges[c].quota, inst.colleges[c].pref});
  return out;
}

}  // namespace nearstable
