#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "nearstable/rational.hpp"
#include "nearstable/weak_order.hpp"

namespace nearstable {

// Entities are referenced by dense indices in declaration order. Parsers map
// unknown identifiers to -1 so that validate() can report them.

/// Stable hypergraph matching instance. Each vertex ranks the edges it belongs to.
struct HypergraphInstance {
  std::vector<std::string> vertex_ids;
  std::vector<std::string> edge_ids;
  std::vector<std::vector<int>> edges;
  RationalVector capacity;
  std::vector<WeakOrder> prefs;

  int num_vertices() const { return static_cast<int>(vertex_ids.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  int max_edge_size() const {
    int ell = 0;
    for (const auto& e : edges) ell = std::max(ell, static_cast<int>(e.size()));
    return ell;
  }

  /// Edges containing each vertex, ascending.
  std::vector<std::vector<int>> incidence() const {
    std::vector<std::vector<int>> inc(vertex_ids.size());
    for (int e = 0; e < num_edges(); ++e)
      for (int v : edges[e])
        if (v >= 0 && v < num_vertices()) inc[v].push_back(e);
    for (auto& list : inc) list.erase(std::unique(list.begin(), list.end()), list.end());
    return inc;
  }

  friend bool operator==(const HypergraphInstance&, const HypergraphInstance&) = default;
};

struct College {
  std::string id;
  Rational quota;
  WeakOrder pref;  // over student indices

  friend bool operator==(const College&, const College&) = default;
};

/// A common quota over a set of colleges, with its master list over students.
struct CollegeSet {
  std::string id;
  std::vector<int> colleges;
  Rational quota;
  WeakOrder master;

  friend bool operator==(const CollegeSet&, const CollegeSet&) = default;
};

struct AdmissionEdge {
  int student = -1;
  int college = -1;

  friend bool operator==(const AdmissionEdge&, const AdmissionEdge&) = default;
};

/// College admission with common quotas. Student preferences rank edge indices.
struct CacqInstance {
  std::vector<std::string> students;
  std::vector<College> colleges;
  std::vector<AdmissionEdge> edges;
  std::vector<CollegeSet> sets;
  std::vector<WeakOrder> student_prefs;

  int num_students() const { return static_cast<int>(students.size()); }
  int num_colleges() const { return static_cast<int>(colleges.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_sets() const { return static_cast<int>(sets.size()); }

  /// Maximum number of sets containing a single college.
  int max_sets_per_college() const {
    std::vector<int> count(colleges.size(), 0);
    for (const auto& s : sets)
      for (int c : s.colleges)
        if (c >= 0 && c < num_colleges()) ++count[c];
    int ell = 0;
    for (int c : count) ell = std::max(ell, c);
    return ell;
  }

  int find_edge(int student, int college) const {
    for (int e = 0; e < num_edges(); ++e)
      if (edges[e].student == student && edges[e].college == college) return e;
    return -1;
  }

  friend bool operator==(const CacqInstance&, const CacqInstance&) = default;
};

struct Arc {
  std::string id;
  int tail = -1;
  int head = -1;
  Rational capacity;
  RationalVector commodity_capacity;  // one per commodity
  WeakOrder pref;                     // over commodity indices

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Commodity {
  std::string id;
  int source = -1;
  int sink = -1;

  friend bool operator==(const Commodity&, const Commodity&) = default;
};

/// Multicommodity network with per-vertex, per-commodity orders over incident arcs.
struct FlowInstance {
  std::vector<std::string> vertex_ids;
  std::vector<Arc> arcs;
  std::vector<Commodity> commodities;
  std::vector<std::vector<WeakOrder>> vertex_prefs;  // [vertex][commodity], over arc indices

  int num_vertices() const { return static_cast<int>(vertex_ids.size()); }
  int num_arcs() const { return static_cast<int>(arcs.size()); }
  int num_commodities() const { return static_cast<int>(commodities.size()); }

  std::vector<int> out_arcs(int v) const {
    std::vector<int> out;
    for (int a = 0; a < num_arcs(); ++a)
      if (arcs[a].tail == v) out.push_back(a);
    return out;
  }
  std::vector<int> in_arcs(int v) const {
    std::vector<int> in;
    for (int a = 0; a < num_arcs(); ++a)
      if (arcs[a].head == v) in.push_back(a);
    return in;
  }

  friend bool operator==(const FlowInstance&, const FlowInstance&) = default;
};

/// f[j][a]: amount of commodity j on arc a.
using MultiFlow = std::vector<RationalVector>;

/// Revised capacities next to the originals they replace.
struct CapacityRevision {
  std::vector<std::string> keys;
  RationalVector original;
  RationalVector revised;

  Rational max_deviation() const {
    Rational m = 0;
    for (std::size_t i = 0; i < revised.size(); ++i) m = std::max<Rational>(m, abs(revised[i] - original[i]));
    return m;
  }
  Rational sum_deviation() const { return sum(revised) - sum(original); }

  friend bool operator==(const CapacityRevision&, const CapacityRevision&) = default;
};

}  // namespace nearstable
