#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/model.hpp"
#include "nearstable/smf.hpp"

namespace nearstable {

/// Seeded randomness. The engine is the standard 64-bit Mersenne Twister
/// (std::mt19937_64, whose output sequence the C++ standard fixes); bounded
/// integers use rejection sampling on raw outputs and probabilities compare
/// the top 53 bits, so a seed yields the same instance on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  long uniform(long lo, long hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return lo + static_cast<long>(x % range);
  }

  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(0, i - 1))]);
  }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<long>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int ell = 2;               // shm: largest edge size; cacq: sets per college (1 or 2)
  int commodities = 1;       // smf
  int max_vertices = 8;      // shm/fixtures/smf
  int max_edges = 15;        // shm/fixtures edges, smf arcs
  int max_students = 6;      // cacq
  int max_colleges = 4;      // cacq
  int max_common_sets = 3;   // cacq, non-singleton sets
  double tie_rate = 0.3;
  int retry_cap = 500;       // smf
};

/// Random weak order: shuffle, then each next item joins the current tie
/// group with probability `tie_rate`.
inline WeakOrder random_weak_order(Rng& rng, std::vector<int> items, double tie_rate) {
  rng.shuffle(items);
  std::vector<std::vector<int>> groups;
  for (int x : items) {
    if (!groups.empty() && rng.chance(tie_rate)) groups.back().push_back(x);
    else groups.push_back({x});
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return WeakOrder(std::move(groups));
}

namespace detail {

inline Rational random_capacity(Rng& rng) {
  if (rng.chance(0.1)) return Rational(0);
  return Rational(rng.uniform(1, 2));
}

inline std::vector<int> sample_distinct(Rng& rng, int n, int count) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  rng.shuffle(all);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

inline void finish_hypergraph(Rng& rng, HypergraphInstance& inst, double tie_rate) {
  for (int e = 0; e < inst.num_edges(); ++e) inst.edge_ids.push_back("e" + std::to_string(e));
  for (int v = 0; v < inst.num_vertices(); ++v) inst.capacity.push_back(random_capacity(rng));
  const auto inc = inst.incidence();
  for (int v = 0; v < inst.num_vertices(); ++v) inst.prefs.push_back(random_weak_order(rng, inc[v], tie_rate));
}

/// Random topological order of 0..n-1 given predecessor lists, or nullopt
/// on a cycle.
inline std::optional<std::vector<int>> random_topological_order(Rng& rng, const std::vector<std::vector<int>>& before) {
  const int n = static_cast<int>(before.size());
  std::vector<int> waiting(n);
  std::vector<std::vector<int>> after(n);
  for (int t = 0; t < n; ++t)
    for (int u : before[t]) {
      ++waiting[t];
      after[u].push_back(t);
    }
  std::vector<int> ready, order;
  for (int t = 0; t < n; ++t)
    if (waiting[t] == 0) ready.push_back(t);
  while (!ready.empty()) {
    const auto i = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(ready.size()) - 1));
    const int t = ready[i];
    ready.erase(ready.begin() + static_cast<long>(i));
    order.push_back(t);
    for (int u : after[t])
      if (--waiting[u] == 0) ready.push_back(u);
  }
  if (static_cast<int>(order.size()) != n) return std::nullopt;
  return order;
}

}  // namespace detail

/// Hypergraph with largest edge size exactly `ell`.
inline HypergraphInstance generate_shm(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  HypergraphInstance inst;
  const int n = static_cast<int>(rng.uniform(std::max(cfg.ell, 3), std::max(cfg.max_vertices, std::max(cfg.ell, 3))));
  const int m = static_cast<int>(rng.uniform(2, std::max(2, cfg.max_edges)));
  for (int v = 0; v < n; ++v) inst.vertex_ids.push_back("v" + std::to_string(v));
  for (int e = 0; e < m; ++e) {
    const int size = e == 0 ? cfg.ell : static_cast<int>(rng.uniform(std::min(2, cfg.ell), cfg.ell));
    inst.edges.push_back(detail::sample_distinct(rng, n, size));
  }
  detail::finish_hypergraph(rng, inst, cfg.tie_rate);
  return inst;
}

/// Simple graph (no parallel edges) with capacities; the Stable Fixtures setting.
inline HypergraphInstance generate_fixtures(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  HypergraphInstance inst;
  const int n = static_cast<int>(rng.uniform(3, std::max(3, cfg.max_vertices)));
  std::vector<std::vector<int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.push_back({a, b});
  rng.shuffle(pairs);
  const int m = static_cast<int>(rng.uniform(2, std::min<long>(cfg.max_edges, static_cast<long>(pairs.size()))));
  pairs.resize(m);
  std::sort(pairs.begin(), pairs.end());
  for (int v = 0; v < n; ++v) inst.vertex_ids.push_back("v" + std::to_string(v));
  inst.edges = std::move(pairs);
  detail::finish_hypergraph(rng, inst, cfg.tie_rate);
  return inst;
}

/// CA-CQ instance. With ell = 2, up to `max_common_sets` disjoint common
/// sets of at least two colleges; each member college ranks its applicants
/// as the restriction of the set's master list. With ell >= 3 the sets may
/// overlap. Singleton sets are left to normalization.
inline CacqInstance generate_cacq(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  CacqInstance inst;
  const int ns = static_cast<int>(rng.uniform(2, std::max(2, cfg.max_students)));
  const int nc = static_cast<int>(rng.uniform(cfg.ell >= 2 ? 2 : 1, std::max(2, cfg.max_colleges)));
  for (int s = 0; s < ns; ++s) inst.students.push_back("s" + std::to_string(s));
  for (int s = 0; s < ns; ++s)
    for (int c = 0; c < nc; ++c)
      if (rng.chance(0.6)) inst.edges.push_back({s, c});
  if (inst.edges.empty()) inst.edges.push_back({0, 0});

  std::vector<int> set_of(nc, -1);
  std::vector<int> all_students(ns);
  for (int s = 0; s < ns; ++s) all_students[s] = s;
  std::vector<std::optional<WeakOrder>> fixed(nc);
  if (cfg.ell >= 3) {
    // Overlapping sets, each college in at most ell - 1 of them, strict
    // lists. A set's master list is a random linear extension of the lists
    // already fixed for its members; a college whose list would close a
    // cycle is left out of the set.
    std::vector<std::vector<int>> applicants(nc);
    for (const auto& e : inst.edges) applicants[e.college].push_back(e.student);
    std::vector<int> member_of(nc, 0);
    const int wanted = static_cast<int>(rng.uniform(1, cfg.max_common_sets));
    for (int k = 0; k < wanted; ++k) {
      std::vector<int> members;
      std::vector<std::vector<int>> before(ns);  // before[t]: students ranked above t
      for (int c = 0; c < nc; ++c) {
        if (member_of[c] >= cfg.ell - 1 || !rng.chance(0.6)) continue;
        auto trial = before;
        if (fixed[c])
          for (std::size_t i = 0; i + 1 < fixed[c]->groups().size(); ++i)
            trial[fixed[c]->groups()[i + 1][0]].push_back(fixed[c]->groups()[i][0]);
        if (!detail::random_topological_order(rng, trial)) continue;
        before = std::move(trial);
        members.push_back(c);
      }
      if (members.size() < 2) continue;
      const auto order = *detail::random_topological_order(rng, before);
      for (int c : members) {
        ++member_of[c];
        if (fixed[c]) continue;
        std::vector<int> mine;
        for (int t : order)
          if (std::find(applicants[c].begin(), applicants[c].end(), t) != applicants[c].end()) mine.push_back(t);
        fixed[c] = WeakOrder::strict(mine);
      }
      inst.sets.push_back(
          {"C" + std::to_string(inst.num_sets()), members, Rational(rng.uniform(1, 3)), WeakOrder::strict(order)});
    }
  } else if (cfg.ell >= 2) {
    std::vector<int> colleges(nc);
    for (int c = 0; c < nc; ++c) colleges[c] = c;
    rng.shuffle(colleges);
    const int wanted = static_cast<int>(rng.uniform(1, cfg.max_common_sets));
    std::size_t next = 0;
    for (int k = 0; k < wanted && next + 2 <= colleges.size(); ++k) {
      const long remaining = static_cast<long>(colleges.size() - next);
      const int size = static_cast<int>(rng.uniform(2, remaining));
      std::vector<int> members(colleges.begin() + next, colleges.begin() + next + size);
      next += size;
      std::sort(members.begin(), members.end());
      const int j = inst.num_sets();
      for (int c : members) set_of[c] = j;
      inst.sets.push_back({"C" + std::to_string(j), members, Rational(rng.uniform(1, 3)),
                           random_weak_order(rng, all_students, cfg.tie_rate)});
    }
  }
  for (int c = 0; c < nc; ++c) {
    std::vector<int> applicants;
    for (const auto& e : inst.edges)
      if (e.college == c) applicants.push_back(e.student);
    WeakOrder pref;
    if (fixed[c]) {
      pref = *fixed[c];
    } else if (set_of[c] >= 0) {
      std::vector<std::vector<int>> groups;
      for (const auto& g : inst.sets[set_of[c]].master.groups()) {
        std::vector<int> kept;
        for (int s : g)
          if (std::find(applicants.begin(), applicants.end(), s) != applicants.end()) kept.push_back(s);
        if (!kept.empty()) groups.push_back(std::move(kept));
      }
      pref = WeakOrder(std::move(groups));
    } else {
      pref = random_weak_order(rng, applicants, cfg.tie_rate);
    }
    inst.colleges.push_back({"c" + std::to_string(c), Rational(rng.uniform(1, 2)), std::move(pref)});
  }
  for (int s = 0; s < ns; ++s) {
    std::vector<int> mine;
    for (int e = 0; e < inst.num_edges(); ++e)
      if (inst.edges[e].student == s) mine.push_back(e);
    inst.student_prefs.push_back(random_weak_order(rng, mine, cfg.tie_rate));
  }
  return inst;
}

struct FlowCase {
  FlowInstance instance;
  MultiFlow flow;
};

namespace detail {

class FlowBuilder {
 public:
  FlowBuilder(Rng& rng, int n, int k, int max_arcs) : rng_(rng), max_arcs_(max_arcs) {
    for (int v = 0; v < n; ++v) inst.vertex_ids.push_back("v" + std::to_string(v));
    flow.assign(k, {});
  }

  /// Arc u->v: an existing one (usually, unless `fresh`) or a new one while
  /// under the cap.
  int arc(int u, int v, bool fresh = false) {
    int existing = -1;
    for (int a = 0; a < inst.num_arcs(); ++a)
      if (inst.arcs[a].tail == u && inst.arcs[a].head == v) {
        existing = a;
        break;
      }
    if (!fresh && existing >= 0 && (inst.num_arcs() >= max_arcs_ || rng_.chance(0.7))) return existing;
    if (inst.num_arcs() >= max_arcs_) return -1;
    Arc a;
    a.id = "a" + std::to_string(inst.num_arcs());
    a.tail = u;
    a.head = v;
    inst.arcs.push_back(std::move(a));
    for (auto& fj : flow) fj.emplace_back(0);
    return inst.num_arcs() - 1;
  }

  /// Routes `amount` of commodity j along the vertex sequence; all or nothing.
  bool route(int j, const std::vector<int>& vertices, const Rational& amount, bool fresh = false) {
    std::vector<int> arcs;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
      const int a = arc(vertices[i], vertices[i + 1], fresh);
      if (a < 0) return false;
      arcs.push_back(a);
    }
    for (int a : arcs) flow[j][a] += amount;
    return true;
  }

  FlowInstance inst;
  MultiFlow flow;

 private:
  Rng& rng_;
  int max_arcs_;
};

inline std::vector<int> random_route(Rng& rng, int n, int from, int to, const std::vector<int>& avoid, int max_inner) {
  std::vector<int> pool;
  for (int v = 0; v < n; ++v)
    if (v != from && v != to && std::find(avoid.begin(), avoid.end(), v) == avoid.end()) pool.push_back(v);
  rng.shuffle(pool);
  const int inner = static_cast<int>(rng.uniform(0, std::min<long>(max_inner, static_cast<long>(pool.size()))));
  std::vector<int> route{from};
  route.insert(route.end(), pool.begin(), pool.begin() + inner);
  route.push_back(to);
  return route;
}

inline bool try_repair(FlowCase& fc, const BlockingWalk& w) {
  const int j = w.commodity;
  auto& inst = fc.instance;
  for (int a : w.arcs)
    if (sgn(fc.flow[j][a]) == 0 && sgn(inst.arcs[a].commodity_capacity[j]) > 0) {
      inst.arcs[a].commodity_capacity[j] = 0;
      return true;
    }
  auto demote = [&](int v, int a) {
    std::vector<std::vector<int>> groups;
    for (auto g : inst.vertex_prefs[v][j].groups()) {
      std::erase(g, a);
      if (!g.empty()) groups.push_back(std::move(g));
    }
    groups.push_back({a});
    WeakOrder next(std::move(groups));
    if (next == inst.vertex_prefs[v][j]) return false;
    inst.vertex_prefs[v][j] = std::move(next);
    return true;
  };
  const auto& com = inst.commodities[j];
  if (w.vertices.back() != com.sink && demote(w.vertices.back(), w.arcs.back())) return true;
  if (w.vertices.front() != com.source && demote(w.vertices.front(), w.arcs.front())) return true;
  return false;
}

}  // namespace detail

/// Network plus a fractional flow that verify_flow certifies stable. The flow
/// superposes integral source-sink routes, fractional cycles away from the
/// commodity's terminals and, for two or more commodities, contested routes
/// that split one unit of a shared arc between two commodities the arc ranks
/// equally. Weights are multiples of 1/8. Unstable samples are repaired
/// (closing unused arcs for the walk's commodity, demoting the walk's last or
/// first arc at a non-terminal endpoint) or rejected and redrawn.
inline FlowCase generate_smf(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed);
  const int k = std::max(1, cfg.commodities);
  for (int attempt = 0; attempt < cfg.retry_cap; ++attempt) {
    const int n = static_cast<int>(rng.uniform(4, std::max(4, cfg.max_vertices)));
    detail::FlowBuilder b(rng, n, k, cfg.max_edges);
    for (int j = 0; j < k; ++j) {
      const auto ends = detail::sample_distinct(rng, n, 2);
      const bool flip = rng.chance(0.5);
      b.inst.commodities.push_back({"k" + std::to_string(j), ends[flip ? 1 : 0], ends[flip ? 0 : 1]});
    }
    // Contested vertices are picked first so that no cycle passes through
    // them; otherwise a walk could bypass the shared arc.
    std::vector<int> avoid;
    int cj = -1, co = -1;
    if (k >= 2 && rng.chance(0.8)) {
      cj = static_cast<int>(rng.uniform(0, k - 1));
      co = (cj + 1) % k;
      const auto& a = b.inst.commodities[cj];
      const auto& o = b.inst.commodities[co];
      std::vector<int> terminals{a.source, a.sink, o.source, o.sink}, free;
      for (int v = 0; v < n; ++v)
        if (std::find(terminals.begin(), terminals.end(), v) == terminals.end()) free.push_back(v);
      if (free.size() >= 2) {
        rng.shuffle(free);
        avoid = {free[0], free[1]};
      }
    }
    for (int j = 0; j < k; ++j) {
      const auto& com = b.inst.commodities[j];
      if (rng.chance(0.5)) b.route(j, detail::random_route(rng, n, com.source, com.sink, avoid, 2), Rational(1));
      const int cycles = static_cast<int>(rng.uniform(1, 2));
      for (int c = 0; c < cycles; ++c) {
        std::vector<int> pool;
        for (int v = 0; v < n; ++v)
          if (v != com.source && v != com.sink && std::find(avoid.begin(), avoid.end(), v) == avoid.end())
            pool.push_back(v);
        if (pool.size() < 2) continue;
        rng.shuffle(pool);
        const int len = static_cast<int>(rng.uniform(2, std::min<long>(4, static_cast<long>(pool.size()))));
        std::vector<int> cycle(pool.begin(), pool.begin() + len);
        cycle.push_back(cycle.front());
        b.route(j, cycle, make_rational(rng.uniform(1, 7), 8));
      }
    }
    int contested = -1;
    if (!avoid.empty()) {
      const int u = avoid[0], v = avoid[1];
      const auto& a = b.inst.commodities[cj];
      const auto& o = b.inst.commodities[co];
      const Rational w = make_rational(rng.uniform(1, 7), 8);
      contested = b.arc(u, v, true);
      if (contested >= 0 && b.route(cj, {a.source, u}, w, true) && b.route(co, {o.source, u}, 1 - w, true)) {
        b.flow[cj][contested] += w;
        b.flow[co][contested] += 1 - w;
        b.route(cj, {v, a.sink}, w, true);
        b.route(co, {v, o.sink}, 1 - w, true);
      }
    }

    FlowCase fc{std::move(b.inst), std::move(b.flow)};
    auto& inst = fc.instance;
    const auto& f = fc.flow;
    // A route may have failed midway at the arc cap; such samples are discarded.
    bool conserved = true;
    for (int j = 0; j < k; ++j)
      for (int v = 0; v < n; ++v)
        if (!detail::kirchhoff_holds(inst, f[j], j, v)) conserved = false;
    if (!conserved) continue;
    bool fractional = false;
    for (const auto& fj : f)
      if (!all_integral(fj)) fractional = true;
    if (!fractional) continue;

    std::vector<int> commodity_ids(k);
    for (int j = 0; j < k; ++j) commodity_ids[j] = j;
    for (int a = 0; a < inst.num_arcs(); ++a) {
      auto& arc = inst.arcs[a];
      Rational total = 0;
      for (int j = 0; j < k; ++j) {
        total += f[j][a];
        arc.commodity_capacity.push_back(sgn(f[j][a]) > 0 ? Rational(ceil_of(f[j][a])) : Rational(rng.uniform(0, 1)));
      }
      arc.capacity = sgn(total) > 0 ? Rational(ceil_of(total)) : Rational(rng.uniform(0, 1));
      arc.pref = random_weak_order(rng, commodity_ids, cfg.tie_rate);
    }
    if (contested >= 0) {
      std::vector<std::vector<int>> tie{commodity_ids};
      inst.arcs[contested].pref = WeakOrder(std::move(tie));
    }
    inst.vertex_prefs.assign(n, {});
    for (int v = 0; v < n; ++v) {
      auto incident = inst.out_arcs(v);
      for (int a : inst.in_arcs(v)) incident.push_back(a);
      std::sort(incident.begin(), incident.end());
      for (int j = 0; j < k; ++j) inst.vertex_prefs[v].push_back(random_weak_order(rng, incident, cfg.tie_rate));
    }

    for (int repair = 0; repair <= 4 * inst.num_arcs() * k; ++repair) {
      const auto report = verify_flow(inst, f);
      if (report.stable()) {
        if (!validate(inst).empty()) throw InternalError("generate_smf: produced an invalid instance");
        return fc;
      }
      if (!report.walk || !detail::try_repair(fc, *report.walk)) break;
    }
  }
  throw ResourceLimitError("generate_smf: no certified stable fractional flow within " + std::to_string(cfg.retry_cap) +
                           " attempts");
}

}  // namespace nearstable
