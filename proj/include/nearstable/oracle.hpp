#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <vector>

#include "nearstable/cacq.hpp"
#include "nearstable/errors.hpp"
#include "nearstable/instances.hpp"
#include "nearstable/shm.hpp"

namespace nearstable {

// Brute-force reference solvers for tiny instances. They share nothing with
// the pipelines beyond the instance types: subsets are bitmasks and blocking
// is decided from precomputed "strictly worse than" masks.

constexpr int kDefaultEnumerationCap = 20;

namespace detail {

struct ShmMasks {
  int m = 0;
  std::vector<std::uint32_t> incident;                // per vertex
  std::vector<std::vector<std::uint32_t>> worse_than;  // [v][f]: edges at v strictly below f
};

inline ShmMasks shm_masks(const HypergraphInstance& inst, int cap) {
  if (inst.num_edges() > cap || inst.num_edges() > 31)
    throw ResourceLimitError("enumeration is capped at " + std::to_string(std::min(cap, 31)) + " edges, instance has " +
                             std::to_string(inst.num_edges()));
  ShmMasks k;
  k.m = inst.num_edges();
  const int n = inst.num_vertices();
  k.incident.assign(n, 0);
  k.worse_than.assign(n, std::vector<std::uint32_t>(k.m, 0));
  for (int e = 0; e < k.m; ++e)
    for (int v : inst.edges[e]) k.incident[v] |= 1u << e;
  for (int v = 0; v < n; ++v)
    for (int f = 0; f < k.m; ++f)
      for (int e = 0; e < k.m; ++e)
        if ((k.incident[v] >> e & 1u) && (k.incident[v] >> f & 1u) && inst.prefs[v].prefers(f, e))
          k.worse_than[v][f] |= 1u << e;
  return k;
}

inline RationalVector mask_to_vector(std::uint32_t mask, int m) {
  RationalVector x(m);
  for (int e = 0; e < m; ++e)
    if (mask >> e & 1u) x[e] = 1;
  return x;
}

inline bool shm_mask_stable(const HypergraphInstance& inst, const ShmMasks& k, const std::vector<long>& q,
                            std::uint32_t mask) {
  const int n = inst.num_vertices();
  std::vector<long> load(n);
  for (int v = 0; v < n; ++v) {
    load[v] = std::popcount(mask & k.incident[v]);
    if (load[v] > q[v]) return false;
  }
  for (int f = 0; f < k.m; ++f) {
    if (mask >> f & 1u) continue;
    bool blocks = true;
    for (int v : inst.edges[f])
      if (load[v] == q[v] && (mask & k.worse_than[v][f]) == 0) {
        blocks = false;
        break;
      }
    if (blocks) return false;
  }
  return true;
}

inline std::vector<long> integral_capacities(const RationalVector& q) {
  std::vector<long> out;
  for (const auto& x : q) out.push_back(to_long(x));
  return out;
}

}  // namespace detail

/// Every integral stable matching under `capacity`, in ascending bitmask order.
inline std::vector<RationalVector> enumerate_stable(const HypergraphInstance& inst, const RationalVector& capacity,
                                                    int cap = kDefaultEnumerationCap) {
  const auto k = detail::shm_masks(inst, cap);
  const auto q = detail::integral_capacities(capacity);
  std::vector<RationalVector> out;
  for (std::uint32_t mask = 0; mask < (1u << k.m); ++mask)
    if (detail::shm_mask_stable(inst, k, q, mask)) out.push_back(detail::mask_to_vector(mask, k.m));
  return out;
}

struct NearFeasible {
  std::vector<long> capacity;
  RationalVector matching;  // first witness in bitmask order
};

/// All capacity vectors q' with max|q'-q| <= bound (and |sum(q'-q)| <=
/// sum_bound when given) under which some integral matching is stable, one
/// witness each, sorted by q'.
inline std::vector<NearFeasible> enumerate_near_feasible(const HypergraphInstance& inst, long bound,
                                                         std::optional<long> sum_bound = std::nullopt,
                                                         int cap = kDefaultEnumerationCap) {
  const auto k = detail::shm_masks(inst, cap);
  const auto q = detail::integral_capacities(inst.capacity);
  const int n = inst.num_vertices();
  std::map<std::vector<long>, std::uint32_t> found;

  // Edges are checked once their highest-indexed vertex has a value.
  std::vector<std::vector<int>> closes_at(n);
  for (int f = 0; f < k.m; ++f) {
    int last = 0;
    for (int v : inst.edges[f]) last = std::max(last, v);
    closes_at[last].push_back(f);
  }

  std::vector<long> load(n), chosen(n);
  for (std::uint32_t mask = 0; mask < (1u << k.m); ++mask) {
    bool possible = true;
    for (int v = 0; v < n && possible; ++v) {
      load[v] = std::popcount(mask & k.incident[v]);
      if (load[v] > q[v] + bound) possible = false;
    }
    if (!possible) continue;
    auto rec = [&](auto&& self, int v, long delta) -> void {
      if (v == n) {
        if (!sum_bound || std::labs(delta) <= *sum_bound) found.try_emplace(chosen, mask);
        return;
      }
      for (long value = std::max({0L, q[v] - bound, load[v]}); value <= q[v] + bound; ++value) {
        chosen[v] = value;
        bool ok = true;
        for (int f : closes_at[v]) {
          if (mask >> f & 1u) continue;
          bool protected_edge = false;
          for (int u : inst.edges[f])
            if (chosen[u] == load[u] && (mask & k.worse_than[u][f]) == 0) protected_edge = true;
          if (!protected_edge) {
            ok = false;
            break;
          }
        }
        if (ok) self(self, v + 1, delta + value - q[v]);
      }
    };
    rec(rec, 0, 0);
  }
  std::vector<NearFeasible> out;
  for (const auto& [capacity, mask] : found) out.push_back({capacity, detail::mask_to_vector(mask, k.m)});
  return out;
}

/// Every integral stable matching of a (normalized) CA-CQ instance under the
/// given set quotas, in ascending bitmask order.
inline std::vector<RationalVector> enumerate_stable(const CacqInstance& inst, const RationalVector& quotas,
                                                    int cap = kDefaultEnumerationCap) {
  const int m = inst.num_edges();
  if (m > cap || m > 31)
    throw ResourceLimitError("enumeration is capped at " + std::to_string(std::min(cap, 31)) + " edges, instance has " +
                             std::to_string(m));
  std::vector<std::uint32_t> of_student(inst.num_students(), 0), of_set(inst.num_sets(), 0);
  for (int e = 0; e < m; ++e) {
    of_student[inst.edges[e].student] |= 1u << e;
    for (int j = 0; j < inst.num_sets(); ++j)
      for (int c : inst.sets[j].colleges)
        if (c == inst.edges[e].college) of_set[j] |= 1u << e;
  }
  std::vector<RationalVector> out;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    bool feasible = true;
    for (auto s : of_student)
      if (std::popcount(mask & s) > 1) feasible = false;
    for (int j = 0; j < inst.num_sets() && feasible; ++j)
      if (std::popcount(mask & of_set[j]) > quotas[j]) feasible = false;
    if (!feasible) continue;
    auto x = detail::mask_to_vector(mask, m);
    if (verify_cacq(inst, quotas, x).stable()) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace nearstable
