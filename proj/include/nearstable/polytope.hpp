#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/rational.hpp"

namespace nearstable {

/// Receives one line per pivot: "pivot <t> enter=<col> leave=<col> kind=<kind>".
using TraceSink = std::function<void(std::string_view)>;

enum class Relation { LessEqual, Equal };

struct LinearRow {
  RationalVector coeffs;
  Relation relation = Relation::LessEqual;
  Rational rhs;
};

/// Rows over x >= 0 with optional per-variable upper bounds and fixed values.
struct LinearSystem {
  int num_vars = 0;
  std::vector<LinearRow> rows;
  std::vector<std::optional<Rational>> upper;
  std::vector<std::optional<Rational>> fixed;

  explicit LinearSystem(int n = 0) : num_vars(n), upper(n), fixed(n) {}

  void add_row(RationalVector coeffs, Relation rel, Rational rhs) {
    rows.push_back({std::move(coeffs), rel, std::move(rhs)});
  }

  std::vector<int> free_vars() const {
    std::vector<int> out;
    for (int j = 0; j < num_vars; ++j)
      if (!fixed[j]) out.push_back(j);
    return out;
  }
};

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  return s;
}

/// Reduced row echelon form in place. Returns the pivot column of each
/// nonzero row, in row order.
inline std::vector<int> reduce_rows(std::vector<RationalVector>& m, int cols) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && sgn(m[p][c]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (int k = 0; k < cols; ++k)
      if (sgn(m[r][k]) != 0) m[r][k] *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c];
      for (int k = 0; k < cols; ++k)
        if (sgn(m[r][k]) != 0) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  return pivots;
}

inline int matrix_rank(std::vector<RationalVector> m, int cols) {
  return static_cast<int>(reduce_rows(m, cols).size());
}

inline bool is_feasible(const LinearSystem& sys, const RationalVector& x) {
  if (static_cast<int>(x.size()) != sys.num_vars) return false;
  for (int j = 0; j < sys.num_vars; ++j) {
    if (x[j] < 0) return false;
    if (sys.upper[j] && x[j] > *sys.upper[j]) return false;
    if (sys.fixed[j] && x[j] != *sys.fixed[j]) return false;
  }
  for (const auto& row : sys.rows) {
    Rational lhs = dot(row.coeffs, x);
    if (row.relation == Relation::Equal ? lhs != row.rhs : lhs > row.rhs) return false;
  }
  return true;
}

namespace detail {

/// Tight constraints at x, restricted to the given free variables.
inline std::vector<RationalVector> tight_rows(const LinearSystem& sys, const RationalVector& x,
                                              const std::vector<int>& free) {
  const int p = static_cast<int>(free.size());
  std::vector<RationalVector> out;
  for (const auto& row : sys.rows) {
    if (row.relation == Relation::LessEqual && dot(row.coeffs, x) != row.rhs) continue;
    RationalVector r(p);
    bool nonzero = false;
    for (int i = 0; i < p; ++i) {
      r[i] = row.coeffs[free[i]];
      nonzero = nonzero || sgn(r[i]) != 0;
    }
    if (nonzero) out.push_back(std::move(r));
  }
  for (int i = 0; i < p; ++i) {
    int j = free[i];
    if (sgn(x[j]) == 0 || (sys.upper[j] && x[j] == *sys.upper[j])) {
      RationalVector r(p);
      r[i] = 1;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace detail

/// Rank of the constraints tight at x (bounds included) over the unfixed
/// variables. Equality rows count once.
inline int rank_of_tight_rows(const LinearSystem& sys, const RationalVector& x) {
  auto free = sys.free_vars();
  return matrix_rank(detail::tight_rows(sys, x, free), static_cast<int>(free.size()));
}

inline bool is_vertex(const LinearSystem& sys, const RationalVector& x) {
  return is_feasible(sys, x) && rank_of_tight_rows(sys, x) == static_cast<int>(sys.free_vars().size());
}

namespace detail {

/// Walks from a feasible point to a vertex. Each step moves along a direction
/// that keeps every tight constraint tight until a new one becomes tight. With
/// an objective, steps never decrease it.
inline RationalVector purify(const LinearSystem& sys, RationalVector x, const RationalVector* objective) {
  auto free = sys.free_vars();
  const int p = static_cast<int>(free.size());
  for (int step = 0; step <= p; ++step) {
    auto tight = tight_rows(sys, x, free);
    auto pivots = reduce_rows(tight, p);
    if (static_cast<int>(pivots.size()) == p) return x;
    std::vector<bool> is_pivot(p, false);
    for (int c : pivots) is_pivot[c] = true;
    int f = 0;
    while (is_pivot[f]) ++f;
    RationalVector dir(sys.num_vars);
    dir[free[f]] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) dir[free[pivots[r]]] = -tight[r][f];

    auto max_step = [&](const RationalVector& d) -> std::optional<Rational> {
      std::optional<Rational> best;
      auto consider = [&](Rational t) {
        if (!best || t < *best) best = std::move(t);
      };
      for (const auto& row : sys.rows) {
        if (row.relation != Relation::LessEqual) continue;
        Rational ad = dot(row.coeffs, d);
        if (sgn(ad) > 0) consider((row.rhs - dot(row.coeffs, x)) / ad);
      }
      for (int j : free) {
        if (sgn(d[j]) < 0) consider(x[j] / -d[j]);
        if (sgn(d[j]) > 0 && sys.upper[j]) consider((*sys.upper[j] - x[j]) / d[j]);
      }
      return best;
    };

    int slope = objective ? sgn(dot(*objective, dir)) : 0;
    if (slope < 0) {
      for (auto& v : dir) v = -v;
      slope = 1;
    }
    auto t = max_step(dir);
    if (!t) {
      if (slope > 0) throw InternalError("objective is unbounded over the system");
      for (auto& v : dir) v = -v;
      t = max_step(dir);
      if (!t) throw InternalError("system contains a line; it has no vertex");
    }
    for (int j : free)
      if (sgn(dir[j]) != 0) x[j] += *t * dir[j];
  }
  throw InternalError("vertex purification did not converge");
}

inline std::string var_label(int j, int structural) {
  return j < structural ? "x" + std::to_string(j) : "s" + std::to_string(j - structural);
}

/// Bland-rule primal simplex over {A_eq y = b, A_le y + s = b, y, s >= 0},
/// started from the basis of a known vertex.
inline RationalVector maximize_from_vertex(const LinearSystem& sys, const RationalVector& vertex,
                                           const RationalVector& objective, const TraceSink& trace) {
  auto free = sys.free_vars();
  const int p = static_cast<int>(free.size());

  struct StdRow {
    RationalVector coeffs;  // over free vars
    Rational rhs;
    bool equality;
  };
  std::vector<StdRow> eq_rows, le_rows;
  for (const auto& row : sys.rows) {
    StdRow r{RationalVector(p), row.rhs, row.relation == Relation::Equal};
    bool nonzero = false;
    for (int j = 0; j < sys.num_vars; ++j) {
      if (sys.fixed[j]) {
        if (sgn(row.coeffs[j]) != 0) r.rhs -= row.coeffs[j] * *sys.fixed[j];
      }
    }
    for (int i = 0; i < p; ++i) {
      r.coeffs[i] = row.coeffs[free[i]];
      nonzero = nonzero || sgn(r.coeffs[i]) != 0;
    }
    if (!nonzero) continue;
    (r.equality ? eq_rows : le_rows).push_back(std::move(r));
  }
  for (int i = 0; i < p; ++i) {
    if (!sys.upper[free[i]]) continue;
    StdRow r{RationalVector(p), *sys.upper[free[i]], false};
    r.coeffs[i] = 1;
    le_rows.push_back(std::move(r));
  }
  // Keep a linearly independent subset of the equality rows; the rest are
  // implied because the vertex satisfies all of them.
  {
    std::vector<StdRow> kept;
    std::vector<RationalVector> basis;
    for (auto& r : eq_rows) {
      auto trial = basis;
      trial.push_back(r.coeffs);
      if (matrix_rank(trial, p) > static_cast<int>(basis.size())) {
        basis.push_back(r.coeffs);
        kept.push_back(std::move(r));
      }
    }
    eq_rows = std::move(kept);
  }

  const int ne = static_cast<int>(eq_rows.size()), nl = static_cast<int>(le_rows.size());
  const int rows = ne + nl, cols = p + nl;
  std::vector<RationalVector> tab(rows, RationalVector(cols + 1));
  for (int r = 0; r < ne; ++r) {
    for (int i = 0; i < p; ++i) tab[r][i] = eq_rows[r].coeffs[i];
    tab[r][cols] = eq_rows[r].rhs;
  }
  for (int r = 0; r < nl; ++r) {
    for (int i = 0; i < p; ++i) tab[ne + r][i] = le_rows[r].coeffs[i];
    tab[ne + r][p + r] = 1;
    tab[ne + r][cols] = le_rows[r].rhs;
  }

  RationalVector value(cols);
  for (int i = 0; i < p; ++i) value[i] = vertex[free[i]];
  for (int r = 0; r < nl; ++r) value[p + r] = le_rows[r].rhs - dot(le_rows[r].coeffs, RationalVector(value.begin(), value.begin() + p));

  // Crash basis: every positive variable, then zero-valued ones (slacks first)
  // until the basis is square and nonsingular.
  std::vector<int> order;
  for (int j = 0; j < cols; ++j)
    if (sgn(value[j]) > 0) order.push_back(j);
  for (int j = p; j < cols; ++j)
    if (sgn(value[j]) == 0) order.push_back(j);
  for (int j = 0; j < p; ++j)
    if (sgn(value[j]) == 0) order.push_back(j);

  std::vector<int> basis(rows, -1);
  std::vector<bool> row_used(rows, false);
  auto pivot = [&](int r, int c) {
    Rational inv = 1 / tab[r][c];
    for (int k = 0; k <= cols; ++k)
      if (sgn(tab[r][k]) != 0) tab[r][k] *= inv;
    std::vector<int> nz;
    for (int k = 0; k <= cols; ++k)
      if (sgn(tab[r][k]) != 0) nz.push_back(k);
    for (int i = 0; i < rows; ++i) {
      if (i == r || sgn(tab[i][c]) == 0) continue;
      Rational f = tab[i][c];
      for (int k : nz) tab[i][k] -= f * tab[r][k];
    }
  };
  int placed = 0;
  for (int j : order) {
    if (placed == rows) break;
    int r = -1;
    for (int i = 0; i < rows; ++i)
      if (!row_used[i] && sgn(tab[i][j]) != 0) {
        r = i;
        break;
      }
    if (r < 0) continue;
    pivot(r, j);
    basis[r] = j;
    row_used[r] = true;
    ++placed;
  }
  if (placed != rows) throw InternalError("could not build a basis at the vertex");
  for (int r = 0; r < rows; ++r)
    if (tab[r][cols] != value[basis[r]]) throw InternalError("crash basis does not reproduce the vertex");

  RationalVector cost(cols);
  for (int i = 0; i < p; ++i) cost[i] = objective[free[i]];

  std::size_t t = 0;
  while (true) {
    std::vector<bool> basic(cols, false);
    for (int b : basis) basic[b] = true;
    int enter = -1;
    for (int j = 0; j < cols && enter < 0; ++j) {
      if (basic[j]) continue;
      Rational reduced = cost[j];
      for (int r = 0; r < rows; ++r)
        if (sgn(tab[r][j]) != 0 && sgn(cost[basis[r]]) != 0) reduced -= cost[basis[r]] * tab[r][j];
      if (sgn(reduced) > 0) enter = j;
    }
    if (enter < 0) break;
    int leave_row = -1;
    Rational best;
    for (int r = 0; r < rows; ++r) {
      if (sgn(tab[r][enter]) <= 0) continue;
      Rational ratio = tab[r][cols] / tab[r][enter];
      if (leave_row < 0 || ratio < best || (ratio == best && basis[r] < basis[leave_row])) {
        leave_row = r;
        best = ratio;
      }
    }
    if (leave_row < 0) throw InternalError("objective is unbounded over the system");
    if (trace)
      trace("pivot " + std::to_string(++t) + " enter=" + var_label(enter, p) +
            " leave=" + var_label(basis[leave_row], p) + " kind=cardinal");
    pivot(leave_row, enter);
    basis[leave_row] = enter;
  }

  RationalVector out = vertex;
  for (int i = 0; i < p; ++i) out[free[i]] = 0;
  for (int r = 0; r < rows; ++r)
    if (basis[r] < p) out[free[basis[r]]] = tab[r][cols];
  return out;
}

}  // namespace detail

/// Returns a vertex of `sys`. With an objective the vertex maximizes it, and
/// its value is never below the warm point's. `warm` must be feasible.
inline RationalVector extreme_point(const LinearSystem& sys, const std::optional<RationalVector>& objective,
                                    const RationalVector& warm, const TraceSink& trace = {}) {
  if (!is_feasible(sys, warm)) throw InternalError("extreme_point: warm start is infeasible");
  const RationalVector* obj = objective ? &*objective : nullptr;
  RationalVector x = detail::purify(sys, warm, obj);
  if (obj) x = detail::maximize_from_vertex(sys, x, *obj, trace);
  if (!is_vertex(sys, x)) throw InternalError("extreme_point: result is not a vertex");
  if (obj && dot(*obj, x) < dot(*obj, warm)) throw InternalError("extreme_point: objective decreased");
  return x;
}

}  // namespace nearstable
