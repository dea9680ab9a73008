#pragma once

#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "nearstable/errors.hpp"
#include "nearstable/polytope.hpp"
#include "nearstable/rational.hpp"

namespace nearstable {

/// Scarf-type problem over {Qx <= d, x >= 0}. row_orders[i] lists the columns
/// with a positive entry in row i, most preferred first.
struct ScarfProblem {
  std::vector<RationalVector> matrix;
  RationalVector bound;
  std::vector<std::vector<int>> row_orders;

  int rows() const { return static_cast<int>(matrix.size()); }
  int cols() const { return matrix.empty() ? 0 : static_cast<int>(matrix[0].size()); }
};

/// Extreme point dominating every column; dominating_row[j] is a witness row.
struct DominatingPoint {
  RationalVector x;
  std::vector<int> dominating_row;
  std::size_t pivots = 0;
};

struct ScarfOptions {
  std::size_t pivot_budget = 10'000'000;
  TraceSink trace;
};

/// Pivot budget from NEARSTABLE_PIVOT_BUDGET, or the default.
inline std::size_t pivot_budget_from_env(std::size_t fallback = 10'000'000) {
  if (const char* env = std::getenv("NEARSTABLE_PIVOT_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return fallback;
}

/// Throws PreconditionError unless the problem satisfies Scarf's hypotheses
/// in the form this engine needs (d > 0, strict orders over exactly the
/// positive entries, no zero column).
inline void check_scarf_problem(const ScarfProblem& p) {
  const int n = p.rows(), m = p.cols();
  if (static_cast<int>(p.bound.size()) != n || static_cast<int>(p.row_orders.size()) != n)
    throw PreconditionError("scarf problem: bound or row orders do not match the row count");
  std::vector<bool> column_used(m, false);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(p.matrix[i].size()) != m) throw PreconditionError("scarf problem: ragged matrix");
    if (sgn(p.bound[i]) <= 0) throw PreconditionError("scarf problem: row " + std::to_string(i) + " has d <= 0");
    std::vector<bool> listed(m, false);
    for (int j : p.row_orders[i]) {
      if (j < 0 || j >= m || listed[j])
        throw PreconditionError("scarf problem: row " + std::to_string(i) + " order is malformed");
      listed[j] = true;
    }
    for (int j = 0; j < m; ++j) {
      if (sgn(p.matrix[i][j]) < 0) throw PreconditionError("scarf problem: negative entry");
      if ((sgn(p.matrix[i][j]) > 0) != listed[j])
        throw PreconditionError("scarf problem: row " + std::to_string(i) +
                                " order does not cover exactly its positive columns");
      if (sgn(p.matrix[i][j]) > 0) column_used[j] = true;
    }
  }
  for (int j = 0; j < m; ++j)
    if (!column_used[j]) throw PreconditionError("scarf problem: column " + std::to_string(j) + " is all zero");
}

struct DominationReport {
  bool feasible = true;
  std::vector<std::vector<int>> witnesses;  // per column, every row that dominates it
  bool pass = false;
};

/// Checks x >= 0, Qx <= d, and lists for each column all rows dominating it.
inline DominationReport verify_dominating(const ScarfProblem& p, const RationalVector& x) {
  const int n = p.rows(), m = p.cols();
  DominationReport report;
  report.witnesses.assign(m, {});
  if (static_cast<int>(x.size()) != m) {
    report.feasible = false;
    return report;
  }
  for (const auto& v : x)
    if (sgn(v) < 0) report.feasible = false;
  for (int i = 0; i < n; ++i) {
    Rational lhs = dot(p.matrix[i], x);
    if (lhs > p.bound[i]) report.feasible = false;
    if (lhs != p.bound[i]) continue;
    // Walk the order best-to-worst; column j is dominated once every used
    // column has been seen at or before it.
    int used_total = 0;
    for (int k = 0; k < m; ++k)
      if (sgn(p.matrix[i][k]) > 0 && sgn(x[k]) > 0) ++used_total;
    int used_seen = 0;
    for (int j : p.row_orders[i]) {
      if (sgn(x[j]) > 0) ++used_seen;
      if (used_seen == used_total) report.witnesses[j].push_back(i);
    }
  }
  report.pass = report.feasible;
  for (const auto& w : report.witnesses)
    if (w.empty()) report.pass = false;
  return report;
}

/// True iff x is a vertex of {Qx <= d, x >= 0}.
inline bool certify_extreme(const ScarfProblem& p, const RationalVector& x) {
  LinearSystem sys(p.cols());
  for (int i = 0; i < p.rows(); ++i) sys.add_row(p.matrix[i], Relation::LessEqual, p.bound[i]);
  return is_vertex(sys, x);
}

namespace detail {

class ScarfPivoter {
 public:
  ScarfPivoter(const ScarfProblem& p, const ScarfOptions& opts)
      : n_(p.rows()), m_(p.cols()), total_(n_ + m_), opts_(opts) {
    build_utilities(p);
    tableau_.assign(n_, RationalVector(total_ + 1));
    for (int i = 0; i < n_; ++i) {
      tableau_[i][i] = 1;
      for (int j = 0; j < m_; ++j) tableau_[i][n_ + j] = p.matrix[i][j];
      tableau_[i][total_] = p.bound[i];
    }
    basis_.resize(n_);
    for (int i = 0; i < n_; ++i) basis_[i] = i;
  }

  DominatingPoint run() {
    in_ordinal_.assign(total_, false);
    row_min_.assign(n_, -1);
    col_row_.assign(total_, -1);
    // Initial ordinal basis: slacks 1..n-1 plus the real column that row 0
    // likes best.
    int first = n_;
    for (int c = n_; c < total_; ++c)
      if (util_[0][c] > util_[0][first]) first = c;
    set_min(0, first);
    for (int i = 1; i < n_; ++i) set_min(i, i);

    int entering = first;
    while (true) {
      int leaving = cardinal_pivot(entering);
      if (leaving == 0) break;
      entering = ordinal_pivot(leaving);
      if (entering == 0) break;
    }
    return extract();
  }

 private:
  // util_[i][c]: larger means row i likes column c more. Slack i is the
  // unique minimum of row i; then real columns with positive entries in
  // preference order; then real columns with zero entries; then the other
  // slacks, which dominate every real column.
  void build_utilities(const ScarfProblem& p) {
    util_.assign(n_, std::vector<int>(total_, 0));
    for (int i = 0; i < n_; ++i) {
      int level = 1;
      const auto& order = p.row_orders[i];
      for (auto it = order.rbegin(); it != order.rend(); ++it) util_[i][n_ + *it] = level++;
      for (int j = 0; j < m_; ++j)
        if (sgn(p.matrix[i][j]) == 0) util_[i][n_ + j] = level++;
      for (int s = 0; s < n_; ++s)
        if (s != i) util_[i][s] = level++;
      util_[i][i] = 0;
    }
  }

  std::string label(int c) const {
    return c < n_ ? "s" + std::to_string(c) : "x" + std::to_string(c - n_);
  }

  void count_pivot(int enter, int leave, const char* kind) {
    if (++pivots_ > opts_.pivot_budget)
      throw ResourceLimitError("scarf: pivot budget of " + std::to_string(opts_.pivot_budget) + " exceeded");
    if (opts_.trace)
      opts_.trace("pivot " + std::to_string(pivots_) + " enter=" + label(enter) + " leave=" + label(leave) +
                  " kind=" + kind);
  }

  void set_min(int row, int col) {
    row_min_[row] = col;
    col_row_[col] = row;
    in_ordinal_[col] = true;
  }

  // Brings `enter` into the feasible basis with the lexicographic ratio test
  // on (rhs, B^-1) and returns the column that leaves.
  int cardinal_pivot(int enter) {
    int best = -1;
    for (int r = 0; r < n_; ++r) {
      if (sgn(tableau_[r][enter]) <= 0) continue;
      if (best < 0 || lex_less(r, best, enter)) best = r;
    }
    if (best < 0) throw InternalError("scarf: column has no positive entry; polytope is unbounded");
    int leaving = basis_[best];
    count_pivot(enter, leaving, "cardinal");
    pivot(best, enter);
    basis_[best] = enter;
    return leaving;
  }

  bool lex_less(int r1, int r2, int col) const {
    const Rational& a1 = tableau_[r1][col];
    const Rational& a2 = tableau_[r2][col];
    auto cmp = [&](int k) { return cmp_ratio(tableau_[r1][k], a1, tableau_[r2][k], a2); };
    int c = cmp(total_);
    if (c != 0) return c < 0;
    for (int k = 0; k < n_; ++k) {
      c = cmp(k);
      if (c != 0) return c < 0;
    }
    throw InternalError("scarf: lexicographic ratio test tied; basis inverse is singular");
  }

  static int cmp_ratio(const Rational& x1, const Rational& d1, const Rational& x2, const Rational& d2) {
    return cmp(x1 * d2, x2 * d1);
  }

  void pivot(int r, int c) {
    Rational inv = 1 / tableau_[r][c];
    std::vector<int> nz;
    for (int k = 0; k <= total_; ++k)
      if (sgn(tableau_[r][k]) != 0) {
        tableau_[r][k] *= inv;
        nz.push_back(k);
      }
    for (int i = 0; i < n_; ++i) {
      if (i == r || sgn(tableau_[i][c]) == 0) continue;
      Rational f = tableau_[i][c];
      for (int k : nz) tableau_[i][k] -= f * tableau_[r][k];
    }
  }

  // Removes `leave` from the ordinal basis and returns the column that
  // replaces it.
  int ordinal_pivot(int leave) {
    const int row_lost = col_row_[leave];
    in_ordinal_[leave] = false;
    col_row_[leave] = -1;
    int successor = -1;
    for (int i = 0; i < n_; ++i) {
      int c = row_min_[i];
      if (c == leave) continue;
      if (successor < 0 || util_[row_lost][c] < util_[row_lost][successor]) successor = c;
    }
    const int row_freed = col_row_[successor];
    std::vector<int> floor(n_);
    for (int i = 0; i < n_; ++i) floor[i] = util_[i][row_min_[i]];
    floor[row_lost] = util_[row_lost][successor];

    int chosen = -1;
    for (int c = 0; c < total_; ++c) {
      if (in_ordinal_[c]) continue;
      bool above = true;
      for (int i = 0; i < n_ && above; ++i)
        if (i != row_freed && util_[i][c] <= floor[i]) above = false;
      if (!above) continue;
      if (chosen < 0 || util_[row_freed][c] > util_[row_freed][chosen]) chosen = c;
    }
    if (chosen < 0) throw InternalError("scarf: ordinal pivot found no replacement column");
    if (util_[row_freed][chosen] >= util_[row_freed][successor])
      throw InternalError("scarf: ordinal pivot broke the row-minimum structure");
    count_pivot(chosen, leave, "ordinal");
    row_min_[row_lost] = successor;
    col_row_[successor] = row_lost;
    set_min(row_freed, chosen);
    return chosen;
  }

  DominatingPoint extract() const {
    DominatingPoint out;
    out.x.assign(m_, 0);
    for (int r = 0; r < n_; ++r)
      if (basis_[r] >= n_) out.x[basis_[r] - n_] = tableau_[r][total_];
    out.dominating_row.assign(m_, -1);
    for (int j = 0; j < m_; ++j)
      for (int i = 0; i < n_; ++i)
        if (util_[i][n_ + j] <= util_[i][row_min_[i]]) {
          out.dominating_row[j] = i;
          break;
        }
    out.pivots = pivots_;
    return out;
  }

  int n_, m_, total_;
  const ScarfOptions& opts_;
  std::vector<std::vector<int>> util_;
  std::vector<RationalVector> tableau_;
  std::vector<int> basis_;
  std::vector<bool> in_ordinal_;
  std::vector<int> row_min_, col_row_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Scarf's complementary pivoting on [I | Q]. The result is checked for
/// domination and vertexhood before it is returned.
inline DominatingPoint solve_scarf(const ScarfProblem& p, const ScarfOptions& opts = {}) {
  check_scarf_problem(p);
  DominatingPoint point;
  if (p.cols() == 0) return point;
  point = detail::ScarfPivoter(p, opts).run();
  auto report = verify_dominating(p, point.x);
  if (!report.pass) throw InternalError("scarf: result is not dominating");
  for (int j = 0; j < p.cols(); ++j) {
    const auto& w = report.witnesses[j];
    if (std::find(w.begin(), w.end(), point.dominating_row[j]) == w.end())
      throw InternalError("scarf: ordinal witness row does not dominate its column");
  }
  if (!certify_extreme(p, point.x)) throw InternalError("scarf: result is not an extreme point");
  return point;
}

}  // namespace nearstable
