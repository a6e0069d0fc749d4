#pragma once

// Exact rational linear programming: dense two-phase simplex with Bland's
// rule. Desk-scale problems only (tens of variables and constraints).

#include "wzd/linalg.hpp"

#include <cstdint>
#include <vector>

namespace wzd {

enum class Relation { less_equal, greater_equal, equal };

struct LinearConstraint {
  RationalVector coefficients;
  Relation relation;
  Rational rhs;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  RationalVector x;
  Rational objective;
};

/// minimize c.x subject to the constraints. Variables are free unless
/// listed in `nonnegative`.
class LinearProgram {
public:
  explicit LinearProgram(std::size_t variables)
      : n_(variables), objective_(variables, Rational(0)), nonneg_(variables, false) {}

  std::size_t variables() const { return n_; }
  void set_objective(RationalVector c) { objective_ = std::move(c); }
  void set_nonnegative(std::size_t var, bool v = true) { nonneg_[var] = v; }
  void add(RationalVector coefficients, Relation rel, Rational rhs) {
    constraints_.push_back({std::move(coefficients), rel, std::move(rhs)});
  }

  LpResult minimize() const;
  LpResult maximize() const {
    LinearProgram neg = *this;
    for (auto& c : neg.objective_) c = -c;
    auto r = neg.minimize();
    r.objective = -r.objective;
    return r;
  }
  bool feasible() const {
    LinearProgram f = *this;
    f.objective_.assign(n_, Rational(0));
    return f.minimize().status != LpStatus::infeasible;
  }

private:
  std::size_t n_;
  RationalVector objective_;
  std::vector<bool> nonneg_;
  std::vector<LinearConstraint> constraints_;
};

namespace detail {

// Tableau simplex on: minimize c.x, A x = b, x >= 0, b >= 0, starting from
// the basis given in `basis`. Returns false when unbounded.
inline bool run_simplex(Matrix& t, std::vector<std::size_t>& basis, const RationalVector& cost,
                        std::size_t ncols, const std::vector<bool>& allowed) {
  const std::size_t m = t.size();
  while (true) {
    // Reduced costs with Bland's rule: first column with negative reduced cost.
    std::size_t entering = ncols;
    for (std::size_t j = 0; j < ncols && entering == ncols; ++j) {
      if (!allowed[j]) continue;
      Rational rc = cost[j];
      for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t[i][j];
      if (rc < 0) entering = j;
    }
    if (entering == ncols) return true;
    std::size_t leaving = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][entering] <= 0) continue;
      Rational ratio = t[i][ncols] / t[i][entering];
      if (leaving == m || ratio < best || (ratio == best && basis[i] < basis[leaving])) {
        best = ratio;
        leaving = i;
      }
    }
    if (leaving == m) return false;
    Rational inv = 1 / t[leaving][entering];
    for (auto& x : t[leaving]) x *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leaving || t[i][entering] == 0) continue;
      Rational f = t[i][entering];
      for (std::size_t j = 0; j <= ncols; ++j) t[i][j] -= f * t[leaving][j];
    }
    basis[leaving] = entering;
  }
}

}  // namespace detail

inline LpResult LinearProgram::minimize() const {
  // Column layout: for each original variable one column (nonneg) or two
  // (x+ and x-); then one slack per inequality; then one artificial per row.
  std::vector<std::size_t> pos_col(n_), neg_col(n_, SIZE_MAX);
  std::size_t cols = 0;
  for (std::size_t v = 0; v < n_; ++v) {
    pos_col[v] = cols++;
    if (!nonneg_[v]) neg_col[v] = cols++;
  }
  const std::size_t m = constraints_.size();
  std::vector<std::size_t> slack_col(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i)
    if (constraints_[i].relation != Relation::equal) slack_col[i] = cols++;
  const std::size_t structural = cols;
  const std::size_t ncols = structural + m;

  Matrix t = make_matrix(m, ncols + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& con = constraints_[i];
    for (std::size_t v = 0; v < n_; ++v) {
      t[i][pos_col[v]] = con.coefficients[v];
      if (neg_col[v] != SIZE_MAX) t[i][neg_col[v]] = -con.coefficients[v];
    }
    if (con.relation == Relation::less_equal) t[i][slack_col[i]] = 1;
    if (con.relation == Relation::greater_equal) t[i][slack_col[i]] = -1;
    t[i][ncols] = con.rhs;
    if (t[i][ncols] < 0)
      for (std::size_t j = 0; j <= ncols; ++j) t[i][j] = -t[i][j];
    t[i][structural + i] = 1;
  }

  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = structural + i;

  // Phase 1.
  RationalVector cost1(ncols, Rational(0));
  for (std::size_t i = 0; i < m; ++i) cost1[structural + i] = 1;
  std::vector<bool> allowed(ncols, true);
  detail::run_simplex(t, basis, cost1, ncols, allowed);
  Rational infeas = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= structural) infeas += t[i][ncols];
  LpResult result;
  if (infeas != 0) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive remaining (zero-valued) artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < structural) continue;
    for (std::size_t j = 0; j < structural; ++j) {
      if (t[i][j] == 0) continue;
      Rational inv = 1 / t[i][j];
      for (auto& x : t[i]) x *= inv;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == i || t[r][j] == 0) continue;
        Rational f = t[r][j];
        for (std::size_t c = 0; c <= ncols; ++c) t[r][c] -= f * t[i][c];
      }
      basis[i] = j;
      break;
    }
  }
  for (std::size_t j = structural; j < ncols; ++j) allowed[j] = false;

  // Phase 2.
  RationalVector cost2(ncols, Rational(0));
  for (std::size_t v = 0; v < n_; ++v) {
    cost2[pos_col[v]] = objective_[v];
    if (neg_col[v] != SIZE_MAX) cost2[neg_col[v]] = -objective_[v];
  }
  if (!detail::run_simplex(t, basis, cost2, ncols, allowed)) {
    result.status = LpStatus::unbounded;
    return result;
  }
  RationalVector values(ncols, Rational(0));
  for (std::size_t i = 0; i < m; ++i) values[basis[i]] = t[i][ncols];
  result.status = LpStatus::optimal;
  result.x.assign(n_, Rational(0));
  for (std::size_t v = 0; v < n_; ++v) {
    result.x[v] = values[pos_col[v]];
    if (neg_col[v] != SIZE_MAX) result.x[v] -= values[neg_col[v]];
  }
  result.objective = dot(objective_, result.x);
  return result;
}

/// True iff `target` is a nonnegative combination of `generators`.
inline bool in_cone(const std::vector<RationalVector>& generators, const RationalVector& target) {
  LinearProgram lp(generators.size());
  for (std::size_t j = 0; j < generators.size(); ++j) lp.set_nonnegative(j);
  for (std::size_t i = 0; i < target.size(); ++i) {
    RationalVector row(generators.size());
    for (std::size_t j = 0; j < generators.size(); ++j) row[j] = generators[j][i];
    lp.add(row, Relation::equal, target[i]);
  }
  return lp.feasible();
}

}  // namespace wzd
