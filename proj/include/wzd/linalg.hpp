#pragma once

// Dense exact linear algebra over Q and a few integer-lattice helpers.

#include "wzd/rational.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace wzd {

using Matrix = std::vector<RationalVector>;

inline Matrix make_matrix(std::size_t rows, std::size_t cols) {
  return Matrix(rows, RationalVector(cols, Rational(0)));
}

inline Matrix transpose(const Matrix& a) {
  if (a.empty()) return {};
  Matrix t = make_matrix(a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline RationalVector multiply(const Matrix& a, const RationalVector& x) {
  RationalVector y(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = dot(a[i], x);
  return y;
}

inline Rational determinant(Matrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

/// Leading principal minors det_1, ..., det_n.
inline RationalVector leading_principal_minors(const Matrix& a) {
  RationalVector minors;
  for (std::size_t k = 1; k <= a.size(); ++k) {
    Matrix sub = make_matrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = a[i][j];
    minors.push_back(determinant(sub));
  }
  return minors;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> row_reduce(Matrix& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rational inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank_of(Matrix a) { return row_reduce(a).size(); }

/// Basis of the right null space {x : a x = 0}.
inline std::vector<RationalVector> null_space(Matrix a, std::size_t cols) {
  if (a.empty()) {
    std::vector<RationalVector> basis;
    for (std::size_t j = 0; j < cols; ++j) {
      RationalVector e(cols, Rational(0));
      e[j] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  const auto pivots = row_reduce(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][free];
    basis.push_back(v);
  }
  return basis;
}

/// Unique solution of a square system, or nullopt when singular.
inline std::optional<RationalVector> solve(const Matrix& a, const RationalVector& b) {
  const std::size_t n = a.size();
  Matrix aug = make_matrix(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n] = b[i];
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() != n || (n > 0 && pivots.back() != n - 1)) return std::nullopt;
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n];
  return x;
}

inline std::optional<Matrix> inverse(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix aug = make_matrix(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1)) return std::nullopt;
  Matrix inv = make_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

/// Matrix whose rows are the given integer vectors.
inline Matrix rows_matrix(const std::vector<IntVector>& rows) {
  Matrix m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.push_back(to_rational(r));
  return m;
}

/// Index of the lattice spanned by `vectors` inside its saturation: the gcd
/// of all maximal minors. Vectors must be linearly independent.
inline Integer lattice_index(const std::vector<IntVector>& vectors) {
  const std::size_t k = vectors.size();
  if (k == 0) return 1;
  const std::size_t n = vectors[0].size();
  Integer g = 0;
  std::vector<std::size_t> cols(k);
  // Enumerate k-subsets of columns.
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (pick[j]) cols[c++] = j;
    Matrix sub = make_matrix(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = Rational(static_cast<long>(vectors[i][cols[j]]));
    Rational d = determinant(sub);
    g = gcd_of(g, d.get_num());
  } while (std::prev_permutation(pick.begin(), pick.end()));
  if (g == 0) throw GeometryError("lattice_index: vectors are linearly dependent");
  return g;
}

/// Z-basis of the saturated integer kernel {x in Z^n : a x = 0} of an
/// integer matrix, via unimodular column operations.
inline std::vector<IntVector> integer_kernel(const std::vector<IntVector>& a, std::size_t n) {
  std::vector<std::vector<Integer>> m;
  for (const auto& row : a) {
    std::vector<Integer> r;
    for (auto x : row) r.emplace_back(static_cast<long>(x));
    m.push_back(r);
  }
  std::vector<std::vector<Integer>> u(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  auto col_op = [&](std::size_t target, std::size_t src, const Integer& f) {
    for (auto& r : m) r[target] -= f * r[src];
    for (auto& r : u) r[target] -= f * r[src];
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    for (auto& r : m) std::swap(r[x], r[y]);
    for (auto& r : u) std::swap(r[x], r[y]);
  };
  std::size_t lead = 0;
  for (std::size_t row = 0; row < m.size() && lead < n; ++row) {
    // Euclid across columns lead..n-1 on this row.
    while (true) {
      std::size_t best = n;
      for (std::size_t c = lead; c < n; ++c)
        if (m[row][c] != 0 && (best == n || abs(m[row][c]) < abs(m[row][best]))) best = c;
      if (best == n) break;
      if (best != lead) col_swap(best, lead);
      bool done = true;
      for (std::size_t c = lead + 1; c < n; ++c) {
        if (m[row][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[row][c].get_mpz_t(), m[row][lead].get_mpz_t());
        col_op(c, lead, q);
        if (m[row][c] != 0) done = false;
      }
      if (done) break;
    }
    if (m[row][lead] != 0) ++lead;
  }
  std::vector<IntVector> basis;
  for (std::size_t c = lead; c < n; ++c) {
    IntVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = to_int64(u[i][c]);
    basis.push_back(v);
  }
  return basis;
}

}  // namespace wzd
