#include <symflow/linalg.hpp>

#include <algorithm>

namespace symflow {

namespace {

using IntegerMatrix = std::vector<std::vector<Integer>>;

IntegerMatrix to_integer_rows(const RationalMatrix& m, std::size_t cols) {
  IntegerMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) {
    Integer l = 1;
    for (std::size_t j = 0; j < cols && j < row.size(); ++j) {
      if (row[j] != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), row[j].get_den_mpz_t());
    }
    std::vector<Integer> r(cols, 0);
    bool nonzero = false;
    for (std::size_t j = 0; j < cols && j < row.size(); ++j) {
      if (row[j] == 0) continue;
      r[j] = row[j].get_num() * (l / row[j].get_den());
      nonzero = true;
    }
    if (nonzero) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

EchelonForm row_reduce(const RationalMatrix& m, std::size_t cols) {
  IntegerMatrix a = to_integer_rows(m, cols);
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivots;
  Integer prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    if (p != r) std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        Integer v = a[r][c] * a[i][j] - a[i][c] * a[r][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = std::move(v);
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    pivots.push_back(c);
    ++r;
  }
  EchelonForm out;
  out.pivots = pivots;
  out.rref.assign(r, RationalVector(cols, 0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out.rref[i][j] = Rational(a[i][j]);
  }
  // Back substitution to reduced form.
  for (std::size_t i = r; i-- > 0;) {
    std::size_t pc = pivots[i];
    Rational inv = 1 / out.rref[i][pc];
    for (std::size_t j = pc; j < cols; ++j) out.rref[i][j] *= inv;
    for (std::size_t k = 0; k < i; ++k) {
      Rational f = out.rref[k][pc];
      if (f == 0) continue;
      for (std::size_t j = pc; j < cols; ++j) out.rref[k][j] -= f * out.rref[i][j];
    }
  }
  return out;
}

std::vector<RationalVector> nullspace(const RationalMatrix& m, std::size_t cols) {
  EchelonForm e = row_reduce(m, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<RationalVector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RationalVector v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rref[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RationalVector> solve_unique(const RationalMatrix& a, const RationalVector& b) {
  const std::size_t n = a.empty() ? 0 : a.front().size();
  RationalMatrix aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    aug[i].resize(n);
    aug[i].push_back(b[i]);
  }
  EchelonForm e = row_reduce(aug, n + 1);
  if (e.pivots.size() != n) return std::nullopt;
  RationalVector x(n, 0);
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == n) return std::nullopt;
    x[e.pivots[i]] = e.rref[i][n];
  }
  return x;
}

std::size_t rank(const RationalMatrix& m, std::size_t cols) { return row_reduce(m, cols).pivots.size(); }

}  // namespace symflow
