#include <symflow/detail/ansatz.hpp>

namespace symflow::detail {

std::size_t LinearConditions::row(std::size_t component, const Exponents& e) {
  auto [it, inserted] = index_.emplace(std::make_pair(component, e), rows_.size());
  if (inserted) {
    rows_.emplace_back();
    rhs_.emplace_back(0);
  }
  return it->second;
}

void LinearConditions::add(std::size_t unknown, std::size_t component, const Polynomial& p) {
  for (const auto& [e, c] : p.terms()) {
    auto& r = rows_[row(component, e)];
    r[unknown] += c;
  }
}

void LinearConditions::add_constant(std::size_t component, const Polynomial& p) {
  for (const auto& [e, c] : p.terms()) rhs_[row(component, e)] -= c;
}

RationalMatrix LinearConditions::matrix() const {
  RationalMatrix m;
  m.reserve(rows_.size());
  for (const auto& r : rows_) {
    RationalVector dense(cols_, Rational(0));
    for (const auto& [j, c] : r) dense[j] = c;
    m.push_back(std::move(dense));
  }
  return m;
}

std::vector<RationalVector> LinearConditions::nullspace() const { return symflow::nullspace(matrix(), cols_); }

std::optional<RationalVector> LinearConditions::particular() const {
  RationalMatrix m = matrix();
  for (std::size_t i = 0; i < m.size(); ++i) m[i].push_back(rhs_[i]);
  EchelonForm ef = row_reduce(m, cols_ + 1);
  RationalVector x(cols_, Rational(0));
  for (std::size_t r = 0; r < ef.pivots.size(); ++r) {
    if (ef.pivots[r] == cols_) return std::nullopt;
    x[ef.pivots[r]] = ef.rref[r][cols_];
  }
  return x;
}

}  // namespace symflow::detail
