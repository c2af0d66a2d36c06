#pragma once

#include <symflow/linalg.hpp>
#include <symflow/polynomial.hpp>

#include <map>
#include <utility>
#include <vector>

namespace symflow::detail {

// Collects linear conditions sum_u c_u * P_{u,k} = 0 (one polynomial identity per
// component k) and solves for the coefficient vector c.
class LinearConditions {
 public:
  explicit LinearConditions(std::size_t unknowns) : cols_(unknowns) {}

  std::size_t unknowns() const { return cols_; }
  void add(std::size_t unknown, std::size_t component, const Polynomial& p);
  // Inhomogeneous part: sum_u c_u P_{u,k} + rhs_k = 0.
  void add_constant(std::size_t component, const Polynomial& p);

  RationalMatrix matrix() const;
  std::vector<RationalVector> nullspace() const;
  // Solutions of the inhomogeneous system: particular solution (nullopt if none).
  std::optional<RationalVector> particular() const;

 private:
  std::size_t row(std::size_t component, const Exponents& e);

  std::size_t cols_;
  std::map<std::pair<std::size_t, Exponents>, std::size_t> index_;
  std::vector<std::map<std::size_t, Rational>> rows_;
  std::vector<Rational> rhs_;
};

}  // namespace symflow::detail
