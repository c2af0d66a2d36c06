#pragma once

#include <symflow/expr.hpp>
#include <symflow/rational.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace symflow {

using Exponents = std::vector<int>;

// Graded lexicographic order, first variable largest.
int grlex_compare(const Exponents& a, const Exponents& b);

struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const { return grlex_compare(a, b) > 0; }
};

// Sparse polynomial with exact rational coefficients over a fixed variable list.
// Terms iterate from the leading (grlex-largest) monomial down.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, Rational, GrlexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars);
  Polynomial(std::vector<std::string> vars, const Rational& c);

  static Polynomial variable(std::vector<std::string> vars, std::size_t index);
  static Polynomial monomial(std::vector<std::string> vars, Exponents e, const Rational& c = 1);
  // Throws NotPolynomial if e is not a polynomial in vars with rational coefficients.
  static Polynomial from_expr(const Expr& e, const std::vector<std::string>& vars);

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int degree() const;
  int degree_in(std::size_t var) const;
  const Exponents& leading_exponents() const;
  const Rational& leading_coefficient() const;
  Rational coefficient(const Exponents& e) const;

  void add_term(const Exponents& e, const Rational& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(int k) const;
  Polynomial derivative(std::size_t var) const;
  Polynomial monic() const;
  // Same polynomial over a different variable list (names must map; throws otherwise).
  Polynomial remap(const std::vector<std::string>& vars) const;

  double evaluate(std::span<const double> point) const;
  Rational evaluate(std::span<const Rational> point) const;
  // Substitutes polynomials for every variable (all over a common target list).
  Polynomial compose(std::span<const Polynomial> values) const;

  Expr to_expr() const;
  std::string str() const;

 private:
  void check_compatible(const Polynomial& o) const;

  std::vector<std::string> vars_;
  TermMap terms_;
};

// q with num = q * den, or nullopt. Throws DomainError when den is zero.
std::optional<Polynomial> exact_divide(const Polynomial& num, const Polynomial& den);

struct DivisionResult {
  std::vector<Polynomial> quotients;
  Polynomial remainder;
};

// Multivariate division (grlex) by an ordered list of divisors.
DivisionResult divide(const Polynomial& p, std::span<const Polynomial> divisors);

// Monic greatest common divisor over Q (gcd(0,0) = 0).
Polynomial gcd(const Polynomial& a, const Polynomial& b);

// All exponent vectors with total degree in [min_degree, max_degree], grlex descending.
std::vector<Exponents> monomials_up_to(std::size_t nvars, int max_degree, int min_degree = 0);

}  // namespace symflow
