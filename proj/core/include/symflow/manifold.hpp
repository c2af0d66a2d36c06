#pragma once

#include <symflow/evaluate.hpp>
#include <symflow/expr.hpp>
#include <symflow/polynomial.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symflow {

// Polynomial in a variable list whose coefficients are expressions free of bare
// variables. Function applications that depend on the variables are carried inside
// coefficients as independent indeterminates.
class ExprPoly {
 public:
  using TermMap = std::map<Exponents, Expr, GrlexGreater>;

  ExprPoly() = default;
  explicit ExprPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  // Throws NotPolynomial if a variable occurs in a denominator or with negative power.
  static ExprPoly from_expr(const Expr& e, const std::vector<std::string>& vars);
  static ExprPoly from_polynomial(const Polynomial& p);

  const std::vector<std::string>& variables() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;
  const Exponents& leading_exponents() const { return terms_.begin()->first; }
  const Expr& leading_coefficient() const { return terms_.begin()->second; }
  // True when every coefficient is free of variables (also inside function arguments).
  bool has_constant_coefficients() const;

  void add_term(const Exponents& e, const Expr& c);
  ExprPoly& operator-=(const ExprPoly& o);
  ExprPoly times_monomial(const Exponents& e, const Expr& c) const;
  ExprPoly monic() const;

  Expr to_expr() const;
  // Nullopt if some coefficient is not a rational constant.
  std::optional<Polynomial> to_polynomial() const;

  friend bool operator==(const ExprPoly& a, const ExprPoly& b);

 private:
  std::vector<std::string> vars_;
  TermMap terms_;
};

struct Chart {
  // Solved variables as expressions in the remaining (chart) variables.
  std::vector<std::pair<std::string, Expr>> solved;

  std::map<std::string, Expr> substitution() const;
  bool empty() const { return solved.empty(); }
};

class AlgebraicManifold {
 public:
  AlgebraicManifold() = default;
  // Drops zero generators, normalizes to monic, removes associates, sorts by leading term.
  // Throws NotPolynomial for non-polynomial generators and Error for an inconsistent chart.
  AlgebraicManifold(std::vector<std::string> vars, const std::vector<Expr>& generators,
                    std::optional<Chart> chart = std::nullopt);

  static AlgebraicManifold whole_space(std::vector<std::string> vars) { return AlgebraicManifold(std::move(vars), {}); }

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<ExprPoly>& generators() const { return gens_; }
  std::vector<Expr> generator_exprs() const;
  const std::optional<Chart>& chart() const { return chart_; }
  bool is_whole_space() const { return gens_.empty(); }
  // A nonzero constant generator: the variety is empty.
  bool is_trivially_empty() const;
  std::vector<std::string> chart_variables() const;

  std::string str() const;

 private:
  std::vector<std::string> vars_;
  std::vector<ExprPoly> gens_;
  std::optional<Chart> chart_;
};

struct IdealReduction {
  std::vector<Expr> quotients;
  Expr remainder;
  bool polynomial = true;  // false if e could not be written as an ExprPoly
};

// Division of e by the generators (grlex, generator order), after reducing the
// arguments of function applications modulo the same generators.
IdealReduction reduce_modulo(const Expr& e, const AlgebraicManifold& m);

// Restriction to the manifold: chart substitution when a chart exists, otherwise the
// division remainder. Zero means e vanishes on the manifold (symbolic certificate).
Expr restrict_to(const Expr& e, const AlgebraicManifold& m);

// Points on the real variety: chart parametrization when available, otherwise Newton
// projection (minimum-norm steps) from seeded points in [-box, box]^n. Points closer
// than 1e-6 are merged. May return fewer than `count` points (none for an empty variety).
std::vector<std::vector<double>> sample_variety(const AlgebraicManifold& m, const NumericEnv& env, std::size_t count,
                                                std::uint64_t seed, double box = 2.0);

}  // namespace symflow
