#pragma once

// Internal canonical representation behind Expr: a reduced fraction of polynomials
// over atoms (variables, parameters, function applications).

#include <symflow/expr.hpp>

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace symflow::detail {

struct Atom {
  enum class Kind { Variable = 0, Parameter = 1, Function = 2 };
  Kind kind;
  std::string name;
  Builtin builtin = Builtin::None;
  std::vector<int> deriv;
  std::vector<Expr> args;
  std::vector<std::string> free_vars;  // sorted, unique
};
using AtomPtr = std::shared_ptr<const Atom>;

int compare_atoms(const Atom& a, const Atom& b);

struct Monomial {
  std::vector<std::pair<AtomPtr, int>> factors;  // sorted by atom order, nonzero exponents
};

int compare_monomials(const Monomial& a, const Monomial& b);
bool operator==(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rational coef;
};

// Terms sorted in descending monomial order; no zero coefficients.
struct AtomPoly {
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  Rational constant() const;
  bool is_monomial() const { return terms.size() == 1; }
};

struct RatFun {
  AtomPoly num;
  AtomPoly den;
};

AtomPoly poly_constant(const Rational& c);
AtomPoly poly_atom(const AtomPtr& a, int power = 1);
AtomPoly poly_add(const AtomPoly& a, const AtomPoly& b);
AtomPoly poly_sub(const AtomPoly& a, const AtomPoly& b);
AtomPoly poly_mul(const AtomPoly& a, const AtomPoly& b);
AtomPoly poly_scale(const AtomPoly& a, const Rational& c);
int compare_polys(const AtomPoly& a, const AtomPoly& b);

RatFun make_ratfun(AtomPoly num, AtomPoly den);
RatFun ratfun_constant(const Rational& c);
RatFun ratfun_add(const RatFun& a, const RatFun& b);
RatFun ratfun_mul(const RatFun& a, const RatFun& b);
RatFun ratfun_neg(const RatFun& a);
RatFun ratfun_inv(const RatFun& a);
RatFun ratfun_pow(const RatFun& a, int k);

std::shared_ptr<const RatFun> ratfun_of(const Expr& e);
Expr expr_of(RatFun rf);
Expr atom_expr(const AtomPtr& a);
AtomPtr make_atom_variable(const std::string& name);
AtomPtr make_atom_parameter(const std::string& name);
// Returns a canonical RatFun (builtin simplifications may collapse the atom).
RatFun make_function_ratfun(const std::string& name, Builtin b, std::vector<Expr> args, std::vector<int> deriv);

struct Node {
  ExprKind kind;
  Rational value;
  std::string name;
  std::vector<Expr> operands;
  int exponent = 0;
  Builtin builtin = Builtin::None;
  std::vector<int> deriv;
  std::shared_ptr<const RatFun> canonical;  // set only on canonical roots
  AtomPtr atom;                             // set for canonical atom nodes
};

}  // namespace symflow::detail
