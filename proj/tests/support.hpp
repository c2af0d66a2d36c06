#pragma once

#include <symflow/expr.hpp>
#include <symflow/fields.hpp>
#include <symflow/linalg.hpp>
#include <symflow/parser.hpp>
#include <symflow/polynomial.hpp>

#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace symflow::test {

inline const std::vector<std::string> kXY = {"x", "y"};
inline const std::vector<std::string> kXYZ = {"x", "y", "z"};

inline DynSystem sys(std::string_view text) { return parse_system(text); }

inline Expr ex(std::string_view text, const std::vector<std::string>& vars = kXYZ, bool time = false) {
  SymbolContext ctx;
  ctx.variables = vars;
  ctx.allow_time = time;
  return parse_expression(text, ctx);
}

inline VectorField vf(std::string_view text, const std::vector<std::string>& vars = kXY) {
  return parse_vector_field(text, vars);
}

// Dense-ish random polynomial with small integer coefficients.
inline Expr random_poly(std::mt19937& rng, const std::vector<std::string>& vars, int degree, bool nonzero = true) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::bernoulli_distribution keep(0.5);
  while (true) {
    Expr out;
    for (const auto& e : monomials_up_to(vars.size(), degree)) {
      if (!keep(rng)) continue;
      Expr m = coef(rng);
      for (std::size_t i = 0; i < vars.size(); ++i) m = m * pow(Expr::variable(vars[i]), e[i]);
      out = out + m;
    }
    if (!nonzero || !out.is_zero()) return out;
  }
}

inline VectorField random_field(std::mt19937& rng, const std::vector<std::string>& vars, int degree) {
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < vars.size(); ++i) comps.push_back(random_poly(rng, vars, degree, false));
  return VectorField(vars, comps);
}

// Coefficients of a polynomial field in the monomial basis up to degree.
inline RationalVector field_coefficients(const VectorField& v, int degree) {
  RationalVector out;
  for (const auto& c : v.components()) {
    Polynomial p = Polynomial::from_expr(c, v.variables());
    for (const auto& m : monomials_up_to(v.variables().size(), degree)) out.push_back(p.coefficient(m));
  }
  return out;
}

inline bool in_span(const std::vector<VectorField>& basis, const VectorField& v, int degree) {
  RationalMatrix rows;
  for (const auto& b : basis) rows.push_back(field_coefficients(b, degree));
  const std::size_t cols = field_coefficients(v, degree).size();
  const std::size_t r0 = rank(rows, cols);
  rows.push_back(field_coefficients(v, degree));
  return rank(rows, cols) == r0;
}

}  // namespace symflow::test
