#include <symflow/symmetry.hpp>

#include <symflow/detail/ansatz.hpp>
#include <symflow/errors.hpp>

namespace symflow {

const char* to_string(SymmetryVerdict v) {
  switch (v) {
    case SymmetryVerdict::Proper: return "proper";
    case SymmetryVerdict::Orbital: return "orbital";
    case SymmetryVerdict::None: return "none";
  }
  return "none";
}

namespace {

std::vector<Expr> defect(const DynSystem& sys, const VectorField& v) {
  if (v.variables() != sys.variables()) throw Error("vector field and system have different variables");
  VectorField q = evolutionary_representative(v, sys);
  std::vector<Expr> b = lie_poisson(sys.rhs(), q.components(), sys.variables());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = b[i] + differentiate(q.component(i), kTime);
  return b;
}

bool all_zero(const std::vector<Expr>& v) {
  for (const auto& e : v) {
    if (!e.is_zero()) return false;
  }
  return true;
}

}  // namespace

SymmetryReport is_symmetry(const DynSystem& sys, const VectorField& v) {
  SymmetryReport r;
  r.residual = defect(sys, v);
  if (all_zero(r.residual)) r.verdict = SymmetryVerdict::Proper;
  return r;
}

SymmetryReport is_orbital_symmetry(const DynSystem& sys, const VectorField& v) {
  const auto& f = sys.rhs();
  std::size_t pivot = f.size();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_zero()) {
      pivot = i;
      break;
    }
  }
  if (pivot == f.size()) throw DomainError("orbital check needs a nonzero vector field f");
  SymmetryReport r;
  r.residual = defect(sys, v);
  r.pivot = pivot;
  if (all_zero(r.residual)) {
    r.verdict = SymmetryVerdict::Proper;
    return r;
  }
  Expr lambda = r.residual[pivot] / f[pivot];
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (r.residual[i] != lambda * f[i]) return r;
  }
  r.verdict = SymmetryVerdict::Orbital;
  r.lambda = lambda;
  r.commutator_cofactor = -lambda;
  return r;
}

OrbitalPair trivial_orbital(const DynSystem& sys, const Expr& theta) {
  Expr th = normalize(theta);
  if (th.is_zero()) throw DomainError("theta must be nonzero");
  Expr lambda = differentiate(th, kTime);
  for (std::size_t j = 0; j < sys.dimension(); ++j) lambda = lambda + sys.rhs()[j] * differentiate(th, sys.variables()[j]);
  return {sys.field().scaled(th), lambda};
}

Expr orbital_bracket_cofactor(const VectorField& s, const Expr& sigma, const VectorField& r, const Expr& rho) {
  return s.apply(rho) - r.apply(sigma);
}

namespace {

struct SearchSpace {
  std::vector<std::string> vars;      // polynomial variables (state, then t if time dependent)
  std::size_t n = 0;                  // state dimension
  std::vector<Polynomial> f;          // over vars
  std::vector<Exponents> s_monos;
  std::vector<Exponents> lambda_monos;
};

SearchSpace make_space(const DynSystem& sys, const Ansatz& a, bool with_lambda) {
  if (a.degree < 0 || a.lambda_degree < 0) throw Error("ansatz degrees must be nonnegative");
  SearchSpace sp;
  sp.n = sys.dimension();
  sp.vars = sys.variables();
  if (a.time_dependent) sp.vars.push_back(kTime);
  for (const auto& p : sys.polynomial_rhs()) sp.f.push_back(p.remap(sp.vars));
  sp.s_monos = monomials_up_to(sp.vars.size(), a.degree, a.homogeneous ? a.degree : 0);
  if (with_lambda) sp.lambda_monos = monomials_up_to(sp.vars.size(), a.lambda_degree);
  return sp;
}

// {f, m e_i}^k + d_t(m e_i)^k for the unknown coefficient of m in component i.
void add_field_unknown(detail::LinearConditions& lc, std::size_t unknown, const SearchSpace& sp, std::size_t i,
                       const Exponents& m) {
  Polynomial mono = Polynomial::monomial(sp.vars, m);
  Polynomial along(sp.vars);
  for (std::size_t j = 0; j < sp.n; ++j) along += sp.f[j] * mono.derivative(j);
  if (sp.vars.size() > sp.n) along += mono.derivative(sp.n);
  lc.add(unknown, i, along);
  for (std::size_t k = 0; k < sp.n; ++k) lc.add(unknown, k, -(mono * sp.f[k].derivative(i)));
}

VectorField field_from(const SearchSpace& sp, const RationalVector& c, const std::vector<std::string>& state) {
  std::vector<Expr> comps(sp.n);
  std::size_t u = 0;
  for (std::size_t i = 0; i < sp.n; ++i) {
    Polynomial p(sp.vars);
    for (const auto& m : sp.s_monos) p.add_term(m, c[u++]);
    comps[i] = p.to_expr();
  }
  return VectorField(state, std::move(comps));
}

}  // namespace

std::vector<VectorField> find_lpti_symmetries(const DynSystem& sys, const Ansatz& a) {
  SearchSpace sp = make_space(sys, a, false);
  detail::LinearConditions lc(sp.n * sp.s_monos.size());
  std::size_t u = 0;
  for (std::size_t i = 0; i < sp.n; ++i) {
    for (const auto& m : sp.s_monos) add_field_unknown(lc, u++, sp, i, m);
  }
  std::vector<VectorField> out;
  for (const auto& c : lc.nullspace()) out.push_back(field_from(sp, c, sys.variables()));
  return out;
}

std::vector<OrbitalPair> find_orbital_symmetries(const DynSystem& sys, const Ansatz& a) {
  SearchSpace sp = make_space(sys, a, true);
  const std::size_t ns = sp.n * sp.s_monos.size();
  detail::LinearConditions lc(ns + sp.lambda_monos.size());
  std::size_t u = 0;
  for (std::size_t i = 0; i < sp.n; ++i) {
    for (const auto& m : sp.s_monos) add_field_unknown(lc, u++, sp, i, m);
  }
  for (const auto& m : sp.lambda_monos) {
    Polynomial mono = Polynomial::monomial(sp.vars, m);
    for (std::size_t k = 0; k < sp.n; ++k) lc.add(u, k, -(mono * sp.f[k]));
    ++u;
  }
  std::vector<OrbitalPair> out;
  for (const auto& c : lc.nullspace()) {
    Polynomial lambda(sp.vars);
    for (std::size_t j = 0; j < sp.lambda_monos.size(); ++j) lambda.add_term(sp.lambda_monos[j], c[ns + j]);
    out.push_back({field_from(sp, c, sys.variables()), lambda.to_expr()});
  }
  return out;
}

}  // namespace symflow
