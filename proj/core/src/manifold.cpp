#include <symflow/manifold.hpp>

#include <symflow/detail/ratfun.hpp>
#include <symflow/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <numeric>

namespace symflow {

ExprPoly ExprPoly::from_expr(const Expr& e, const std::vector<std::string>& vars) {
  auto rf = detail::ratfun_of(e);
  ExprPoly out(vars);
  Expr den = detail::expr_of(detail::RatFun{rf->den, detail::poly_constant(1)});
  for (const auto& t : rf->den.terms) {
    for (const auto& [a, k] : t.mono.factors) {
      if (a->kind == detail::Atom::Kind::Variable && std::find(vars.begin(), vars.end(), a->name) != vars.end()) {
        throw NotPolynomial("variable '" + a->name + "' in a denominator: " + e.str());
      }
    }
  }
  for (const auto& t : rf->num.terms) {
    Exponents ex(vars.size(), 0);
    detail::AtomPoly rest = detail::poly_constant(t.coef);
    for (const auto& [a, k] : t.mono.factors) {
      auto it = a->kind == detail::Atom::Kind::Variable ? std::find(vars.begin(), vars.end(), a->name) : vars.end();
      if (it != vars.end()) {
        if (k < 0) throw NotPolynomial("negative power of '" + a->name + "'");
        ex[static_cast<std::size_t>(it - vars.begin())] = k;
      } else {
        rest = detail::poly_mul(rest, detail::poly_atom(a, k));
      }
    }
    Expr coef = detail::expr_of(detail::RatFun{std::move(rest), detail::poly_constant(1)});
    out.add_term(ex, den.is_one() ? coef : coef / den);
  }
  return out;
}

ExprPoly ExprPoly::from_polynomial(const Polynomial& p) {
  ExprPoly out(p.variables());
  for (const auto& [e, c] : p.terms()) out.add_term(e, Expr(c));
  return out;
}

bool ExprPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
}

int ExprPoly::degree() const {
  if (terms_.empty()) return -1;
  const auto& e = terms_.begin()->first;
  return std::accumulate(e.begin(), e.end(), 0);
}

bool ExprPoly::has_constant_coefficients() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return free_variables(t.second).empty(); });
}

void ExprPoly::add_term(const Exponents& e, const Expr& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

ExprPoly& ExprPoly::operator-=(const ExprPoly& o) {
  if (vars_.empty()) vars_ = o.vars_;
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

ExprPoly ExprPoly::times_monomial(const Exponents& e, const Expr& c) const {
  ExprPoly out(vars_);
  for (const auto& [ex, coef] : terms_) {
    Exponents s(ex.size());
    for (std::size_t i = 0; i < ex.size(); ++i) s[i] = ex[i] + e[i];
    out.add_term(s, coef * c);
  }
  return out;
}

ExprPoly ExprPoly::monic() const {
  if (terms_.empty()) return *this;
  Expr inv = Expr(1) / leading_coefficient();
  ExprPoly out(vars_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * inv);
  return out;
}

Expr ExprPoly::to_expr() const {
  Expr sum;
  for (const auto& [e, c] : terms_) {
    Expr t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t = t * pow(Expr::variable(vars_[i]), e[i]);
    }
    sum = sum + t;
  }
  return sum;
}

std::optional<Polynomial> ExprPoly::to_polynomial() const {
  Polynomial p(vars_);
  for (const auto& [e, c] : terms_) {
    if (!c.is_rational()) return std::nullopt;
    p.add_term(e, c.rational_value());
  }
  return p;
}

bool operator==(const ExprPoly& a, const ExprPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ib = b.terms_.begin();
  for (const auto& [e, c] : a.terms_) {
    if (e != ib->first || c != ib->second) return false;
    ++ib;
  }
  return true;
}

std::map<std::string, Expr> Chart::substitution() const { return {solved.begin(), solved.end()}; }

AlgebraicManifold::AlgebraicManifold(std::vector<std::string> vars, const std::vector<Expr>& generators,
                                     std::optional<Chart> chart)
    : vars_(std::move(vars)), chart_(std::move(chart)) {
  for (const auto& g : generators) {
    ExprPoly p = ExprPoly::from_expr(g, vars_);
    if (p.is_zero()) continue;
    if (!p.has_constant_coefficients()) {
      throw NotPolynomial("manifold generator must be polynomial in the variables: " + g.str());
    }
    p = p.monic();
    if (std::none_of(gens_.begin(), gens_.end(), [&](const ExprPoly& q) { return q == p; })) gens_.push_back(std::move(p));
  }
  std::stable_sort(gens_.begin(), gens_.end(), [](const ExprPoly& a, const ExprPoly& b) {
    return grlex_compare(a.leading_exponents(), b.leading_exponents()) > 0;
  });
  if (chart_) {
    auto sub = chart_->substitution();
    for (const auto& [name, e] : chart_->solved) {
      if (std::find(vars_.begin(), vars_.end(), name) == vars_.end()) throw UnknownVariable(name);
      for (const auto& v : free_variables(e)) {
        if (sub.count(v)) throw Error("chart expression for '" + name + "' depends on solved variable '" + v + "'");
      }
    }
    for (const auto& g : gens_) {
      Expr r = substitute(g.to_expr(), sub);
      if (!r.is_zero()) throw Error("chart inconsistent with generator " + g.to_expr().str() + " (residual " + r.str() + ")");
    }
  }
}

std::vector<Expr> AlgebraicManifold::generator_exprs() const {
  std::vector<Expr> out;
  for (const auto& g : gens_) out.push_back(g.to_expr());
  return out;
}

bool AlgebraicManifold::is_trivially_empty() const {
  return std::any_of(gens_.begin(), gens_.end(), [](const ExprPoly& g) {
    return g.is_constant() && g.leading_coefficient().is_rational();
  });
}

std::vector<std::string> AlgebraicManifold::chart_variables() const {
  std::vector<std::string> out;
  auto sub = chart_ ? chart_->substitution() : std::map<std::string, Expr>{};
  for (const auto& v : vars_) {
    if (!sub.count(v)) out.push_back(v);
  }
  return out;
}

std::string AlgebraicManifold::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (i) out += ", ";
    out += gens_[i].to_expr().str();
  }
  return out + "}";
}

namespace {

Expr reduce_arguments(const Expr& e, const AlgebraicManifold& m);

detail::RatFun reduce_atom_args(const detail::AtomPtr& a, const AlgebraicManifold& m, bool& changed) {
  std::vector<Expr> args;
  for (const auto& arg : a->args) {
    Expr r = reduce_arguments(arg, m);
    IdealReduction red = reduce_modulo(r, m);
    if (red.polynomial) r = red.remainder;
    changed = changed || r != arg;
    args.push_back(r);
  }
  return detail::make_function_ratfun(a->name, a->builtin, std::move(args), a->deriv);
}

Expr reduce_arguments(const Expr& e, const AlgebraicManifold& m) {
  auto rf = detail::ratfun_of(e);
  bool any = false;
  for (const auto* p : {&rf->num, &rf->den}) {
    for (const auto& t : p->terms) {
      for (const auto& [a, k] : t.mono.factors) {
        if (a->kind == detail::Atom::Kind::Function && !a->free_vars.empty()) any = true;
      }
    }
  }
  if (!any) return e;
  auto rebuild = [&](const detail::AtomPoly& p) {
    detail::RatFun acc = detail::ratfun_constant(0);
    for (const auto& t : p.terms) {
      detail::RatFun term = detail::ratfun_constant(t.coef);
      for (const auto& [a, k] : t.mono.factors) {
        bool changed = false;
        detail::RatFun f = a->kind == detail::Atom::Kind::Function && !a->free_vars.empty()
                               ? reduce_atom_args(a, m, changed)
                               : detail::RatFun{detail::poly_atom(a), detail::poly_constant(1)};
        term = detail::ratfun_mul(term, detail::ratfun_pow(f, k));
      }
      acc = detail::ratfun_add(acc, term);
    }
    return acc;
  };
  detail::RatFun n = rebuild(rf->num);
  detail::RatFun d = rebuild(rf->den);
  return detail::expr_of(detail::ratfun_mul(n, detail::ratfun_inv(d)));
}

IdealReduction divide_exprpoly(const ExprPoly& p, const AlgebraicManifold& m) {
  const auto& gens = m.generators();
  IdealReduction out;
  out.quotients.assign(gens.size(), Expr());
  ExprPoly rest = p;
  ExprPoly rem(m.variables());
  while (!rest.is_zero()) {
    Exponents lm = rest.leading_exponents();
    Expr lc = rest.leading_coefficient();
    bool reduced = false;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const Exponents& gm = gens[i].leading_exponents();
      bool divides = true;
      for (std::size_t k = 0; k < lm.size(); ++k) {
        if (gm[k] > lm[k]) {
          divides = false;
          break;
        }
      }
      if (!divides) continue;
      Exponents qe(lm.size());
      for (std::size_t k = 0; k < lm.size(); ++k) qe[k] = lm[k] - gm[k];
      Expr qc = lc / gens[i].leading_coefficient();
      ExprPoly mono(m.variables());
      mono.add_term(qe, qc);
      out.quotients[i] = out.quotients[i] + mono.to_expr();
      rest -= gens[i].times_monomial(qe, qc);
      reduced = true;
      break;
    }
    if (!reduced) {
      rem.add_term(lm, lc);
      ExprPoly lead(m.variables());
      lead.add_term(lm, lc);
      rest -= lead;
    }
  }
  out.remainder = rem.to_expr();
  return out;
}

}  // namespace

IdealReduction reduce_modulo(const Expr& e, const AlgebraicManifold& m) {
  if (m.is_whole_space()) return IdealReduction{{}, normalize(e), true};
  if (m.is_trivially_empty()) return IdealReduction{std::vector<Expr>(m.generators().size(), Expr()), Expr(), true};
  Expr reduced = reduce_arguments(e, m);
  ExprPoly p;
  try {
    p = ExprPoly::from_expr(reduced, m.variables());
  } catch (const NotPolynomial&) {
    IdealReduction out{std::vector<Expr>(m.generators().size(), Expr()), reduced, false};
    return out;
  }
  return divide_exprpoly(p, m);
}

Expr restrict_to(const Expr& e, const AlgebraicManifold& m) {
  if (m.chart() && !m.chart()->empty()) return substitute(e, m.chart()->substitution());
  return reduce_modulo(e, m).remainder;
}

std::vector<std::vector<double>> sample_variety(const AlgebraicManifold& m, const NumericEnv& env, std::size_t count,
                                                std::uint64_t seed, double box) {
  const auto& vars = m.variables();
  const std::size_t n = vars.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  std::vector<std::vector<double>> out;
  auto add = [&](std::vector<double> x) {
    for (const auto& y : out) {
      double d = 0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::fabs(x[i] - y[i]));
      if (d < 1e-6) return;
    }
    out.push_back(std::move(x));
  };
  if (m.is_trivially_empty()) return out;
  if (m.chart() && !m.chart()->empty()) {
    auto free = m.chart_variables();
    std::vector<Expr> solved;
    std::vector<std::size_t> slot;
    for (const auto& [name, e] : m.chart()->solved) {
      solved.push_back(e);
      slot.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), name) - vars.begin()));
    }
    CompiledVector fn(solved, free, env);
    for (std::size_t attempt = 0; attempt < 20 * count && out.size() < count; ++attempt) {
      std::vector<double> w(free.size());
      for (auto& v : w) v = dist(rng);
      std::vector<double> x(n, 0.0);
      for (std::size_t i = 0, j = 0; i < n; ++i) {
        if (std::find(free.begin(), free.end(), vars[i]) != free.end()) x[i] = w[j++];
      }
      try {
        auto vals = fn(w);
        for (std::size_t k = 0; k < slot.size(); ++k) x[slot[k]] = vals[k];
      } catch (const DomainError&) {
        continue;
      }
      if (std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) add(std::move(x));
    }
    return out;
  }
  auto gens = m.generator_exprs();
  const std::size_t k = gens.size();
  if (k == 0) {
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> x(n);
      for (auto& v : x) v = dist(rng);
      add(std::move(x));
    }
    return out;
  }
  std::vector<Expr> jac;
  for (const auto& g : gens) {
    for (const auto& v : vars) jac.push_back(differentiate(g, v));
  }
  CompiledVector gfn(gens, vars, env);
  CompiledVector jfn(jac, vars, env);
  Eigen::VectorXd gv(static_cast<Eigen::Index>(k));
  Eigen::MatrixXd jm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (std::size_t attempt = 0; attempt < 40 * count && out.size() < count; ++attempt) {
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    bool ok = false;
    try {
      for (int it = 0; it < 60; ++it) {
        auto g = gfn(x);
        double norm = 0;
        for (std::size_t i = 0; i < k; ++i) {
          gv[static_cast<Eigen::Index>(i)] = g[i];
          norm = std::max(norm, std::fabs(g[i]));
        }
        if (norm <= 1e-13) {
          ok = true;
          break;
        }
        auto j = jfn(x);
        for (std::size_t r = 0; r < k; ++r) {
          for (std::size_t c = 0; c < n; ++c) jm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r * n + c];
        }
        Eigen::VectorXd step = jm.completeOrthogonalDecomposition().solve(gv);
        double xn = 0;
        for (std::size_t i = 0; i < n; ++i) {
          x[i] -= step[static_cast<Eigen::Index>(i)];
          xn = std::max(xn, std::fabs(x[i]));
        }
        if (!std::isfinite(xn) || xn > 1e6) break;
      }
    } catch (const DomainError&) {
      ok = false;
    }
    if (ok) add(std::move(x));
  }
  return out;
}

}  // namespace symflow
