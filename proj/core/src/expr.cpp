#include <symflow/expr.hpp>

#include <symflow/detail/ratfun.hpp>
#include <symflow/errors.hpp>
#include <symflow/polynomial.hpp>

#include <algorithm>
#include <cassert>
#include <sstream>

namespace symflow {

using detail::Atom;
using detail::AtomPoly;
using detail::AtomPtr;
using detail::Monomial;
using detail::Node;
using detail::RatFun;
using detail::Term;

const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Exp: return "exp";
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Sqrt: return "sqrt";
    case Builtin::Atan2: return "atan2";
    case Builtin::None: break;
  }
  return "";
}

Builtin builtin_from_name(std::string_view name) {
  if (name == "exp") return Builtin::Exp;
  if (name == "sin") return Builtin::Sin;
  if (name == "cos") return Builtin::Cos;
  if (name == "sqrt") return Builtin::Sqrt;
  if (name == "atan2") return Builtin::Atan2;
  return Builtin::None;
}

int builtin_arity(Builtin b) { return b == Builtin::Atan2 ? 2 : (b == Builtin::None ? -1 : 1); }

namespace detail {

namespace {

int compare_rational(const Rational& a, const Rational& b) {
  int c = cmp(a, b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool is_variable_atom(const AtomPtr& a) { return a->kind == Atom::Kind::Variable; }

// Lexicographic comparison restricted to atoms matching pred; an atom present only
// in one monomial makes that monomial larger.
template <class Pred>
int lex_part(const Monomial& a, const Monomial& b, Pred pred) {
  auto ia = a.factors.begin();
  auto ib = b.factors.begin();
  auto skip = [&](auto& it, auto end) {
    while (it != end && !pred(it->first)) ++it;
  };
  while (true) {
    skip(ia, a.factors.end());
    skip(ib, b.factors.end());
    bool ea = ia == a.factors.end();
    bool eb = ib == b.factors.end();
    if (ea && eb) return 0;
    if (ea) return ib->second > 0 ? -1 : 1;
    if (eb) return ia->second > 0 ? 1 : -1;
    int c = compare_atoms(*ia->first, *ib->first);
    if (c < 0) return ia->second > 0 ? 1 : -1;
    if (c > 0) return ib->second > 0 ? -1 : 1;
    if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    ++ia;
    ++ib;
  }
}

template <class Pred>
int degree_part(const Monomial& m, Pred pred) {
  int d = 0;
  for (const auto& [a, k] : m.factors) {
    if (pred(a)) d += k;
  }
  return d;
}

}  // namespace

int compare_atoms(const Atom& a, const Atom& b) {
  if (&a == &b) return 0;
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  if (a.builtin != b.builtin) return static_cast<int>(a.builtin) < static_cast<int>(b.builtin) ? -1 : 1;
  if (a.deriv != b.deriv) return a.deriv < b.deriv ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (int c = compare(a.args[i], b.args[i]); c != 0) return c;
  }
  return 0;
}

int compare_monomials(const Monomial& a, const Monomial& b) {
  auto var = [](const AtomPtr& x) { return is_variable_atom(x); };
  auto other = [](const AtomPtr& x) { return !is_variable_atom(x); };
  int da = degree_part(a, var), db = degree_part(b, var);
  if (da != db) return da < db ? -1 : 1;
  if (int c = lex_part(a, b, var); c != 0) return c;
  da = degree_part(a, other);
  db = degree_part(b, other);
  if (da != db) return da < db ? -1 : 1;
  return lex_part(a, b, other);
}

bool operator==(const Monomial& a, const Monomial& b) { return compare_monomials(a, b) == 0; }

bool AtomPoly::is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].mono.factors.empty()); }

Rational AtomPoly::constant() const { return terms.empty() ? Rational(0) : terms[0].coef; }

namespace {

bool is_exp(const AtomPtr& a) { return a->kind == Atom::Kind::Function && a->builtin == Builtin::Exp; }

void sort_and_combine(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return compare_monomials(x.mono, y.mono) > 0; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && compare_monomials(out.back().mono, t.mono) == 0) {
      out.back().coef += t.coef;
    } else {
      out.push_back(std::move(t));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0; }), out.end());
  terms = std::move(out);
}

void insert_factor(std::vector<std::pair<AtomPtr, int>>& factors, const AtomPtr& a, int k) {
  if (k == 0) return;
  auto it = std::lower_bound(factors.begin(), factors.end(), a,
                             [](const auto& f, const AtomPtr& x) { return compare_atoms(*f.first, *x) < 0; });
  if (it != factors.end() && compare_atoms(*it->first, *a) == 0) {
    it->second += k;
    if (it->second == 0) factors.erase(it);
  } else {
    factors.insert(it, {a, k});
  }
}

AtomPtr make_exp_atom(const Expr& arg);

// Multiplies monomials; exp factors are merged into a single exp of the summed argument.
Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors.reserve(a.factors.size() + b.factors.size());
  Expr exp_arg;
  bool has_exp = false;
  auto take = [&](const std::pair<AtomPtr, int>& f) {
    if (is_exp(f.first)) {
      exp_arg = exp_arg + f.first->args[0] * Expr(f.second);
      has_exp = true;
    } else {
      r.factors.push_back(f);
    }
  };
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() || ib != b.factors.end()) {
    if (ib == b.factors.end()) {
      take(*ia++);
    } else if (ia == a.factors.end()) {
      take(*ib++);
    } else {
      int c = compare_atoms(*ia->first, *ib->first);
      if (c < 0) {
        take(*ia++);
      } else if (c > 0) {
        take(*ib++);
      } else if (is_exp(ia->first)) {
        take(*ia++);
        take(*ib++);
      } else {
        int k = ia->second + ib->second;
        if (k != 0) r.factors.emplace_back(ia->first, k);
        ++ia;
        ++ib;
      }
    }
  }
  if (has_exp && !exp_arg.is_zero()) insert_factor(r.factors, make_exp_atom(exp_arg), 1);
  return r;
}

}  // namespace

AtomPoly poly_constant(const Rational& c) {
  AtomPoly p;
  if (c != 0) p.terms.push_back({Monomial{}, c});
  return p;
}

AtomPoly poly_atom(const AtomPtr& a, int power) {
  AtomPoly p;
  if (power == 0) return poly_constant(1);
  if (is_exp(a) && power != 1) {
    return poly_atom(make_exp_atom(a->args[0] * Expr(power)), 1);
  }
  Monomial m;
  m.factors.emplace_back(a, power);
  p.terms.push_back({std::move(m), 1});
  return p;
}

AtomPoly poly_add(const AtomPoly& a, const AtomPoly& b) {
  AtomPoly r;
  r.terms.reserve(a.terms.size() + b.terms.size());
  auto ia = a.terms.begin(), ib = b.terms.begin();
  while (ia != a.terms.end() && ib != b.terms.end()) {
    int c = compare_monomials(ia->mono, ib->mono);
    if (c > 0) {
      r.terms.push_back(*ia++);
    } else if (c < 0) {
      r.terms.push_back(*ib++);
    } else {
      Rational s = ia->coef + ib->coef;
      if (s != 0) r.terms.push_back({ia->mono, s});
      ++ia;
      ++ib;
    }
  }
  r.terms.insert(r.terms.end(), ia, a.terms.end());
  r.terms.insert(r.terms.end(), ib, b.terms.end());
  return r;
}

AtomPoly poly_scale(const AtomPoly& a, const Rational& c) {
  if (c == 0) return {};
  AtomPoly r = a;
  for (auto& t : r.terms) t.coef *= c;
  return r;
}

AtomPoly poly_sub(const AtomPoly& a, const AtomPoly& b) { return poly_add(a, poly_scale(b, -1)); }

AtomPoly poly_mul(const AtomPoly& a, const AtomPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_constant()) return poly_scale(b, a.constant());
  if (b.is_constant()) return poly_scale(a, b.constant());
  AtomPoly r;
  r.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) r.terms.push_back({mono_mul(ta.mono, tb.mono), ta.coef * tb.coef});
  }
  sort_and_combine(r.terms);
  return r;
}

int compare_polys(const AtomPoly& a, const AtomPoly& b) {
  std::size_t n = std::min(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_monomials(a.terms[i].mono, b.terms[i].mono); c != 0) return c;
    if (int c = compare_rational(a.terms[i].coef, b.terms[i].coef); c != 0) return c;
  }
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

namespace {

bool poly_equal(const AtomPoly& a, const AtomPoly& b) { return compare_polys(a, b) == 0; }

bool is_reducible_factor(const std::pair<AtomPtr, int>& f) {
  const auto& a = f.first;
  if (a->kind != Atom::Kind::Function || f.second < 2) return false;
  return a->builtin == Builtin::Cos || a->builtin == Builtin::Sqrt;
}

bool needs_reduction(const AtomPoly& p) {
  for (const auto& t : p.terms) {
    for (const auto& f : t.mono.factors) {
      if (is_reducible_factor(f)) return true;
    }
  }
  return false;
}

RatFun raw_ratfun(AtomPoly num, AtomPoly den) { return RatFun{std::move(num), std::move(den)}; }

// cos(u)^2 -> 1 - sin(u)^2 and sqrt(u)^2 -> u, applied to every term.
RatFun reduce_poly(const AtomPoly& p) {
  RatFun acc = ratfun_constant(0);
  for (const auto& t : p.terms) {
    Monomial rest;
    RatFun extra = ratfun_constant(1);
    for (const auto& f : t.mono.factors) {
      if (!is_reducible_factor(f)) {
        rest.factors.push_back(f);
        continue;
      }
      const AtomPtr& a = f.first;
      int half = f.second / 2;
      if (f.second % 2) rest.factors.emplace_back(a, 1);
      if (a->builtin == Builtin::Cos) {
        RatFun s = make_function_ratfun("sin", Builtin::Sin, a->args, {});
        RatFun one_minus = ratfun_add(ratfun_constant(1), ratfun_neg(ratfun_mul(s, s)));
        extra = ratfun_mul(extra, ratfun_pow(one_minus, half));
      } else {
        extra = ratfun_mul(extra, ratfun_pow(*ratfun_of(a->args[0]), half));
      }
    }
    AtomPoly tp;
    tp.terms.push_back({std::move(rest), t.coef});
    acc = ratfun_add(acc, ratfun_mul(raw_ratfun(std::move(tp), poly_constant(1)), extra));
  }
  return acc;
}

struct AtomIndex {
  std::vector<AtomPtr> atoms;

  void collect(const AtomPoly& p) {
    for (const auto& t : p.terms) {
      for (const auto& f : t.mono.factors) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), f.first,
                                   [](const AtomPtr& x, const AtomPtr& y) { return compare_atoms(*x, *y) < 0; });
        if (it == atoms.end() || compare_atoms(**it, *f.first) != 0) atoms.insert(it, f.first);
      }
    }
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) out.push_back("a" + std::to_string(i));
    return out;
  }

  std::size_t index_of(const AtomPtr& a) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), a,
                               [](const AtomPtr& x, const AtomPtr& y) { return compare_atoms(*x, *y) < 0; });
    return static_cast<std::size_t>(it - atoms.begin());
  }

  Polynomial to_poly(const AtomPoly& p, const std::vector<std::string>& names) const {
    Polynomial out(names);
    for (const auto& t : p.terms) {
      Exponents e(atoms.size(), 0);
      for (const auto& f : t.mono.factors) e[index_of(f.first)] = f.second;
      out.add_term(e, t.coef);
    }
    return out;
  }

  AtomPoly from_poly(const Polynomial& p) const {
    AtomPoly out;
    for (const auto& [e, c] : p.terms()) {
      Monomial m;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] != 0) m.factors.emplace_back(atoms[i], e[i]);
      }
      out.terms.push_back({std::move(m), c});
    }
    sort_and_combine(out.terms);
    return out;
  }
};

// Divides every term of p by the monomial m (assumed to divide).
AtomPoly divide_by_monomial(const AtomPoly& p, const Monomial& m) {
  AtomPoly out;
  for (const auto& t : p.terms) {
    Monomial r = t.mono;
    for (const auto& [a, k] : m.factors) insert_factor(r.factors, a, -k);
    out.terms.push_back({std::move(r), t.coef});
  }
  sort_and_combine(out.terms);
  return out;
}

// Largest monomial dividing every term of p (exp atoms excluded).
Monomial monomial_content(const AtomPoly& p) {
  Monomial c;
  if (p.terms.empty()) return c;
  for (const auto& f : p.terms[0].mono.factors) {
    if (!is_exp(f.first)) c.factors.push_back(f);
  }
  for (std::size_t i = 1; i < p.terms.size() && !c.factors.empty(); ++i) {
    std::vector<std::pair<AtomPtr, int>> next;
    for (const auto& [a, k] : c.factors) {
      for (const auto& [b, kb] : p.terms[i].mono.factors) {
        if (compare_atoms(*a, *b) == 0) {
          next.emplace_back(a, std::min(k, kb));
          break;
        }
      }
    }
    c.factors = std::move(next);
  }
  return c;
}

}  // namespace

RatFun ratfun_constant(const Rational& c) { return RatFun{poly_constant(c), poly_constant(1)}; }

RatFun make_ratfun(AtomPoly num, AtomPoly den) {
  if (den.is_zero()) throw DomainError("division by zero");
  if (num.is_zero()) return ratfun_constant(0);
  if (needs_reduction(num) || needs_reduction(den)) {
    RatFun n = reduce_poly(num);
    RatFun d = reduce_poly(den);
    return make_ratfun(poly_mul(n.num, d.den), poly_mul(n.den, d.num));
  }
  if (den.is_constant()) {
    Rational c = den.constant();
    if (c != 1) num = poly_scale(num, 1 / c);
    return RatFun{std::move(num), poly_constant(1)};
  }
  if (den.is_monomial()) {
    Monomial dm = den.terms[0].mono;
    Monomial nc = monomial_content(num);
    Monomial common;
    for (const auto& [a, k] : dm.factors) {
      if (is_exp(a)) continue;
      for (const auto& [b, kb] : nc.factors) {
        if (compare_atoms(*a, *b) == 0) {
          common.factors.emplace_back(a, std::min(k, kb));
          break;
        }
      }
    }
    if (!common.factors.empty()) {
      num = divide_by_monomial(num, common);
      den = divide_by_monomial(den, common);
    }
  } else {
    AtomIndex index;
    index.collect(num);
    index.collect(den);
    auto names = index.names();
    Polynomial pn = index.to_poly(num, names);
    Polynomial pd = index.to_poly(den, names);
    Polynomial g = gcd(pn, pd);
    if (!g.is_constant()) {
      num = index.from_poly(*exact_divide(pn, g));
      den = index.from_poly(*exact_divide(pd, g));
    }
  }
  // exp factors common to the whole denominator move to the numerator.
  if (!den.terms.empty()) {
    AtomPtr shared;
    for (const auto& f : den.terms[0].mono.factors) {
      if (is_exp(f.first)) shared = f.first;
    }
    if (shared) {
      bool everywhere = std::all_of(den.terms.begin(), den.terms.end(), [&](const Term& t) {
        return std::any_of(t.mono.factors.begin(), t.mono.factors.end(),
                           [&](const auto& f) { return compare_atoms(*f.first, *shared) == 0; });
      });
      if (everywhere) {
        Monomial m;
        m.factors.emplace_back(shared, 1);
        den = divide_by_monomial(den, m);
        num = poly_mul(num, poly_atom(make_exp_atom(-shared->args[0])));
        return make_ratfun(std::move(num), std::move(den));
      }
    }
  }
  if (den.is_constant()) return make_ratfun(std::move(num), std::move(den));
  Rational lc = den.terms[0].coef;
  if (lc != 1) {
    num = poly_scale(num, 1 / lc);
    den = poly_scale(den, 1 / lc);
  }
  return RatFun{std::move(num), std::move(den)};
}

RatFun ratfun_add(const RatFun& a, const RatFun& b) {
  if (a.num.is_zero()) return b;
  if (b.num.is_zero()) return a;
  if (poly_equal(a.den, b.den)) {
    AtomPoly n = poly_add(a.num, b.num);
    if (a.den.is_constant()) return RatFun{std::move(n), a.den};
    return make_ratfun(std::move(n), a.den);
  }
  return make_ratfun(poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)), poly_mul(a.den, b.den));
}

RatFun ratfun_mul(const RatFun& a, const RatFun& b) {
  if (a.num.is_zero() || b.num.is_zero()) return ratfun_constant(0);
  AtomPoly n = poly_mul(a.num, b.num);
  if (a.den.is_constant() && b.den.is_constant() && !needs_reduction(n)) return RatFun{std::move(n), poly_constant(1)};
  return make_ratfun(std::move(n), poly_mul(a.den, b.den));
}

RatFun ratfun_neg(const RatFun& a) { return RatFun{poly_scale(a.num, -1), a.den}; }

RatFun ratfun_inv(const RatFun& a) {
  if (a.num.is_zero()) throw DomainError("division by zero");
  return make_ratfun(a.den, a.num);
}

RatFun ratfun_pow(const RatFun& a, int k) {
  if (k < 0) return ratfun_pow(ratfun_inv(a), -k);
  RatFun result = ratfun_constant(1);
  RatFun base = a;
  while (k > 0) {
    if (k & 1) result = ratfun_mul(result, base);
    k >>= 1;
    if (k > 0) base = ratfun_mul(base, base);
  }
  return result;
}

namespace {

std::vector<std::string> merge_free(const std::vector<Expr>& args) {
  std::set<std::string> s;
  for (const auto& a : args) {
    auto fv = free_variables(a);
    s.insert(fv.begin(), fv.end());
  }
  return {s.begin(), s.end()};
}

AtomPtr make_function_atom(const std::string& name, Builtin b, std::vector<Expr> args, std::vector<int> deriv) {
  auto a = std::make_shared<Atom>();
  a->kind = Atom::Kind::Function;
  a->name = name;
  a->builtin = b;
  a->deriv = std::move(deriv);
  a->free_vars = merge_free(args);
  a->args = std::move(args);
  return a;
}

AtomPtr make_exp_atom(const Expr& arg) { return make_function_atom("exp", Builtin::Exp, {normalize(arg)}, {}); }

// Sign of the leading numerator coefficient of a canonical expression.
bool leading_negative(const Expr& e) {
  auto rf = ratfun_of(e);
  return !rf->num.terms.empty() && rf->num.terms[0].coef < 0;
}

RatFun atom_ratfun(const AtomPtr& a) { return RatFun{poly_atom(a), poly_constant(1)}; }

}  // namespace

AtomPtr make_atom_variable(const std::string& name) {
  auto a = std::make_shared<Atom>();
  a->kind = Atom::Kind::Variable;
  a->name = name;
  a->free_vars = {name};
  return a;
}

AtomPtr make_atom_parameter(const std::string& name) {
  auto a = std::make_shared<Atom>();
  a->kind = Atom::Kind::Parameter;
  a->name = name;
  return a;
}

RatFun make_function_ratfun(const std::string& name, Builtin b, std::vector<Expr> args, std::vector<int> deriv) {
  for (auto& a : args) a = normalize(a);
  if (b == Builtin::None) {
    if (deriv.empty()) deriv.assign(args.size(), 0);
    if (deriv.size() != args.size()) throw Error("derivative index length does not match arity of '" + name + "'");
    return atom_ratfun(make_function_atom(name, b, std::move(args), std::move(deriv)));
  }
  if (static_cast<int>(args.size()) != builtin_arity(b)) {
    throw Error(std::string("wrong number of arguments to ") + builtin_name(b));
  }
  const Expr& u = args[0];
  switch (b) {
    case Builtin::Exp:
      if (u.is_zero()) return ratfun_constant(1);
      return atom_ratfun(make_exp_atom(u));
    case Builtin::Sin:
      if (u.is_zero()) return ratfun_constant(0);
      if (leading_negative(u)) return ratfun_neg(make_function_ratfun(name, b, {-u}, {}));
      break;
    case Builtin::Cos:
      if (u.is_zero()) return ratfun_constant(1);
      if (leading_negative(u)) return make_function_ratfun(name, b, {-u}, {});
      break;
    case Builtin::Sqrt:
      if (u.is_rational()) {
        Rational q = u.rational_value();
        if (q >= 0) {
          Integer n = q.get_num(), d = q.get_den();
          Integer rn = sqrt(n), rd = sqrt(d);
          if (rn * rn == n && rd * rd == d) return ratfun_constant(Rational(rn, rd));
        }
      }
      break;
    case Builtin::Atan2:
      if (u.is_zero() && args[1].is_rational() && args[1].rational_value() > 0) return ratfun_constant(0);
      break;
    case Builtin::None: break;
  }
  return atom_ratfun(make_function_atom(builtin_name(b), b, std::move(args), {}));
}

Expr atom_expr(const AtomPtr& a) {
  auto n = std::make_shared<Node>();
  switch (a->kind) {
    case Atom::Kind::Variable: n->kind = ExprKind::Variable; break;
    case Atom::Kind::Parameter: n->kind = ExprKind::Parameter; break;
    case Atom::Kind::Function: n->kind = ExprKind::Function; break;
  }
  n->name = a->name;
  n->builtin = a->builtin;
  n->deriv = a->deriv;
  n->operands = a->args;
  n->atom = a;
  n->canonical = std::make_shared<const RatFun>(atom_ratfun(a));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

namespace {

Expr make_node(ExprKind kind, std::vector<Expr> operands, int exponent = 0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->operands = std::move(operands);
  n->exponent = exponent;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr constant_node(const Rational& c) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = c;
  n->value.canonicalize();
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr term_tree(const Rational& coef, const std::vector<std::pair<AtomPtr, int>>& factors) {
  if (factors.empty()) return constant_node(coef);
  std::vector<Expr> ops;
  if (coef != 1) ops.push_back(constant_node(coef));
  for (const auto& [a, k] : factors) {
    Expr base = atom_expr(a);
    ops.push_back(k == 1 ? base : make_node(ExprKind::Power, {base}, k));
  }
  if (ops.size() == 1) return ops[0];
  return make_node(ExprKind::Product, std::move(ops));
}

Expr poly_tree(const AtomPoly& p, const Monomial* divide_by) {
  std::vector<Expr> terms;
  for (const auto& t : p.terms) {
    if (divide_by) {
      auto f = t.mono.factors;
      for (const auto& [a, k] : divide_by->factors) insert_factor(f, a, -k);
      terms.push_back(term_tree(t.coef, f));
    } else {
      terms.push_back(term_tree(t.coef, t.mono.factors));
    }
  }
  if (terms.empty()) return constant_node(0);
  if (terms.size() == 1) return terms[0];
  return make_node(ExprKind::Sum, std::move(terms));
}

Expr with_canonical(const Expr& tree, RatFun rf) {
  auto n = std::make_shared<Node>(tree.node());
  n->canonical = std::make_shared<const RatFun>(std::move(rf));
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

}  // namespace

Expr expr_of(RatFun rf) {
  Expr tree;
  if (rf.den.is_constant()) {
    tree = poly_tree(rf.num, nullptr);
  } else if (rf.den.is_monomial() && rf.den.terms[0].coef == 1) {
    tree = poly_tree(rf.num, &rf.den.terms[0].mono);
  } else {
    tree = make_node(ExprKind::Product, {poly_tree(rf.num, nullptr), make_node(ExprKind::Power, {poly_tree(rf.den, nullptr)}, -1)});
  }
  if (tree.node().canonical && tree.node().atom) return tree;
  return with_canonical(tree, std::move(rf));
}

std::shared_ptr<const RatFun> ratfun_of(const Expr& e) {
  const Node& n = e.node();
  if (n.canonical) return n.canonical;
  switch (n.kind) {
    case ExprKind::Constant: return std::make_shared<const RatFun>(ratfun_constant(n.value));
    case ExprKind::Variable: return std::make_shared<const RatFun>(atom_ratfun(make_atom_variable(n.name)));
    case ExprKind::Parameter: return std::make_shared<const RatFun>(atom_ratfun(make_atom_parameter(n.name)));
    case ExprKind::Sum: {
      RatFun acc = ratfun_constant(0);
      for (const auto& op : n.operands) acc = ratfun_add(acc, *ratfun_of(op));
      return std::make_shared<const RatFun>(std::move(acc));
    }
    case ExprKind::Product: {
      RatFun acc = ratfun_constant(1);
      for (const auto& op : n.operands) acc = ratfun_mul(acc, *ratfun_of(op));
      return std::make_shared<const RatFun>(std::move(acc));
    }
    case ExprKind::Power:
      return std::make_shared<const RatFun>(ratfun_pow(*ratfun_of(n.operands[0]), n.exponent));
    case ExprKind::Function:
      return std::make_shared<const RatFun>(make_function_ratfun(n.name, n.builtin, n.operands, n.deriv));
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// ---------------------------------------------------------------------------

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(long value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = v;
  n->canonical = std::make_shared<const RatFun>(detail::ratfun_constant(v));
  node_ = std::move(n);
}

Expr Expr::variable(std::string name) { return detail::atom_expr(detail::make_atom_variable(name)); }
Expr Expr::parameter(std::string name) { return detail::atom_expr(detail::make_atom_parameter(name)); }

Expr Expr::function(std::string name, std::vector<Expr> args, std::vector<int> derivative) {
  Builtin b = builtin_from_name(name);
  if (b != Builtin::None) return builtin(b, std::move(args));
  return detail::expr_of(detail::make_function_ratfun(name, Builtin::None, std::move(args), std::move(derivative)));
}

Expr Expr::builtin(Builtin fn, std::vector<Expr> args) {
  return detail::expr_of(detail::make_function_ratfun(builtin_name(fn), fn, std::move(args), {}));
}

Expr Expr::raw_sum(std::vector<Expr> terms) { return detail::make_node(ExprKind::Sum, std::move(terms)); }
Expr Expr::raw_product(std::vector<Expr> factors) { return detail::make_node(ExprKind::Product, std::move(factors)); }
Expr Expr::raw_power(Expr base, int exponent) { return detail::make_node(ExprKind::Power, {std::move(base)}, exponent); }

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::is_canonical() const { return node_->canonical != nullptr; }
const Rational& Expr::constant_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::operands() const { return node_->operands; }
int Expr::exponent() const { return node_->exponent; }
Builtin Expr::builtin_kind() const { return node_->builtin; }
std::span<const int> Expr::derivative_index() const { return node_->deriv; }

bool Expr::is_zero() const { return detail::ratfun_of(*this)->num.is_zero(); }

bool Expr::is_rational() const {
  auto rf = detail::ratfun_of(*this);
  return rf->num.is_constant() && rf->den.is_constant();
}

Rational Expr::rational_value() const {
  auto rf = detail::ratfun_of(*this);
  if (!rf->num.is_constant() || !rf->den.is_constant()) throw Error("expression is not a rational constant: " + str());
  return rf->num.constant() / rf->den.constant();
}

bool Expr::is_one() const { return is_rational() && rational_value() == 1; }

Expr normalize(const Expr& e) {
  if (e.is_canonical()) return e;
  return detail::expr_of(*detail::ratfun_of(e));
}

Expr operator+(const Expr& a, const Expr& b) {
  return detail::expr_of(detail::ratfun_add(*detail::ratfun_of(a), *detail::ratfun_of(b)));
}

Expr operator-(const Expr& a, const Expr& b) {
  return detail::expr_of(detail::ratfun_add(*detail::ratfun_of(a), detail::ratfun_neg(*detail::ratfun_of(b))));
}

Expr operator*(const Expr& a, const Expr& b) {
  return detail::expr_of(detail::ratfun_mul(*detail::ratfun_of(a), *detail::ratfun_of(b)));
}

Expr operator/(const Expr& a, const Expr& b) {
  return detail::expr_of(detail::ratfun_mul(*detail::ratfun_of(a), detail::ratfun_inv(*detail::ratfun_of(b))));
}

Expr operator-(const Expr& a) { return detail::expr_of(detail::ratfun_neg(*detail::ratfun_of(a))); }

Expr pow(const Expr& base, int exponent) { return detail::expr_of(detail::ratfun_pow(*detail::ratfun_of(base), exponent)); }

int compare(const Expr& a, const Expr& b) {
  auto ra = detail::ratfun_of(a);
  auto rb = detail::ratfun_of(b);
  if (int c = detail::compare_polys(ra->num, rb->num); c != 0) return c;
  return detail::compare_polys(ra->den, rb->den);
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr numerator(const Expr& e) { return detail::expr_of(detail::RatFun{detail::ratfun_of(e)->num, detail::poly_constant(1)}); }
Expr denominator(const Expr& e) { return detail::expr_of(detail::RatFun{detail::ratfun_of(e)->den, detail::poly_constant(1)}); }

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Expr& e, std::string& out, int ctx);

bool negative_term(const Expr& e) {
  if (e.kind() == ExprKind::Constant) return e.constant_value() < 0;
  if (e.kind() == ExprKind::Product && !e.operands().empty() && e.operands()[0].kind() == ExprKind::Constant)
    return e.operands()[0].constant_value() < 0;
  return false;
}

void print_args(std::span<const Expr> args, std::string& out) {
  out += "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print(args[i], out, 0);
  }
  out += ")";
}

// ctx: 0 = top level / sum term, 1 = product factor, 2 = power base
void print_product(std::span<const Expr> ops, std::string& out, int ctx, bool negate) {
  Rational coef = 1;
  std::vector<Expr> num, den;
  for (const auto& op : ops) {
    if (op.kind() == ExprKind::Constant) {
      coef *= op.constant_value();
    } else if (op.kind() == ExprKind::Power && op.exponent() < 0) {
      den.push_back(op);
    } else {
      num.push_back(op);
    }
  }
  if (negate) coef = -coef;
  bool wrap = ctx >= 1;
  if (wrap) out += "(";
  Integer p = coef.get_num();
  Integer q = coef.get_den();
  std::string body;
  if (num.empty()) {
    body += p.get_str();
  } else {
    if (p == -1) {
      body += "-";
    } else if (p != 1) {
      body += p.get_str() + "*";
    }
    for (std::size_t i = 0; i < num.size(); ++i) {
      if (i) body += "*";
      print(num[i], body, 1);
    }
  }
  std::vector<std::string> below;
  if (q != 1) below.push_back(q.get_str());
  for (const auto& d : den) {
    std::string f;
    print(d.operands()[0], f, 2);
    if (d.exponent() != -1) f += "^" + std::to_string(-d.exponent());
    below.push_back(std::move(f));
  }
  if (!below.empty()) {
    body += "/";
    if (below.size() > 1) body += "(";
    for (std::size_t i = 0; i < below.size(); ++i) {
      if (i) body += "*";
      body += below[i];
    }
    if (below.size() > 1) body += ")";
  }
  out += body;
  if (wrap) out += ")";
}

void print(const Expr& e, std::string& out, int ctx) {
  switch (e.kind()) {
    case ExprKind::Constant: {
      const Rational& v = e.constant_value();
      bool wrap = (ctx >= 1 && v < 0) || (ctx >= 2 && v.get_den() != 1);
      if (wrap) out += "(";
      out += to_string(v);
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Variable:
    case ExprKind::Parameter: out += e.name(); return;
    case ExprKind::Function: {
      auto d = e.derivative_index();
      if (std::any_of(d.begin(), d.end(), [](int k) { return k != 0; })) {
        out += "D[";
        for (std::size_t i = 0; i < d.size(); ++i) {
          if (i) out += ",";
          out += std::to_string(d[i]);
        }
        out += "](" + e.name() + ")";
      } else {
        out += e.name();
      }
      print_args(e.operands(), out);
      return;
    }
    case ExprKind::Sum: {
      bool wrap = ctx >= 1;
      if (wrap) out += "(";
      auto ops = e.operands();
      for (std::size_t i = 0; i < ops.size(); ++i) {
        bool neg = negative_term(ops[i]);
        if (i == 0) {
          if (neg) out += "-";
        } else {
          out += neg ? " - " : " + ";
        }
        if (!neg) {
          print(ops[i], out, 0);
        } else if (ops[i].kind() == ExprKind::Constant) {
          out += to_string(-ops[i].constant_value());
        } else {
          print_product(ops[i].operands(), out, 0, true);
        }
      }
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Product: print_product(e.operands(), out, ctx, false); return;
    case ExprKind::Power: {
      if (e.exponent() < 0) {
        print_product(std::span<const Expr>(&e, 1), out, ctx, false);
        return;
      }
      print(e.operands()[0], out, 2);
      out += "^" + std::to_string(e.exponent());
      return;
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out, 0);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace symflow
