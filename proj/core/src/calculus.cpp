#include <symflow/detail/ratfun.hpp>
#include <symflow/errors.hpp>
#include <symflow/expr.hpp>

#include <algorithm>
#include <functional>
#include <optional>

namespace symflow {

using detail::Atom;
using detail::AtomPoly;
using detail::AtomPtr;
using detail::RatFun;

namespace {

using AtomMap = std::function<std::optional<RatFun>(const AtomPtr&)>;

RatFun map_poly(const AtomPoly& p, const AtomMap& fn) {
  RatFun acc = detail::ratfun_constant(0);
  for (const auto& t : p.terms) {
    RatFun term = detail::ratfun_constant(t.coef);
    AtomPoly kept = detail::poly_constant(1);
    for (const auto& [a, k] : t.mono.factors) {
      if (auto r = fn(a)) {
        term = detail::ratfun_mul(term, detail::ratfun_pow(*r, k));
      } else {
        kept = detail::poly_mul(kept, detail::poly_atom(a, k));
      }
    }
    acc = detail::ratfun_add(acc, detail::ratfun_mul(term, detail::make_ratfun(std::move(kept), detail::poly_constant(1))));
  }
  return acc;
}

Expr map_atoms(const Expr& e, const AtomMap& fn) {
  auto rf = detail::ratfun_of(e);
  RatFun n = map_poly(rf->num, fn);
  if (rf->den.is_constant()) return detail::expr_of(std::move(n));
  RatFun d = map_poly(rf->den, fn);
  return detail::expr_of(detail::ratfun_mul(n, detail::ratfun_inv(d)));
}

bool depends_on(const Atom& a, std::string_view v) {
  return std::binary_search(a.free_vars.begin(), a.free_vars.end(), std::string(v));
}

RatFun d_atom(const AtomPtr& a, std::string_view v);

// Derivative of a polynomial in atoms, as a rational function.
RatFun d_poly(const AtomPoly& p, std::string_view v) {
  RatFun acc = detail::ratfun_constant(0);
  for (const auto& t : p.terms) {
    for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
      const auto& [a, k] = t.mono.factors[i];
      if (!depends_on(*a, v)) continue;
      AtomPoly rest = detail::poly_constant(t.coef * k);
      for (std::size_t j = 0; j < t.mono.factors.size(); ++j) {
        const auto& [b, kb] = t.mono.factors[j];
        int power = j == i ? kb - 1 : kb;
        if (power != 0) rest = detail::poly_mul(rest, detail::poly_atom(b, power));
      }
      acc = detail::ratfun_add(acc, detail::ratfun_mul(RatFun{std::move(rest), detail::poly_constant(1)}, d_atom(a, v)));
    }
  }
  return acc;
}

RatFun d_expr(const Expr& e, std::string_view v) {
  auto rf = detail::ratfun_of(e);
  RatFun dn = d_poly(rf->num, v);
  if (rf->den.is_constant()) return dn;
  RatFun dd = d_poly(rf->den, v);
  RatFun n{rf->num, detail::poly_constant(1)};
  RatFun d{rf->den, detail::poly_constant(1)};
  RatFun top = detail::ratfun_add(detail::ratfun_mul(dn, d), detail::ratfun_neg(detail::ratfun_mul(n, dd)));
  return detail::ratfun_mul(top, detail::ratfun_inv(detail::ratfun_mul(d, d)));
}

RatFun d_atom(const AtomPtr& a, std::string_view v) {
  using detail::make_function_ratfun;
  switch (a->kind) {
    case Atom::Kind::Variable: return detail::ratfun_constant(a->name == v ? 1 : 0);
    case Atom::Kind::Parameter: return detail::ratfun_constant(0);
    case Atom::Kind::Function: break;
  }
  const auto& args = a->args;
  switch (a->builtin) {
    case Builtin::None: {
      RatFun acc = detail::ratfun_constant(0);
      for (std::size_t j = 0; j < args.size(); ++j) {
        RatFun da = d_expr(args[j], v);
        if (da.num.is_zero()) continue;
        auto deriv = a->deriv;
        deriv[j] += 1;
        RatFun f = make_function_ratfun(a->name, Builtin::None, args, deriv);
        acc = detail::ratfun_add(acc, detail::ratfun_mul(f, da));
      }
      return acc;
    }
    case Builtin::Exp:
      return detail::ratfun_mul(RatFun{detail::poly_atom(a), detail::poly_constant(1)}, d_expr(args[0], v));
    case Builtin::Sin:
      return detail::ratfun_mul(make_function_ratfun("cos", Builtin::Cos, args, {}), d_expr(args[0], v));
    case Builtin::Cos:
      return detail::ratfun_neg(detail::ratfun_mul(make_function_ratfun("sin", Builtin::Sin, args, {}), d_expr(args[0], v)));
    case Builtin::Sqrt: {
      RatFun s{detail::poly_atom(a), detail::poly_constant(1)};
      return detail::ratfun_mul(d_expr(args[0], v), detail::ratfun_inv(detail::ratfun_mul(detail::ratfun_constant(2), s)));
    }
    case Builtin::Atan2: {
      const Expr& y = args[0];
      const Expr& x = args[1];
      Expr num = x * detail::expr_of(d_expr(y, v)) - y * detail::expr_of(d_expr(x, v));
      Expr den = x * x + y * y;
      return *detail::ratfun_of(num / den);
    }
  }
  return detail::ratfun_constant(0);
}

void collect(const Expr& e, const std::function<void(const Atom&)>& fn) {
  auto rf = detail::ratfun_of(e);
  for (const auto* p : {&rf->num, &rf->den}) {
    for (const auto& t : p->terms) {
      for (const auto& [a, k] : t.mono.factors) {
        fn(*a);
        for (const auto& arg : a->args) collect(arg, fn);
      }
    }
  }
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view variable) { return detail::expr_of(d_expr(e, variable)); }

Expr differentiate(const Expr& e, std::string_view variable, std::span<const std::string> declared) {
  if (std::find(declared.begin(), declared.end(), variable) == declared.end()) {
    throw UnknownVariable(std::string(variable));
  }
  return differentiate(e, variable);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& values) {
  if (values.empty()) return normalize(e);
  std::function<std::optional<RatFun>(const AtomPtr&)> fn = [&](const AtomPtr& a) -> std::optional<RatFun> {
    if (a->kind == Atom::Kind::Function) {
      std::vector<Expr> args;
      bool changed = false;
      for (const auto& arg : a->args) {
        args.push_back(substitute(arg, values));
        changed = changed || args.back() != arg;
      }
      if (!changed) return std::nullopt;
      return detail::make_function_ratfun(a->name, a->builtin, std::move(args), a->deriv);
    }
    auto it = values.find(a->name);
    if (it == values.end()) return std::nullopt;
    return *detail::ratfun_of(it->second);
  };
  return map_atoms(e, fn);
}

Expr instantiate(const Expr& e, const FunctionDefinitions& defs) {
  if (defs.empty()) return normalize(e);
  std::function<std::optional<RatFun>(const AtomPtr&)> fn = [&](const AtomPtr& a) -> std::optional<RatFun> {
    if (a->kind != Atom::Kind::Function) return std::nullopt;
    std::vector<Expr> args;
    for (const auto& arg : a->args) args.push_back(instantiate(arg, defs));
    auto it = a->builtin == Builtin::None ? defs.find(a->name) : defs.end();
    if (it == defs.end()) return detail::make_function_ratfun(a->name, a->builtin, std::move(args), a->deriv);
    const FunctionDefinition& def = it->second;
    if (def.params.size() != args.size()) {
      throw Error("binding for '" + a->name + "' has arity " + std::to_string(def.params.size()) + ", used with " +
                  std::to_string(args.size()));
    }
    Expr body = def.body;
    for (std::size_t j = 0; j < a->deriv.size(); ++j) {
      for (int k = 0; k < a->deriv[j]; ++k) body = differentiate(body, def.params[j]);
    }
    std::map<std::string, Expr> subst;
    for (std::size_t j = 0; j < args.size(); ++j) subst[def.params[j]] = args[j];
    return *detail::ratfun_of(substitute(body, subst));
  };
  return map_atoms(e, fn);
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  auto rf = detail::ratfun_of(e);
  for (const auto* p : {&rf->num, &rf->den}) {
    for (const auto& t : p->terms) {
      for (const auto& [a, k] : t.mono.factors) out.insert(a->free_vars.begin(), a->free_vars.end());
    }
  }
  return out;
}

std::set<std::string> free_parameters(const Expr& e) {
  std::set<std::string> out;
  collect(e, [&](const Atom& a) {
    if (a.kind == Atom::Kind::Parameter) out.insert(a.name);
  });
  return out;
}

std::map<std::string, int> formal_functions(const Expr& e) {
  std::map<std::string, int> out;
  collect(e, [&](const Atom& a) {
    if (a.kind == Atom::Kind::Function && a.builtin == Builtin::None) out[a.name] = static_cast<int>(a.args.size());
  });
  return out;
}

bool has_builtin_transcendentals(const Expr& e) {
  bool found = false;
  collect(e, [&](const Atom& a) {
    if (a.kind == Atom::Kind::Function && a.builtin != Builtin::None) found = true;
  });
  return found;
}

}  // namespace symflow
