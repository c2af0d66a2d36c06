#include <symflow/evaluate.hpp>

#include <symflow/detail/ratfun.hpp>
#include <symflow/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace symflow {

ScalarFunction derivative_callable(const FunctionBinding& f, const std::vector<int>& order) {
  if (std::all_of(order.begin(), order.end(), [](int k) { return k == 0; })) {
    if (!f.value) throw UnboundSymbol("function value callable");
    return f.value;
  }
  if (auto it = f.derivatives.find(order); it != f.derivatives.end()) return it->second;
  std::size_t j = 0;
  while (order[j] == 0) ++j;
  std::vector<int> lower = order;
  lower[j] -= 1;
  ScalarFunction g = derivative_callable(f, lower);
  int total = std::accumulate(order.begin(), order.end(), 0);
  double h = total == 1 ? kFiniteDifferenceStep : 1e-4;
  return [g, j, h](std::span<const double> x) {
    std::vector<double> p(x.begin(), x.end());
    p[j] = x[j] + h;
    double up = g(p);
    p[j] = x[j] - h;
    double down = g(p);
    return (up - down) / (2.0 * h);
  };
}

namespace {

struct Emitter {
  const std::vector<std::string>& slots;
  const std::map<std::string, double>& constants;
  const FunctionTable& funcs;
};

}  // namespace

struct CompilerAccess {
  using Op = CompiledExpr::Op;

  static void push(CompiledExpr& c, Op op, int arg = 0, double value = 0.0) { c.code_.push_back({op, arg, value}); }

  static void atom(CompiledExpr& c, const detail::Atom& a, const Emitter& em) {
    using Kind = detail::Atom::Kind;
    if (a.kind == Kind::Variable || a.kind == Kind::Parameter) {
      auto it = std::find(em.slots.begin(), em.slots.end(), a.name);
      if (it != em.slots.end()) {
        push(c, Op::Slot, static_cast<int>(it - em.slots.begin()));
        return;
      }
      auto ct = em.constants.find(a.name);
      if (ct == em.constants.end()) throw UnboundSymbol(a.name);
      push(c, Op::Const, 0, ct->second);
      return;
    }
    for (const auto& arg : a.args) expr(c, arg, em);
    switch (a.builtin) {
      case Builtin::Exp: push(c, Op::Exp); return;
      case Builtin::Sin: push(c, Op::Sin); return;
      case Builtin::Cos: push(c, Op::Cos); return;
      case Builtin::Sqrt: push(c, Op::Sqrt); return;
      case Builtin::Atan2: push(c, Op::Atan2); return;
      case Builtin::None: break;
    }
    auto it = em.funcs.find(a.name);
    if (it == em.funcs.end()) throw UnboundSymbol(a.name);
    if (it->second.arity != static_cast<int>(a.args.size())) {
      throw Error("binding for '" + a.name + "' has arity " + std::to_string(it->second.arity));
    }
    c.calls_.push_back({derivative_callable(it->second, a.deriv), static_cast<int>(a.args.size())});
    push(c, Op::Call, static_cast<int>(c.calls_.size() - 1));
  }

  static void poly(CompiledExpr& c, const detail::AtomPoly& p, const Emitter& em) {
    if (p.terms.empty()) {
      push(c, Op::Const, 0, 0.0);
      return;
    }
    for (const auto& t : p.terms) {
      push(c, Op::Const, 0, t.coef.get_d());
      for (const auto& [a, k] : t.mono.factors) {
        atom(c, *a, em);
        if (k != 1) push(c, Op::Pow, k);
      }
      if (!t.mono.factors.empty()) push(c, Op::Mul, static_cast<int>(t.mono.factors.size()) + 1);
    }
    if (p.terms.size() > 1) push(c, Op::Add, static_cast<int>(p.terms.size()));
  }

  static void expr(CompiledExpr& c, const Expr& e, const Emitter& em) {
    auto rf = detail::ratfun_of(e);
    poly(c, rf->num, em);
    if (!rf->den.is_constant()) {
      poly(c, rf->den, em);
      push(c, Op::Div);
    }
  }
};

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots, const std::map<std::string, double>& constants,
                           const FunctionTable& funcs) {
  emit_expr(e, slots, constants, funcs);
  int depth = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const:
      case Op::Slot: ++depth; break;
      case Op::Add:
      case Op::Mul: depth -= in.arg - 1; break;
      case Op::Div:
      case Op::Atan2: --depth; break;
      case Op::Call: depth -= calls_[static_cast<std::size_t>(in.arg)].nargs - 1; break;
      default: break;
    }
    max_depth_ = std::max(max_depth_, depth);
  }
}

void CompiledExpr::emit_expr(const Expr& e, const std::vector<std::string>& slots, const std::map<std::string, double>& constants,
                             const FunctionTable& funcs) {
  Emitter em{slots, constants, funcs};
  CompilerAccess::expr(*this, e, em);
}

double CompiledExpr::operator()(std::span<const double> slots) const {
  std::array<double, 64> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_depth_ > 64) {
    big.resize(static_cast<std::size_t>(max_depth_));
    st = big.data();
  }
  int sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const: st[sp++] = in.value; break;
      case Op::Slot: st[sp++] = slots[static_cast<std::size_t>(in.arg)]; break;
      case Op::Add: {
        double s = 0.0;
        for (int i = 0; i < in.arg; ++i) s += st[--sp];
        st[sp++] = s;
        break;
      }
      case Op::Mul: {
        double s = 1.0;
        for (int i = 0; i < in.arg; ++i) s *= st[--sp];
        st[sp++] = s;
        break;
      }
      case Op::Pow: {
        double b = st[sp - 1];
        double r = 1.0;
        for (int i = 0; i < in.arg; ++i) r *= b;
        st[sp - 1] = r;
        break;
      }
      case Op::Div: {
        double d = st[--sp];
        if (d == 0.0) throw DomainError("division by zero");
        st[sp - 1] /= d;
        break;
      }
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Op::Sqrt:
        if (st[sp - 1] < 0.0) throw DomainError("sqrt of negative value");
        st[sp - 1] = std::sqrt(st[sp - 1]);
        break;
      case Op::Atan2: {
        double x = st[--sp];
        st[sp - 1] = std::atan2(st[sp - 1], x);
        break;
      }
      case Op::Call: {
        const Call& c = calls_[static_cast<std::size_t>(in.arg)];
        sp -= c.nargs;
        st[sp] = c.fn(std::span<const double>(st + sp, static_cast<std::size_t>(c.nargs)));
        ++sp;
        break;
      }
    }
  }
  return sp > 0 ? st[sp - 1] : 0.0;
}

CompiledVector::CompiledVector(const std::vector<Expr>& exprs, const std::vector<std::string>& slots, const NumericEnv& env) {
  parts_.reserve(exprs.size());
  for (const auto& e : exprs) parts_.emplace_back(e, slots, env.constants, env.functions);
}

void CompiledVector::operator()(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i](x);
}

std::vector<double> CompiledVector::operator()(std::span<const double> x) const {
  std::vector<double> out(parts_.size());
  (*this)(x, out);
  return out;
}

double evaluate(const Expr& e, const std::map<std::string, double>& point, const FunctionTable& funcs) {
  CompiledExpr c(e, {}, point, funcs);
  return c({});
}

}  // namespace symflow
