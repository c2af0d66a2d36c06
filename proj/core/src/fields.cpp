#include <symflow/fields.hpp>

#include <symflow/errors.hpp>
#include <symflow/evaluate.hpp>
#include <symflow/manifold.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace symflow {

namespace {

void check_unique(const std::vector<std::string>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!seen.insert(v).second) throw Error("duplicate variable '" + v + "'");
    if (v == kTime) throw Error("'t' is reserved for time and cannot be a state variable");
  }
}

}  // namespace

VectorField::VectorField(std::vector<std::string> vars, std::vector<Expr> components, std::optional<Expr> tau)
    : vars_(std::move(vars)), comps_(std::move(components)), tau_(std::move(tau)) {
  if (vars_.size() != comps_.size()) throw Error("vector field component count does not match variable count");
  for (auto& c : comps_) c = normalize(c);
  if (tau_) {
    tau_ = normalize(*tau_);
    if (tau_->is_zero()) tau_.reset();
  }
}

VectorField VectorField::zero(std::vector<std::string> vars) {
  std::vector<Expr> comps(vars.size());
  return VectorField(std::move(vars), std::move(comps));
}

VectorField VectorField::time_translation(std::vector<std::string> vars) {
  std::vector<Expr> comps(vars.size());
  return VectorField(std::move(vars), std::move(comps), Expr(1));
}

bool VectorField::is_zero() const {
  return !has_tau() && std::all_of(comps_.begin(), comps_.end(), [](const Expr& c) { return c.is_zero(); });
}

bool VectorField::depends_on_time() const {
  auto uses_t = [](const Expr& e) { return free_variables(e).count(kTime) > 0; };
  return std::any_of(comps_.begin(), comps_.end(), uses_t) || (tau_ && uses_t(*tau_));
}

Expr VectorField::apply(const Expr& h) const {
  Expr sum;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!comps_[i].is_zero()) sum = sum + comps_[i] * differentiate(h, vars_[i]);
  }
  if (has_tau()) sum = sum + *tau_ * differentiate(h, kTime);
  return sum;
}

VectorField VectorField::scaled(const Expr& factor) const {
  std::vector<Expr> comps;
  for (const auto& c : comps_) comps.push_back(c * factor);
  std::optional<Expr> tau;
  if (tau_) tau = *tau_ * factor;
  return VectorField(vars_, std::move(comps), tau);
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.vars_ != b.vars_) throw Error("vector fields over different variables");
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < a.comps_.size(); ++i) comps.push_back(a.comps_[i] + b.comps_[i]);
  std::optional<Expr> tau;
  if (a.tau_ || b.tau_) tau = a.tau_.value_or(Expr()) + b.tau_.value_or(Expr());
  return VectorField(a.vars_, std::move(comps), tau);
}

VectorField operator-(const VectorField& a, const VectorField& b) { return a + b.scaled(Expr(-1)); }

bool operator==(const VectorField& a, const VectorField& b) {
  if (a.vars_ != b.vars_ || a.comps_ != b.comps_) return false;
  return a.tau_.value_or(Expr()) == b.tau_.value_or(Expr());
}

std::string VectorField::str() const {
  std::string out;
  if (has_tau()) out += "dt: " + tau_->str();
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (!out.empty()) out += ", ";
    out += "d" + vars_[i] + ": " + comps_[i].str();
  }
  return out;
}

DynSystem::DynSystem(std::vector<std::string> vars, std::vector<Expr> rhs, std::vector<Parameter> params,
                     std::map<std::string, int> functions)
    : vars_(std::move(vars)), rhs_(std::move(rhs)), params_(std::move(params)), funcs_(std::move(functions)) {
  check_unique(vars_);
  if (vars_.size() != rhs_.size()) throw Error("system needs exactly one equation per variable");
  for (auto& r : rhs_) {
    r = normalize(r);
    if (free_variables(r).count(kTime)) throw Error("system right-hand side depends on t: " + r.str());
    for (const auto& v : free_variables(r)) {
      if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) throw UnknownVariable(v);
    }
    for (const auto& [name, arity] : formal_functions(r)) {
      auto [it, inserted] = funcs_.emplace(name, arity);
      if (!inserted && it->second != arity) throw Error("arity mismatch for '" + name + "'");
    }
    for (const auto& p : free_parameters(r)) {
      if (std::none_of(params_.begin(), params_.end(), [&](const Parameter& q) { return q.name == p; })) {
        params_.push_back({p, std::nullopt});
      }
    }
  }
}

std::map<std::string, Expr> DynSystem::parameter_values() const {
  std::map<std::string, Expr> out;
  for (const auto& p : params_) {
    if (p.value) out[p.name] = Expr(*p.value);
  }
  return out;
}

std::map<std::string, double> DynSystem::numeric_parameters() const {
  std::map<std::string, double> out;
  for (const auto& p : params_) {
    if (p.value) out[p.name] = p.value->get_d();
  }
  return out;
}

DynSystem DynSystem::with_parameter_values() const {
  auto values = parameter_values();
  if (values.empty()) return *this;
  std::vector<Expr> rhs;
  for (const auto& r : rhs_) rhs.push_back(substitute(r, values));
  std::vector<Parameter> params;
  for (const auto& p : params_) {
    if (!p.value) params.push_back(p);
  }
  std::map<std::string, int> funcs;
  for (const auto& r : rhs) {
    for (const auto& [n, a] : formal_functions(r)) funcs[n] = a;
  }
  return DynSystem(vars_, std::move(rhs), std::move(params), std::move(funcs));
}

std::vector<Polynomial> DynSystem::polynomial_rhs() const {
  DynSystem s = with_parameter_values();
  std::vector<Polynomial> out;
  for (const auto& r : s.rhs_) out.push_back(Polynomial::from_expr(r, vars_));
  return out;
}

bool operator==(const DynSystem& a, const DynSystem& b) {
  return a.vars_ == b.vars_ && a.rhs_ == b.rhs_ && a.params_ == b.params_ && a.funcs_ == b.funcs_;
}

std::vector<Expr> lie_poisson(const std::vector<Expr>& f, const std::vector<Expr>& s, const std::vector<std::string>& vars) {
  if (f.size() != s.size() || f.size() != vars.size()) throw Error("lie_poisson: length mismatch");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Expr sum;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (!f[j].is_zero()) sum = sum + f[j] * differentiate(s[i], vars[j]);
      if (!s[j].is_zero()) sum = sum - s[j] * differentiate(f[i], vars[j]);
    }
    out.push_back(sum);
  }
  return out;
}

VectorField lie_bracket(const VectorField& a, const VectorField& b) {
  if (a.variables() != b.variables()) throw Error("lie_bracket: variable-list mismatch");
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < a.dimension(); ++i) comps.push_back(a.apply(b.component(i)) - b.apply(a.component(i)));
  std::optional<Expr> tau;
  if (a.tau() || b.tau()) tau = a.apply(b.tau().value_or(Expr())) - b.apply(a.tau().value_or(Expr()));
  return VectorField(a.variables(), std::move(comps), tau);
}

VectorField evolutionary_representative(const VectorField& v, const DynSystem& sys) {
  if (v.variables() != sys.variables()) throw Error("evolutionary_representative: variable-list mismatch");
  if (!v.has_tau()) return VectorField(v.variables(), v.components());
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < v.dimension(); ++i) comps.push_back(v.component(i) - *v.tau() * sys.rhs()[i]);
  return VectorField(v.variables(), std::move(comps));
}

std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& exprs, const std::vector<std::string>& vars) {
  std::vector<std::vector<Expr>> out;
  for (const auto& e : exprs) {
    std::vector<Expr> row;
    for (const auto& v : vars) row.push_back(differentiate(e, v));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Expr> solve_linear(std::vector<std::vector<Expr>> a, std::vector<Expr> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c].is_zero()) ++p;
    if (p == n) throw DomainError("singular Jacobian");
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      Expr f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] = a[r][k] - f * a[c][k];
      b[r] = b[r] - f * b[c];
    }
  }
  std::vector<Expr> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(b[i] / a[i][i]);
  return x;
}

InvertibilityCheck check_invertible(const CoordinateMap& m, const std::map<std::string, double>& params) {
  const std::size_t n = m.to_vars.size();
  if (m.forward.size() != n || m.inverse.size() != m.from_vars.size() || m.from_vars.size() != n) {
    return InvertibilityCheck::Failed;
  }
  std::map<std::string, Expr> sub;
  for (std::size_t i = 0; i < n; ++i) sub[m.from_vars[i]] = m.inverse[i];
  std::vector<Expr> composed;
  bool symbolic = true;
  for (std::size_t i = 0; i < n; ++i) {
    composed.push_back(substitute(m.forward[i], sub));
    if (composed.back() != Expr::variable(m.to_vars[i])) symbolic = false;
  }
  if (symbolic) return InvertibilityCheck::Symbolic;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dist(0.2, 1.2);
  for (int s = 0; s < 20; ++s) {
    std::map<std::string, double> point = params;
    for (const auto& w : m.to_vars) point[w] = dist(rng);
    for (std::size_t i = 0; i < n; ++i) {
      double value;
      try {
        value = evaluate(composed[i], point);
      } catch (const DomainError&) {
        return InvertibilityCheck::Failed;
      }
      double want = point[m.to_vars[i]];
      if (!(std::fabs(value - want) <= 1e-9 * (1.0 + std::fabs(want)))) return InvertibilityCheck::Failed;
    }
  }
  return InvertibilityCheck::Numeric;
}

CoordinateMap compose(const CoordinateMap& m1, const CoordinateMap& m2) {
  if (m1.to_vars != m2.from_vars) throw Error("compose: intermediate variables do not match");
  CoordinateMap out;
  out.from_vars = m1.from_vars;
  out.to_vars = m2.to_vars;
  std::map<std::string, Expr> fwd, inv;
  for (std::size_t i = 0; i < m1.to_vars.size(); ++i) fwd[m1.to_vars[i]] = m1.forward[i];
  for (std::size_t i = 0; i < m2.from_vars.size(); ++i) inv[m2.from_vars[i]] = m2.inverse[i];
  for (const auto& e : m2.forward) out.forward.push_back(substitute(e, fwd));
  for (const auto& e : m1.inverse) out.inverse.push_back(substitute(e, inv));
  return out;
}

PushforwardResult pushforward(const DynSystem& sys, const CoordinateMap& m) {
  if (m.from_vars != sys.variables()) throw Error("pushforward: map source variables differ from the system's");
  PushforwardResult out;
  out.invertibility = check_invertible(m, sys.numeric_parameters());
  if (out.invertibility == InvertibilityCheck::Failed) throw DomainError("coordinate map is not invertible");
  std::map<std::string, Expr> sub;
  for (std::size_t i = 0; i < m.from_vars.size(); ++i) sub[m.from_vars[i]] = m.inverse[i];
  std::vector<Expr> fx;
  for (const auto& r : sys.rhs()) fx.push_back(substitute(r, sub));
  std::vector<Expr> w = solve_linear(jacobian(m.inverse, m.to_vars), fx);
  std::set<std::string> used;
  for (const auto& e : w) {
    auto fv = free_variables(e);
    used.insert(fv.begin(), fv.end());
  }
  for (std::size_t j = 0; j < m.to_vars.size(); ++j) {
    if (!used.count(m.to_vars[j])) out.absent_variables.push_back(m.to_vars[j]);
    if (w[j].is_zero()) out.constant_variables.push_back(m.to_vars[j]);
  }
  out.system = DynSystem(m.to_vars, std::move(w), sys.parameters());
  return out;
}

RestrictionResult restrict(const DynSystem& sys, const AlgebraicManifold& m) {
  if (m.variables() != sys.variables()) throw Error("restrict: manifold variables differ from the system's");
  if (m.is_whole_space() && !m.chart()) return RestrictionResult{sys, true};
  if (!m.chart()) throw Error("restrict: manifold has no chart");
  auto sub = m.chart()->substitution();
  std::vector<std::string> keep = m.chart_variables();
  std::vector<Expr> rhs;
  std::map<std::string, Expr> restricted;
  for (std::size_t i = 0; i < sys.dimension(); ++i) restricted[sys.variables()[i]] = substitute(sys.rhs()[i], sub);
  for (const auto& v : keep) rhs.push_back(restricted[v]);
  RestrictionResult out{DynSystem(keep, rhs, sys.parameters()), true};
  for (const auto& [name, e] : m.chart()->solved) {
    Expr flow;
    for (const auto& v : keep) flow = flow + differentiate(e, v) * restricted[v];
    if (flow != restricted[name]) out.consistent_with_flow = false;
  }
  return out;
}

}  // namespace symflow
