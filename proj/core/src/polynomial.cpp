#include <symflow/polynomial.hpp>

#include <symflow/detail/ratfun.hpp>
#include <symflow/errors.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace symflow {

int grlex_compare(const Exponents& a, const Exponents& b) {
  int da = std::accumulate(a.begin(), a.end(), 0);
  int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db ? -1 : 1;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

Polynomial::Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

Polynomial::Polynomial(std::vector<std::string> vars, const Rational& c) : vars_(std::move(vars)) {
  if (c != 0) terms_.emplace(Exponents(vars_.size(), 0), c);
}

Polynomial Polynomial::variable(std::vector<std::string> vars, std::size_t index) {
  Exponents e(vars.size(), 0);
  e.at(index) = 1;
  return monomial(std::move(vars), std::move(e), 1);
}

Polynomial Polynomial::monomial(std::vector<std::string> vars, Exponents e, const Rational& c) {
  if (e.size() != vars.size()) throw std::invalid_argument("exponent length does not match variables");
  Polynomial p(std::move(vars));
  if (c != 0) p.terms_.emplace(std::move(e), c);
  return p;
}

Polynomial Polynomial::from_expr(const Expr& e, const std::vector<std::string>& vars) {
  auto rf = detail::ratfun_of(e);
  if (!rf->den.is_constant()) throw NotPolynomial("expression is not polynomial: " + e.str());
  Rational scale = 1 / rf->den.constant();
  Polynomial p(vars);
  for (const auto& term : rf->num.terms) {
    Exponents ex(vars.size(), 0);
    for (const auto& [atom, k] : term.mono.factors) {
      if (atom->kind != detail::Atom::Kind::Variable) {
        const char* what = atom->kind == detail::Atom::Kind::Parameter ? "unbound parameter '" : "non-polynomial factor '";
        throw NotPolynomial(what + atom->name + "' in " + e.str());
      }
      auto it = std::find(vars.begin(), vars.end(), atom->name);
      if (it == vars.end()) throw NotPolynomial("unexpected variable '" + atom->name + "' in " + e.str());
      if (k < 0) throw NotPolynomial("negative power in " + e.str());
      ex[static_cast<std::size_t>(it - vars.begin())] = k;
    }
    p.add_term(ex, term.coef * scale);
  }
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const auto& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
}

Rational Polynomial::constant_term() const { return coefficient(Exponents(vars_.size(), 0)); }

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  const auto& e = terms_.begin()->first;
  return std::accumulate(e.begin(), e.end(), 0);
}

int Polynomial::degree_in(std::size_t var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

const Exponents& Polynomial::leading_exponents() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
  return terms_.begin()->first;
}

const Rational& Polynomial::leading_coefficient() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
  return terms_.begin()->second;
}

Rational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::check_compatible(const Polynomial& o) const {
  if (vars_ != o.vars_) {
    if (vars_.empty() && terms_.empty()) return;
    if (o.vars_.empty() && o.terms_.empty()) return;
    throw std::invalid_argument("polynomials over different variable lists");
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_compatible(o);
  if (vars_.empty()) vars_ = o.vars_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_compatible(o);
  if (vars_.empty()) vars_ = o.vars_;
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial r(a.vars_.empty() ? b.vars_ : a.vars_);
  Exponents e(r.vars_.size());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (a.terms_.empty() && b.terms_.empty()) return true;
  return a.vars_ == b.vars_ && a.terms_ == b.terms_;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result(vars_, 1);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, c * e[var]);
  }
  return r;
}

Polynomial Polynomial::monic() const {
  if (terms_.empty()) return *this;
  Polynomial r = *this;
  r *= Rational(1) / leading_coefficient();
  return r;
}

Polynomial Polynomial::remap(const std::vector<std::string>& vars) const {
  std::vector<std::size_t> index(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), vars_[i]);
    bool used = std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first[i] != 0; });
    if (it == vars.end()) {
      if (used) throw std::invalid_argument("variable '" + vars_[i] + "' missing from target list");
      index[i] = vars.size();
    } else {
      index[i] = static_cast<std::size_t>(it - vars.begin());
    }
  }
  Polynomial r(vars);
  for (const auto& [e, c] : terms_) {
    Exponents ne(vars.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) ne[index[i]] = e[i];
    }
    r.add_term(ne, c);
  }
  return r;
}

double Polynomial::evaluate(std::span<const double> point) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= std::pow(point[i], e[i]);
    }
    sum += t;
  }
  return sum;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::compose(std::span<const Polynomial> values) const {
  if (values.size() != vars_.size()) throw std::invalid_argument("compose: wrong number of values");
  std::vector<std::string> target = values.empty() ? std::vector<std::string>{} : values.front().variables();
  Polynomial r(target);
  for (const auto& [e, c] : terms_) {
    Polynomial t(target, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t *= values[i].pow(e[i]);
    }
    r += t;
  }
  return r;
}

Expr Polynomial::to_expr() const {
  Expr sum;
  for (const auto& [e, c] : terms_) {
    Expr t(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) t = t * symflow::pow(Expr::variable(vars_[i]), e[i]);
    }
    sum = sum + t;
  }
  return sum;
}

std::string Polynomial::str() const { return to_expr().str(); }

std::optional<Polynomial> exact_divide(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw DomainError("division by zero polynomial");
  Polynomial divisors[] = {den};
  DivisionResult r = divide(num, divisors);
  if (!r.remainder.is_zero()) return std::nullopt;
  return r.quotients.front();
}

DivisionResult divide(const Polynomial& p, std::span<const Polynomial> divisors) {
  DivisionResult out;
  const auto& vars = p.variables();
  for (const auto& d : divisors) {
    if (d.is_zero()) throw DomainError("division by zero polynomial");
    out.quotients.emplace_back(d.variables());
  }
  out.remainder = Polynomial(vars);
  Polynomial rest = p;
  while (!rest.is_zero()) {
    const Exponents lm = rest.leading_exponents();
    const Rational lc = rest.leading_coefficient();
    bool reduced = false;
    for (std::size_t i = 0; i < divisors.size(); ++i) {
      const Exponents& dm = divisors[i].leading_exponents();
      bool divides = true;
      for (std::size_t k = 0; k < lm.size(); ++k) {
        if (dm[k] > lm[k]) {
          divides = false;
          break;
        }
      }
      if (!divides) continue;
      Exponents qe(lm.size());
      for (std::size_t k = 0; k < lm.size(); ++k) qe[k] = lm[k] - dm[k];
      Rational qc = lc / divisors[i].leading_coefficient();
      Polynomial q = Polynomial::monomial(vars, qe, qc);
      out.quotients[i] += q;
      rest -= q * divisors[i];
      reduced = true;
      break;
    }
    if (!reduced) {
      out.remainder.add_term(lm, lc);
      rest.add_term(lm, -lc);
    }
  }
  return out;
}

namespace {

bool involves(const Polynomial& p, std::size_t k) {
  return std::any_of(p.terms().begin(), p.terms().end(), [k](const auto& t) { return t.first[k] != 0; });
}

std::map<int, Polynomial> split(const Polynomial& p, std::size_t k) {
  std::map<int, Polynomial> out;
  for (const auto& [e, c] : p.terms()) {
    Exponents r = e;
    r[k] = 0;
    auto it = out.try_emplace(e[k], Polynomial(p.variables())).first;
    it->second.add_term(r, c);
  }
  return out;
}

Polynomial lc_in(const Polynomial& p, std::size_t k) {
  int d = p.degree_in(k);
  Polynomial out(p.variables());
  for (const auto& [e, c] : p.terms()) {
    if (e[k] != d) continue;
    Exponents r = e;
    r[k] = 0;
    out.add_term(r, c);
  }
  return out;
}

Polynomial shift(const Polynomial& p, std::size_t k, int by) {
  Polynomial out(p.variables());
  for (const auto& [e, c] : p.terms()) {
    Exponents r = e;
    r[k] += by;
    out.add_term(r, c);
  }
  return out;
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b);

Polynomial content_in(const Polynomial& p, std::size_t k) {
  Polynomial g(p.variables());
  for (auto& [d, coef] : split(p, k)) {
    g = gcd_impl(g, coef);
    if (g.is_constant()) break;
  }
  return g;
}

Polynomial prem(const Polynomial& a, const Polynomial& b, std::size_t k) {
  Polynomial r = a;
  const int db = b.degree_in(k);
  const Polynomial lb = lc_in(b, k);
  while (!r.is_zero() && r.degree_in(k) >= db) {
    int dr = r.degree_in(k);
    Polynomial lr = lc_in(r, k);
    r = lb * r - shift(lr * b, k, dr - db);
  }
  return r;
}

Polynomial primitive(const Polynomial& p, std::size_t k) {
  Polynomial c = content_in(p, k);
  if (c.is_constant()) return p.monic();
  return exact_divide(p, c)->monic();
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  const auto& vars = a.variables();
  if (a.is_constant() || b.is_constant()) return Polynomial(vars, 1);
  std::size_t k = 0;
  while (k < vars.size() && !involves(a, k) && !involves(b, k)) ++k;
  if (!involves(a, k)) return gcd_impl(a, content_in(b, k));
  if (!involves(b, k)) return gcd_impl(content_in(a, k), b);
  Polynomial ca = content_in(a, k);
  Polynomial cb = content_in(b, k);
  Polynomial c = gcd_impl(ca, cb);
  Polynomial pa = ca.is_constant() ? a.monic() : exact_divide(a, ca)->monic();
  Polynomial pb = cb.is_constant() ? b.monic() : exact_divide(b, cb)->monic();
  if (pa.degree_in(k) < pb.degree_in(k)) std::swap(pa, pb);
  while (true) {
    Polynomial r = prem(pa, pb, k);
    if (r.is_zero()) break;
    if (!involves(r, k)) return c;
    pa = std::move(pb);
    pb = primitive(r, k);
  }
  return (c * pb).monic();
}

// p with every variable except k replaced by values[j]; a polynomial in vars[k] alone.
Polynomial image(const Polynomial& p, std::size_t k, const std::vector<Rational>& values) {
  Polynomial out({p.variables()[k]});
  for (const auto& [e, c] : p.terms()) {
    Rational v = c;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (j == k) continue;
      for (int i = 0; i < e[j]; ++i) v *= values[j];
    }
    out.add_term({e[k]}, v);
  }
  return out;
}

// Proves gcd(a, b) constant: an image gcd of degree 0 in x_k, taken where the leading
// coefficients in x_k survive, bounds the degree of the true gcd in x_k by 0.
bool coprime_by_images(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = a.nvars();
  for (std::size_t k = 0; k < n; ++k) {
    if (!involves(a, k) || !involves(b, k)) continue;
    const int da = a.degree_in(k), db = b.degree_in(k);
    bool settled = false;
    for (int attempt = 0; attempt < 3 && !settled; ++attempt) {
      std::vector<Rational> values(n);
      for (std::size_t j = 0; j < n; ++j) values[j] = Rational(static_cast<long>(2 + 3 * j + 7 * attempt + k) % 23 + 2);
      Polynomial ia = image(a, k, values), ib = image(b, k, values);
      if (ia.degree() != da || ib.degree() != db) continue;
      if (!gcd_impl(ia, ib).is_constant()) return false;
      settled = true;
    }
    if (!settled) return false;
  }
  return true;
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  if (a.variables() != b.variables() && !a.is_zero() && !b.is_zero())
    throw std::invalid_argument("gcd: polynomials over different variable lists");
  if (a.is_zero() || b.is_zero() || a.is_constant() || b.is_constant()) return gcd_impl(a, b);
  if (exact_divide(a, b)) return b.monic();
  if (exact_divide(b, a)) return a.monic();
  if (a.nvars() > 1 && coprime_by_images(a, b)) return Polynomial(a.variables(), 1);
  return gcd_impl(a, b);
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, int max_degree, int min_degree) {
  std::vector<Exponents> out;
  Exponents e(nvars, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == nvars) {
      e[i] = left;
      out.push_back(e);
      return;
    }
    for (int k = left; k >= 0; --k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
  };
  for (int d = max_degree; d >= std::max(min_degree, 0); --d) {
    if (nvars == 0) {
      if (d == 0) out.push_back(e);
      continue;
    }
    rec(0, d);
  }
  return out;
}

}  // namespace symflow
