#include <symflow/invariants.hpp>

#include <symflow/detail/ansatz.hpp>
#include <symflow/errors.hpp>
#include <symflow/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace symflow {

const char* to_string(CertificateGrade g) {
  switch (g) {
    case CertificateGrade::Symbolic: return "symbolic";
    case CertificateGrade::Numeric: return "numeric";
    case CertificateGrade::Vacuous: return "vacuous";
    case CertificateGrade::Inconclusive: return "inconclusive";
    case CertificateGrade::Failed: return "failed";
  }
  return "failed";
}

const char* to_string(ConditionalVerdict v) {
  switch (v) {
    case ConditionalVerdict::ConditionalSymmetry: return "conditional";
    case ConditionalVerdict::ConditionalOrbital: return "conditional_orbital";
    case ConditionalVerdict::Partial: return "partial";
    case ConditionalVerdict::None: return "none";
  }
  return "none";
}

namespace {

constexpr std::size_t kSamplePoints = 25;
constexpr std::uint64_t kSampleSeed = 0x5eed2024;

Polynomial along_field(const std::vector<Polynomial>& f, const Polynomial& p) {
  Polynomial out(p.variables());
  for (std::size_t j = 0; j < f.size(); ++j) out += f[j] * p.derivative(j);
  return out;
}

std::vector<Polynomial> basis_from(const std::vector<RationalVector>& kernel, const std::vector<std::string>& vars,
                                   const std::vector<Exponents>& monos) {
  std::vector<Polynomial> out;
  for (const auto& c : kernel) {
    Polynomial p(vars);
    for (std::size_t j = 0; j < monos.size(); ++j) p.add_term(monos[j], c[j]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

const char* to_string(Vanish v) {
  switch (v) {
    case Vanish::Symbolic: return "symbolic";
    case Vanish::Numeric: return "numeric";
    case Vanish::No: return "no";
    case Vanish::Unknown: return "unknown";
  }
  return "unknown";
}

Vanish vanishes_on(const Expr& e, const AlgebraicManifold& m, const NumericEnv& env,
                   const std::vector<std::vector<double>>* samples) {
  if (restrict_to(e, m).is_zero()) return Vanish::Symbolic;
  if (m.chart() && !m.chart()->empty() && reduce_modulo(e, m).remainder.is_zero()) return Vanish::Symbolic;
  std::vector<std::vector<double>> local;
  if (!samples) {
    try {
      local = sample_variety(m, env, kSamplePoints, kSampleSeed);
    } catch (const UnboundSymbol&) {
      return Vanish::Unknown;
    }
    samples = &local;
  }
  if (samples->empty()) return Vanish::Unknown;
  try {
    CompiledExpr fn(e, m.variables(), env.constants, env.functions);
    for (const auto& x : *samples) {
      double scale = 1.0;
      for (double v : x) scale = std::max(scale, std::fabs(v));
      if (!(std::fabs(fn(x)) <= 1e-8 * scale)) return Vanish::No;
    }
  } catch (const UnboundSymbol&) {
    return Vanish::Unknown;
  } catch (const DomainError&) {
    return Vanish::Unknown;
  }
  return Vanish::Numeric;
}

std::vector<Polynomial> find_first_integrals(const DynSystem& sys, int degree) {
  auto f = sys.polynomial_rhs();
  const auto& vars = sys.variables();
  auto monos = monomials_up_to(vars.size(), degree, 1);
  detail::LinearConditions lc(monos.size());
  for (std::size_t j = 0; j < monos.size(); ++j) lc.add(j, 0, along_field(f, Polynomial::monomial(vars, monos[j])));
  return basis_from(lc.nullspace(), vars, monos);
}

std::optional<DarbouxResult> verify_darboux(const DynSystem& sys, const Expr& P, const Rational& c) {
  Expr p = normalize(P);
  auto fv = free_variables(p);
  if (std::none_of(sys.variables().begin(), sys.variables().end(), [&](const std::string& v) { return fv.count(v) > 0; })) {
    throw DomainError("Darboux polynomial must be nonconstant");
  }
  Expr fp = sys.field().apply(p);
  DarbouxResult r{p, Expr(), c, false};
  if (fp.is_zero()) {
    r.trivial = true;
    return r;
  }
  Expr shifted = p - Expr(c);
  if (shifted.is_zero()) return std::nullopt;
  Expr q = fp / shifted;
  if (!free_variables(denominator(q)).empty()) return std::nullopt;
  try {
    ExprPoly::from_expr(q, sys.variables());
  } catch (const NotPolynomial&) {
    return std::nullopt;
  }
  r.q = q;
  return r;
}

namespace {

// Bilinear elimination for the Darboux conditions over an unknown ring U.
class BilinearSolver {
 public:
  BilinearSolver(std::vector<std::string> unknowns, DarbouxSearch& log) : vars_(std::move(unknowns)), log_(log) {}

  std::vector<RationalVector> solve(std::vector<Polynomial> eqs) {
    std::vector<Polynomial> values;
    for (std::size_t i = 0; i < vars_.size(); ++i) values.push_back(Polynomial::variable(vars_, i));
    recurse(std::move(eqs), std::move(values), 0);
    return solutions_;
  }

  bool set_free_to_zero() const { return free_zeroed_; }

 private:
  static constexpr int kMaxBranches = 512;

  void substitute_var(std::vector<Polynomial>& eqs, std::vector<Polynomial>& values, std::size_t v, const Polynomial& value) {
    std::vector<Polynomial> subst;
    for (std::size_t i = 0; i < vars_.size(); ++i) subst.push_back(i == v ? value : Polynomial::variable(vars_, i));
    for (auto& e : eqs) e = e.compose(subst);
    for (auto& x : values) x = x.compose(subst);
  }

  static std::optional<std::size_t> single_variable(const Polynomial& p) {
    std::optional<std::size_t> var;
    for (const auto& [e, c] : p.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (var && *var != i) return std::nullopt;
        var = i;
      }
    }
    return var;
  }

  static std::vector<Rational> rational_roots(const Polynomial& p, std::size_t v) {
    int deg = p.degree_in(v);
    std::vector<Rational> coef(static_cast<std::size_t>(deg) + 1, Rational(0));
    for (const auto& [e, c] : p.terms()) coef[static_cast<std::size_t>(e[v])] = c;
    Integer lcm = 1;
    for (const auto& c : coef) lcm = lcm * c.get_den() / gcd(lcm, c.get_den());
    std::vector<Integer> a;
    for (const auto& c : coef) a.push_back(Integer(c * lcm));
    std::vector<Rational> roots;
    std::size_t low = 0;
    while (low < a.size() && a[low] == 0) ++low;
    if (low > 0) roots.emplace_back(0);
    Integer a0 = abs(a[low]), an = abs(a.back());
    if (a0 > 1000000 || an > 1000000) return roots;
    auto divisors = [](const Integer& n) {
      std::vector<Integer> d;
      for (Integer k = 1; k * k <= n; ++k) {
        if (n % k == 0) {
          d.push_back(k);
          if (k * k != n) d.push_back(n / k);
        }
      }
      return d;
    };
    for (const auto& num : divisors(a0)) {
      for (const auto& den : divisors(an)) {
        for (int sign : {1, -1}) {
          Rational r(Integer(num * sign), den);
          r.canonicalize();
          Rational acc = 0;
          for (std::size_t k = a.size(); k-- > 0;) acc = acc * r + Rational(a[k]);
          if (acc == 0 && std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
        }
      }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
  }

  // An equation c v + rest = 0 where v occurs in no other term; linear equations first.
  std::optional<std::pair<std::size_t, std::size_t>> solvable(const std::vector<Polynomial>& eqs) const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    int best_degree = 0;
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const Polynomial& e = eqs[i];
      if (best && e.degree() >= best_degree) continue;
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (e.degree_in(v) != 1) continue;
        std::size_t uses = 0;
        bool bare = false;
        for (const auto& [ex, c] : e.terms()) {
          if (ex[v] == 0) continue;
          ++uses;
          bare = std::accumulate(ex.begin(), ex.end(), 0) == 1;
        }
        if (uses == 1 && bare) {
          best = std::make_pair(i, v);
          best_degree = e.degree();
          break;
        }
      }
    }
    return best;
  }

  void recurse(std::vector<Polynomial> eqs, std::vector<Polynomial> values, int depth) {
    if (++branches_ > kMaxBranches) {
      if (!capped_) log_.notes.push_back("branch limit reached");
      capped_ = true;
      log_.needs_hint = true;
      return;
    }
    while (true) {
      std::vector<Polynomial> kept;
      for (auto& e : eqs) {
        if (e.is_zero()) continue;
        if (e.is_constant()) return;
        kept.push_back(e.monic());
      }
      std::sort(kept.begin(), kept.end(), [](const Polynomial& a, const Polynomial& b) {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        return a.terms().size() < b.terms().size();
      });
      kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
      eqs = std::move(kept);
      if (eqs.empty()) break;
      auto pick = solvable(eqs);
      if (!pick) break;
      const Polynomial& e = eqs[pick->first];
      std::size_t v = pick->second;
      Exponents ev(vars_.size(), 0);
      ev[v] = 1;
      Rational a = e.coefficient(ev);
      Polynomial rest = e;
      rest.add_term(ev, -a);
      substitute_var(eqs, values, v, rest * Rational(-1 / a));
    }
    if (eqs.empty()) {
      RationalVector sol;
      std::vector<Rational> zero(vars_.size(), Rational(0));
      for (const auto& x : values) {
        if (!x.is_constant()) free_zeroed_ = true;
        sol.push_back(x.evaluate(std::span<const Rational>(zero)));
      }
      if (std::find(solutions_.begin(), solutions_.end(), sol) == solutions_.end()) solutions_.push_back(std::move(sol));
      return;
    }
    for (const auto& e : eqs) {
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        bool divides = std::all_of(e.terms().begin(), e.terms().end(), [&](const auto& t) { return t.first[v] > 0; });
        if (!divides) continue;
        auto branch = eqs;
        auto vals = values;
        substitute_var(branch, vals, v, Polynomial(vars_));
        recurse(std::move(branch), std::move(vals), depth + 1);
        auto reduced = exact_divide(e, Polynomial::variable(vars_, v));
        auto branch2 = eqs;
        std::replace(branch2.begin(), branch2.end(), e, *reduced);
        recurse(std::move(branch2), values, depth + 1);
        return;
      }
    }
    for (const auto& e : eqs) {
      auto v = single_variable(e);
      if (!v) continue;
      auto roots = rational_roots(e, *v);
      for (const auto& r : roots) {
        auto branch = eqs;
        auto vals = values;
        substitute_var(branch, vals, *v, Polynomial(vars_, r));
        recurse(std::move(branch), std::move(vals), depth + 1);
      }
      return;
    }
    log_.needs_hint = true;
    log_.notes.push_back("nonlinear residual conditions: " + eqs.front().str());
  }

  std::vector<std::string> vars_;
  DarbouxSearch& log_;
  std::vector<RationalVector> solutions_;
  int branches_ = 0;
  bool capped_ = false;
  bool free_zeroed_ = false;
};

}  // namespace

DarbouxSearch find_darboux(const DynSystem& sys, int deg_p, int deg_q, const std::optional<Expr>& cofactor_hint) {
  if (deg_p < 1 || deg_q < 0) throw Error("find_darboux needs deg_P >= 1 and deg_q >= 0");
  auto f = sys.polynomial_rhs();
  const auto& vars = sys.variables();
  DarbouxSearch out;
  auto add_result = [&](const Expr& P) {
    auto r = verify_darboux(sys, P, 0);
    if (!r) {
      out.notes.push_back("candidate failed verification: " + P.str());
      return;
    }
    for (const auto& prev : out.results) {
      if (prev.P == r->P) return;
    }
    out.results.push_back(*r);
  };

  if (cofactor_hint) {
    Polynomial hint = Polynomial::from_expr(substitute(*cofactor_hint, sys.parameter_values()), vars);
    auto monos = monomials_up_to(vars.size(), deg_p, hint.is_zero() ? 1 : 0);
    detail::LinearConditions lc(monos.size());
    for (std::size_t j = 0; j < monos.size(); ++j) {
      Polynomial m = Polynomial::monomial(vars, monos[j]);
      lc.add(j, 0, along_field(f, m) - hint * m);
    }
    for (const auto& p : basis_from(lc.nullspace(), vars, monos)) add_result(p.to_expr());
    return out;
  }

  auto p_monos = monomials_up_to(vars.size(), deg_p);
  auto q_monos = monomials_up_to(vars.size(), deg_q);
  for (std::size_t lead = 0; lead < p_monos.size(); ++lead) {
    const Exponents& L = p_monos[lead];
    if (std::accumulate(L.begin(), L.end(), 0) == 0) continue;
    std::vector<std::string> unknowns;
    std::vector<Exponents> free_p(p_monos.begin() + static_cast<long>(lead) + 1, p_monos.end());
    for (std::size_t j = 0; j < free_p.size(); ++j) unknowns.push_back("p" + std::to_string(j));
    for (std::size_t k = 0; k < q_monos.size(); ++k) unknowns.push_back("q" + std::to_string(k));
    const std::size_t nu = unknowns.size();
    auto unknown = [&](std::size_t i) { return Polynomial::variable(unknowns, i); };

    // Coefficient of each state monomial in f.grad(P) - q P, as a polynomial in the unknowns.
    std::map<Exponents, Polynomial, GrlexGreater> eq;
    auto accumulate_term = [&](const Polynomial& state, const Polynomial& coef) {
      for (const auto& [e, c] : state.terms()) {
        auto it = eq.try_emplace(e, Polynomial(unknowns)).first;
        it->second += coef * c;
      }
    };
    std::vector<std::pair<Exponents, Polynomial>> p_terms;
    p_terms.emplace_back(L, Polynomial(unknowns, 1));
    for (std::size_t j = 0; j < free_p.size(); ++j) p_terms.emplace_back(free_p[j], unknown(j));
    for (const auto& [m, coef] : p_terms) {
      Polynomial mono = Polynomial::monomial(vars, m);
      accumulate_term(along_field(f, mono), coef);
      for (std::size_t k = 0; k < q_monos.size(); ++k) {
        accumulate_term(Polynomial::monomial(vars, q_monos[k]) * mono, -(coef * unknown(free_p.size() + k)));
      }
    }
    std::vector<Polynomial> eqs;
    for (auto& [e, p] : eq) {
      if (!p.is_zero()) eqs.push_back(std::move(p));
    }
    BilinearSolver solver(unknowns, out);
    auto sols = solver.solve(std::move(eqs));
    if (solver.set_free_to_zero()) {
      out.notes.push_back("free coefficients set to 0 for leading monomial " + Polynomial::monomial(vars, L).str());
    }
    for (const auto& s : sols) {
      Polynomial P(vars);
      P.add_term(L, 1);
      for (std::size_t j = 0; j < free_p.size(); ++j) P.add_term(free_p[j], s[j]);
      (void)nu;
      add_result(P.to_expr());
    }
  }
  return out;
}

namespace {

VectorField with_values(const VectorField& v, const DynSystem& sys) {
  auto vals = sys.parameter_values();
  if (vals.empty()) return v;
  std::vector<Expr> comps;
  for (const auto& c : v.components()) comps.push_back(substitute(c, vals));
  std::optional<Expr> tau;
  if (v.tau()) tau = substitute(*v.tau(), vals);
  return VectorField(v.variables(), std::move(comps), std::move(tau));
}

AlgebraicManifold with_values(const AlgebraicManifold& m, const DynSystem& sys) {
  auto vals = sys.parameter_values();
  if (vals.empty() || m.is_whole_space()) return m;
  std::vector<Expr> gens;
  for (const auto& g : m.generator_exprs()) gens.push_back(substitute(g, vals));
  return AlgebraicManifold(m.variables(), gens, m.chart());
}

}  // namespace

InvarianceCertificate is_invariant_manifold(const DynSystem& system, const AlgebraicManifold& manifold,
                                            const NumericEnv& env) {
  const DynSystem sys = system.with_parameter_values();
  const AlgebraicManifold m = with_values(manifold, system);
  if (m.variables() != sys.variables()) throw Error("manifold and system have different variables");
  InvarianceCertificate cert;
  if (m.is_whole_space()) {
    cert.invariant = true;
    cert.grade = CertificateGrade::Symbolic;
    cert.method = "whole space";
    return cert;
  }
  if (m.is_trivially_empty()) {
    cert.invariant = true;
    cert.grade = CertificateGrade::Vacuous;
    cert.method = "empty";
    cert.warning = "variety is empty (constant generator)";
    return cert;
  }
  auto field = sys.field();
  std::vector<Expr> derivs;
  bool divided = true;
  for (const auto& g : m.generator_exprs()) {
    Expr fg = field.apply(g);
    derivs.push_back(fg);
    IdealReduction red = reduce_modulo(fg, m);
    cert.cofactors.push_back(red.quotients);
    cert.remainders.push_back(red.remainder);
    if (!red.remainder.is_zero()) divided = false;
  }
  if (divided) {
    cert.invariant = true;
    cert.grade = CertificateGrade::Symbolic;
    cert.method = "division";
    return cert;
  }
  if (m.chart() && !m.chart()->empty()) {
    bool chart_zero = std::all_of(derivs.begin(), derivs.end(), [&](const Expr& d) { return restrict_to(d, m).is_zero(); });
    if (chart_zero) {
      cert.invariant = true;
      cert.grade = CertificateGrade::Symbolic;
      cert.method = "chart";
      return cert;
    }
  }
  cert.method = "sampling";
  std::vector<std::vector<double>> pts;
  try {
    pts = sample_variety(m, env, kSamplePoints, kSampleSeed);
    cert.samples = pts.size();
    if (pts.empty()) {
      cert.invariant = true;
      cert.grade = CertificateGrade::Vacuous;
      cert.warning = "no real points found on the variety";
      return cert;
    }
    CompiledVector fd(derivs, m.variables(), env);
    CompiledVector ff(sys.rhs(), m.variables(), env);
    bool ok = true;
    for (const auto& x : pts) {
      auto vals = fd(x);
      auto fx = ff(x);
      double fnorm = 0;
      for (double v : fx) fnorm += v * v;
      double tol = 1e-9 * (1.0 + std::sqrt(fnorm));
      for (double v : vals) {
        cert.max_residual = std::max(cert.max_residual, std::fabs(v));
        if (!(std::fabs(v) <= tol)) ok = false;
      }
    }
    cert.invariant = ok;
    cert.grade = ok ? CertificateGrade::Numeric : CertificateGrade::Failed;
  } catch (const UnboundSymbol& e) {
    cert.invariant = false;
    cert.grade = CertificateGrade::Inconclusive;
    cert.warning = std::string("numeric fallback unavailable: ") + e.what();
  }
  return cert;
}

Refinement refine_generators(const DynSystem& system, const std::vector<Expr>& generators, int cap, const NumericEnv& env) {
  const DynSystem sys = system.with_parameter_values();
  const auto& vars = sys.variables();
  std::vector<Expr> gens;
  for (const auto& g : generators) gens.push_back(substitute(g, system.parameter_values()));
  Refinement r;
  r.manifold = AlgebraicManifold(vars, gens);
  auto field = sys.field();
  for (int it = 0; it < cap; ++it) {
    r.iterations = it + 1;
    if (r.manifold.is_trivially_empty()) return r;
    std::vector<Expr> fresh;
    std::optional<std::vector<std::vector<double>>> samples;
    for (const auto& g : r.manifold.generator_exprs()) {
      IdealReduction red = reduce_modulo(field.apply(g), r.manifold);
      if (red.remainder.is_zero()) continue;
      if (!samples) {
        try {
          samples = sample_variety(r.manifold, env, kSamplePoints, kSampleSeed);
        } catch (const UnboundSymbol&) {
          samples = std::vector<std::vector<double>>{};
        }
      }
      if (!samples->empty() && vanishes_on(red.remainder, r.manifold, env, &*samples) == Vanish::Numeric) continue;
      if (samples->empty() && !r.manifold.is_whole_space()) {
        // No real points: nothing left to refine.
        bool sampled_empty = true;
        try {
          sampled_empty = sample_variety(r.manifold, env, 1, kSampleSeed).empty();
        } catch (const UnboundSymbol&) {
          sampled_empty = false;
        }
        if (sampled_empty) return r;
      }
      fresh.push_back(red.remainder);
    }
    if (fresh.empty()) return r;
    for (const auto& e : fresh) {
      gens.push_back(e);
      r.added.push_back(e);
    }
    r.manifold = AlgebraicManifold(vars, gens);
  }
  r.capped = true;
  return r;
}

Refinement tangency_refinement(const DynSystem& sys, const VectorField& v, int cap) {
  if (v.has_tau()) throw Error("tangency refinement needs a tau-free field");
  if (v.variables() != sys.variables()) throw Error("vector field and system have different variables");
  return refine_generators(sys, v.components(), cap);
}

bool consists_of_equilibria(const DynSystem& sys, const AlgebraicManifold& m) {
  const DynSystem valued = sys.with_parameter_values();
  for (const auto& fi : valued.rhs()) {
    Vanish v = vanishes_on(fi, m, {});
    if (v != Vanish::Symbolic && v != Vanish::Numeric) return false;
  }
  return true;
}

namespace {

bool has_points(const AlgebraicManifold& m, const NumericEnv& env) {
  if (m.is_whole_space()) return true;
  if (m.is_trivially_empty()) return false;
  try {
    return !sample_variety(m, env, 1, kSampleSeed).empty();
  } catch (const UnboundSymbol&) {
    return true;
  }
}

// Refines, certifies and applies the equilibrium filter.
ConditionalReport classify_witness(const DynSystem& sys, const std::vector<Expr>& gens, ConditionalVerdict positive,
                                   const ConditionalOptions& opts) {
  ConditionalReport rep;
  rep.initial_generators = gens;
  Refinement ref;
  try {
    ref = refine_generators(sys, gens, kRefinementCap, opts.env);
  } catch (const NotPolynomial& e) {
    rep.note = std::string("locus is not algebraic in the state variables: ") + e.what();
    return rep;
  }
  rep.witness = ref.manifold;
  rep.iterations = ref.iterations;
  if (ref.capped) {
    rep.note = "tangency refinement reached the iteration cap";
    return rep;
  }
  if (!has_points(ref.manifold, opts.env)) {
    rep.note = "witness variety is empty";
    return rep;
  }
  rep.certificate = is_invariant_manifold(sys, ref.manifold, opts.env);
  if (!rep.certificate.invariant || rep.certificate.grade == CertificateGrade::Vacuous) {
    rep.note = "refined locus is not certified invariant";
    return rep;
  }
  if (consists_of_equilibria(sys, ref.manifold)) {
    if (opts.exclude_equilibria) {
      rep.note = "witness consists of equilibria only";
      return rep;
    }
    rep.note = "witness consists of equilibria";
  }
  rep.verdict = positive;
  return rep;
}

}  // namespace

ConditionalReport is_conditional_symmetry(const DynSystem& system, const VectorField& v, const ConditionalOptions& opts) {
  if (v.variables() != system.variables()) throw Error("vector field and system have different variables");
  const DynSystem sys = system.with_parameter_values();
  VectorField q = evolutionary_representative(with_values(v, system), sys);
  if (q.is_zero()) {
    ConditionalReport rep;
    rep.verdict = ConditionalVerdict::ConditionalSymmetry;
    rep.witness = AlgebraicManifold::whole_space(sys.variables());
    rep.trivial = true;
    rep.note = "evolutionary representative vanishes identically";
    return rep;
  }
  return classify_witness(sys, q.components(), ConditionalVerdict::ConditionalSymmetry, opts);
}

ConditionalReport is_conditional_orbital_symmetry(const DynSystem& system, const VectorField& v,
                                                  const ConditionalOptions& opts) {
  if (v.variables() != system.variables()) throw Error("vector field and system have different variables");
  const DynSystem sys = system.with_parameter_values();
  VectorField q = evolutionary_representative(with_values(v, system), sys);
  const auto& f = sys.rhs();
  std::vector<Expr> minors;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      Expr mij = f[i] * q.component(j) - f[j] * q.component(i);
      if (!mij.is_zero()) minors.push_back(mij);
    }
  }
  if (minors.empty()) {
    ConditionalReport rep;
    rep.verdict = ConditionalVerdict::ConditionalOrbital;
    rep.witness = AlgebraicManifold::whole_space(sys.variables());
    rep.trivial = true;
    rep.note = "v is collinear with f everywhere";
    return rep;
  }
  ConditionalReport cond = is_conditional_symmetry(system, v, opts);
  if (cond.verdict == ConditionalVerdict::ConditionalSymmetry) {
    cond.verdict = ConditionalVerdict::ConditionalOrbital;
    cond.note = "witness of the conditional symmetry (v vanishes there)";
    return cond;
  }
  return classify_witness(sys, minors, ConditionalVerdict::ConditionalOrbital, opts);
}

ConditionalReport is_partial_symmetry(const DynSystem& system, const VectorField& v, const AlgebraicManifold& m,
                                      const NumericEnv& env) {
  const DynSystem sys = system.with_parameter_values();
  if (v.variables() != sys.variables()) throw Error("vector field and system have different variables");
  ConditionalReport rep;
  rep.witness = with_values(m, system);
  rep.certificate = is_invariant_manifold(sys, rep.witness, env);
  if (!rep.certificate.invariant) throw Error("manifold is not invariant under the system");
  VectorField q = evolutionary_representative(with_values(v, system), sys);
  const AlgebraicManifold& mw = rep.witness;
  std::vector<Expr> bracket = lie_poisson(sys.rhs(), q.components(), sys.variables());
  bool ok = true;
  for (std::size_t i = 0; i < bracket.size(); ++i) {
    Expr b = bracket[i] + differentiate(q.component(i), kTime);
    rep.restricted_bracket.push_back(restrict_to(b, mw));
    Vanish z = vanishes_on(b, mw, env);
    if (z != Vanish::Symbolic && z != Vanish::Numeric) ok = false;
  }
  for (const auto& g : mw.generator_exprs()) {
    Expr t = q.apply(g);
    rep.tangency.push_back(restrict_to(t, mw));
    Vanish z = vanishes_on(t, mw, env);
    if (z != Vanish::Symbolic && z != Vanish::Numeric) ok = false;
  }
  if (ok) rep.verdict = ConditionalVerdict::Partial;
  else rep.note = "bracket or tangency does not vanish on the manifold";
  return rep;
}

std::vector<std::vector<Expr>> cofactor_matrix(const AlgebraicManifold& m) {
  std::vector<std::vector<Expr>> a;
  for (const auto& g : m.generator_exprs()) {
    std::vector<Expr> row;
    for (const auto& v : m.variables()) row.push_back(restrict_to(differentiate(g, v), m));
    a.push_back(std::move(row));
  }
  return a;
}

namespace {

// Coordinates of a field (reduced modulo the ideal) in the monomial basis.
RationalVector field_coordinates(const std::vector<Expr>& comps, const AlgebraicManifold& m,
                                 const std::vector<Exponents>& monos) {
  const auto& vars = m.variables();
  RationalVector out;
  for (const auto& c : comps) {
    Polynomial p = Polynomial::from_expr(restrict_to(c, m), vars);
    for (const auto& mono : monos) out.push_back(p.coefficient(mono));
  }
  return out;
}

}  // namespace

std::vector<VectorField> solve_tangent_fields(const AlgebraicManifold& m, int degree) {
  const auto& vars = m.variables();
  const std::size_t n = vars.size();
  std::vector<Polynomial> gens;
  for (const auto& g : m.generator_exprs()) gens.push_back(Polynomial::from_expr(g, vars));
  auto v_monos = monomials_up_to(n, degree);
  const std::size_t nv = n * v_monos.size();

  // v.grad(g_i) = sum_j h_ij g_j with polynomial multipliers h_ij.
  std::vector<std::vector<std::vector<Exponents>>> h_monos(gens.size());
  std::size_t nh = 0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    int top = degree + std::max(gens[i].degree() - 1, 0);
    for (std::size_t j = 0; j < gens.size(); ++j) {
      int dj = top - gens[j].degree();
      h_monos[i].push_back(dj >= 0 ? monomials_up_to(n, dj) : std::vector<Exponents>{});
      nh += h_monos[i].back().size();
    }
  }
  detail::LinearConditions lc(nv + nh);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::size_t u = 0;
    for (std::size_t k = 0; k < n; ++k) {
      Polynomial dg = gens[i].derivative(k);
      for (const auto& mono : v_monos) lc.add(u++, i, Polynomial::monomial(vars, mono) * dg);
    }
  }
  std::size_t u = nv;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = 0; j < gens.size(); ++j) {
      for (const auto& mono : h_monos[i][j]) lc.add(u++, i, -(Polynomial::monomial(vars, mono) * gens[j]));
    }
  }

  // Fields modulo the ideal, then a minimal set generating the rest by monomial multiples.
  std::vector<std::vector<Expr>> candidates;
  for (const auto& c : lc.nullspace()) {
    std::vector<Expr> comps;
    std::size_t w = 0;
    bool zero = true;
    for (std::size_t k = 0; k < n; ++k) {
      Polynomial p(vars);
      for (const auto& mono : v_monos) p.add_term(mono, c[w++]);
      Expr e = restrict_to(p.to_expr(), m);
      if (!e.is_zero()) zero = false;
      comps.push_back(e);
    }
    if (!zero) candidates.push_back(std::move(comps));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    auto deg = [&](const std::vector<Expr>& f) {
      int d = 0;
      for (const auto& e : f) d = std::max(d, Polynomial::from_expr(e, vars).degree());
      return d;
    };
    return deg(a) < deg(b);
  });
  auto monos_all = monomials_up_to(n, 2 * degree);
  RationalMatrix span;
  std::vector<VectorField> out;
  for (const auto& cand : candidates) {
    RationalVector coords = field_coordinates(cand, m, monos_all);
    RationalMatrix trial = span;
    trial.push_back(coords);
    if (rank(trial, coords.size()) == rank(span, coords.size())) continue;
    out.emplace_back(vars, cand);
    for (const auto& mono : monomials_up_to(n, degree)) {
      Expr factor = Polynomial::monomial(vars, mono).to_expr();
      std::vector<Expr> scaled;
      for (const auto& e : cand) scaled.push_back(e * factor);
      span.push_back(field_coordinates(scaled, m, monos_all));
    }
  }
  return out;
}

std::vector<Polynomial> characteristic_integrals(const VectorField& v, int degree) {
  if (v.has_tau()) throw Error("characteristic integrals need a tau-free field");
  const auto& vars = v.variables();
  std::vector<Polynomial> comps;
  for (const auto& c : v.components()) comps.push_back(Polynomial::from_expr(c, vars));
  auto monos = monomials_up_to(vars.size(), degree, 1);
  detail::LinearConditions lc(monos.size());
  for (std::size_t j = 0; j < monos.size(); ++j) lc.add(j, 0, along_field(comps, Polynomial::monomial(vars, monos[j])));
  return basis_from(lc.nullspace(), vars, monos);
}

}  // namespace symflow
