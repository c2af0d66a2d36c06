#include <symflow/tools/job.hpp>

#include <symflow/errors.hpp>
#include <symflow/evaluate.hpp>
#include <symflow/invariants.hpp>
#include <symflow/localgeom.hpp>
#include <symflow/numeric.hpp>
#include <symflow/polynomial.hpp>
#include <symflow/symmetry.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace symflow::tools {

namespace {

class Args {
 public:
  Args(const CheckSpec& spec, const AnalysisJob& job) : spec_(spec), job_(job) {}

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : spec_.args) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
  std::string str(const std::string& key) const {
    auto v = get(key);
    if (!v) throw JobError("missing argument '" + key + "'");
    return *v;
  }
  double number(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? parse_number(*v) : fallback;
  }
  int integer(const std::string& key, int fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t pos = 0;
      int out = std::stoi(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return out;
    } catch (const std::exception&) {
      throw JobError("argument '" + key + "' must be an integer");
    }
  }
  bool boolean(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw JobError("argument '" + key + "' must be true or false");
  }
  std::vector<double> numbers(const std::string& key) const { return parse_number_list(str(key)); }
  Expr expr(const std::string& key, bool allow_time = false) const {
    return parse_expression(str(key), job_.context(allow_time));
  }
  std::vector<Expr> exprs(const std::string& key) const { return parse_expression_list(str(key), job_.context()); }

  bool bound() const { return boolean("bound", false); }
  DynSystem system() const { return bound() ? job_.bound_system() : job_.system; }
  VectorField field(const std::string& key = "field") const {
    return bound() ? job_.bound_field(str(key)) : job_.fields.at(str(key));
  }
  AlgebraicManifold manifold() const {
    return bound() ? job_.bound_manifold(str("manifold")) : job_.manifolds.at(str("manifold"));
  }
  std::vector<double> x0() const {
    if (auto v = get("x0")) return parse_number_list(*v);
    if (!job_.x0.empty()) return job_.x0;
    throw JobError("no x0 given for a numeric check");
  }
  const AnalysisJob& job() const { return job_; }

 private:
  const CheckSpec& spec_;
  const AnalysisJob& job_;
};

// Result of one check before the pass decision.
struct Outcome {
  std::string verdict;
  bool positive = false;
};

using Runner = std::function<Outcome(const Args&, Json&)>;

std::string s(const Expr& e) { return e.str(); }

Json expr_list(const std::vector<Expr>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(e.str());
  return out;
}

Json field_json(const VectorField& v) {
  Json out = Json::object();
  if (v.tau()) out["dt"] = v.tau()->str();
  for (std::size_t i = 0; i < v.dimension(); ++i) out["d" + v.variables()[i]] = v.component(i).str();
  return out;
}

Json manifold_json(const AlgebraicManifold& m) {
  Json out = Json::object();
  out["generators"] = expr_list(m.generator_exprs());
  if (m.chart() && !m.chart()->empty()) {
    Json c = Json::object();
    for (const auto& [k, v] : m.chart()->solved) c[k] = v.str();
    out["chart"] = c;
  }
  return out;
}

Json system_json(const DynSystem& sys) {
  Json out = Json::object();
  out["variables"] = sys.variables();
  Json rhs = Json::object();
  for (std::size_t i = 0; i < sys.dimension(); ++i) rhs[sys.variables()[i]] = sys.rhs()[i].str();
  out["rhs"] = rhs;
  Json params = Json::object();
  for (const auto& p : sys.parameters()) params[p.name] = p.value ? Json(to_string(*p.value)) : Json(nullptr);
  out["parameters"] = params;
  return out;
}

Json matrix_json(const std::vector<std::vector<Expr>>& m) {
  Json out = Json::array();
  for (const auto& row : m) out.push_back(expr_list(row));
  return out;
}

bool equals_check(const Args& a, const Expr& result, Json& out) {
  auto eq = a.get("equals");
  if (!eq) return true;
  Expr want = parse_expression(*eq, a.job().context(true));
  bool ok = want == result;
  out["equals"] = ok;
  return ok;
}

bool equals_field(const Args& a, const VectorField& result, Json& out) {
  auto eq = a.get("equals");
  if (!eq) return true;
  VectorField want = parse_vector_field(*eq, result.variables());
  bool ok = want == result;
  out["equals"] = ok;
  return ok;
}

// "x=1, y=2"
std::map<std::string, double> point_map(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw JobError("point must look like x=1, y=2");
    std::string k = item.substr(0, eq);
    k.erase(std::remove_if(k.begin(), k.end(), ::isspace), k.end());
    out[k] = parse_number(item.substr(eq + 1));
  }
  return out;
}

FixedPoint point_arg(const DynSystem& sys, const std::string& text) {
  FixedPoint p;
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    items.push_back(item);
  }
  if (items.size() != sys.dimension()) throw JobError("point has the wrong dimension");
  std::vector<Rational> q;
  bool rational = true;
  for (const auto& it : items) {
    try {
      q.push_back(parse_rational(it));
    } catch (const std::exception&) {
      rational = false;
      break;
    }
  }
  if (rational) {
    std::map<std::string, Expr> vals;
    for (std::size_t i = 0; i < q.size(); ++i) vals.emplace(sys.variables()[i], Expr(q[i]));
    const DynSystem valued = sys.with_parameter_values();
    bool zero = std::all_of(valued.rhs().begin(), valued.rhs().end(),
                            [&](const Expr& e) { return substitute(e, vals).is_zero(); });
    for (const auto& v : q) p.location.push_back(to_double(v));
    if (zero) p.exact = q;
  } else {
    p.location = parse_number_list(text);
  }
  // Isolation from the fixed-point search when the point is found there.
  try {
    auto found = find_fixed_points(sys);
    for (const auto& fp : found.points) {
      double d = 0.0;
      for (std::size_t i = 0; i < p.location.size(); ++i) d = std::max(d, std::fabs(fp.location[i] - p.location[i]));
      if (d <= 1e-8) {
        p.isolated = fp.isolated;
        p.isolation_note = fp.isolation_note;
        if (!p.exact && fp.exact) p.exact = fp.exact;
      }
    }
  } catch (const Error&) {
  }
  return p;
}

Json fixed_point_json(const FixedPoint& p) {
  Json out = Json::object();
  if (p.exact) {
    Json ex = Json::array();
    for (const auto& q : *p.exact) ex.push_back(to_string(q));
    out["exact"] = ex;
  }
  out["location"] = p.location;
  out["residual"] = p.residual;
  out["isolated"] = p.isolated;
  out["isolation_note"] = p.isolation_note;
  return out;
}

Json verification_json(const VerificationReport& r) {
  Json out = Json::object();
  out["check"] = r.check;
  out["max_residual"] = r.max_residual;
  out["tolerance"] = r.tolerance;
  out["pass"] = r.pass;
  Json d = Json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = v;
  out["diagnostics"] = d;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

Json certificate_json(const InvarianceCertificate& c) {
  Json out = Json::object();
  out["invariant"] = c.invariant;
  out["grade"] = to_string(c.grade);
  out["method"] = c.method;
  if (!c.cofactors.empty()) out["cofactors"] = matrix_json(c.cofactors);
  if (!c.remainders.empty()) out["remainders"] = expr_list(c.remainders);
  if (c.samples) out["samples"] = c.samples;
  if (c.method == "sampling") out["max_residual"] = c.max_residual;
  if (!c.warning.empty()) out["warning"] = c.warning;
  return out;
}

Json conditional_json(const ConditionalReport& r) {
  Json out = Json::object();
  out["witness"] = manifold_json(r.witness);
  out["initial_generators"] = expr_list(r.initial_generators);
  out["certificate"] = certificate_json(r.certificate);
  if (!r.restricted_bracket.empty()) out["restricted_bracket"] = expr_list(r.restricted_bracket);
  if (!r.tangency.empty()) out["tangency"] = expr_list(r.tangency);
  out["iterations"] = r.iterations;
  out["trivial"] = r.trivial;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

Json polynomials_json(const std::vector<Polynomial>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p.str());
  return out;
}

Json series_json(const CenterManifoldSeries& cm) {
  Json out = Json::object();
  out["center_variables"] = cm.center_vars;
  out["hyperbolic_variables"] = cm.hyperbolic_vars;
  out["order"] = cm.order;
  Json h = Json::object();
  Json coeffs = Json::object();
  for (std::size_t j = 0; j < cm.h.size(); ++j) {
    h[cm.hyperbolic_vars[j]] = cm.h[j].str();
    Json table = Json::object();
    for (const auto& e : monomials_up_to(cm.center_vars.size(), cm.order, 2)) {
      std::string key;
      for (std::size_t i = 0; i < e.size(); ++i) key += (i ? "," : "") + std::to_string(e[i]);
      table[key] = to_string(cm.h[j].coefficient(e));
    }
    coeffs[cm.hyperbolic_vars[j]] = table;
  }
  out["h"] = h;
  out["coefficients"] = coeffs;
  Json res = Json::array();
  for (std::size_t k = 0; k < cm.residuals.size(); ++k) {
    bool zero = std::all_of(cm.residuals[k].begin(), cm.residuals[k].end(), [](const Polynomial& p) { return p.is_zero(); });
    res.push_back({{"order", static_cast<int>(k) + 2}, {"zero", zero}});
  }
  out["residuals"] = res;
  out["residual_zero"] = cm.residual_zero();
  return out;
}

Ansatz ansatz_from(const Args& a) {
  Ansatz an;
  an.degree = a.integer("degree", 1);
  an.lambda_degree = a.integer("lambda_degree", 0);
  an.homogeneous = a.boolean("homogeneous", false);
  an.time_dependent = a.boolean("time_dependent", false);
  return an;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool close_to(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(std::fabs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

const std::vector<std::string> kNumeric = {"x0", "epsilon", "time", "tol"};

struct Entry {
  CheckInfo info;
  Runner run;
};

std::vector<Entry> build_registry() {
  std::vector<Entry> r;
  auto add = [&](CheckInfo info, Runner run) { r.push_back({std::move(info), std::move(run)}); };

  // symcore
  add({"differentiate", "symcore", "differentiate", {"expr", "var"}, {"equals"}, "partial derivative of an expression"},
      [](const Args& a, Json& out) {
        Expr d = differentiate(a.expr("expr", true), a.str("var"));
        out["result"] = s(d);
        bool ok = equals_check(a, d, out);
        return Outcome{ok ? "computed" : "mismatch", ok};
      });
  add({"normalize", "symcore", "normalize", {"expr"}, {"equals"}, "canonical form of an expression"},
      [](const Args& a, Json& out) {
        Expr e = normalize(a.expr("expr", true));
        out["result"] = s(e);
        bool ok = equals_check(a, e, out);
        return Outcome{ok ? "computed" : "mismatch", ok};
      });
  add({"exact_divide", "symcore", "exact_divide", {"num", "den"}, {"equals"}, "exact polynomial division"},
      [](const Args& a, Json& out) {
        const auto& vars = a.job().system.variables();
        auto num = Polynomial::from_expr(a.expr("num"), vars);
        auto den = Polynomial::from_expr(a.expr("den"), vars);
        auto q = exact_divide(num, den);
        if (!q) return Outcome{"not_divisible", false};
        out["quotient"] = q->str();
        bool ok = equals_check(a, q->to_expr(), out);
        return Outcome{"divisible", ok};
      });
  add({"evaluate", "symcore", "evaluate", {"expr", "at"}, {"equals", "tol"}, "numeric value at a point"},
      [](const Args& a, Json& out) {
        Expr e = instantiate(a.expr("expr", true), a.job().bindings);
        auto env = a.job().system.numeric_parameters();
        auto pt = point_map(a.str("at"));
        pt.insert(env.begin(), env.end());
        double v = evaluate(e, pt);
        out["value"] = v;
        bool ok = true;
        if (auto eq = a.get("equals")) {
          ok = std::fabs(v - parse_number(*eq)) <= a.number("tol", 1e-12);
          out["equals"] = ok;
        }
        return Outcome{ok ? "computed" : "mismatch", ok};
      });

  // parser
  add({"parse_system", "parser", "parse_system", {}, {}, "system round trip through the text format"},
      [](const Args& a, Json& out) {
        std::string text = format_system(a.job().system);
        out["text"] = text;
        bool ok = parse_system(text) == a.job().system;
        return Outcome{ok ? "round_trip" : "mismatch", ok};
      });
  add({"parse_vector_field", "parser", "parse_vector_field", {"field"}, {}, "vector field round trip"},
      [](const Args& a, Json& out) {
        VectorField v = a.field();
        std::string text = format_vector_field(v);
        out["text"] = text;
        bool ok = parse_vector_field(text, v.variables()) == v;
        return Outcome{ok ? "round_trip" : "mismatch", ok};
      });

  // fields
  add({"lie_bracket", "fields", "lie_bracket", {"a", "b"}, {"equals"}, "commutator [a, b]"},
      [](const Args& a, Json& out) {
        VectorField c = lie_bracket(a.field("a"), a.field("b"));
        out["result"] = field_json(c);
        bool zero = c.is_zero() && !c.has_tau();
        bool ok = equals_field(a, c, out);
        return Outcome{zero ? "commute" : "noncommuting", ok};
      });
  add({"lie_poisson", "fields", "lie_poisson", {"field"}, {"equals"}, "Lie-Poisson bracket {f, s}"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.system();
        VectorField v = a.field();
        auto b = lie_poisson(sys.rhs(), v.components(), sys.variables());
        VectorField bf(sys.variables(), b);
        out["result"] = field_json(bf);
        bool ok = equals_field(a, bf, out);
        return Outcome{bf.is_zero() ? "zero" : "nonzero", ok};
      });
  add({"evolutionary_representative", "fields", "evolutionary_representative", {"field"}, {"equals"},
       "Q = s - tau f"},
      [](const Args& a, Json& out) {
        VectorField q = evolutionary_representative(a.field(), a.system());
        out["result"] = field_json(q);
        bool ok = equals_field(a, q, out);
        return Outcome{ok ? "computed" : "mismatch", ok};
      });
  add({"pushforward", "fields", "pushforward", {"to", "forward", "inverse"}, {}, "system in new coordinates"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.system();
        CoordinateMap m;
        m.from_vars = sys.variables();
        m.to_vars = split_names(a.str("to"));
        SymbolContext from = a.job().context();
        SymbolContext to = from;
        to.variables = m.to_vars;
        m.forward = parse_expression_list(a.str("forward"), from);
        m.inverse = parse_expression_list(a.str("inverse"), to);
        auto res = pushforward(sys, m);
        out["system"] = system_json(res.system);
        out["invertibility"] = res.invertibility == InvertibilityCheck::Symbolic ? "symbolic" : "numeric";
        out["absent_variables"] = res.absent_variables;
        out["constant_variables"] = res.constant_variables;
        bool reduced = !res.absent_variables.empty() || !res.constant_variables.empty();
        return Outcome{reduced ? "reduced" : "computed", true};
      });
  add({"restrict", "fields", "restrict", {"manifold"}, {}, "system restricted through a chart"},
      [](const Args& a, Json& out) {
        auto res = restrict(a.system(), a.manifold());
        out["system"] = system_json(res.system);
        out["consistent_with_flow"] = res.consistent_with_flow;
        return Outcome{res.consistent_with_flow ? "consistent" : "inconsistent", res.consistent_with_flow};
      });

  // symmetry
  add({"is_symmetry", "symmetry", "is_symmetry", {"field"}, {}, "proper symmetry test"},
      [](const Args& a, Json& out) {
        auto rep = is_symmetry(a.system(), a.field());
        out["residual"] = expr_list(rep.residual);
        return Outcome{to_string(rep.verdict), rep.verdict == SymmetryVerdict::Proper};
      });
  add({"is_orbital_symmetry", "symmetry", "is_orbital_symmetry", {"field"}, {"lambda"},
       "orbital symmetry test with cofactor"},
      [](const Args& a, Json& out) {
        auto rep = is_orbital_symmetry(a.system(), a.field());
        out["residual"] = expr_list(rep.residual);
        bool ok = rep.verdict != SymmetryVerdict::None;
        if (rep.verdict == SymmetryVerdict::Orbital) {
          out["lambda"] = s(rep.lambda);
          out["commutator_cofactor"] = s(rep.commutator_cofactor);
          if (auto want = a.get("lambda")) {
            bool eq = parse_expression(*want, a.job().context(true)) == rep.lambda;
            out["lambda_matches"] = eq;
            ok = ok && eq;
          }
        }
        return Outcome{to_string(rep.verdict), ok};
      });
  add({"trivial_orbital", "symmetry", "trivial_orbital", {"theta"}, {}, "theta f with its cofactor"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.system();
        auto pair = trivial_orbital(sys, a.expr("theta", true));
        out["field"] = field_json(pair.field);
        out["lambda"] = s(pair.lambda);
        auto rep = is_orbital_symmetry(sys, pair.field);
        bool ok = rep.verdict == SymmetryVerdict::Proper ? pair.lambda.is_zero() : rep.lambda == pair.lambda;
        out["consistent"] = ok;
        return Outcome{ok ? "orbital" : "inconsistent", ok};
      });
  add({"find_lpti_symmetries", "symmetry", "find_lpti_symmetries", {}, {"degree", "homogeneous", "time_dependent"},
       "polynomial symmetries within an ansatz"},
      [](const Args& a, Json& out) {
        auto fields = find_lpti_symmetries(a.system(), ansatz_from(a));
        Json list = Json::array();
        for (const auto& v : fields) list.push_back(field_json(v));
        out["basis"] = list;
        out["dimension"] = fields.size();
        return Outcome{fields.empty() ? "none" : "found", !fields.empty()};
      });
  add({"find_orbital_symmetries", "symmetry", "find_orbital_symmetries", {},
       {"degree", "lambda_degree", "homogeneous", "time_dependent"}, "polynomial orbital symmetries"},
      [](const Args& a, Json& out) {
        auto pairs = find_orbital_symmetries(a.system(), ansatz_from(a));
        Json list = Json::array();
        for (const auto& p : pairs) list.push_back({{"field", field_json(p.field)}, {"lambda", s(p.lambda)}});
        out["basis"] = list;
        out["dimension"] = pairs.size();
        return Outcome{pairs.empty() ? "none" : "found", !pairs.empty()};
      });

  // invariants
  add({"find_first_integrals", "invariants", "find_first_integrals", {"degree"}, {}, "polynomial first integrals"},
      [](const Args& a, Json& out) {
        auto ps = find_first_integrals(a.system(), a.integer("degree", 2));
        out["basis"] = polynomials_json(ps);
        return Outcome{ps.empty() ? "none" : "found", !ps.empty()};
      });
  add({"verify_darboux", "invariants", "verify_darboux", {"P"}, {"c"}, "exact Darboux certificate"},
      [](const Args& a, Json& out) {
        Rational c = a.get("c") ? parse_rational(*a.get("c")) : Rational(0);
        auto r = verify_darboux(a.system(), a.expr("P"), c);
        if (!r) return Outcome{"not_darboux", false};
        out["P"] = s(r->P);
        out["cofactor"] = s(r->q);
        out["level"] = to_string(r->c);
        out["first_integral"] = r->trivial;
        return Outcome{r->trivial ? "first_integral" : "darboux", true};
      });
  add({"find_darboux", "invariants", "find_darboux", {"deg_p", "deg_q"}, {"hint"}, "Darboux polynomial search"},
      [](const Args& a, Json& out) {
        std::optional<Expr> hint;
        if (a.get("hint")) hint = a.expr("hint");
        auto res = find_darboux(a.system(), a.integer("deg_p", 1), a.integer("deg_q", 1), hint);
        Json list = Json::array();
        for (const auto& d : res.results) {
          list.push_back({{"P", s(d.P)}, {"cofactor", s(d.q)}, {"first_integral", d.trivial}});
        }
        out["results"] = list;
        out["needs_hint"] = res.needs_hint;
        if (!res.notes.empty()) out["notes"] = res.notes;
        return Outcome{res.results.empty() ? "none" : "found", !res.results.empty()};
      });
  add({"is_invariant_manifold", "invariants", "is_invariant_manifold", {"manifold"}, {},
       "invariance certificate for an algebraic manifold"},
      [](const Args& a, Json& out) {
        auto cert = is_invariant_manifold(a.system(), a.manifold());
        out["certificate"] = certificate_json(cert);
        return Outcome{cert.invariant ? "invariant" : "not_invariant", cert.invariant};
      });
  add({"tangency_refinement", "invariants", "tangency_refinement", {"field"}, {"cap"},
       "invariant refinement of the zero set of a field"},
      [](const Args& a, Json& out) {
        auto ref = tangency_refinement(a.system(), a.field(), a.integer("cap", kRefinementCap));
        out["manifold"] = manifold_json(ref.manifold);
        out["added"] = expr_list(ref.added);
        out["iterations"] = ref.iterations;
        out["capped"] = ref.capped;
        return Outcome{ref.capped ? "capped" : "refined", !ref.capped};
      });
  add({"refine_generators", "invariants", "refine_generators", {"generators"}, {"cap"},
       "invariant refinement of a generator list"},
      [](const Args& a, Json& out) {
        auto ref = refine_generators(a.system(), a.exprs("generators"), a.integer("cap", kRefinementCap));
        out["manifold"] = manifold_json(ref.manifold);
        out["added"] = expr_list(ref.added);
        out["iterations"] = ref.iterations;
        out["capped"] = ref.capped;
        return Outcome{ref.capped ? "capped" : "refined", !ref.capped};
      });
  add({"is_conditional_symmetry", "invariants", "is_conditional_symmetry", {"field"}, {"exclude_equilibria"},
       "conditional symmetry with witness"},
      [](const Args& a, Json& out) {
        ConditionalOptions o;
        o.exclude_equilibria = a.boolean("exclude_equilibria", true);
        auto rep = is_conditional_symmetry(a.system(), a.field(), o);
        out.update(conditional_json(rep));
        return Outcome{to_string(rep.verdict), rep.verdict != ConditionalVerdict::None};
      });
  add({"is_conditional_orbital_symmetry", "invariants", "is_conditional_orbital_symmetry", {"field"},
       {"exclude_equilibria"}, "conditional orbital symmetry with witness"},
      [](const Args& a, Json& out) {
        ConditionalOptions o;
        o.exclude_equilibria = a.boolean("exclude_equilibria", true);
        auto rep = is_conditional_orbital_symmetry(a.system(), a.field(), o);
        out.update(conditional_json(rep));
        return Outcome{to_string(rep.verdict), rep.verdict != ConditionalVerdict::None};
      });
  add({"is_partial_symmetry", "invariants", "is_partial_symmetry", {"field", "manifold"}, {},
       "partial symmetry on an invariant manifold"},
      [](const Args& a, Json& out) {
        auto rep = is_partial_symmetry(a.system(), a.field(), a.manifold());
        out.update(conditional_json(rep));
        return Outcome{to_string(rep.verdict), rep.verdict != ConditionalVerdict::None};
      });
  add({"cofactor_matrix", "invariants", "cofactor_matrix", {"manifold"}, {}, "Jacobian of the generators on m"},
      [](const Args& a, Json& out) {
        out["matrix"] = matrix_json(cofactor_matrix(a.manifold()));
        return Outcome{"computed", true};
      });
  add({"tangent_fields", "invariants", "solve_tangent_fields", {"manifold"}, {"degree"},
       "polynomial fields tangent to m"},
      [](const Args& a, Json& out) {
        auto fields = solve_tangent_fields(a.manifold(), a.integer("degree", 2));
        Json list = Json::array();
        for (const auto& v : fields) list.push_back(field_json(v));
        out["fields"] = list;
        return Outcome{fields.empty() ? "none" : "found", !fields.empty()};
      });
  add({"characteristic_integrals", "invariants", "characteristic_integrals", {"field", "degree"}, {},
       "polynomial invariants of a field"},
      [](const Args& a, Json& out) {
        auto ps = characteristic_integrals(a.field(), a.integer("degree", 2));
        out["basis"] = polynomials_json(ps);
        return Outcome{ps.empty() ? "none" : "found", !ps.empty()};
      });

  // localgeom
  add({"find_fixed_points", "localgeom", "find_fixed_points", {}, {"box", "grid"}, "equilibria in a box"},
      [](const Args& a, Json& out) {
        FixedPointOptions o;
        o.box = a.number("box", 2.0);
        o.grid = a.integer("grid", 5);
        auto res = find_fixed_points(a.job().bound_system(), o);
        Json list = Json::array();
        for (const auto& p : res.points) list.push_back(fixed_point_json(p));
        out["points"] = list;
        out["seeds"] = res.seeds;
        out["dropped"] = res.dropped;
        if (!res.note.empty()) out["note"] = res.note;
        return Outcome{res.points.empty() ? "none" : "found", !res.points.empty()};
      });
  add({"spectral_split", "localgeom", "spectral_split", {"point"}, {}, "stable, unstable and center subspaces"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.job().bound_system();
        auto sp = spectral_split(sys, point_arg(sys, a.str("point")));
        Json eig = Json::array();
        for (const auto& mu : sp.eigenvalues) eig.push_back({mu.real(), mu.imag()});
        out["eigenvalues"] = eig;
        out["dim_stable"] = sp.stable.size();
        out["dim_unstable"] = sp.unstable.size();
        out["dim_center"] = sp.center.size();
        out["exact_classification"] = sp.exact_classification;
        return Outcome{sp.hyperbolic() ? "hyperbolic" : "nonhyperbolic", true};
      });
  add({"check_symmetry_vanishes", "localgeom", "check_symmetry_vanishes", {"field"}, {"point", "isolated"},
       "necessary condition s(x0) = 0 at equilibria"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.job().bound_system();
        VectorField v = a.job().bound_field(a.str("field"));
        std::vector<FixedPoint> pts;
        if (auto p = a.get("point")) {
          pts.push_back(point_arg(sys, *p));
        } else {
          for (const auto& p : find_fixed_points(sys).points) {
            if (p.isolated) pts.push_back(p);
          }
        }
        bool all = true, conditional = false;
        Json list = Json::array();
        for (const auto& p : pts) {
          auto c = check_symmetry_vanishes(v, p, a.boolean("isolated", true));
          all = all && c.pass;
          conditional = conditional || c.conditional;
          Json e = {{"point", fixed_point_json(p)}, {"pass", c.pass}, {"exact", c.exact}, {"values", c.values},
                    {"conditional", c.conditional}};
          if (!c.note.empty()) e["note"] = c.note;
          list.push_back(e);
        }
        out["points"] = list;
        if (pts.empty()) return Outcome{"no_points", false};
        return Outcome{all ? "vanishes" : "violation", all};
      });
  add({"tangency_to_subspaces", "localgeom", "tangency_to_subspaces", {"field", "point"}, {},
       "Dv(x0) preserves the stable and unstable subspaces"},
      [](const Args& a, Json& out) {
        DynSystem sys = a.job().bound_system();
        FixedPoint p = point_arg(sys, a.str("point"));
        auto sp = spectral_split(sys, p);
        auto r = tangency_to_subspaces(a.job().bound_field(a.str("field")), p, sp);
        out["stable_defect"] = r.stable_defect;
        out["unstable_defect"] = r.unstable_defect;
        out["center_defect"] = r.center_defect;
        out["stable_ok"] = r.stable_ok;
        out["unstable_ok"] = r.unstable_ok;
        out["center_ok"] = r.center_ok;
        return Outcome{r.pass() ? "tangent" : "not_tangent", r.pass()};
      });
  add({"restricted_commutator", "localgeom", "restricted_commutator", {"field", "manifold"}, {},
       "[v, f] modulo the ideal of m"},
      [](const Args& a, Json& out) {
        auto r = restricted_commutator(a.system(), a.field(), a.manifold());
        out["residual"] = expr_list(r.residual);
        Json v = Json::array();
        for (auto z : r.vanishing) v.push_back(to_string(z));
        out["vanishing"] = v;
        return Outcome{r.zero ? "zero" : "nonzero", r.zero};
      });
  add({"center_manifold", "localgeom", "center_manifold_series", {"center", "order"}, {},
       "Poincare-Dulac center manifold jet"},
      [](const Args& a, Json& out) {
        auto cm = center_manifold_series(a.job().bound_system(), split_names(a.str("center")), a.integer("order", 2));
        out.update(series_json(cm));
        bool flat = std::all_of(cm.h.begin(), cm.h.end(), [](const Polynomial& p) { return p.is_zero(); });
        return Outcome{flat ? "flat" : "computed", cm.residual_zero()};
      });
  add({"detect_crossing", "localgeom", "detect_crossing", {"parameter", "point", "interval"}, {"steps"},
       "eigenvalue crossing of the imaginary axis"},
      [](const Args& a, Json& out) {
        auto iv = a.numbers("interval");
        if (iv.size() != 2) throw JobError("interval must be lo, hi");
        auto r = detect_crossing(a.job().bound_system(), a.str("parameter"), a.numbers("point"), iv[0], iv[1],
                                 a.integer("steps", 200));
        out["lambda0"] = r.lambda0;
        out["speed"] = r.speed;
        out["complex_pair"] = r.complex_pair;
        out["frequency"] = r.frequency;
        return Outcome{r.complex_pair ? "complex_pair" : "real", true};
      });

  // numeric
  add({"integrate", "numeric", "integrate", {}, {"x0", "time", "tol", "final", "final_tol"}, "adaptive RK45 run"},
      [](const Args& a, Json& out) {
        IntegratorOptions o;
        o.tol = a.number("tol", 1e-9);
        auto tr = integrate(a.job().bound_system(), a.x0(), 0.0, a.number("time", 1.0), o);
        out["final"] = tr.states.back();
        out["accepted"] = tr.accepted;
        out["rejected"] = tr.rejected;
        out["method"] = tr.method;
        bool ok = true;
        if (a.get("final")) ok = close_to(tr.states.back(), a.numbers("final"), a.number("final_tol", 1e-7));
        return Outcome{ok ? "integrated" : "mismatch", ok};
      });
  add({"flow_map", "numeric", "flow_map", {"field", "epsilon"}, {"x0", "final", "final_tol"}, "flow of a field"},
      [](const Args& a, Json& out) {
        auto x = flow_map(a.job().bound_field(a.str("field")), a.number("epsilon", 0.0), a.x0(),
                          NumericEnv{a.job().system.numeric_parameters(), {}});
        out["point"] = x;
        bool ok = true;
        if (a.get("final")) ok = close_to(x, a.numbers("final"), a.number("final_tol", 1e-8));
        return Outcome{ok ? "computed" : "mismatch", ok};
      });
  add({"verify_symmetry_numeric", "numeric", "verify_symmetry_numeric", {"field"}, kNumeric,
       "numerical symmetry check along a solution"},
      [](const Args& a, Json& out) {
        auto r = verify_symmetry_numeric(a.job().bound_system(), a.job().bound_field(a.str("field")), a.x0(),
                                         a.number("epsilon", 0.3), a.number("time", 20.0), a.number("tol", 1e-6));
        out.update(verification_json(r));
        return Outcome{r.pass ? "confirmed" : "refuted", r.pass};
      });
  add({"verify_orbital_numeric", "numeric", "verify_orbital_numeric", {"field"}, kNumeric,
       "numerical orbital check (Hausdorff)"},
      [](const Args& a, Json& out) {
        auto r = verify_orbital_numeric(a.job().bound_system(), a.job().bound_field(a.str("field")), a.x0(),
                                        a.number("epsilon", 0.3), a.number("time", 20.0), a.number("tol", 1e-6));
        out.update(verification_json(r));
        return Outcome{r.pass ? "confirmed" : "refuted", r.pass};
      });
  add({"verify_invariant_manifold_numeric", "numeric", "verify_invariant_manifold_numeric", {"manifold"},
       {"time", "tol"}, "numerical invariance from sampled seeds"},
      [](const Args& a, Json& out) {
        auto r = verify_invariant_manifold_numeric(a.job().bound_system(), a.job().bound_manifold(a.str("manifold")),
                                                   a.number("time", 20.0), a.number("tol", 1e-6));
        out.update(verification_json(r));
        return Outcome{r.pass ? "confirmed" : "refuted", r.pass};
      });
  add({"separation_diagnostic", "numeric", "separation_diagnostic", {"direction"}, {"x0", "delta", "time"},
       "exponential separation rates in time and arclength"},
      [](const Args& a, Json& out) {
        auto r = separation_diagnostic(a.job().bound_system(), a.x0(), a.number("delta", 1e-6), a.numbers("direction"),
                                       a.number("time", 10.0));
        out["time_rate"] = r.time_rate;
        out["arclength_rate"] = r.arclength_rate;
        out["samples"] = r.times.size();
        return Outcome{"diagnostic", true};
      });
  return r;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = build_registry();
  return r;
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& e : registry()) {
      CheckInfo info = e.info;
      info.optional.push_back("bound");
      out.push_back(std::move(info));
    }
    return out;
  }();
  return infos;
}

const CheckInfo* find_check(const std::string& name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

RunResult run_job(const AnalysisJob& job, const RunOptions& opts) {
  RunResult res;
  Json& rep = res.report;
  rep["schema_version"] = kSchemaVersion;
  rep["job"] = job.name;
  if (!job.system_path.empty()) rep["system_file"] = job.system_path;
  rep["system"] = system_json(job.system);
  Json checks = Json::array();
  std::size_t passed = 0, failed = 0, errors = 0;
  bool internal = false;
  for (const auto& spec : job.checks) {
    const auto& entries = registry();
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.info.name == spec.op; });
    Json c = Json::object();
    c["op"] = spec.op;
    Args args(spec, job);
    if (auto l = args.get("label")) c["label"] = *l;
    Json a = Json::object();
    for (const auto& [k, v] : spec.args) {
      if (k != "label") a[k] = v;
    }
    c["args"] = a;
    Json result = Json::object();
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (it == entries.end()) throw JobError("unknown check '" + spec.op + "'");
      Outcome o = it->run(args, result);
      c["verdict"] = o.verdict;
      bool pass = o.positive;
      if (auto want = args.get("expect")) {
        pass = o.verdict == *want;
        c["expected"] = *want;
      }
      c["status"] = pass ? "pass" : "fail";
      (pass ? passed : failed)++;
    } catch (const JobError& e) {
      c["status"] = "error";
      c["error"] = e.what();
      ++errors;
    } catch (const Error& e) {
      c["status"] = "error";
      c["error"] = e.what();
      ++errors;
    } catch (const std::exception& e) {
      c["status"] = "error";
      c["error"] = std::string("internal: ") + e.what();
      ++errors;
      internal = true;
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    c["result"] = result;
    if (opts.timings) c["elapsed_ms"] = ms;
    checks.push_back(c);
  }
  rep["checks"] = checks;
  rep["summary"] = {{"total", job.checks.size()}, {"passed", passed}, {"failed", failed}, {"errors", errors}};
  if (internal) res.exit_code = kExitInternal;
  else if (failed || errors) res.exit_code = kExitFail;
  else res.exit_code = kExitPass;
  return res;
}

RunResult run_job_file(const std::filesystem::path& path, const RunOptions& opts) {
  RunResult res;
  try {
    AnalysisJob job = load_job(path);
    return run_job(job, opts);
  } catch (const JobError& e) {
    res.report["schema_version"] = kSchemaVersion;
    res.report["job"] = path.stem().string();
    res.report["error"] = e.what();
    res.exit_code = kExitInvalid;
  }
  return res;
}

}  // namespace symflow::tools
