// One line per acceptance criterion; exit status 0 iff all pass.
#include <symflow/errors.hpp>
#include <symflow/fields.hpp>
#include <symflow/invariants.hpp>
#include <symflow/localgeom.hpp>
#include <symflow/numeric.hpp>
#include <symflow/parser.hpp>
#include <symflow/symmetry.hpp>
#include <symflow/tools/job.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace symflow;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = SYMFLOW_TEST_CORPUS;
const std::vector<std::string> kXY = {"x", "y"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

DynSystem load_system(const std::string& file) {
  std::ifstream in(kCorpus / file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

Expr ex(const std::string& text, const std::vector<std::string>& vars = kXY, bool time = false) {
  SymbolContext ctx;
  ctx.variables = vars;
  ctx.allow_time = time;
  return parse_expression(text, ctx);
}

VectorField vf(const std::string& text) { return parse_vector_field(text, kXY); }

bool equal_fields(const VectorField& a, const VectorField& b) {
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    if (!normalize(a.component(i) - b.component(i)).is_zero()) return false;
  }
  return true;
}

Expr random_poly(std::mt19937& rng, const std::vector<std::string>& vars, int degree) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::bernoulli_distribution keep(0.4);
  while (true) {
    Expr out;
    for (const auto& e : monomials_up_to(vars.size(), degree)) {
      if (!keep(rng)) continue;
      Expr m = coef(rng);
      for (std::size_t i = 0; i < vars.size(); ++i) m = m * pow(Expr::variable(vars[i]), e[i]);
      out = out + m;
    }
    if (!out.is_zero()) return out;
  }
}

Outcome commutators() {
  auto t0 = Clock::now();
  VectorField xr = vf("dx: -y, dy: x"), xs = vf("dx: x, dy: y");
  VectorField x1 = vf("dx: -omega(x^2 + y^2)*y, dy: omega(x^2 + y^2)*x");
  VectorField x2 = vf("dx: -beta(x, y)*y, dy: beta(x, y)*x");
  Expr r2 = ex("x^2 + y^2");
  Expr dw = ex("D[1](omega)(x^2 + y^2)");
  Expr w = ex("omega(x^2 + y^2)");
  Expr bx = ex("D[1,0](beta)(x, y)"), by = ex("D[0,1](beta)(x, y)"), b = ex("beta(x, y)");
  bool ok = lie_bracket(xr, xs).is_zero();
  ok = ok && equal_fields(lie_bracket(xs, x1), xr.scaled(Expr(2) * r2 * dw));
  ok = ok && equal_fields(lie_bracket(xs, x1), x1.scaled(Expr(2) * r2 * dw / w));
  ok = ok && equal_fields(lie_bracket(xr, x2), x2.scaled((ex("x") * by - ex("y") * bx) / b));
  ok = ok && equal_fields(lie_bracket(xs, x2), x2.scaled((ex("x") * bx + ex("y") * by) / b));
  const double s = seconds_since(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "four brackets exact, %.3f s", s);
  return {ok && s < 1.0, buf};
}

Outcome trivial_orbital_identity() {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(1, 3), deg(1, 3);
  const std::vector<std::string> names = {"x", "y", "z"};
  int good = 0;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> vars(names.begin(), names.begin() + dim(rng));
    std::vector<Expr> rhs;
    for (std::size_t k = 0; k < vars.size(); ++k) rhs.push_back(random_poly(rng, vars, deg(rng)));
    DynSystem sys(vars, rhs);
    std::vector<std::string> with_t = vars;
    with_t.push_back(kTime);
    Expr theta = random_poly(rng, with_t, deg(rng));
    auto r = is_orbital_symmetry(sys, sys.field().scaled(theta));
    Expr expected = differentiate(theta, kTime);
    for (std::size_t k = 0; k < vars.size(); ++k) expected += rhs[k] * differentiate(theta, vars[k]);
    if (r.verdict != SymmetryVerdict::None && normalize(r.lambda - expected).is_zero()) ++good;
  }
  return {good == 20, std::to_string(good) + "/20 pairs give lambda = theta_t + f.grad(theta)"};
}

Outcome module_structure() {
  DynSystem s = parse_system("vars x, y; x' = -(1 + x^2 + y^2)*y; y' = (1 + x^2 + y^2)*x");
  Expr P = ex("x^2 + y^2");
  VectorField xr = vf("dx: -y, dy: x");
  bool ok = is_symmetry(s, xr.scaled(P)).verdict == SymmetryVerdict::Proper;
  ok = ok && is_symmetry(s, xr.scaled(Expr(1) + P * P)).verdict == SymmetryVerdict::Proper;

  DynSystem x2 = parse_system("vars x, y; x' = -(1 + x^2)*y; y' = (1 + x^2)*x");
  VectorField a = vf("dx: x, dy: y") + x2.field().scaled(ex("y^2"));
  VectorField b = xr + x2.field().scaled(ex("x"));
  auto ra = is_orbital_symmetry(x2, a), rb = is_orbital_symmetry(x2, b);
  ok = ok && ra.verdict == SymmetryVerdict::Orbital && rb.verdict == SymmetryVerdict::Orbital;
  VectorField br = lie_bracket(a, b);
  auto rbr = is_orbital_symmetry(x2, br);
  Expr predicted = orbital_bracket_cofactor(a, ra.commutator_cofactor, b, rb.commutator_cofactor);
  const bool bracket_ok = !br.is_zero() && rbr.verdict != SymmetryVerdict::None &&
                          normalize(rbr.commutator_cofactor - predicted).is_zero();
  return {ok && bracket_ok, "P s and (1 + P^2) s proper; bracket cofactor matches s(rho) - r(sigma)"};
}

Outcome darboux() {
  auto t0 = Clock::now();
  DynSystem s = load_system("ex07a.dsys");
  auto search = find_darboux(s, 2, 2);
  const Polynomial want = Polynomial::from_expr(ex("x^2 + y^2 - 1"), kXY);
  bool found = false;
  for (const auto& r : search.results) {
    Polynomial p = Polynomial::from_expr(r.P - Expr(r.c), kXY);
    if (p.is_zero() || p.monic() != want) continue;
    auto v = verify_darboux(s, r.P, r.c);
    if (v && normalize(v->q - ex("-2*x^2 - 2*y^2")).is_zero()) found = true;
  }
  const double secs = seconds_since(t0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "x^2 + y^2 - 1 with cofactor -2(x^2 + y^2), %.3f s", secs);
  return {found && secs < 5.0, buf};
}

Outcome conditional_matrix() {
  DynSystem ex9 = load_system("ex09.dsys");
  DynSystem ex8 = load_system("ex08.dsys");
  VectorField th3 = parse_vector_field("dx: y, dy: -x", {"x", "y", "z"});
  VectorField th2 = vf("dx: y, dy: -x");
  auto c9 = is_conditional_symmetry(ex9, th3);
  bool ok = c9.verdict == ConditionalVerdict::ConditionalSymmetry &&
            c9.witness.generator_exprs() == std::vector<Expr>{ex("x"), ex("y")};
  AlgebraicManifold circle(kXY, {ex("x^2 + y^2 - 1")});
  ok = ok && is_partial_symmetry(ex8, th2, circle).verdict == ConditionalVerdict::Partial;
  ok = ok && is_conditional_orbital_symmetry(ex8, th2).verdict == ConditionalVerdict::ConditionalOrbital;
  ok = ok && is_conditional_symmetry(ex8, th2).verdict == ConditionalVerdict::None;
  return {ok, "z-axis conditional; circle partial and conditional orbital, not conditional"};
}

// h(x) = sum a_k x^k for x' = x y, y' = -y - x^2: sum_{i+j=k} i a_i a_j = -a_k - [k = 2].
std::vector<Rational> center_oracle(int order) {
  std::vector<Rational> a(order + 1, Rational(0));
  for (int k = 2; k <= order; ++k) {
    Rational s = (k == 2) ? Rational(1) : Rational(0);
    for (int i = 2; i <= k - 2; ++i) s += Rational(i) * a[i] * a[k - i];
    a[k] = -s;
  }
  return a;
}

Outcome center_manifold() {
  auto flat = center_manifold_series(load_system("ex10.dsys"), {"x"}, 10);
  bool ok = flat.h.size() == 1 && flat.h[0].is_zero() && flat.residual_zero() && flat.order == 10;
  const int order = 8;
  auto s = center_manifold_series(parse_system("vars x, y; x' = x*y; y' = -y - x^2"), {"x"}, order);
  ok = ok && s.residual_zero();
  auto oracle = center_oracle(order);
  for (int k = 2; k <= order; ++k) ok = ok && s.h[0].coefficient({k}) == oracle[k];
  ok = ok && oracle[2] == -1 && oracle[4] == -2;
  return {ok, "flat jet to order 10; h = " + s.h[0].str() + " matches the substitution oracle"};
}

Outcome fixed_point_condition() {
  int fields = 0, violations = 0, systems = 0;
  for (const char* file : {"ex04.dsys", "ex07a.dsys", "ex10.dsys"}) {
    DynSystem s = load_system(file);
    auto points = find_fixed_points(s);
    Ansatz a;
    a.degree = 2;
    auto basis = find_lpti_symmetries(s, a);
    bool any = false;
    for (const auto& p : points.points) {
      if (!p.isolated) continue;
      any = true;
      for (const auto& v : basis) {
        ++fields;
        if (!check_symmetry_vanishes(v, p, true).pass) ++violations;
      }
    }
    if (any && !basis.empty()) ++systems;
  }
  return {systems == 3 && violations == 0,
          std::to_string(fields) + " basis fields on " + std::to_string(systems) + " systems, " +
              std::to_string(violations) + " violations"};
}

Outcome numeric_agreement() {
  using namespace symflow::tools;
  auto t0 = Clock::now();
  auto corpus = run_corpus(kCorpus, 4);
  const double corpus_secs = seconds_since(t0);
  int confirmed = 0, refuted = 0;
  for (const auto& entry : fs::directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".job") continue;
    AnalysisJob job = load_job(entry.path());
    RunResult res = run_job(job);
    DynSystem s = job.bound_system();
    NumericEnv env;
    env.constants = s.numeric_parameters();
    std::vector<double> x0 = job.x0;
    if (x0.empty()) x0.assign(s.dimension(), 0.5);
    for (const auto& c : res.report["checks"]) {
      const std::string op = c["op"], verdict = c.value("verdict", "");
      VerificationReport v;
      if ((op == "is_symmetry" || op == "is_orbital_symmetry") && (verdict == "proper" || verdict == "orbital")) {
        VectorField f = job.bound_field(c["args"]["field"]);
        if (f.has_tau()) continue;
        v = verdict == "proper" ? verify_symmetry_numeric(s, f, x0, 0.3, 20, 1e-6, env)
                                : verify_orbital_numeric(s, f, x0, 0.3, 20, 1e-6, env);
      } else if (op == "is_invariant_manifold" && verdict == "invariant") {
        v = verify_invariant_manifold_numeric(s, job.bound_manifold(c["args"]["manifold"]), 20, 1e-6, env);
      } else {
        continue;
      }
      if (v.pass) {
        ++confirmed;
      } else {
        ++refuted;
        std::cerr << "  " << job.name << " " << op << ": residual " << v.max_residual << "\n";
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d confirmed, %d refuted; corpus %zu cases in %.2f s", confirmed, refuted,
                corpus.cases.size(), corpus_secs);
  return {corpus.pass() && refuted == 0 && confirmed > 0 && corpus_secs < 60, buf};
}

Outcome separation() {
  auto e4 = separation_diagnostic(load_system("ex04.dsys"), {1, 0}, 1e-6, {0, 1}, 10);
  auto e5 = separation_diagnostic(load_system("ex05.dsys"), {0, 0}, 1e-6, {0, 1}, 40);
  char buf[160];
  std::snprintf(buf, sizeof buf, "linear time rate %.4f; exp(-x) time rate %.4f, arclength rate %.4f", e4.time_rate,
                e5.time_rate, e5.arclength_rate);
  const bool ok = std::fabs(e4.time_rate - 1.0) <= 0.05 && e5.time_rate < 0.1 && e5.arclength_rate > 0.5;
  return {ok, buf};
}

Outcome crossing() {
  auto r = detect_crossing(parse_system("vars x; params lam; x' = lam*x - x^3"), "lam", {0}, -1, 1);
  char buf[96];
  std::snprintf(buf, sizeof buf, "lambda0 = %.2e, speed = %.8f", r.lambda0, r.speed);
  return {std::fabs(r.lambda0) <= 1e-8 && std::fabs(r.speed - 1.0) <= 1e-6, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"commutators of the rotation-invariant family", commutators},
      {"trivial orbital cofactor identity", trivial_orbital_identity},
      {"module structure of symmetries", module_structure},
      {"Darboux polynomial of the limit cycle", darboux},
      {"conditional classification matrix", conditional_matrix},
      {"center manifold jets", center_manifold},
      {"symmetries vanish at isolated equilibria", fixed_point_condition},
      {"numeric confirmation of symbolic verdicts", numeric_agreement},
      {"separation rates", separation},
      {"bifurcation crossing", crossing},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s: %s (%s) [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
