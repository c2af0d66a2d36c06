#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/invariants.hpp>
#include <symflow/symmetry.hpp>

#include <doctest.h>

using namespace symflow;
using namespace symflow::test;

namespace {

const DynSystem kCircle = sys("vars x, y; x' = (1 - x^2 - y^2)*x - y; y' = x + (1 - x^2 - y^2)*y");
const DynSystem kFormal3 = sys("vars x, y, z; funcs alpha/1, beta/1, f/1, g/1\n"
                               "x' = alpha(z)*x - beta(z)*y\n"
                               "y' = beta(z)*x + alpha(z)*y\n"
                               "z' = f(z) + g(z)*(x^2 + y^2)");
const VectorField kRot = vf("dx: -y, dy: x");
const VectorField kTheta3 = vf("dx: y, dy: -x", kXYZ);

AlgebraicManifold circle() { return AlgebraicManifold(kXY, {ex("x^2 + y^2 - 1")}); }

bool same_polys(std::vector<Polynomial> got, const std::vector<std::string>& vars, const std::vector<std::string>& want) {
  RationalMatrix a, b;
  int deg = 0;
  for (const auto& w : want) deg = std::max(deg, Polynomial::from_expr(ex(w, vars), vars).degree());
  for (const auto& g : got) deg = std::max(deg, g.degree());
  auto row = [&](const Polynomial& p) {
    RationalVector r;
    for (const auto& m : monomials_up_to(vars.size(), deg)) r.push_back(p.coefficient(m));
    return r;
  };
  for (const auto& g : got) a.push_back(row(g));
  for (const auto& w : want) b.push_back(row(Polynomial::from_expr(ex(w, vars), vars)));
  const std::size_t cols = monomials_up_to(vars.size(), deg).size();
  RationalMatrix both = a;
  both.insert(both.end(), b.begin(), b.end());
  return rank(a, cols) == a.size() && rank(a, cols) == rank(b, cols) && rank(both, cols) == rank(a, cols);
}

}  // namespace

TEST_CASE("find_first_integrals: examples") {
  auto rot = find_first_integrals(sys("vars x, y; x' = -(1 + x^2)*y; y' = (1 + x^2)*x"), 2);
  CHECK(same_polys(rot, kXY, {"x^2 + y^2"}));
  CHECK(same_polys(find_first_integrals(sys("vars x, y; x' = -y; y' = x"), 2), kXY, {"x^2 + y^2"}));
  CHECK(find_first_integrals(sys("vars x, y; x' = x; y' = y"), 3).empty());
  CHECK_THROWS_AS(find_first_integrals(kFormal3, 2), NotPolynomial);
}

TEST_CASE("verify_darboux: examples") {
  auto c = verify_darboux(kCircle, ex("x^2 + y^2"), 1);
  REQUIRE(c);
  CHECK(c->q == ex("-2*x^2 - 2*y^2"));
  CHECK_FALSE(c->trivial);

  DynSystem osc = sys("vars x, y; x' = -y; y' = x");
  for (int level : {0, 3, -2}) {
    auto t = verify_darboux(osc, ex("x^2 + y^2"), level);
    REQUIRE(t);
    CHECK(t->q.is_zero());
    CHECK(t->trivial);
  }

  auto h = verify_darboux(sys("vars x, y; x' = x*(1 + y); y' = 0"), ex("x"), 0);
  REQUIRE(h);
  CHECK(h->q == ex("1 + y"));

  CHECK_FALSE(verify_darboux(sys("vars x, y; x' = y; y' = 0"), ex("x"), 0));
  CHECK_THROWS_AS(verify_darboux(osc, Expr(5)), DomainError);
}

TEST_CASE("find_darboux: examples") {
  auto s = find_darboux(kCircle, 2, 2);
  bool found = false;
  for (const auto& r : s.results) {
    auto check = verify_darboux(kCircle, r.P, r.c);
    REQUIRE(check);
    Expr monic = r.P - Expr(r.c);
    if (Polynomial::from_expr(monic, kXY).monic() == Polynomial::from_expr(ex("x^2 + y^2 - 1"), kXY) ||
        Polynomial::from_expr(r.P, kXY).monic() == Polynomial::from_expr(ex("x^2 + y^2 - 1"), kXY)) {
      found = true;
      CHECK(r.q == ex("-2*x^2 - 2*y^2"));
    }
  }
  CHECK(found);

  DynSystem saddle = sys("vars x, y; x' = x; y' = -y");
  auto lin = find_darboux(saddle, 1, 0);
  bool px = false, py = false;
  for (const auto& r : lin.results) {
    if (r.P == ex("x") && r.q == Expr(1)) px = true;
    if (r.P == ex("y") && r.q == Expr(-1)) py = true;
  }
  CHECK(px);
  CHECK(py);

  DynSystem osc = sys("vars x, y; x' = -y; y' = x");
  auto hinted = find_darboux(osc, 2, 0, Expr(0));
  std::vector<Polynomial> ps;
  for (const auto& r : hinted.results) ps.push_back(Polynomial::from_expr(r.P, kXY));
  CHECK(same_polys(ps, kXY, {"x^2 + y^2"}));
}

TEST_CASE("is_invariant_manifold: examples") {
  auto z = is_invariant_manifold(kFormal3, AlgebraicManifold(kXYZ, {ex("x"), ex("y")}));
  CHECK(z.invariant);
  CHECK(z.grade == CertificateGrade::Symbolic);

  auto c = is_invariant_manifold(kCircle, circle());
  CHECK(c.invariant);
  CHECK(c.grade == CertificateGrade::Symbolic);

  DynSystem shear = sys("vars x, y; x' = y; y' = 0");
  auto n = is_invariant_manifold(shear, AlgebraicManifold(kXY, {ex("x - 1")}));
  CHECK_FALSE(n.invariant);
  REQUIRE(n.remainders.size() == 1);
  CHECK(n.remainders[0] == ex("y"));

  auto empty = is_invariant_manifold(shear, AlgebraicManifold(kXY, {ex("x^2 + y^2 + 1")}));
  CHECK(empty.grade == CertificateGrade::Vacuous);
  CHECK_FALSE(empty.warning.empty());
}

TEST_CASE("tangency_refinement: examples") {
  auto a = tangency_refinement(kFormal3, kTheta3);
  CHECK(a.added.empty());
  CHECK(a.manifold.generator_exprs() == std::vector<Expr>{ex("x"), ex("y")});

  DynSystem shear = sys("vars x, y; x' = y; y' = 0");
  auto b = tangency_refinement(shear, vf("dx: x - 1, dy: 0"));
  CHECK(same_polys({Polynomial::from_expr(b.manifold.generator_exprs()[0], kXY),
                    Polynomial::from_expr(b.manifold.generator_exprs()[1], kXY)},
                   kXY, {"x - 1", "y"}));
  CHECK(b.manifold.generators().size() == 2);

  DynSystem nl = sys("vars x, y; x' = x - x*y; y' = -y + x*y");
  auto c = tangency_refinement(nl, nl.field());
  CHECK(is_invariant_manifold(nl, c.manifold).invariant);
}

TEST_CASE("conditional symmetry: examples") {
  auto ok = is_conditional_symmetry(kFormal3, kTheta3);
  CHECK(ok.verdict == ConditionalVerdict::ConditionalSymmetry);
  CHECK(ok.witness.generator_exprs() == std::vector<Expr>{ex("x"), ex("y")});

  auto no = is_conditional_symmetry(kCircle, kRot);
  CHECK(no.verdict == ConditionalVerdict::None);

  DynSystem pend = sys("vars x, y; x' = y; y' = -x - x^3");
  ConditionalOptions allow;
  allow.exclude_equilibria = false;
  auto fixed = is_conditional_symmetry(pend, vf("dx: x, dy: y"), allow);
  CHECK(fixed.verdict == ConditionalVerdict::ConditionalSymmetry);
  CHECK(consists_of_equilibria(pend, fixed.witness));
}

TEST_CASE("conditional orbital symmetry: examples") {
  auto r = is_conditional_orbital_symmetry(kCircle, kRot);
  CHECK(r.verdict == ConditionalVerdict::ConditionalOrbital);
  for (const Expr& g : r.witness.generator_exprs()) CHECK(restrict_to(g, circle()).is_zero());

  auto s = is_conditional_orbital_symmetry(sys("vars x, y; x' = x; y' = y"), vf("dx: x, dy: y"));
  CHECK(s.verdict == ConditionalVerdict::ConditionalOrbital);
  CHECK(s.trivial);
  CHECK(s.witness.is_whole_space());
}

TEST_CASE("partial symmetry: examples") {
  CHECK(is_partial_symmetry(kCircle, kRot, circle()).verdict == ConditionalVerdict::Partial);
  CHECK(is_partial_symmetry(kCircle, vf("dx: x, dy: y"), circle()).verdict == ConditionalVerdict::None);
  DynSystem osc = sys("vars x, y; x' = -y; y' = x");
  CHECK(is_partial_symmetry(osc, kRot, circle()).verdict == ConditionalVerdict::Partial);
  DynSystem shear = sys("vars x, y; x' = y; y' = 0");
  CHECK_THROWS_AS(is_partial_symmetry(shear, kRot, AlgebraicManifold(kXY, {ex("x - 1")})), Error);
}

TEST_CASE("cofactor matrix, tangent fields and characteristic integrals") {
  AlgebraicManifold axis(kXYZ, {ex("x"), ex("y")});
  auto a = cofactor_matrix(axis);
  REQUIRE(a.size() == 2);
  CHECK(a[0] == std::vector<Expr>{1, 0, 0});
  CHECK(a[1] == std::vector<Expr>{0, 1, 0});
  auto t = solve_tangent_fields(axis, 0);
  REQUIRE(t.size() == 1);
  CHECK(t[0] == vf("dz: 1", kXYZ));
  CHECK(same_polys(characteristic_integrals(vf("dz: 1", kXYZ), 2), kXYZ, {"x", "y", "x^2", "x*y", "y^2"}));

  auto c = cofactor_matrix(circle());
  REQUIRE(c.size() == 1);
  CHECK(c[0] == std::vector<Expr>{ex("2*x"), ex("2*y")});
  CHECK(in_span(solve_tangent_fields(circle(), 1), kRot, 1));

  CHECK(same_polys(characteristic_integrals(kRot, 2), kXY, {"x^2 + y^2"}));
}

TEST_CASE("property: Darboux polynomials multiply with added cofactors") {
  std::mt19937 rng(41);
  for (int i = 0; i < 20; ++i) {
    Expr p1 = random_poly(rng, kXY, 1), p2 = random_poly(rng, kXY, 1);
    if (Polynomial::from_expr(p1, kXY).is_constant() || Polynomial::from_expr(p2, kXY).is_constant()) continue;
    Expr h = random_poly(rng, kXY, 1, false);
    // f = p1 p2 (grad-orthogonal part) makes p1 and p2 Darboux: use f = h * p1 * p2 * (1, 1).
    DynSystem s(kXY, {h * p1 * p2, h * p1 * p2});
    auto d1 = verify_darboux(s, p1);
    auto d2 = verify_darboux(s, p2);
    REQUIRE(d1);
    REQUIRE(d2);
    auto prod = verify_darboux(s, p1 * p2);
    REQUIRE(prod);
    CHECK(prod->q == d1->q + d2->q);
  }
}

TEST_CASE("property: every find_darboux result verifies") {
  std::mt19937 rng(42);
  for (int i = 0; i < 8; ++i) {
    Expr a = random_poly(rng, kXY, 1), b = random_poly(rng, kXY, 1);
    DynSystem s(kXY, {ex("x") * a, ex("y") * b});
    for (const auto& r : find_darboux(s, 1, 1).results) {
      auto v = verify_darboux(s, r.P, r.c);
      REQUIRE(v);
      CHECK(v->q == r.q);
    }
  }
}

TEST_CASE("property: refined manifolds are invariant") {
  std::mt19937 rng(43);
  for (int i = 0; i < 10; ++i) {
    VectorField f = random_field(rng, kXY, 2);
    if (f.is_zero()) continue;
    DynSystem s(kXY, f.components());
    VectorField v = random_field(rng, kXY, 1);
    if (v.is_zero()) continue;
    auto r = tangency_refinement(s, v);
    if (r.capped) continue;
    auto cert = is_invariant_manifold(s, r.manifold);
    CHECK((cert.invariant || cert.grade == CertificateGrade::Vacuous));
  }
}

TEST_CASE("property: conditional symmetries are conditional orbital symmetries") {
  std::vector<std::pair<DynSystem, VectorField>> cases = {
      {kFormal3, kTheta3},
      {sys("vars x, y; x' = y; y' = -x - x^3"), vf("dx: x, dy: y")},
      {sys("vars x, y; x' = x*y; y' = -y - x^2"), vf("dx: 0, dy: y")},
  };
  ConditionalOptions allow;
  allow.exclude_equilibria = false;
  for (const auto& [s, v] : cases) {
    auto c = is_conditional_symmetry(s, v, allow);
    if (c.verdict != ConditionalVerdict::ConditionalSymmetry) continue;
    auto o = is_conditional_orbital_symmetry(s, v, allow);
    CHECK(o.verdict == ConditionalVerdict::ConditionalOrbital);
  }
}

TEST_CASE("property: shifting P only shifts the level") {
  std::mt19937 rng(44);
  for (int i = 0; i < 10; ++i) {
    std::uniform_int_distribution<int> k(-5, 5);
    const int shift = k(rng);
    Expr P = ex("x^2 + y^2");
    auto base = verify_darboux(kCircle, P, 1);
    auto moved = verify_darboux(kCircle, P + Expr(shift), 1 + shift);
    REQUIRE(base);
    REQUIRE(moved);
    CHECK(base->q == moved->q);
  }
}
