#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/invariants.hpp>
#include <symflow/symmetry.hpp>

#include <doctest.h>

using namespace symflow;
using namespace symflow::test;

namespace {

const DynSystem kEx1 = sys("vars x, y; funcs alpha/1, beta/1\n"
                           "x' = alpha(x^2+y^2)*x - beta(x^2+y^2)*y\n"
                           "y' = beta(x^2+y^2)*x + alpha(x^2+y^2)*y");
const DynSystem kX2 = sys("vars x, y; funcs beta/2; x' = -beta(x, y)*y; y' = beta(x, y)*x");
const VectorField kXr = vf("dx: -y, dy: x");
const VectorField kXs = vf("dx: x, dy: y");

bool orbital_report_consistent(const DynSystem& s, const SymmetryReport& r) {
  if (r.verdict == SymmetryVerdict::None) return true;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if (!(r.residual[i] - r.lambda * s.rhs()[i]).is_zero()) return false;
  }
  return (r.commutator_cofactor + r.lambda).is_zero();
}

}  // namespace

TEST_CASE("is_symmetry: examples") {
  CHECK(is_symmetry(kEx1, vf("dx: y, dy: -x")).verdict == SymmetryVerdict::Proper);
  CHECK(is_symmetry(kEx1, kEx1.field()).verdict == SymmetryVerdict::Proper);
  auto r = is_symmetry(kEx1, kXs);
  CHECK(r.verdict == SymmetryVerdict::None);
  CHECK_FALSE(r.residual[0].is_zero());
}

TEST_CASE("is_symmetry: time-dependent field") {
  DynSystem s = sys("vars x; x' = x");
  // e^t-type symmetries are not polynomial; t*x is not a symmetry, x is.
  CHECK(is_symmetry(s, parse_vector_field("dx: x", {"x"})).verdict == SymmetryVerdict::Proper);
  CHECK(is_symmetry(s, parse_vector_field("dx: t*x", {"x"})).verdict == SymmetryVerdict::None);
  CHECK(is_symmetry(s, parse_vector_field("dt: 1, dx: 0", {"x"})).verdict == SymmetryVerdict::Proper);
}

TEST_CASE("is_orbital_symmetry: cofactors of rotations and scalings") {
  auto s = is_orbital_symmetry(kX2, kXs);
  REQUIRE(s.verdict == SymmetryVerdict::Orbital);
  CHECK(s.commutator_cofactor == ex("(x*D[1,0](beta)(x,y) + y*D[0,1](beta)(x,y))/beta(x,y)"));
  auto r = is_orbital_symmetry(kX2, kXr);
  REQUIRE(r.verdict == SymmetryVerdict::Orbital);
  CHECK(r.commutator_cofactor == ex("(x*D[0,1](beta)(x,y) - y*D[1,0](beta)(x,y))/beta(x,y)"));
  CHECK(orbital_report_consistent(kX2, s));
  CHECK(orbital_report_consistent(kX2, r));

  auto p = is_orbital_symmetry(kEx1, vf("dx: y, dy: -x"));
  CHECK(p.verdict == SymmetryVerdict::Proper);
  CHECK(p.lambda.is_zero());

  CHECK_THROWS_AS(is_orbital_symmetry(sys("vars x, y; x' = 0; y' = 0"), kXr), DomainError);
}

TEST_CASE("trivial_orbital: examples") {
  auto one = trivial_orbital(kEx1, Expr(1));
  CHECK(one.field == kEx1.field());
  CHECK(one.lambda.is_zero());
  DynSystem lin = sys("vars x; x' = x");
  auto px = trivial_orbital(lin, ex("x", {"x"}));
  CHECK(px.field.component(0) == ex("x^2", {"x"}));
  CHECK(px.lambda == ex("x", {"x"}));
  DynSystem s = sys("vars x, y; x' = y; y' = -x + x^2");
  Expr theta = ex("1 + x^2 + y^4");
  auto pt = trivial_orbital(s, theta);
  CHECK(pt.lambda == s.field().apply(theta));
  CHECK_THROWS_AS(trivial_orbital(s, Expr(0)), DomainError);
}

TEST_CASE("find_lpti_symmetries: examples") {
  Ansatz lin;
  lin.degree = 1;
  lin.homogeneous = true;
  auto euler = find_lpti_symmetries(sys("vars x, y; x' = x; y' = y"), lin);
  CHECK(euler.size() == 4);

  Ansatz a1;
  a1.degree = 1;
  DynSystem rot = sys("vars x, y; x' = -y; y' = x");
  auto basis = find_lpti_symmetries(rot, a1);
  CHECK(basis.size() == 2);
  CHECK(in_span(basis, kXr, 1));
  CHECK(in_span(basis, kXs, 1));
  for (const auto& b : basis) CHECK(in_span({kXr, kXs}, b, 1));

  Ansatz a0;
  a0.degree = 0;
  CHECK(find_lpti_symmetries(sys("vars x, y; x' = x + y^2; y' = -y"), a0).empty());
  CHECK_THROWS_AS(find_lpti_symmetries(kEx1, a1), NotPolynomial);
}

// (field, lambda) pairs as coefficient rows: field monomials up to `degree`, then lambda's.
RationalVector pair_row(const VectorField& v, const Expr& lambda, int degree) {
  RationalVector row = field_coefficients(v, degree);
  Polynomial l = Polynomial::from_expr(lambda, v.variables());
  for (const auto& m : monomials_up_to(v.variables().size(), degree)) row.push_back(l.coefficient(m));
  return row;
}

bool pair_in_span(const std::vector<OrbitalPair>& basis, const VectorField& v, const Expr& lambda, int degree) {
  RationalMatrix rows;
  for (const auto& p : basis) rows.push_back(pair_row(p.field, p.lambda, degree));
  RationalVector target = pair_row(v, lambda, degree);
  const std::size_t r0 = rank(rows, target.size());
  rows.push_back(target);
  return rank(rows, target.size()) == r0;
}

TEST_CASE("find_orbital_symmetries: examples") {
  Ansatz a;
  a.degree = 1;
  a.lambda_degree = 0;
  auto pairs = find_orbital_symmetries(sys("vars x, y; x' = x; y' = y"), a);
  CHECK(pair_in_span(pairs, kXr, 0, 1));
  CHECK(pair_in_span(pairs, kXs, 0, 1));

  // [X_s, f] = f for f homogeneous of degree 2, so lambda = -1 in the b = lambda f form.
  Ansatz b;
  b.degree = 1;
  b.lambda_degree = 1;
  DynSystem x2 = sys("vars x, y; x' = -x*y; y' = x^2");
  auto found = find_orbital_symmetries(x2, b);
  CHECK(pair_in_span(found, kXs, -1, 1));
  CHECK_FALSE(pair_in_span(found, kXs, 0, 1));
  auto r = is_orbital_symmetry(x2, kXs);
  REQUIRE(r.verdict == SymmetryVerdict::Orbital);
  CHECK(r.commutator_cofactor == Expr(1));
  for (const auto& p : found) {
    auto c = is_orbital_symmetry(x2, p.field);
    CHECK(c.verdict != SymmetryVerdict::None);
    CHECK(c.lambda == p.lambda);
  }
}

TEST_CASE("property: fields scaled by functions of a first integral") {
  DynSystem ex2 = sys("vars x, y; x' = -(1 + x^2 + y^2)*y; y' = (1 + x^2 + y^2)*x");
  VectorField s = kXr;
  Expr P = ex("x^2 + y^2");
  REQUIRE(verify_darboux(ex2, P)->trivial);
  for (const Expr& g : {P, P * P, Expr(1) + P, Expr(1) + P * P}) {
    CHECK(is_symmetry(ex2, s.scaled(g)).verdict == SymmetryVerdict::Proper);
  }
}

TEST_CASE("property: combinations with first-integral coefficients") {
  DynSystem osc = sys("vars x, y; x' = -y; y' = x");
  Expr P = ex("x^2 + y^2");
  std::mt19937 rng(31);
  for (int i = 0; i < 10; ++i) {
    std::uniform_int_distribution<int> c(-3, 3);
    Expr p1 = Expr(c(rng)) + Expr(c(rng)) * P, p2 = Expr(c(rng)) * P * P + Expr(c(rng));
    VectorField comb = kXr.scaled(p1) + kXs.scaled(p2);
    CHECK(is_symmetry(osc, comb).verdict == SymmetryVerdict::Proper);
  }
}

TEST_CASE("property: brackets of orbital symmetries") {
  auto s = is_orbital_symmetry(kX2, kXs);
  auto r = is_orbital_symmetry(kX2, kXr);
  VectorField br = lie_bracket(kXs, kXr);
  auto b = is_orbital_symmetry(kX2, br);
  CHECK(b.verdict != SymmetryVerdict::None);
  Expr predicted = orbital_bracket_cofactor(kXs, s.commutator_cofactor, kXr, r.commutator_cofactor);
  CHECK((b.commutator_cofactor - predicted).is_zero());

  DynSystem x1 = sys("vars x, y; x' = -(x^2+y^2)^2*y; y' = (x^2+y^2)^2*x");
  Expr mu = ex("x^2 + y^2");
  auto base = is_orbital_symmetry(x1, kXs);
  REQUIRE(base.verdict == SymmetryVerdict::Orbital);
  auto scaled = is_orbital_symmetry(x1, kXs.scaled(mu));
  REQUIRE(scaled.verdict == SymmetryVerdict::Orbital);
  CHECK(scaled.commutator_cofactor == mu * base.commutator_cofactor);
}

TEST_CASE("property: proper symmetries are orbital with zero cofactor") {
  std::mt19937 rng(32);
  for (int i = 0; i < 10; ++i) {
    VectorField f = random_field(rng, kXY, 2);
    if (f.is_zero()) continue;
    DynSystem s(kXY, f.components());
    Ansatz a;
    a.degree = 2;
    for (const auto& v : find_lpti_symmetries(s, a)) {
      auto r = is_orbital_symmetry(s, v);
      CHECK(r.verdict == SymmetryVerdict::Proper);
      CHECK(r.lambda.is_zero());
    }
  }
}
