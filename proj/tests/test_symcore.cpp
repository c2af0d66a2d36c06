#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/evaluate.hpp>

#include <doctest.h>

#include <cmath>

using namespace symflow;
using namespace symflow::test;

TEST_CASE("differentiate: examples") {
  CHECK(differentiate(ex("x^2*y"), "x") == ex("2*x*y"));
  CHECK(differentiate(ex("omega(x^2 + y^2)"), "x") == ex("2*x*D[1](omega)(x^2 + y^2)"));
  CHECK(differentiate(ex("exp(-1/(2*x^2))"), "x") == ex("x^(-3)*exp(-1/(2*x^2))"));
  CHECK(differentiate(ex("D[0,1](beta)(x, y)"), "y") == ex("D[0,2](beta)(x, y)"));
}

TEST_CASE("differentiate: unknown variable") {
  const std::vector<std::string> declared = {"x", "y"};
  CHECK_THROWS_AS(differentiate(ex("x*w"), "w", declared), UnknownVariable);
}

TEST_CASE("normalize: examples") {
  CHECK(normalize(Expr::raw_sum({ex("x"), ex("x")})) == ex("2*x"));
  CHECK(normalize(ex("omega(x^2+y^2)*1 - omega(x^2+y^2)")).is_zero());
  CHECK(normalize(ex("(x+y)^2 - x^2 - 2*x*y")) == ex("y^2"));
  const Expr raw = Expr::raw_product({Expr::raw_sum({ex("x"), ex("y")}), Expr::raw_power(ex("x - y"), 1)});
  const Expr once = normalize(raw);
  CHECK(normalize(once).str() == once.str());
  CHECK(once == ex("x^2 - y^2"));
}

TEST_CASE("exact_divide: examples") {
  auto P = [](const char* s) { return Polynomial::from_expr(ex(s, kXY), kXY); };
  auto q = exact_divide(P("x^2 - y^2"), P("x - y"));
  REQUIRE(q);
  CHECK(*q == P("x + y"));
  CHECK_FALSE(exact_divide(P("x^2 + y"), P("x")));
  auto r = exact_divide(P("-2*(x^2+y^2)*(x^2+y^2-1)"), P("x^2 + y^2 - 1"));
  REQUIRE(r);
  CHECK(*r == P("-2*x^2 - 2*y^2"));
  CHECK_THROWS(exact_divide(P("x"), Polynomial(kXY)));
}

TEST_CASE("evaluate: examples") {
  CHECK(evaluate(ex("x^2 + y"), {{"x", 2.0}, {"y", 1.0}}) == doctest::Approx(5.0));
  FunctionTable funcs;
  funcs["omega"] = FunctionBinding{1, [](std::span<const double> a) { return a[0]; }, {}};
  CHECK(evaluate(ex("omega(x^2 + y^2)"), {{"x", 2.0}, {"y", 0.0}}, funcs) == doctest::Approx(4.0));
  CHECK(evaluate(ex("exp(-1/(2*x^2))"), {{"x", 1.0}}) == doctest::Approx(0.6065306597126334).epsilon(1e-14));
}

TEST_CASE("evaluate: unbound symbols and domain errors") {
  CHECK_THROWS_AS(evaluate(ex("x + a"), {{"x", 1.0}}), UnboundSymbol);
  CHECK_THROWS_AS(evaluate(ex("g(x)"), {{"x", 1.0}}), UnboundSymbol);
  CHECK_THROWS_AS(evaluate(ex("1/x"), {{"x", 0.0}}), DomainError);
}

TEST_CASE("evaluate: formal derivative by central differences") {
  FunctionTable funcs;
  funcs["g"] = FunctionBinding{1, [](std::span<const double> a) { return std::sin(a[0]); }, {}};
  CHECK(evaluate(ex("D[1](g)(x)"), {{"x", 0.3}}, funcs) == doctest::Approx(std::cos(0.3)).epsilon(1e-8));
}

TEST_CASE("property: p q + q p = 2 p q") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    Expr p = random_poly(rng, kXY, 3), q = random_poly(rng, kXY, 3);
    CHECK(normalize(p * q + q * p) == normalize(Expr(2) * p * q));
  }
}

TEST_CASE("property: differentiate is a derivation") {
  std::mt19937 rng(12);
  for (int i = 0; i < 100; ++i) {
    Expr p = random_poly(rng, kXYZ, 3), q = random_poly(rng, kXYZ, 2);
    CHECK(differentiate(p * q, "x") == p * differentiate(q, "x") + q * differentiate(p, "x"));
  }
}

TEST_CASE("property: exact_divide(p q, q) = p") {
  std::mt19937 rng(13);
  for (int i = 0; i < 50; ++i) {
    auto p = Polynomial::from_expr(random_poly(rng, kXY, 3), kXY);
    auto q = Polynomial::from_expr(random_poly(rng, kXY, 2), kXY);
    auto d = exact_divide(p * q, q);
    REQUIRE(d);
    CHECK(*d == p);
  }
}

TEST_CASE("property: derivative agrees with finite differences") {
  FunctionTable funcs;
  funcs["g"] = FunctionBinding{1, [](std::span<const double> a) { return std::cos(a[0]); }, {}};
  const char* cases[] = {"x^3*y - 2*x*y^2", "exp(-x^2)*y", "g(x*y)*x", "exp(x)/(1 + x^2 + y^2)", "(x^2+y^2)^3"};
  for (const char* c : cases) {
    Expr e = ex(c);
    Expr d = differentiate(e, "x");
    const double x = 0.7, y = -0.4, h = 1e-5;
    double fd = (evaluate(e, {{"x", x + h}, {"y", y}}, funcs) - evaluate(e, {{"x", x - h}, {"y", y}}, funcs)) / (2 * h);
    double an = evaluate(d, {{"x", x}, {"y", y}}, funcs);
    CHECK(std::fabs(an - fd) <= 1e-6 * std::max(1.0, std::fabs(an)));
  }
}

TEST_CASE("polynomial ring axioms are exact") {
  std::mt19937 rng(14);
  for (int i = 0; i < 30; ++i) {
    auto a = Polynomial::from_expr(random_poly(rng, kXY, 2), kXY);
    auto b = Polynomial::from_expr(random_poly(rng, kXY, 2), kXY);
    auto c = Polynomial::from_expr(random_poly(rng, kXY, 2), kXY);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a - a).is_zero());
    const Polynomial ab = a * b;
    for (const auto& [e, coeff] : ab.terms()) CHECK(coeff != 0);
  }
}

TEST_CASE("instantiate substitutes formal symbols and their derivatives") {
  FunctionDefinitions defs;
  defs["omega"] = FunctionDefinition{{"u"}, ex("u^2", {"u"})};
  CHECK(instantiate(ex("D[1](omega)(x^2 + y^2)"), defs) == ex("2*x^2 + 2*y^2"));
}

TEST_CASE("property: gcd recovers a planted common factor") {
  std::mt19937 rng(15);
  for (int i = 0; i < 25; ++i) {
    auto g = Polynomial::from_expr(random_poly(rng, kXYZ, 2), kXYZ);
    auto p = Polynomial::from_expr(random_poly(rng, kXYZ, 2), kXYZ);
    auto q = Polynomial::from_expr(random_poly(rng, kXYZ, 2), kXYZ);
    Polynomial h = gcd(p * g, q * g);
    REQUIRE_FALSE(h.is_zero());
    CHECK(exact_divide(p * g, h));
    CHECK(exact_divide(q * g, h));
    CHECK(exact_divide(h, g.monic()));
    // Cofactors after removing the gcd are coprime.
    CHECK(gcd(*exact_divide(p * g, h), *exact_divide(q * g, h)).is_constant());
  }
  const std::vector<std::string> xy = {"x", "y"};
  auto a = Polynomial::from_expr(ex("x^2 - y^2", xy), xy);
  auto b = Polynomial::from_expr(ex("x^2 + 2*x*y + y^2", xy), xy);
  CHECK(gcd(a, b) == Polynomial::from_expr(ex("x + y", xy), xy));
  CHECK(gcd(a, Polynomial::from_expr(ex("x*y + 1", xy), xy)).is_constant());
}
