#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/evaluate.hpp>
#include <symflow/manifold.hpp>

#include <doctest.h>

#include <cmath>

using namespace symflow;
using namespace symflow::test;

namespace {

const DynSystem kEx1 = sys("vars x, y; funcs alpha/1, beta/1\n"
                           "x' = alpha(x^2+y^2)*x - beta(x^2+y^2)*y\n"
                           "y' = beta(x^2+y^2)*x + alpha(x^2+y^2)*y");

}  // namespace

TEST_CASE("lie_bracket: examples") {
  VectorField f = kEx1.field();
  CHECK(lie_bracket(f, f).is_zero());
  VectorField xr = vf("dx: -y, dy: x"), xs = vf("dx: x, dy: y");
  CHECK(lie_bracket(xr, xs).is_zero());
  VectorField x1 = vf("dx: -omega(x^2+y^2)*y, dy: omega(x^2+y^2)*x");
  VectorField want = xr.scaled(ex("2*(x^2+y^2)*D[1](omega)(x^2+y^2)"));
  CHECK(lie_bracket(xs, x1) == want);
  CHECK_THROWS(lie_bracket(xr, parse_vector_field("dx: 1, dy: 0, dz: 0", kXYZ)));
}

TEST_CASE("lie_bracket with time components uses the extended space") {
  VectorField a = parse_vector_field("dt: 1, dx: 0", {"x"});
  VectorField b = parse_vector_field("dx: t*x", {"x"});
  VectorField c = lie_bracket(a, b);
  CHECK(c.component(0) == ex("x", {"x"}));
}

TEST_CASE("lie_poisson: examples") {
  std::vector<Expr> f = kEx1.rhs();
  for (const auto& c : lie_poisson(f, f, kXY)) CHECK(c.is_zero());
  for (const auto& c : lie_poisson({ex("x"), ex("y")}, {ex("-y"), ex("x")}, kXY)) CHECK(c.is_zero());
  CHECK_THROWS(lie_poisson({ex("x")}, {ex("x"), ex("y")}, kXY));
}

TEST_CASE("evolutionary_representative: examples") {
  DynSystem s = sys("vars x, y; params c; funcs alpha/1, beta/1\n"
                    "x' = alpha(x^2+y^2)*x - beta(x^2+y^2)*y; y' = beta(x^2+y^2)*x + alpha(x^2+y^2)*y");
  VectorField rot = vf("dx: y, dy: -x");
  CHECK(evolutionary_representative(rot, s) == rot);
  VectorField dt = VectorField::time_translation(kXY);
  VectorField q = evolutionary_representative(dt, s);
  CHECK(q.component(0) == -s.rhs()[0]);
  CHECK(q.component(1) == -s.rhs()[1]);
  VectorField v = vf("dt: c, dx: y, dy: -x");
  VectorField qv = evolutionary_representative(v, s);
  CHECK(qv.component(0) == ex("y - c*(alpha(x^2+y^2)*x - beta(x^2+y^2)*y)"));
  CHECK(qv.component(1) == ex("-x - c*(beta(x^2+y^2)*x + alpha(x^2+y^2)*y)"));
  CHECK_FALSE(qv.has_tau());
}

TEST_CASE("pushforward: identity map") {
  CoordinateMap id{kXY, {"u", "v"}, {ex("x"), ex("y")}, {ex("u", {"u", "v"}), ex("v", {"u", "v"})}};
  auto r = pushforward(kEx1, id);
  CHECK(r.invertibility == InvertibilityCheck::Symbolic);
  CHECK(r.system.rhs()[0] == substitute(kEx1.rhs()[0], {{"x", Expr::variable("u")}, {"y", Expr::variable("v")}}));
}

TEST_CASE("pushforward: rotation-invariant system in polar coordinates") {
  const std::vector<std::string> polar = {"r", "th"};
  CoordinateMap m{kXY, polar, {ex("sqrt(x^2+y^2)"), ex("atan2(y, x)")},
                  {ex("r*cos(th)", polar), ex("r*sin(th)", polar)}};
  auto res = pushforward(kEx1, m);
  CHECK(res.invertibility != InvertibilityCheck::Failed);
  FunctionTable funcs;
  funcs["alpha"] = FunctionBinding{1, [](std::span<const double> a) { return 1.0 - a[0]; }, {}};
  funcs["beta"] = FunctionBinding{1, [](std::span<const double> a) { return 2.0 + a[0]; }, {}};
  for (double r : {0.3, 0.8, 1.4}) {
    for (double th : {0.2, 1.1, 2.5}) {
      std::map<std::string, double> pt = {{"r", r}, {"th", th}};
      // The chain rule gives r' = r alpha(r^2); d(r^2)/dt is 2 r^2 alpha(r^2).
      CHECK(evaluate(res.system.rhs()[0], pt, funcs) == doctest::Approx(r * (1 - r * r)).epsilon(1e-9));
      CHECK(evaluate(res.system.rhs()[1], pt, funcs) == doctest::Approx(2 + r * r).epsilon(1e-9));
    }
  }
}

TEST_CASE("pushforward: conserved radius is reported constant") {
  DynSystem s = sys("vars x, y; funcs beta/1; x' = -beta(x^2+y^2)*y; y' = beta(x^2+y^2)*x");
  const std::vector<std::string> to = {"P", "th"};
  CoordinateMap m{kXY, to, {ex("x^2+y^2"), ex("atan2(y, x)")},
                  {ex("sqrt(P)*cos(th)", to), ex("sqrt(P)*sin(th)", to)}};
  auto res = pushforward(s, m);
  CHECK(res.system.rhs()[0].is_zero());
  REQUIRE(res.constant_variables.size() == 1);
  CHECK(res.constant_variables[0] == "P");
  CHECK(std::find(res.absent_variables.begin(), res.absent_variables.end(), "th") != res.absent_variables.end());
}

TEST_CASE("pushforward: non-invertible map is rejected") {
  CoordinateMap bad{kXY, {"u", "v"}, {ex("x + y"), ex("x - y")}, {ex("u", {"u", "v"}), ex("v", {"u", "v"})}};
  CHECK_THROWS_AS(pushforward(kEx1, bad), DomainError);
}

TEST_CASE("restrict: examples") {
  DynSystem ex9 = sys("vars x, y, z; funcs alpha/1, beta/1, f/1, g/2\n"
                      "x' = alpha(x^2+y^2)*x - beta(x^2+y^2)*y\n"
                      "y' = beta(x^2+y^2)*x + alpha(x^2+y^2)*y\n"
                      "z' = f(z) + g(x, y)*(x^2 + y^2)");
  AlgebraicManifold zaxis(kXYZ, {ex("x"), ex("y")}, parse_chart("x: 0, y: 0", kXYZ));
  auto r = restrict(ex9, zaxis);
  CHECK(r.system.variables() == std::vector<std::string>{"z"});
  CHECK(r.system.rhs()[0] == ex("f(z)"));
  CHECK(r.consistent_with_flow);

  auto whole = restrict(kEx1, AlgebraicManifold::whole_space(kXY));
  CHECK(whole.system == kEx1);

  CHECK_THROWS(AlgebraicManifold(kXYZ, {ex("x"), ex("y")}, parse_chart("x: 1, y: 0", kXYZ)));
}

TEST_CASE("property: antisymmetry and Jacobi identity") {
  std::mt19937 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto& vars = i % 2 ? kXY : kXYZ;
    VectorField a = random_field(rng, vars, 3), b = random_field(rng, vars, 3), c = random_field(rng, vars, 2);
    CHECK((lie_bracket(a, b) + lie_bracket(b, a)).is_zero());
    VectorField jac = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) +
                      lie_bracket(c, lie_bracket(a, b));
    CHECK(jac.is_zero());
  }
}

TEST_CASE("property: bracket components equal the Lie-Poisson bracket") {
  std::mt19937 rng(22);
  for (int i = 0; i < 50; ++i) {
    VectorField f = random_field(rng, kXY, 3), s = random_field(rng, kXY, 3);
    CHECK(lie_bracket(f, s).components() == lie_poisson(f.components(), s.components(), kXY));
  }
}

TEST_CASE("property: pushforward is functorial") {
  DynSystem s = sys("vars x, y; x' = y - x^3; y' = -x + x*y");
  const std::vector<std::string> uv = {"u", "v"}, ab = {"a", "b"};
  CoordinateMap m1{kXY, uv, {ex("x + 2*y"), ex("y")}, {ex("u - 2*v", uv), ex("v", uv)}};
  CoordinateMap m2{uv, ab, {ex("u", uv), ex("v + u^2", uv)}, {ex("a", ab), ex("b - a^2", ab)}};
  DynSystem twice = pushforward(pushforward(s, m1).system, m2).system;
  DynSystem once = pushforward(s, compose(m1, m2)).system;
  for (double a : {-0.7, 0.1, 0.9}) {
    for (double b : {-0.4, 0.6}) {
      for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::fabs(evaluate(twice.rhs()[i], {{"a", a}, {"b", b}}) - evaluate(once.rhs()[i], {{"a", a}, {"b", b}})) <=
              1e-9);
      }
    }
  }
}
