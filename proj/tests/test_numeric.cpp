#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/numeric.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace symflow;
using namespace symflow::test;

namespace {

const DynSystem kCircle = sys("vars x, y; x' = (1 - x^2 - y^2)*x - y; y' = x + (1 - x^2 - y^2)*y");
const VectorField kRot = vf("dx: -y, dy: x");
const VectorField kScale = vf("dx: x, dy: y");

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("integrate: examples") {
  IntegratorOptions o;
  o.tol = 1e-9;
  auto osc = integrate(sys("vars x, y; x' = -y; y' = x"), {1, 0}, 0, 2 * std::numbers::pi, o);
  CHECK(dist(osc.states.back(), {1, 0}) <= 1e-7);
  for (std::size_t i = 1; i < osc.times.size(); ++i) CHECK(osc.times[i] > osc.times[i - 1]);

  auto c = integrate(kCircle, {2, 0}, 0, 20, o);
  const auto& xe = c.states.back();
  CHECK(std::fabs(std::hypot(xe[0], xe[1]) - 1) <= 1e-4);
  // r(t) for r' = r (1 - r^2), r(0) = 2.
  auto mid = c.at(0.5);
  const double r0 = 2, e = std::exp(-1.0);
  const double r = 1 / std::sqrt(1 + (1 / (r0 * r0) - 1) * e);
  CHECK(std::fabs(std::hypot(mid[0], mid[1]) - r) <= 1e-6);

  auto g = integrate(sys("vars x; x' = x"), {1}, 0, 1, o);
  CHECK(std::fabs(g.states.back()[0] - std::numbers::e) <= 1e-7);
}

TEST_CASE("integrate: errors") {
  IntegratorOptions o;
  CHECK_THROWS_AS(integrate(sys("vars x; x' = x^2"), {1}, 0, 2, o), IntegrationError);
  o.allow_partial = true;
  auto part = integrate(sys("vars x; x' = x^2"), {1}, 0, 2, o);
  CHECK_FALSE(part.complete);
  CHECK(part.end() < 1.0 + 1e-6);
  CHECK_THROWS_AS(integrate(sys("vars x; params a; x' = a*x"), {1}, 0, 1), UnboundSymbol);
  o.tol = 1e-2;
  o.allow_partial = false;
  CHECK_THROWS(integrate(sys("vars x; x' = x"), {1}, 0, 1, o));
}

TEST_CASE("flow_map: examples") {
  CHECK(dist(flow_map(kRot, std::numbers::pi / 2, {1, 0}), {0, 1}) <= 1e-8);
  CHECK(dist(flow_map(kRot, 0, {0.3, 0.4}), {0.3, 0.4}) == 0);
  const double eps = 0.7;
  CHECK(dist(flow_map(kScale, eps, {1, 1}), {std::exp(eps), std::exp(eps)}) <= 1e-8);
}

TEST_CASE("verify_symmetry_numeric: examples") {
  auto r = verify_symmetry_numeric(kCircle, kRot, {0.5, 0.2}, 0.3, 10, 1e-6);
  CHECK(r.pass);
  CHECK(r.max_residual <= r.tolerance);
  auto s = verify_symmetry_numeric(kCircle, kScale, {0.5, 0.2}, 0.3, 10, 1e-6);
  CHECK_FALSE(s.pass);
  CHECK(s.max_residual > 1e-3);
  auto z = verify_symmetry_numeric(kCircle, kScale, {0.5, 0.2}, 0, 10, 1e-6);
  CHECK(z.pass);
  CHECK(z.max_residual == 0);
}

TEST_CASE("verify_orbital_numeric: examples") {
  DynSystem x2 = sys("vars x, y; x' = -(1 + x^2)*y; y' = (1 + x^2)*x");
  CHECK(verify_orbital_numeric(x2, kScale, {0.6, 0.1}, 0.2, 10, 1e-6).pass);

  DynSystem a1 = sys("vars x, y; x' = -(x^2 + y^2)*y; y' = (x^2 + y^2)*x");
  CHECK(verify_orbital_numeric(a1, kScale, {0.8, 0}, 0.3, 20, 1e-6).pass);
  CHECK_FALSE(verify_symmetry_numeric(a1, kScale, {0.8, 0}, 0.3, 20, 1e-6).pass);

  CHECK(verify_orbital_numeric(kCircle, kCircle.field().scaled(2), {0.5, 0.2}, 0.3, 10, 1e-6).pass);
}

TEST_CASE("verify_invariant_manifold_numeric: examples") {
  CHECK(verify_invariant_manifold_numeric(kCircle, AlgebraicManifold(kXY, {ex("x^2 + y^2 - 1")}), 20, 1e-6).pass);
  DynSystem axis = sys("vars x, y, z; x' = -x + y*z; y' = -y - x*z; z' = z*(1 - z)");
  CHECK(verify_invariant_manifold_numeric(axis, AlgebraicManifold(kXYZ, {ex("x"), ex("y")}), 5, 1e-6).pass);
  DynSystem shear = sys("vars x, y; x' = y; y' = 0");
  CHECK_FALSE(verify_invariant_manifold_numeric(shear, AlgebraicManifold(kXY, {ex("x - 1")}), 5, 1e-6).pass);
  CHECK_THROWS_AS(verify_invariant_manifold_numeric(shear, AlgebraicManifold(kXY, {ex("x^2 + y^2 + 1")}), 5, 1e-6),
                  DomainError);
}

TEST_CASE("separation_diagnostic: examples") {
  auto lin = separation_diagnostic(sys("vars x, y; x' = x; y' = y"), {1, 0}, 1e-6, {0, 1}, 10);
  CHECK(std::fabs(lin.time_rate - 1) <= 0.05);
  auto e5 = separation_diagnostic(sys("vars x, y; x' = exp(-x); y' = y*exp(-x)"), {0, 0}, 1e-6, {0, 1}, 40);
  CHECK(e5.time_rate < 0.1);
  CHECK(e5.arclength_rate > 0.5);
  auto osc = separation_diagnostic(sys("vars x, y; x' = -y; y' = x"), {1, 0}, 1e-6, {1, 0}, 20);
  CHECK(std::fabs(osc.time_rate) <= 0.01);
  CHECK(std::fabs(osc.arclength_rate) <= 0.01);
}

TEST_CASE("property: global error shrinks with the tolerance") {
  DynSystem osc = sys("vars x, y; x' = -y; y' = x");
  std::vector<double> errs;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    IntegratorOptions o;
    o.tol = tol;
    auto t = integrate(osc, {1, 0}, 0, 10, o);
    errs.push_back(dist(t.states.back(), {std::cos(10.0), std::sin(10.0)}));
  }
  CHECK(errs[1] * 10 <= errs[0]);
  CHECK(errs[2] * 10 <= errs[1]);
}

TEST_CASE("property: flow maps invert") {
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& v : {kRot, kScale, vf("dx: y, dy: x*y"), vf("dx: -y*(x^2+y^2), dy: x*(x^2+y^2)")}) {
    for (int i = 0; i < 5; ++i) {
      std::vector<double> x = {u(rng), u(rng)};
      const double eps = 0.4 * u(rng);
      CHECK(dist(flow_map(v, eps, flow_map(v, -eps, x)), x) <= 1e-8);
    }
  }
}

TEST_CASE("property: symbolic verdicts agree with numeric checks") {
  DynSystem x2 = sys("vars x, y; x' = -(1 + x^2)*y; y' = (1 + x^2)*x");
  CHECK(verify_symmetry_numeric(kCircle, kRot, {0.3, -0.4}, 0.3, 20, 1e-6).pass);
  CHECK(verify_orbital_numeric(x2, kRot, {0.6, 0.1}, 0.2, 10, 1e-6).pass);
  CHECK(verify_symmetry_numeric(sys("vars x, y; x' = x; y' = y"), kRot, {1, 0.5}, 0.3, 5, 1e-6).pass);
}
