#include "support.hpp"

#include <symflow/errors.hpp>
#include <symflow/localgeom.hpp>
#include <symflow/symmetry.hpp>

#include <doctest.h>

#include <cmath>

using namespace symflow;
using namespace symflow::test;

namespace {

const DynSystem kCircle = sys("vars x, y; x' = (1 - x^2 - y^2)*x - y; y' = x + (1 - x^2 - y^2)*y");

FixedPoint origin(std::size_t n = 2) {
  FixedPoint p;
  p.location.assign(n, 0.0);
  p.exact = std::vector<Rational>(n, Rational(0));
  return p;
}

bool has_point(const FixedPointSearch& s, const std::vector<double>& x) {
  for (const auto& p : s.points) {
    bool same = p.location.size() == x.size();
    for (std::size_t i = 0; same && i < x.size(); ++i) same = std::fabs(p.location[i] - x[i]) < 1e-8;
    if (same) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("find_fixed_points: examples") {
  auto c = find_fixed_points(kCircle);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].is_exact());
  CHECK(has_point(c, {0, 0}));

  auto logistic = find_fixed_points(sys("vars x; x' = x*(1 - x)"));
  CHECK(logistic.points.size() == 2);
  CHECK(has_point(logistic, {0}));
  CHECK(has_point(logistic, {1}));
  for (const auto& p : logistic.points) CHECK(p.is_exact());

  auto cubic = find_fixed_points(sys("vars x, y; x' = -x^3; y' = -y"));
  CHECK(has_point(cubic, {0, 0}));
  CHECK(cubic.points.size() == 1);
}

TEST_CASE("spectral_split: hyperbolic and center directions") {
  auto s = spectral_split(sys("vars x, y; x' = x; y' = -y"), origin());
  CHECK(s.hyperbolic());
  CHECK(s.stable.size() == 1);
  CHECK(s.unstable.size() == 1);
  auto c = spectral_split(sys("vars x, y; x' = -x^3; y' = -y"), origin());
  CHECK_FALSE(c.hyperbolic());
  CHECK(c.center.size() == 1);
  CHECK(c.stable.size() == 1);
  CHECK(c.exact_classification);
}

TEST_CASE("check_symmetry_vanishes: examples") {
  DynSystem s = sys("vars x, y; x' = x + y^2; y' = -y");
  Ansatz a;
  a.degree = 2;
  for (const auto& v : find_lpti_symmetries(s, a)) CHECK(check_symmetry_vanishes(v, origin(), true).pass);
  auto xs = check_symmetry_vanishes(vf("dx: x, dy: y"), origin(), true);
  CHECK(xs.pass);
  CHECK(xs.conditional);
  auto dx = check_symmetry_vanishes(vf("dx: 1, dy: 0"), origin(), true);
  CHECK_FALSE(dx.pass);
}

TEST_CASE("tangency_to_subspaces: examples") {
  DynSystem focus = sys("vars x, y; x' = -x - y; y' = x - y");
  auto split = spectral_split(focus, origin());
  CHECK(tangency_to_subspaces(vf("dx: -y, dy: x"), origin(), split).pass());

  DynSystem saddle = sys("vars x, y; x' = x; y' = -y");
  auto ss = spectral_split(saddle, origin());
  CHECK_FALSE(tangency_to_subspaces(vf("dx: 0, dy: x"), origin(), ss).pass());
  CHECK(tangency_to_subspaces(saddle.field(), origin(), ss).pass());
}

TEST_CASE("restricted_commutator: examples") {
  AlgebraicManifold circle(kXY, {ex("x^2 + y^2 - 1")});
  CHECK(restricted_commutator(kCircle, vf("dx: -y, dy: x"), circle).zero);
  CHECK(restricted_commutator(kCircle, kCircle.field(), circle).zero);

  DynSystem axis = sys("vars x, y, z; x' = -x; y' = -y; z' = z^2");
  AlgebraicManifold zaxis(kXYZ, {ex("x"), ex("y")});
  auto r = restricted_commutator(axis, vf("dz: z", kXYZ), zaxis);
  CHECK_FALSE(r.zero);
  CHECK((r.residual[2] == ex("z^2") || r.residual[2] == ex("-z^2")));
  CHECK_THROWS_AS(restricted_commutator(axis, vf("dx: 1", kXYZ), zaxis), DomainError);
}

TEST_CASE("center_manifold_series: examples") {
  auto flat = center_manifold_series(sys("vars x, y; x' = -x^3; y' = -y"), {"x"}, 10);
  REQUIRE(flat.h.size() == 1);
  CHECK(flat.h[0].is_zero());
  CHECK(flat.residual_zero());

  auto s = center_manifold_series(sys("vars x, y; x' = x*y; y' = -y - x^2"), {"x"}, 5);
  CHECK(s.h[0].to_expr() == ex("-x^2 - 2*x^4"));
  CHECK(s.residual_zero());

  auto dec = center_manifold_series(sys("vars x, y; x' = x^2; y' = -2*y + y^2"), {"x"}, 6);
  CHECK(dec.h[0].is_zero());

  CHECK_THROWS_AS(center_manifold_series(sys("vars x, y; x' = x; y' = -y"), {"x"}, 4), DomainError);
}

TEST_CASE("detect_crossing: examples") {
  auto pitch = detect_crossing(sys("vars x; params lam; x' = lam*x - x^3"), "lam", {0}, -1, 1);
  CHECK(std::fabs(pitch.lambda0) <= 1e-8);
  CHECK(std::fabs(pitch.speed - 1) <= 1e-6);
  CHECK_FALSE(pitch.complex_pair);

  auto hopf = detect_crossing(
      sys("vars x, y; params lam, omega = 2; x' = lam*x - omega*y - x*(x^2 + y^2); y' = omega*x + lam*y - y*(x^2 + y^2)"),
      "lam", {0, 0}, -1, 1);
  CHECK(std::fabs(hopf.lambda0) <= 1e-8);
  CHECK(std::fabs(hopf.speed - 1) <= 1e-6);
  CHECK(hopf.complex_pair);
  CHECK(std::fabs(hopf.frequency - 2) <= 1e-6);

  auto quad = detect_crossing(sys("vars x; params lam; x' = (lam^2 - 1)*x"), "lam", {0}, 0, 3);
  CHECK(std::fabs(quad.lambda0 - 1) <= 1e-8);

  CHECK_THROWS_AS(detect_crossing(sys("vars x; params lam; x' = lam - x"), "lam", {0}, -1, 1), DomainError);
  CHECK_THROWS_AS(detect_crossing(sys("vars x; params lam; x' = -(1 + lam^2)*x"), "lam", {0}, -1, 1), DomainError);
}

TEST_CASE("property: proper symmetries respect hyperbolic subspaces") {
  std::vector<DynSystem> systems = {sys("vars x, y; x' = x; y' = -2*y"), sys("vars x, y; x' = x + y^2; y' = -y"),
                                    sys("vars x, y; x' = -x + x*y; y' = 2*y")};
  Ansatz a;
  a.degree = 2;
  for (const auto& s : systems) {
    auto split = spectral_split(s, origin());
    REQUIRE(split.hyperbolic());
    for (const auto& v : find_lpti_symmetries(s, a)) CHECK(tangency_to_subspaces(v, origin(), split).pass());
  }
}

TEST_CASE("property: center manifold residuals vanish and truncations agree") {
  std::mt19937 rng(51);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int i = 0; i < 8; ++i) {
    std::string text = "vars x, y; x' = " + std::to_string(c(rng)) + "*x*y + " + std::to_string(c(rng)) +
                       "*x^2; y' = -y + " + std::to_string(c(rng)) + "*x^2 + " + std::to_string(c(rng)) + "*x*y";
    DynSystem s = sys(text);
    auto full = center_manifold_series(s, {"x"}, 6);
    CHECK(full.residual_zero());
    for (int m = 2; m < 6; ++m) {
      auto part = center_manifold_series(s, {"x"}, m);
      CHECK(full.truncated(m).h[0] == part.h[0]);
    }
  }
}
