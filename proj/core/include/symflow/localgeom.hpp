#pragma once

#include <symflow/evaluate.hpp>
#include <symflow/expr.hpp>
#include <symflow/fields.hpp>
#include <symflow/invariants.hpp>
#include <symflow/manifold.hpp>
#include <symflow/polynomial.hpp>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace symflow {

inline constexpr double kHyperbolicThreshold = 1e-8;

struct FixedPoint {
  std::vector<double> location;
  std::optional<std::vector<Rational>> exact;  // f vanishes identically at these coordinates
  double residual = 0.0;                       // |f(x0)| (0 for exact points)
  bool isolated = true;
  std::string isolation_note;

  bool is_exact() const { return exact.has_value(); }
};

struct FixedPointSearch {
  std::vector<FixedPoint> points;
  std::size_t seeds = 0;
  std::size_t dropped = 0;  // Newton did not converge
  std::string note;
};

struct FixedPointOptions {
  double box = 2.0;
  int grid = 5;  // seeds per axis, capped at 4096 in total
  NumericEnv env;
};

// Newton refinement from grid seeds, deduplicated within 1e-8. Small rationals that make
// f vanish symbolically are reported exactly; integer points of the box are also tried
// symbolically, which is the only route when f cannot be evaluated.
FixedPointSearch find_fixed_points(const DynSystem& sys, const FixedPointOptions& opts = {});

struct SpectralSplit {
  std::vector<std::vector<Expr>> jacobian;  // exact entries, when available
  std::vector<std::vector<double>> matrix;
  std::vector<std::complex<double>> eigenvalues;
  // Basis vectors of the generalized eigenspaces grouped by the sign of the real part.
  std::vector<std::vector<double>> stable;
  std::vector<std::vector<double>> unstable;
  std::vector<std::vector<double>> center;
  bool exact_classification = false;  // rational triangular Jacobian

  bool hyperbolic() const { return center.empty(); }
};

SpectralSplit spectral_split(const std::vector<std::vector<double>>& a);
SpectralSplit spectral_split(const DynSystem& sys, const FixedPoint& p, const NumericEnv& env = {});

struct VanishingCheck {
  bool pass = false;
  bool exact = false;
  bool conditional = false;  // pass at an isolated point: the point witnesses a conditional symmetry
  std::vector<double> values;
  std::string note;
};

// Necessary condition s(x0) = 0 for a proper symmetry at an isolated equilibrium.
VanishingCheck check_symmetry_vanishes(const VectorField& v, const FixedPoint& p, bool isolated,
                                       const NumericEnv& env = {});

struct TangencyReport {
  std::vector<std::vector<double>> dv;
  double stable_defect = 0.0;    // |(I - P_s) B P_s|
  double unstable_defect = 0.0;
  double center_defect = 0.0;
  bool stable_ok = true;
  bool unstable_ok = true;
  bool center_ok = true;

  bool pass() const { return stable_ok && unstable_ok; }
};

// B = Dv(x0) must map E_s and E_u into themselves (tolerance 1e-9 (1 + |B|)).
TangencyReport tangency_to_subspaces(const VectorField& v, const FixedPoint& p, const SpectralSplit& split,
                                     const NumericEnv& env = {});

struct RestrictedCommutator {
  std::vector<Expr> residual;  // {f, Q} + Q_t reduced modulo the ideal
  std::vector<Vanish> vanishing;
  bool zero = false;
};

// Throws DomainError when v is not tangent to m.
RestrictedCommutator restricted_commutator(const DynSystem& sys, const VectorField& v, const AlgebraicManifold& m,
                                           const NumericEnv& env = {});

struct CenterManifoldSeries {
  std::vector<std::string> center_vars;
  std::vector<std::string> hyperbolic_vars;
  std::vector<Polynomial> h;  // x_h[j] = h[j](x_c), orders 2..order
  int order = 0;
  // residuals[k - 2][j]: order-k part of Dh (f_c) - f_h along the graph.
  std::vector<std::vector<Polynomial>> residuals;

  bool residual_zero() const;
  CenterManifoldSeries truncated(int m) const;
};

// Order-by-order solution of Dh(x_c) f_c(x_c, h) = f_h(x_c, h) for a polynomial system whose
// linear part is block diagonal in (center_vars, the rest). Throws DomainError when the
// blocks do not split, B has spectrum off the imaginary axis, C is not hyperbolic, or an
// order is singular.
CenterManifoldSeries center_manifold_series(const DynSystem& sys, const std::vector<std::string>& center_vars,
                                            int order);

struct CrossingReport {
  double lambda0 = 0.0;
  double speed = 0.0;          // d max Re(mu) / d lambda at lambda0
  bool complex_pair = false;
  double frequency = 0.0;      // |Im mu| of the crossing eigenvalue
  std::vector<std::pair<double, double>> sweep;  // (lambda, max Re mu)
};

// Sweeps max Re spec Df(x0; lambda) over [lo, hi] and bisects the first sign change to 1e-8.
// Throws DomainError when x0 is not fixed at a sampled lambda or no crossing exists.
CrossingReport detect_crossing(const DynSystem& sys, const std::string& parameter, const std::vector<double>& x0,
                               double lo, double hi, int steps = 200, const NumericEnv& env = {});

}  // namespace symflow
