#pragma once

#include <symflow/evaluate.hpp>
#include <symflow/fields.hpp>
#include <symflow/manifold.hpp>

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace symflow {

using RhsFunction = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;

struct IntegratorOptions {
  double tol = 1e-9;          // relative and absolute, in [1e-12, 1e-3]
  double min_step = 1e-12;
  double max_step = 0.0;      // 0: |t1 - t0| / 10
  std::size_t max_steps = 2'000'000;
  bool allow_partial = false; // return the part computed before a failure instead of throwing
};

// Accepted steps of an embedded Dormand-Prince 4(5) run with cubic Hermite dense output.
// Times are strictly monotone in the direction of integration.
class Trajectory {
 public:
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> derivatives;
  std::string method = "dormand-prince 4(5)";
  double tolerance = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  bool complete = true;
  std::string error;

  double start() const { return times.front(); }
  double end() const { return times.back(); }
  // Hermite interpolation; t is clamped to the covered interval.
  std::vector<double> at(double t) const;
};

Trajectory integrate(const RhsFunction& f, std::vector<double> x0, double t0, double t1,
                     const IntegratorOptions& opts = {});
// Throws UnboundSymbol for unbound parameters or formal functions.
Trajectory integrate(const DynSystem& sys, std::vector<double> x0, double t0, double t1, const IntegratorOptions& opts = {},
                     const NumericEnv& env = {});

// x after flowing along the tau-free field v for parameter eps (negative allowed).
std::vector<double> flow_map(const VectorField& v, double eps, std::vector<double> x, const NumericEnv& env = {},
                             double tol = 1e-12);

struct VerificationReport {
  std::string check;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::string note;
};

// Maps the solution from x0 on [0, T] through the flow of v (time shifted along tau) and
// compares with the solution from the mapped initial point; sup of |defect| / (1 + |x|).
VerificationReport verify_symmetry_numeric(const DynSystem& sys, const VectorField& v, const std::vector<double>& x0,
                                           double eps, double T, double tol, const NumericEnv& env = {});

// Directed Hausdorff distance from the mapped trajectory (5% trimmed at both ends) to the
// solution from the mapped initial point on [-T, 2T]; pass iff <= tol (1 + diameter).
VerificationReport verify_orbital_numeric(const DynSystem& sys, const VectorField& v, const std::vector<double>& x0,
                                          double eps, double T, double tol, const NumericEnv& env = {});

// max_t |g_i(x(t))| along solutions from 10 sampled points of m. Throws DomainError when
// no points of m can be sampled.
VerificationReport verify_invariant_manifold_numeric(const DynSystem& sys, const AlgebraicManifold& m, double T,
                                                     double tol, const NumericEnv& env = {});

struct SeparationReport {
  double time_rate = 0.0;       // slope of log |x1 - x0| against t
  double arclength_rate = 0.0;  // slope against arclength of the reference solution
  std::vector<double> times;
  std::vector<double> arclength;
  std::vector<double> separation;
};

SeparationReport separation_diagnostic(const DynSystem& sys, const std::vector<double>& x0, double delta,
                                       const std::vector<double>& direction, double T, const NumericEnv& env = {});

}  // namespace symflow
