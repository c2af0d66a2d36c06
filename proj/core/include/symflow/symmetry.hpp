#pragma once

#include <symflow/expr.hpp>
#include <symflow/fields.hpp>

#include <string>
#include <vector>

namespace symflow {

enum class SymmetryVerdict { Proper, Orbital, None };

const char* to_string(SymmetryVerdict v);

// b = Q_t + {f, Q} for the evolutionary representative Q of v.
// Orbital: b = lambda f, so lambda(theta f) = D_t theta. The commutator form
// [v, f] = mu f uses mu = -lambda.
struct SymmetryReport {
  SymmetryVerdict verdict = SymmetryVerdict::None;
  Expr lambda;
  Expr commutator_cofactor;
  std::vector<Expr> residual;
  std::size_t pivot = 0;  // component used to extract lambda
};

SymmetryReport is_symmetry(const DynSystem& sys, const VectorField& v);

// Throws DomainError when every component of f vanishes identically.
SymmetryReport is_orbital_symmetry(const DynSystem& sys, const VectorField& v);

struct OrbitalPair {
  VectorField field;
  Expr lambda;
};

// v = theta f with lambda = theta_t + f.grad(theta). Throws DomainError for theta = 0.
OrbitalPair trivial_orbital(const DynSystem& sys, const Expr& theta);

// Cofactor of [s, r] when s, r are orbital with cofactors sigma, rho: s(rho) - r(sigma).
Expr orbital_bracket_cofactor(const VectorField& s, const Expr& sigma, const VectorField& r, const Expr& rho);

struct Ansatz {
  int degree = 1;
  int lambda_degree = 0;
  bool homogeneous = false;       // only monomials of exactly `degree` in s
  bool time_dependent = false;    // s and lambda polynomial in (x, t)
};

// Basis of polynomial solutions of s_t + {f, s} = 0 within the ansatz.
// Requires a polynomial system with numeric parameters (NotPolynomial otherwise).
std::vector<VectorField> find_lpti_symmetries(const DynSystem& sys, const Ansatz& a);

// Basis of polynomial solutions (s, lambda) of s_t + {f, s} = lambda f.
std::vector<OrbitalPair> find_orbital_symmetries(const DynSystem& sys, const Ansatz& a);

}  // namespace symflow
