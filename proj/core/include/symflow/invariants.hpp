#pragma once

#include <symflow/evaluate.hpp>
#include <symflow/expr.hpp>
#include <symflow/fields.hpp>
#include <symflow/manifold.hpp>
#include <symflow/polynomial.hpp>

#include <optional>
#include <string>
#include <vector>

namespace symflow {

enum class Vanish { Symbolic, Numeric, No, Unknown };

const char* to_string(Vanish v);

// Whether e vanishes on the real points of m: reduction to 0, else |e| <= 1e-8 max(1, |x|)
// at sampled points (25 by default). Unknown when nothing can be sampled or evaluated.
Vanish vanishes_on(const Expr& e, const AlgebraicManifold& m, const NumericEnv& env = {},
                   const std::vector<std::vector<double>>* samples = nullptr);

// Basis of nonconstant polynomial first integrals of degree <= degree.
std::vector<Polynomial> find_first_integrals(const DynSystem& sys, int degree);

// f.grad(P) = q (P - c) with polynomial cofactor q.
struct DarbouxResult {
  Expr P;
  Expr q;
  Rational c;
  bool trivial = false;  // q = 0: P is a full first integral
};

// Exact division of f.grad(P) by P - c. Throws DomainError for constant P.
std::optional<DarbouxResult> verify_darboux(const DynSystem& sys, const Expr& P, const Rational& c = 0);

struct DarbouxSearch {
  std::vector<DarbouxResult> results;
  bool needs_hint = false;        // some branch was not linearizable
  std::vector<std::string> notes;
};

// With a cofactor hint the search is a linear solve for P. Without one, each admissible
// leading monomial of P is normalized to 1 and the bilinear conditions are solved by
// linear elimination and simple case splits; free coefficients left at the end are set to 0.
DarbouxSearch find_darboux(const DynSystem& sys, int deg_p, int deg_q, const std::optional<Expr>& cofactor_hint = std::nullopt);

enum class CertificateGrade { Symbolic, Numeric, Vacuous, Inconclusive, Failed };

const char* to_string(CertificateGrade g);

struct InvarianceCertificate {
  bool invariant = false;
  CertificateGrade grade = CertificateGrade::Failed;
  std::string method;                         // "division", "chart", "sampling"
  std::vector<std::vector<Expr>> cofactors;   // f.grad(g_i) = sum_j h_ij g_j (division)
  std::vector<Expr> remainders;
  std::size_t samples = 0;
  double max_residual = 0.0;
  std::string warning;
};

// Symbolic division against the generator list, chart substitution, then numeric
// sampling (25 points, |f.grad g| <= 1e-9 (1 + |f|)).
InvarianceCertificate is_invariant_manifold(const DynSystem& sys, const AlgebraicManifold& m, const NumericEnv& env = {});

struct Refinement {
  AlgebraicManifold manifold;
  std::vector<Expr> added;
  int iterations = 0;
  bool capped = false;
};

inline constexpr int kRefinementCap = 10;

// Starts from the given generators and appends f.grad(g) whenever it does not reduce to 0.
// Remainders that vanish at sampled points of the current variety are not added.
Refinement refine_generators(const DynSystem& sys, const std::vector<Expr>& generators, int cap = kRefinementCap,
                             const NumericEnv& env = {});
// Refinement of the zero set of v (tau-free).
Refinement tangency_refinement(const DynSystem& sys, const VectorField& v, int cap = kRefinementCap);

enum class ConditionalVerdict { ConditionalSymmetry, ConditionalOrbital, Partial, None };

const char* to_string(ConditionalVerdict v);

struct ConditionalOptions {
  // Reject witnesses that consist of equilibria only.
  bool exclude_equilibria = true;
  NumericEnv env;
};

struct ConditionalReport {
  ConditionalVerdict verdict = ConditionalVerdict::None;
  AlgebraicManifold witness;
  std::vector<Expr> initial_generators;
  InvarianceCertificate certificate;
  std::vector<Expr> restricted_bracket;   // partial: {f, s} modulo the ideal
  std::vector<Expr> tangency;             // partial: v.grad(g_i) modulo the ideal
  int iterations = 0;
  bool trivial = false;
  std::string note;
};

ConditionalReport is_conditional_symmetry(const DynSystem& sys, const VectorField& v, const ConditionalOptions& opts = {});
ConditionalReport is_conditional_orbital_symmetry(const DynSystem& sys, const VectorField& v,
                                                  const ConditionalOptions& opts = {});
// Throws Error when m is not invariant under f.
ConditionalReport is_partial_symmetry(const DynSystem& sys, const VectorField& v, const AlgebraicManifold& m,
                                      const NumericEnv& env = {});

// True when every point of the manifold is an equilibrium (f reduces to 0).
bool consists_of_equilibria(const DynSystem& sys, const AlgebraicManifold& m);

// A_ij = d g_i / d x^j, reduced modulo the ideal (chart substitution when available).
std::vector<std::vector<Expr>> cofactor_matrix(const AlgebraicManifold& m);

// Polynomial fields v (degree <= degree) with A v = 0 modulo the ideal.
std::vector<VectorField> solve_tangent_fields(const AlgebraicManifold& m, int degree = 2);

// Nonconstant polynomial P (degree <= degree) with v.grad(P) = 0.
std::vector<Polynomial> characteristic_integrals(const VectorField& v, int degree);

}  // namespace symflow
