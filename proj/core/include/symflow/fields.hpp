#pragma once

#include <symflow/expr.hpp>
#include <symflow/polynomial.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace symflow {

class AlgebraicManifold;

// Name of the time symbol; fields may depend on it, systems may not.
inline constexpr const char* kTime = "t";

struct Parameter {
  std::string name;
  std::optional<Rational> value;
  friend bool operator==(const Parameter&, const Parameter&) = default;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(std::vector<std::string> vars, std::vector<Expr> components, std::optional<Expr> tau = std::nullopt);

  static VectorField zero(std::vector<std::string> vars);
  static VectorField time_translation(std::vector<std::string> vars);

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Expr>& components() const { return comps_; }
  const Expr& component(std::size_t i) const { return comps_.at(i); }
  const std::optional<Expr>& tau() const { return tau_; }
  bool has_tau() const { return tau_.has_value() && !tau_->is_zero(); }
  std::size_t dimension() const { return vars_.size(); }
  bool is_zero() const;
  bool depends_on_time() const;

  // Applies the derivation v = tau d_t + s^i d_i to a scalar.
  Expr apply(const Expr& h) const;
  VectorField scaled(const Expr& factor) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend bool operator==(const VectorField& a, const VectorField& b);

  std::string str() const;

 private:
  std::vector<std::string> vars_;
  std::vector<Expr> comps_;
  std::optional<Expr> tau_;
};

class DynSystem {
 public:
  DynSystem() = default;
  DynSystem(std::vector<std::string> vars, std::vector<Expr> rhs, std::vector<Parameter> params = {},
            std::map<std::string, int> functions = {});

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Expr>& rhs() const { return rhs_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const std::map<std::string, int>& functions() const { return funcs_; }
  std::size_t dimension() const { return vars_.size(); }

  VectorField field() const { return VectorField(vars_, rhs_); }
  std::map<std::string, Expr> parameter_values() const;
  std::map<std::string, double> numeric_parameters() const;
  // Parameters with values substituted into the right-hand sides.
  DynSystem with_parameter_values() const;
  // Throws NotPolynomial unless every rhs is a rational polynomial after parameter substitution.
  std::vector<Polynomial> polynomial_rhs() const;
  bool has_formal_functions() const { return !funcs_.empty(); }

  friend bool operator==(const DynSystem& a, const DynSystem& b);

 private:
  std::vector<std::string> vars_;
  std::vector<Expr> rhs_;
  std::vector<Parameter> params_;
  std::map<std::string, int> funcs_;
};

// w = W(x) with user-supplied inverse x = X(w).
struct CoordinateMap {
  std::vector<std::string> from_vars;
  std::vector<std::string> to_vars;
  std::vector<Expr> forward;
  std::vector<Expr> inverse;
};

enum class InvertibilityCheck { Symbolic, Numeric, Failed };

// Verifies W(X(w)) = w; numeric fallback at 20 seeded points in [0.2, 1.2]^n to 1e-9.
InvertibilityCheck check_invertible(const CoordinateMap& m, const std::map<std::string, double>& params = {});

// m2 after m1.
CoordinateMap compose(const CoordinateMap& m1, const CoordinateMap& m2);

std::vector<Expr> lie_poisson(const std::vector<Expr>& f, const std::vector<Expr>& s, const std::vector<std::string>& vars);
VectorField lie_bracket(const VectorField& a, const VectorField& b);
VectorField evolutionary_representative(const VectorField& v, const DynSystem& sys);

struct PushforwardResult {
  DynSystem system;
  InvertibilityCheck invertibility = InvertibilityCheck::Symbolic;
  std::vector<std::string> absent_variables;
  std::vector<std::string> constant_variables;
};

PushforwardResult pushforward(const DynSystem& sys, const CoordinateMap& m);

struct RestrictionResult {
  DynSystem system;
  bool consistent_with_flow = true;  // solved variables evolve as their chart expressions
};

RestrictionResult restrict(const DynSystem& sys, const AlgebraicManifold& m);

// Jacobian of exprs w.r.t. vars.
std::vector<std::vector<Expr>> jacobian(const std::vector<Expr>& exprs, const std::vector<std::string>& vars);

// Exact solution of a (small) linear system over expressions; throws DomainError if singular.
std::vector<Expr> solve_linear(std::vector<std::vector<Expr>> a, std::vector<Expr> b);

}  // namespace symflow
