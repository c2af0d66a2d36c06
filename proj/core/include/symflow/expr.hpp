#pragma once

#include <symflow/rational.hpp>

#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symflow {

namespace detail {
struct Node;
struct RatFun;
}  // namespace detail

enum class ExprKind { Constant, Variable, Parameter, Sum, Product, Power, Function };

// None marks a formal (user) function symbol.
enum class Builtin { None, Exp, Sin, Cos, Sqrt, Atan2 };

const char* builtin_name(Builtin b);
Builtin builtin_from_name(std::string_view name);
int builtin_arity(Builtin b);

// Immutable symbolic scalar. Arithmetic operators return canonical (normalized) values;
// the raw_* constructors build unnormalized trees, mostly for tests of normalize().
class Expr {
 public:
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr variable(std::string name);
  static Expr parameter(std::string name);
  static Expr function(std::string name, std::vector<Expr> args, std::vector<int> derivative = {});
  static Expr builtin(Builtin fn, std::vector<Expr> args);
  static Expr exp(const Expr& arg) { return builtin(Builtin::Exp, {arg}); }

  static Expr raw_sum(std::vector<Expr> terms);
  static Expr raw_product(std::vector<Expr> factors);
  static Expr raw_power(Expr base, int exponent);

  ExprKind kind() const;
  bool is_canonical() const;

  const Rational& constant_value() const;
  const std::string& name() const;
  std::span<const Expr> operands() const;
  int exponent() const;
  Builtin builtin_kind() const;
  std::span<const int> derivative_index() const;

  bool is_zero() const;
  bool is_one() const;
  bool is_rational() const;
  Rational rational_value() const;

  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }
  Expr& operator/=(const Expr& b) { return *this = *this / b; }

  // Mathematical equality of canonical forms.
  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  const detail::Node& node() const { return *node_; }
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const detail::Node> node_;
};

Expr pow(const Expr& base, int exponent);
Expr normalize(const Expr& e);

// Total order on canonical forms; used for deterministic sorting.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr differentiate(const Expr& e, std::string_view variable);
// Throws UnknownVariable when variable is not in declared.
Expr differentiate(const Expr& e, std::string_view variable, std::span<const std::string> declared);

// Replaces variables and parameters by name.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& values);

// Formal function definition used for symbolic instantiation: F(params...) := body.
struct FunctionDefinition {
  std::vector<std::string> params;
  Expr body;
};
using FunctionDefinitions = std::map<std::string, FunctionDefinition>;

// Replaces every application F^(alpha)(args) of a defined formal symbol with the
// corresponding derivative of its body evaluated at args.
Expr instantiate(const Expr& e, const FunctionDefinitions& defs);

std::set<std::string> free_variables(const Expr& e);
std::set<std::string> free_parameters(const Expr& e);
// Formal function names with their arities.
std::map<std::string, int> formal_functions(const Expr& e);
bool has_builtin_transcendentals(const Expr& e);

// Numerator and denominator of the canonical rational form.
Expr numerator(const Expr& e);
Expr denominator(const Expr& e);

std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace symflow
