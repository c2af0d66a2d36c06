#pragma once

#include <symflow/expr.hpp>

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace symflow {

using ScalarFunction = std::function<double(std::span<const double>)>;

// Numeric binding of a formal function symbol. Derivatives that are not supplied are
// approximated by central differences: step 1e-6 for first order, nested with step
// 1e-4 for higher orders.
struct FunctionBinding {
  int arity = 1;
  ScalarFunction value;
  std::map<std::vector<int>, ScalarFunction> derivatives;
};
using FunctionTable = std::map<std::string, FunctionBinding>;

inline constexpr double kFiniteDifferenceStep = 1e-6;

// Stack-machine form of a canonical expression over a fixed slot layout.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  // Symbols not listed in slots are looked up in constants; anything else is unbound.
  CompiledExpr(const Expr& e, const std::vector<std::string>& slots, const std::map<std::string, double>& constants = {},
               const FunctionTable& funcs = {});

  double operator()(std::span<const double> slots) const;

 private:
  enum class Op { Const, Slot, Add, Mul, Pow, Div, Exp, Sin, Cos, Sqrt, Atan2, Call };
  struct Instr {
    Op op;
    int arg = 0;
    double value = 0.0;
  };
  struct Call {
    ScalarFunction fn;
    int nargs = 0;
  };

  void emit_expr(const Expr& e, const std::vector<std::string>& slots, const std::map<std::string, double>& constants,
                 const FunctionTable& funcs);

  std::vector<Instr> code_;
  std::vector<Call> calls_;
  int max_depth_ = 0;
  friend struct CompilerAccess;
};

// Parameter values and function bindings for numeric work.
struct NumericEnv {
  std::map<std::string, double> constants;
  FunctionTable functions;
};

// Several expressions compiled over one slot layout.
class CompiledVector {
 public:
  CompiledVector() = default;
  CompiledVector(const std::vector<Expr>& exprs, const std::vector<std::string>& slots, const NumericEnv& env = {});
  std::size_t size() const { return parts_.size(); }
  void operator()(std::span<const double> x, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  std::vector<CompiledExpr> parts_;
};

double evaluate(const Expr& e, const std::map<std::string, double>& point, const FunctionTable& funcs = {});

// Partial derivative of a bound function: supplied callable or central differences.
ScalarFunction derivative_callable(const FunctionBinding& f, const std::vector<int>& order);

}  // namespace symflow
