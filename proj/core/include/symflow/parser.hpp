#pragma once

#include <symflow/expr.hpp>
#include <symflow/fields.hpp>
#include <symflow/manifold.hpp>

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symflow {

// Name resolution for expression text. Identifiers in `variables` become variables,
// `name(...)` a builtin or formal function application, anything else a parameter.
struct SymbolContext {
  std::vector<std::string> variables;
  bool allow_time = false;                // `t` parses as the time variable
  std::map<std::string, int> functions;   // known formal arities; new symbols are added
};

Expr parse_expression(std::string_view text, const SymbolContext& ctx = {});
Expr parse_expression(std::string_view text, SymbolContext& ctx);

// Comma-separated expressions, e.g. manifold generators "x^2 + y^2 - 1, z".
std::vector<Expr> parse_expression_list(std::string_view text, const SymbolContext& ctx);

// .dsys grammar (statements separated by ';' or newline, '#' and '//' comments):
//   vars x, y
//   params omega, a = 1/2
//   funcs alpha/1, beta/2
//   x' = -omega*y + alpha(x^2 + y^2)*x
DynSystem parse_system(std::string_view text);
std::string format_system(const DynSystem& sys);

// .vf grammar: "dx: -y, dy: x, dt: 1". Without a variable list the order of the
// keys is used; with one, missing components are zero and unknown keys are errors.
VectorField parse_vector_field(std::string_view text);
VectorField parse_vector_field(std::string_view text, const std::vector<std::string>& vars);
std::string format_vector_field(const VectorField& v);

// "x: 0, y: 0" solving x and y; values are expressions in the remaining variables.
Chart parse_chart(std::string_view text, const std::vector<std::string>& vars);

// Numeric literal for job configuration (decimals and exponents allowed).
double parse_number(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

// Flat key-value job text: "key [name] = value" per line, '#' comments, trailing '\'
// continues a line.
struct JobEntry {
  std::string key;
  std::string name;
  std::string value;
  int line = 0;
};

std::vector<JobEntry> parse_job(std::string_view text);

// "op k=v k2=\"quoted value\"" with arguments in declaration order.
struct CheckSpec {
  std::string op;
  std::vector<std::pair<std::string, std::string>> args;
  int line = 0;
};

CheckSpec parse_check(std::string_view text, int line = 0);

}  // namespace symflow
