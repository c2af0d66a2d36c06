#include <symflow/parser.hpp>

#include <symflow/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <set>

namespace symflow {

namespace {

enum class Tok { Ident, Int, Decimal, Punct, Prime, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize(std::string_view src, bool newlines) {
  std::vector<Token> out;
  int line = 1, col = 1, depth = 0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      if (newlines && depth == 0) out.push_back({Tok::Newline, "\n", line, col});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool decimal = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (src[j] == '.' || src[j] == 'e' || src[j] == 'E')) {
        decimal = true;
        ++j;
        if (j < src.size() && (src[j] == '+' || src[j] == '-') && (src[j - 1] == 'e' || src[j - 1] == 'E')) ++j;
        while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      }
      out.push_back({decimal ? Tok::Decimal : Tok::Int, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (c == '\'') {
      out.push_back({Tok::Prime, "'", l, cl});
      advance(1);
      continue;
    }
    if (std::string_view("+-*/^()[],;:=").find(c) == std::string_view::npos) {
      throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    if (c == '(' || c == '[') ++depth;
    if ((c == ')' || c == ']') && depth > 0) --depth;
    out.push_back({Tok::Punct, std::string(1, c), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::size_t pos, SymbolContext& ctx) : toks_(toks), pos_(pos), ctx_(ctx) {}

  std::size_t pos() const { return pos_; }
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_punct(char c, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Punct && t.text[0] == c;
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.col); }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }

  void expect(char c) {
    if (!at_punct(c)) fail(std::string("expected '") + c + "'" + found());
    ++pos_;
  }

  std::string found() const {
    const Token& t = peek();
    if (t.kind == Tok::End) return " but reached end of input";
    if (t.kind == Tok::Newline) return " but found end of line";
    return " but found '" + t.text + "'";
  }

  Expr expression() {
    Expr acc = term();
    while (at_punct('+') || at_punct('-')) {
      bool minus = next().text[0] == '-';
      Expr rhs = term();
      acc = minus ? acc - rhs : acc + rhs;
    }
    return acc;
  }

  long integer() {
    bool neg = false;
    if (at_punct('-') || at_punct('+')) neg = next().text[0] == '-';
    const Token& t = peek();
    if (t.kind != Tok::Int) fail("expected an integer" + found());
    ++pos_;
    errno = 0;
    long v = std::strtol(t.text.c_str(), nullptr, 10);
    if (errno || v > 100000) fail("integer out of range", t);
    return neg ? -v : v;
  }

  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(std::string("expected ") + what + found());
    ++pos_;
    return t.text;
  }

 private:
  Expr term() {
    Expr acc = unary();
    while (at_punct('*') || at_punct('/')) {
      const Token& op = next();
      Expr rhs = unary();
      if (op.text[0] == '/') {
        if (rhs.is_zero()) fail("division by zero", op);
        acc = acc / rhs;
      } else {
        acc = acc * rhs;
      }
    }
    return acc;
  }

  Expr unary() {
    if (at_punct('-')) {
      ++pos_;
      return -unary();
    }
    if (at_punct('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!at_punct('^')) return base;
    const Token& caret = next();
    long k;
    if (at_punct('(')) {
      ++pos_;
      k = integer();
      expect(')');
    } else {
      k = integer();
    }
    if (k < 0 && base.is_zero()) fail("division by zero", caret);
    return pow(base, static_cast<int>(k));
  }

  std::vector<Expr> arguments() {
    expect('(');
    std::vector<Expr> args;
    if (at_punct(')')) fail("empty argument list");
    while (true) {
      args.push_back(expression());
      if (at_punct(',')) {
        ++pos_;
        continue;
      }
      expect(')');
      return args;
    }
  }

  Expr apply(const Token& name, std::vector<Expr> args, std::vector<int> deriv) {
    Builtin b = builtin_from_name(name.text);
    if (b != Builtin::None) {
      if (!deriv.empty()) fail("derivative syntax applies to formal functions only", name);
      if (static_cast<int>(args.size()) != builtin_arity(b)) {
        fail("'" + name.text + "' takes " + std::to_string(builtin_arity(b)) + " argument(s)", name);
      }
      return Expr::builtin(b, std::move(args));
    }
    if (std::find(ctx_.variables.begin(), ctx_.variables.end(), name.text) != ctx_.variables.end() || name.text == kTime) {
      fail("'" + name.text + "' is a variable, not a function", name);
    }
    int arity = static_cast<int>(args.size());
    auto [it, inserted] = ctx_.functions.emplace(name.text, arity);
    if (!inserted && it->second != arity) {
      fail("arity mismatch for '" + name.text + "': declared " + std::to_string(it->second) + ", used with " +
               std::to_string(arity),
           name);
    }
    if (!deriv.empty() && deriv.size() != args.size()) fail("derivative index length differs from arity", name);
    for (int d : deriv) {
      if (d < 0) fail("negative derivative order", name);
    }
    return Expr::function(name.text, std::move(args), std::move(deriv));
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return Expr(parse_rational(t.text));
    }
    if (t.kind == Tok::Decimal) fail("decimal literal '" + t.text + "' not allowed; write a rational such as 1/2", t);
    if (at_punct('(')) {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (t.kind != Tok::Ident) fail("expected an expression" + found());
    ++pos_;
    if (t.text == "D" && at_punct('[')) {
      ++pos_;
      std::vector<int> deriv;
      while (true) {
        deriv.push_back(static_cast<int>(integer()));
        if (at_punct(',')) {
          ++pos_;
          continue;
        }
        expect(']');
        break;
      }
      expect('(');
      const Token& fname = peek();
      identifier("a function name");
      expect(')');
      return apply(fname, arguments(), std::move(deriv));
    }
    if (at_punct('(')) return apply(t, arguments(), {});
    if (std::find(ctx_.variables.begin(), ctx_.variables.end(), t.text) != ctx_.variables.end()) {
      return Expr::variable(t.text);
    }
    if (t.text == kTime) {
      if (!ctx_.allow_time) fail("'t' is reserved for time and cannot appear here", t);
      return Expr::variable(t.text);
    }
    if (builtin_from_name(t.text) != Builtin::None || ctx_.functions.count(t.text)) {
      fail("function '" + t.text + "' used without arguments", t);
    }
    return Expr::parameter(t.text);
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
  SymbolContext& ctx_;
};

bool at_statement_end(const Parser& p) {
  Tok k = p.peek().kind;
  return k == Tok::End || k == Tok::Newline || p.at_punct(';');
}

void expect_end(Parser& p) {
  while (p.peek().kind == Tok::Newline) p.next();
  if (p.peek().kind != Tok::End) p.fail("unexpected trailing input" + p.found());
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

Expr parse_expression(std::string_view text, SymbolContext& ctx) {
  auto toks = tokenize(text, false);
  Parser p(toks, 0, ctx);
  if (p.peek().kind == Tok::End) p.fail("empty expression");
  Expr e = p.expression();
  expect_end(p);
  return e;
}

Expr parse_expression(std::string_view text, const SymbolContext& ctx) {
  SymbolContext local = ctx;
  return parse_expression(text, local);
}

std::vector<Expr> parse_expression_list(std::string_view text, const SymbolContext& ctx) {
  SymbolContext local = ctx;
  auto toks = tokenize(text, false);
  Parser p(toks, 0, local);
  std::vector<Expr> out;
  if (p.peek().kind == Tok::End) return out;
  while (true) {
    out.push_back(p.expression());
    if (p.at_punct(',')) {
      p.next();
      continue;
    }
    expect_end(p);
    return out;
  }
}

DynSystem parse_system(std::string_view text) {
  auto toks = tokenize(text, true);
  SymbolContext ctx;
  Parser scan(toks, 0, ctx);

  struct Equation {
    std::string var;
    std::size_t rhs;
    Token at;
  };
  std::vector<Equation> eqs;
  std::vector<std::string> declared;
  bool have_vars = false;
  std::vector<std::pair<Token, std::size_t>> param_decls;  // name token, value position or npos
  std::set<std::string> param_names;

  auto skip_to_end = [&] {
    int depth = 0;
    while (!(depth == 0 && at_statement_end(scan)) && scan.peek().kind != Tok::End) {
      if (scan.at_punct('(') || scan.at_punct('[')) ++depth;
      if (scan.at_punct(')') || scan.at_punct(']')) --depth;
      scan.next();
    }
  };

  while (scan.peek().kind != Tok::End) {
    if (scan.peek().kind == Tok::Newline || scan.at_punct(';')) {
      scan.next();
      continue;
    }
    const Token head = scan.peek();
    if (head.kind != Tok::Ident) scan.fail("expected a declaration or an equation" + scan.found());
    scan.next();
    if (head.text == "vars" && scan.peek().kind == Tok::Ident) {
      have_vars = true;
      while (true) {
        const Token v = scan.peek();
        std::string name = scan.identifier("a variable name");
        if (name == kTime) scan.fail("'t' is reserved for time and cannot be a state variable", v);
        if (std::find(declared.begin(), declared.end(), name) != declared.end()) {
          scan.fail("duplicate variable '" + name + "'", v);
        }
        declared.push_back(name);
        if (!scan.at_punct(',')) break;
        scan.next();
      }
    } else if (head.text == "params" && scan.peek().kind == Tok::Ident) {
      while (true) {
        const Token v = scan.peek();
        std::string name = scan.identifier("a parameter name");
        if (!param_names.insert(name).second) scan.fail("duplicate parameter '" + name + "'", v);
        std::size_t value = std::string::npos;
        if (scan.at_punct('=')) {
          scan.next();
          value = scan.pos();
          int depth = 0;
          while (!(depth == 0 && (scan.at_punct(',') || at_statement_end(scan))) && scan.peek().kind != Tok::End) {
            if (scan.at_punct('(')) ++depth;
            if (scan.at_punct(')')) --depth;
            scan.next();
          }
        }
        param_decls.emplace_back(v, value);
        if (!scan.at_punct(',')) break;
        scan.next();
      }
    } else if (head.text == "funcs" && scan.peek().kind == Tok::Ident) {
      while (true) {
        const Token v = scan.peek();
        std::string name = scan.identifier("a function name");
        if (builtin_from_name(name) != Builtin::None) scan.fail("'" + name + "' is a builtin function", v);
        scan.expect('/');
        long arity = scan.integer();
        if (arity < 1) scan.fail("function arity must be positive", v);
        if (!ctx.functions.emplace(name, static_cast<int>(arity)).second) {
          scan.fail("duplicate function declaration '" + name + "'", v);
        }
        if (!scan.at_punct(',')) break;
        scan.next();
      }
    } else if (scan.peek().kind == Tok::Prime) {
      scan.next();
      scan.expect('=');
      if (head.text == kTime) scan.fail("'t' is reserved for time and cannot be a state variable", head);
      for (const auto& e : eqs) {
        if (e.var == head.text) scan.fail("duplicate equation for '" + head.text + "'", head);
      }
      eqs.push_back({head.text, scan.pos(), head});
      if (at_statement_end(scan)) scan.fail("missing right-hand side for '" + head.text + "'");
      skip_to_end();
    } else {
      scan.fail("expected a declaration or an equation (\"" + head.text + "' = ...\")", head);
    }
    if (!at_statement_end(scan)) scan.fail("expected end of statement" + scan.found());
  }

  std::vector<std::string> vars;
  if (have_vars) {
    for (const auto& e : eqs) {
      if (std::find(declared.begin(), declared.end(), e.var) == declared.end()) {
        throw ParseError("equation for undeclared variable '" + e.var + "'", e.at.line, e.at.col);
      }
    }
    for (const auto& v : declared) {
      if (std::none_of(eqs.begin(), eqs.end(), [&](const Equation& e) { return e.var == v; })) {
        throw ParseError("no equation for variable '" + v + "'", 1, 1);
      }
    }
    vars = declared;
  } else {
    for (const auto& e : eqs) vars.push_back(e.var);
  }
  if (vars.empty()) throw ParseError("system has no equations", 1, 1);
  for (const auto& [tok, pos] : param_decls) {
    if (std::find(vars.begin(), vars.end(), tok.text) != vars.end()) {
      throw ParseError("'" + tok.text + "' is declared both as a variable and a parameter", tok.line, tok.col);
    }
  }
  ctx.variables = vars;

  std::vector<Parameter> params;
  for (const auto& [tok, pos] : param_decls) {
    Parameter prm{tok.text, std::nullopt};
    if (pos != std::string::npos) {
      SymbolContext none;
      Parser vp(toks, pos, none);
      Expr value = vp.expression();
      if (!value.is_rational()) throw ParseError("parameter value must be a rational constant", tok.line, tok.col);
      prm.value = value.rational_value();
    }
    params.push_back(std::move(prm));
  }

  std::vector<Expr> rhs(vars.size());
  for (const auto& e : eqs) {
    Parser rp(toks, e.rhs, ctx);
    Expr value = rp.expression();
    if (!at_statement_end(rp)) rp.fail("unexpected token in equation" + rp.found());
    auto it = std::find(vars.begin(), vars.end(), e.var);
    rhs[static_cast<std::size_t>(it - vars.begin())] = value;
  }
  return DynSystem(vars, std::move(rhs), std::move(params), ctx.functions);
}

std::string format_system(const DynSystem& sys) {
  std::string out = "vars ";
  for (std::size_t i = 0; i < sys.variables().size(); ++i) out += (i ? ", " : "") + sys.variables()[i];
  out += "\n";
  if (!sys.parameters().empty()) {
    out += "params ";
    for (std::size_t i = 0; i < sys.parameters().size(); ++i) {
      const auto& p = sys.parameters()[i];
      out += (i ? ", " : "") + p.name;
      if (p.value) out += " = " + to_string(*p.value);
    }
    out += "\n";
  }
  if (!sys.functions().empty()) {
    out += "funcs ";
    bool first = true;
    for (const auto& [name, arity] : sys.functions()) {
      out += (first ? "" : ", ") + name + "/" + std::to_string(arity);
      first = false;
    }
    out += "\n";
  }
  for (std::size_t i = 0; i < sys.dimension(); ++i) out += sys.variables()[i] + "' = " + sys.rhs()[i].str() + "\n";
  return out;
}

namespace {

struct KeyedEntry {
  Token key;
  std::size_t value;
};

std::vector<KeyedEntry> split_keyed(const std::vector<Token>& toks, Parser& p) {
  std::vector<KeyedEntry> out;
  if (p.peek().kind == Tok::End) return out;
  while (true) {
    const Token key = p.peek();
    p.identifier("a key such as 'dx'");
    p.expect(':');
    out.push_back({key, p.pos()});
    int depth = 0;
    while (true) {
      const Token& t = p.peek();
      if (t.kind == Tok::End) break;
      if (depth == 0 && p.at_punct(',')) break;
      if (p.at_punct('(') || p.at_punct('[')) ++depth;
      if (p.at_punct(')') || p.at_punct(']')) --depth;
      p.next();
    }
    if (out.back().value == p.pos()) p.fail("missing value for '" + key.text + "'", key);
    if (p.peek().kind == Tok::End) break;
    p.next();
  }
  (void)toks;
  return out;
}

Expr parse_value(const std::vector<Token>& toks, std::size_t pos, SymbolContext& ctx) {
  Parser p(toks, pos, ctx);
  Expr e = p.expression();
  if (!(p.peek().kind == Tok::End || p.at_punct(','))) p.fail("unexpected token" + p.found());
  return e;
}

VectorField vector_field_impl(std::string_view text, const std::vector<std::string>* given) {
  auto toks = tokenize(text, false);
  SymbolContext ctx;
  ctx.allow_time = true;
  Parser p(toks, 0, ctx);
  auto entries = split_keyed(toks, p);
  std::vector<std::string> vars;
  if (given) {
    vars = *given;
  } else {
    for (const auto& e : entries) {
      if (e.key.text != "dt" && e.key.text.size() > 1 && e.key.text[0] == 'd') vars.push_back(e.key.text.substr(1));
    }
  }
  ctx.variables = vars;
  std::vector<Expr> comps(vars.size());
  std::vector<bool> seen(vars.size(), false);
  std::optional<Expr> tau;
  for (const auto& e : entries) {
    const std::string& k = e.key.text;
    if (k.size() < 2 || k[0] != 'd') throw ParseError("component keys have the form 'dx' or 'dt'", e.key.line, e.key.col);
    Expr value = parse_value(toks, e.value, ctx);
    if (k == "dt") {
      if (tau) throw ParseError("duplicate component 'dt'", e.key.line, e.key.col);
      tau = value;
      continue;
    }
    auto it = std::find(vars.begin(), vars.end(), k.substr(1));
    if (it == vars.end()) throw UnknownVariable(k.substr(1));
    auto i = static_cast<std::size_t>(it - vars.begin());
    if (seen[i]) throw ParseError("duplicate component '" + k + "'", e.key.line, e.key.col);
    seen[i] = true;
    comps[i] = value;
  }
  return VectorField(vars, std::move(comps), tau);
}

}  // namespace

VectorField parse_vector_field(std::string_view text) { return vector_field_impl(text, nullptr); }

VectorField parse_vector_field(std::string_view text, const std::vector<std::string>& vars) {
  return vector_field_impl(text, &vars);
}

std::string format_vector_field(const VectorField& v) { return v.str(); }

Chart parse_chart(std::string_view text, const std::vector<std::string>& vars) {
  auto toks = tokenize(text, false);
  SymbolContext ctx;
  ctx.variables = vars;
  Parser p(toks, 0, ctx);
  Chart out;
  for (const auto& e : split_keyed(toks, p)) {
    if (std::find(vars.begin(), vars.end(), e.key.text) == vars.end()) throw UnknownVariable(e.key.text);
    for (const auto& [name, _] : out.solved) {
      if (name == e.key.text) throw ParseError("variable '" + name + "' solved twice", e.key.line, e.key.col);
    }
    out.solved.emplace_back(e.key.text, parse_value(toks, e.value, ctx));
  }
  return out;
}

double parse_number(std::string_view text) {
  std::string s = trim(text);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return parse_number(s.substr(0, slash)) / parse_number(s.substr(slash + 1));
  }
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size()) throw ParseError("invalid number '" + s + "'", 0, 0);
  return v;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::string s = trim(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    std::string part = trim(std::string_view(s).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!part.empty()) out.push_back(parse_number(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<JobEntry> parse_job(std::string_view text) {
  std::vector<JobEntry> out;
  std::string pending;
  int pending_line = 0;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    std::string line;
    bool quoted = false;
    for (char c : raw) {
      if (c == '"') quoted = !quoted;
      if (c == '#' && !quoted) break;
      line += c;
    }
    line = trim(line);
    bool cont = !line.empty() && line.back() == '\\';
    if (cont) line = trim(line.substr(0, line.size() - 1));
    if (pending.empty()) pending_line = line_no;
    if (!line.empty()) pending += (pending.empty() ? "" : " ") + line;
    if (!cont && !pending.empty()) {
      auto eq = pending.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'key = value'", pending_line, 1);
      std::string lhs = trim(std::string_view(pending).substr(0, eq));
      JobEntry entry;
      entry.line = pending_line;
      entry.value = trim(std::string_view(pending).substr(eq + 1));
      auto sp = lhs.find_first_of(" \t");
      entry.key = lhs.substr(0, sp);
      if (sp != std::string::npos) entry.name = trim(std::string_view(lhs).substr(sp));
      if (entry.key.empty()) throw ParseError("missing key", pending_line, 1);
      out.push_back(std::move(entry));
      pending.clear();
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  if (!pending.empty()) throw ParseError("unterminated line continuation", pending_line, 1);
  return out;
}

CheckSpec parse_check(std::string_view text, int line) {
  CheckSpec out;
  out.line = line;
  std::vector<std::string> words;
  std::string cur;
  bool quoted = false, any = false;
  for (char c : text) {
    if (c == '"') {
      quoted = !quoted;
      any = true;
      continue;
    }
    if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
      if (any) words.push_back(cur);
      cur.clear();
      any = false;
      continue;
    }
    cur += c;
    any = true;
  }
  if (quoted) throw ParseError("unterminated quoted value", line, 1);
  if (any) words.push_back(cur);
  if (words.empty()) throw ParseError("empty check", line, 1);
  out.op = words[0];
  for (std::size_t i = 1; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("check argument '" + words[i] + "' is not k=v", line, 1);
    out.args.emplace_back(words[i].substr(0, eq), words[i].substr(eq + 1));
  }
  return out;
}

}  // namespace symflow
