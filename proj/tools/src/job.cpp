#include <symflow/tools/job.hpp>

#include <symflow/errors.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace symflow::tools {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw JobError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

bool quoted(const std::string& v) { return v.size() >= 2 && v.front() == '"' && v.back() == '"'; }

std::string where(const std::string& job, int line) { return job + ":" + std::to_string(line) + ": "; }

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// "alpha(u, v)" -> name and parameter list.
std::pair<std::string, std::vector<std::string>> binding_head(const std::string& head, const std::string& loc) {
  auto open = head.find('(');
  if (open == std::string::npos || head.back() != ')') throw JobError(loc + "binding must look like name(u, ...)");
  std::string name = trim(head.substr(0, open));
  std::vector<std::string> params;
  std::string inner = head.substr(open + 1, head.size() - open - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw JobError(loc + "empty binding parameter");
    params.push_back(item);
  }
  if (name.empty() || params.empty()) throw JobError(loc + "binding must look like name(u, ...)");
  return {name, params};
}

void validate_check(const CheckSpec& c, const AnalysisJob& job, const std::string& loc) {
  const CheckInfo* info = find_check(c.op);
  if (!info) throw JobError(loc + "unknown check '" + c.op + "'");
  std::set<std::string> given;
  for (const auto& [k, v] : c.args) {
    if (!given.insert(k).second) throw JobError(loc + "argument '" + k + "' given twice");
    bool known = k == "expect" || k == "label" ||
                 std::find(info->required.begin(), info->required.end(), k) != info->required.end() ||
                 std::find(info->optional.begin(), info->optional.end(), k) != info->optional.end();
    if (!known) throw JobError(loc + "check '" + c.op + "' has no argument '" + k + "'");
    if ((k == "field" || k == "a" || k == "b") && !job.fields.count(v)) {
      throw JobError(loc + "unknown field '" + v + "'");
    }
    if (k == "manifold" && !job.manifolds.count(v)) throw JobError(loc + "unknown manifold '" + v + "'");
  }
  for (const auto& r : info->required) {
    if (!given.count(r)) throw JobError(loc + "check '" + c.op + "' needs argument '" + r + "'");
  }
}

}  // namespace

DynSystem AnalysisJob::bound_system() const {
  if (bindings.empty()) return system;
  std::vector<Expr> rhs;
  for (const auto& e : system.rhs()) rhs.push_back(instantiate(e, bindings));
  std::map<std::string, int> funcs;
  for (const auto& [k, a] : system.functions()) {
    if (!bindings.count(k)) funcs.emplace(k, a);
  }
  return DynSystem(system.variables(), rhs, system.parameters(), funcs);
}

VectorField AnalysisJob::bound_field(const std::string& name) const {
  const VectorField& v = fields.at(name);
  if (bindings.empty()) return v;
  std::vector<Expr> comps;
  for (const auto& c : v.components()) comps.push_back(instantiate(c, bindings));
  std::optional<Expr> tau;
  if (v.tau()) tau = instantiate(*v.tau(), bindings);
  return VectorField(v.variables(), comps, tau);
}

AlgebraicManifold AnalysisJob::bound_manifold(const std::string& name) const {
  const AlgebraicManifold& m = manifolds.at(name);
  if (bindings.empty()) return m;
  std::vector<Expr> gens;
  for (const auto& g : m.generator_exprs()) gens.push_back(instantiate(g, bindings));
  return AlgebraicManifold(m.variables(), gens, m.chart());
}

SymbolContext AnalysisJob::context(bool allow_time) const {
  SymbolContext ctx;
  ctx.variables = system.variables();
  ctx.allow_time = allow_time;
  ctx.functions = system.functions();
  return ctx;
}

AnalysisJob parse_job_text(std::string_view text, const std::filesystem::path& base_dir, std::string name) {
  AnalysisJob job;
  job.name = std::move(name);
  job.base_dir = base_dir;
  std::vector<JobEntry> entries;
  try {
    entries = parse_job(text);
  } catch (const ParseError& e) {
    throw JobError(where(job.name, e.line()) + e.message());
  }

  auto resolve = [&](const std::string& p) { return (base_dir / p).lexically_normal(); };

  // Pass 1: system and parameter overrides.
  bool have_system = false;
  for (const auto& e : entries) {
    if (e.key != "system") continue;
    const std::string loc = where(job.name, e.line);
    if (have_system) throw JobError(loc + "system given twice");
    have_system = true;
    std::string text_or_path = unquote(e.value);
    std::string src;
    if (quoted(e.value)) {
      src = text_or_path;
    } else {
      job.system_path = text_or_path;
      auto p = resolve(text_or_path);
      if (!std::filesystem::exists(p)) throw JobError(loc + "system file not found: " + p.string());
      src = read_file(p);
    }
    try {
      job.system = parse_system(src);
    } catch (const ParseError& pe) {
      throw JobError(loc + "in system " + text_or_path + ": line " + std::to_string(pe.line()) + ", column " +
                     std::to_string(pe.column()) + ": " + pe.message());
    } catch (const Error& se) {
      throw JobError(loc + "in system " + text_or_path + ": " + se.what());
    }
  }
  if (!have_system) throw JobError(job.name + ": job has no system");

  std::vector<Parameter> params = job.system.parameters();
  for (const auto& e : entries) {
    if (e.key != "param") continue;
    const std::string loc = where(job.name, e.line);
    auto it = std::find_if(params.begin(), params.end(), [&](const Parameter& p) { return p.name == e.name; });
    if (it == params.end()) throw JobError(loc + "system has no parameter '" + e.name + "'");
    try {
      it->value = parse_rational(e.value);
    } catch (const std::exception&) {
      throw JobError(loc + "parameter value must be a rational such as 1/2");
    }
  }
  job.system = DynSystem(job.system.variables(), job.system.rhs(), params, job.system.functions());
  const auto& vars = job.system.variables();

  // Pass 2: everything else, charts after manifolds.
  std::vector<const JobEntry*> charts, checks;
  for (const auto& e : entries) {
    const std::string loc = where(job.name, e.line);
    try {
      if (e.key == "system" || e.key == "param") {
        continue;
      } else if (e.key == "field") {
        if (e.name.empty()) throw JobError(loc + "field needs a name");
        if (job.fields.count(e.name)) throw JobError(loc + "field '" + e.name + "' defined twice");
        std::string src = quoted(e.value) ? unquote(e.value) : read_file(resolve(e.value));
        job.fields.emplace(e.name, parse_vector_field(src, vars));
        job.field_order.push_back(e.name);
      } else if (e.key == "manifold") {
        if (e.name.empty()) throw JobError(loc + "manifold needs a name");
        if (job.manifolds.count(e.name)) throw JobError(loc + "manifold '" + e.name + "' defined twice");
        auto gens = parse_expression_list(unquote(e.value), job.context());
        job.manifolds.emplace(e.name, AlgebraicManifold(vars, gens));
        job.manifold_order.push_back(e.name);
      } else if (e.key == "chart") {
        charts.push_back(&e);
      } else if (e.key == "bind") {
        auto [fname, fparams] = binding_head(e.name, loc);
        auto fs = job.system.functions();
        auto known = fs.find(fname);
        if (known != fs.end() && known->second != static_cast<int>(fparams.size())) {
          throw JobError(loc + "binding for '" + fname + "' has the wrong arity");
        }
        SymbolContext ctx;
        ctx.variables = fparams;
        job.bindings[fname] = FunctionDefinition{fparams, parse_expression(unquote(e.value), ctx)};
      } else if (e.key == "x0") {
        job.x0 = parse_number_list(unquote(e.value));
        if (job.x0.size() != vars.size()) throw JobError(loc + "x0 has the wrong dimension");
      } else if (e.key == "check") {
        checks.push_back(&e);
      } else if (e.key == "output") {
        job.output = unquote(e.value);
      } else {
        throw JobError(loc + "unknown key '" + e.key + "'");
      }
    } catch (const ParseError& pe) {
      throw JobError(loc + "line " + std::to_string(pe.line()) + ", column " + std::to_string(pe.column()) + ": " +
                     pe.message());
    } catch (const JobError&) {
      throw;
    } catch (const Error& se) {
      throw JobError(loc + se.what());
    }
  }
  for (const auto* e : charts) {
    const std::string loc = where(job.name, e->line);
    auto it = job.manifolds.find(e->name);
    if (it == job.manifolds.end()) throw JobError(loc + "chart for unknown manifold '" + e->name + "'");
    try {
      Chart c = parse_chart(unquote(e->value), vars);
      it->second = AlgebraicManifold(vars, it->second.generator_exprs(), c);
    } catch (const ParseError& pe) {
      throw JobError(loc + pe.what());
    } catch (const Error& se) {
      throw JobError(loc + se.what());
    }
  }
  for (const auto* e : checks) {
    const std::string loc = where(job.name, e->line);
    CheckSpec c;
    try {
      c = parse_check(e->value, e->line);
    } catch (const ParseError& pe) {
      throw JobError(loc + pe.what());
    }
    validate_check(c, job, loc);
    job.checks.push_back(std::move(c));
  }
  if (job.checks.empty()) throw JobError(job.name + ": job has no checks");
  return job;
}

AnalysisJob load_job(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw JobError("job file not found: " + path.string());
  return parse_job_text(read_file(path), path.parent_path(), path.stem().string());
}

}  // namespace symflow::tools
