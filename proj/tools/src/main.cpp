#include <symflow/tools/job.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace symflow::tools;

namespace {

struct Common {
  std::string system;
  std::string field;
  std::string manifold;
  std::vector<std::string> binds;
  std::string x0;
  std::string out;
  bool timings = false;
};

std::string q(const std::string& v) { return "\"" + v + "\""; }

// A file path stays a path; anything else is inline text.
std::string source(const std::string& v) { return fs::exists(v) ? fs::absolute(v).string() : q(v); }

int emit(const Json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "symflow: cannot write " << out << "\n";
      return kExitInvalid;
    }
    f << text;
  }
  return 0;
}

int run_text(const std::string& name, const Common& c, const std::vector<std::string>& checks) {
  std::ostringstream job;
  job << "system = " << source(c.system) << "\n";
  if (!c.field.empty()) job << "field v = " << source(c.field) << "\n";
  if (!c.manifold.empty()) job << "manifold m = " << q(c.manifold) << "\n";
  for (const auto& b : c.binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) {
      std::cerr << "symflow: --bind expects name(u, ...) = body\n";
      return kExitInvalid;
    }
    job << "bind " << b.substr(0, eq) << " = " << q(b.substr(eq + 1)) << "\n";
  }
  if (!c.x0.empty()) job << "x0 = " << q(c.x0) << "\n";
  for (const auto& ch : checks) job << "check = " << ch << "\n";
  RunResult r;
  try {
    AnalysisJob parsed = parse_job_text(job.str(), fs::current_path(), name);
    r = run_job(parsed, RunOptions{c.timings});
  } catch (const JobError& e) {
    std::cerr << "symflow: " << e.what() << "\n";
    return kExitInvalid;
  }
  if (int rc = emit(r.report, c.out)) return rc;
  return r.exit_code;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void common_options(CLI::App* app, Common& c, bool field, bool needs_field = false) {
  app->add_option("--system", c.system, "system file (.dsys) or inline text")->required();
  if (field) {
    auto* o = app->add_option("--field", c.field, "vector field file (.vf) or inline text");
    if (needs_field) o->required();
  }
  app->add_option("--bind", c.binds, "formal function binding, e.g. 'alpha(u) = 1 - u'");
  app->add_option("--out", c.out, "report path (default stdout)");
  app->add_flag("--timings", c.timings, "include per-check timings in the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symflow: symmetries and invariant manifolds of polynomial flows"};
  app.require_subcommand(1);
  Common c;
  int degree = 2, order = 4, steps = 200, jobs = 1, qdegree = 1;
  double tol = 1e-6, epsilon = 0.3, time = 20.0;
  bool orbital = false;
  std::string center, parameter, point, interval, job_path, corpus_dir, hint;

  auto* sym = app.add_subcommand("check-symmetry", "test whether a field is a symmetry");
  common_options(sym, c, true, true);
  auto* orb = app.add_subcommand("check-orbital", "test whether a field is an orbital symmetry");
  common_options(orb, c, true, true);
  auto* fsym = app.add_subcommand("find-symmetries", "polynomial (orbital) symmetries up to a degree");
  common_options(fsym, c, false);
  fsym->add_option("--degree", degree, "ansatz degree");
  fsym->add_flag("--orbital", orbital, "search orbital symmetries");
  auto* fint = app.add_subcommand("find-integrals", "polynomial first integrals up to a degree");
  common_options(fint, c, false);
  fint->add_option("--degree", degree, "degree");
  auto* fdar = app.add_subcommand("find-darboux", "Darboux polynomials and cofactors");
  common_options(fdar, c, false);
  fdar->add_option("--degree", degree, "degree of P");
  fdar->add_option("--cofactor-degree", qdegree, "degree of the cofactor");
  fdar->add_option("--hint", hint, "cofactor hint");
  auto* inv = app.add_subcommand("invariant-manifold", "invariance certificate for generators");
  common_options(inv, c, false);
  inv->add_option("--manifold", c.manifold, "comma separated generators")->required();
  auto* cond = app.add_subcommand("conditional", "conditional (orbital) symmetry with witness");
  common_options(cond, c, true, true);
  cond->add_flag("--orbital", orbital, "orbital variant");
  auto* cm = app.add_subcommand("center-manifold", "center manifold jet at the origin");
  common_options(cm, c, false);
  cm->add_option("--center", center, "center variables, e.g. x")->required();
  cm->add_option("--order", order, "truncation order");
  auto* cr = app.add_subcommand("crossing", "eigenvalue crossing along a parameter");
  common_options(cr, c, false);
  cr->add_option("--parameter", parameter, "parameter name")->required();
  cr->add_option("--point", point, "equilibrium, e.g. 0,0")->required();
  cr->add_option("--interval", interval, "lo,hi")->required();
  cr->add_option("--steps", steps, "sweep steps");
  auto* ver = app.add_subcommand("verify", "numerical verification of a symmetry or manifold");
  common_options(ver, c, true);
  ver->add_option("--manifold", c.manifold, "verify invariance of these generators instead");
  ver->add_flag("--orbital", orbital, "orbital (Hausdorff) comparison");
  ver->add_option("--x0", c.x0, "initial point, e.g. 0.5,0.1");
  ver->add_option("--epsilon", epsilon, "group parameter");
  ver->add_option("--time", time, "time horizon");
  ver->add_option("--tol", tol, "tolerance");
  auto* run = app.add_subcommand("run", "run a job file");
  run->add_option("job", job_path, "job file")->required();
  run->add_option("--out", c.out, "report path (default stdout)");
  run->add_flag("--timings", c.timings, "include per-check timings in the report");
  auto* corp = app.add_subcommand("corpus", "run every job of a corpus against its golden report");
  corp->add_option("dir", corpus_dir, "corpus directory");
  corp->add_option("--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber);
  corp->add_option("--out", c.out, "summary path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (sym->parsed()) return run_text("check-symmetry", c, {"is_symmetry field=v bound=true"});
    if (orb->parsed()) return run_text("check-orbital", c, {"is_orbital_symmetry field=v bound=true"});
    if (fsym->parsed()) {
      const std::string op = orbital ? "find_orbital_symmetries" : "find_lpti_symmetries";
      return run_text("find-symmetries", c, {op + " degree=" + std::to_string(degree) + " bound=true"});
    }
    if (fint->parsed()) {
      return run_text("find-integrals", c, {"find_first_integrals degree=" + std::to_string(degree) + " bound=true"});
    }
    if (fdar->parsed()) {
      std::string ch = "find_darboux deg_p=" + std::to_string(degree) + " deg_q=" + std::to_string(qdegree);
      if (!hint.empty()) ch += " hint=" + q(hint);
      return run_text("find-darboux", c, {ch + " bound=true"});
    }
    if (inv->parsed()) return run_text("invariant-manifold", c, {"is_invariant_manifold manifold=m bound=true"});
    if (cond->parsed()) {
      const std::string op = orbital ? "is_conditional_orbital_symmetry" : "is_conditional_symmetry";
      return run_text("conditional", c, {op + " field=v bound=true"});
    }
    if (cm->parsed()) {
      return run_text("center-manifold", c,
                      {"center_manifold center=" + q(center) + " order=" + std::to_string(order)});
    }
    if (cr->parsed()) {
      return run_text("crossing", c,
                      {"detect_crossing parameter=" + parameter + " point=" + q(point) + " interval=" + q(interval) +
                       " steps=" + std::to_string(steps)});
    }
    if (ver->parsed()) {
      const std::string opts = " time=" + num(time) + " tol=" + num(tol);
      if (!c.manifold.empty()) return run_text("verify", c, {"verify_invariant_manifold_numeric manifold=m" + opts});
      if (c.field.empty() || c.x0.empty()) {
        std::cerr << "symflow: verify needs --field and --x0, or --manifold\n";
        return kExitInvalid;
      }
      const std::string op = orbital ? "verify_orbital_numeric" : "verify_symmetry_numeric";
      return run_text("verify", c, {op + " field=v epsilon=" + num(epsilon) + opts});
    }
    if (run->parsed()) {
      RunResult r = run_job_file(job_path, RunOptions{c.timings});
      if (r.exit_code == kExitInvalid) std::cerr << "symflow: " << r.report.value("error", std::string()) << "\n";
      std::string out = c.out;
      if (out.empty() && r.exit_code != kExitInvalid) {
        try {
          auto job = load_job(job_path);
          if (!job.output.empty()) out = (fs::path(job_path).parent_path() / job.output).string();
        } catch (const JobError&) {
        }
      }
      if (int rc = emit(r.report, out)) return rc;
      return r.exit_code;
    }
    if (corp->parsed()) {
      fs::path dir = corpus_dir.empty() ? default_corpus_dir() : fs::path(corpus_dir);
      CorpusSummary s = run_corpus(dir, static_cast<unsigned>(jobs));
      Json report;
      report["schema_version"] = kSchemaVersion;
      report["corpus"] = dir.string();
      Json cases = Json::array();
      for (const auto& cs : s.cases) {
        cases.push_back({{"name", cs.name}, {"pass", cs.pass}, {"exit_code", cs.exit_code}, {"diffs", cs.diffs}});
        std::cerr << (cs.pass ? "PASS " : "FAIL ") << cs.name << "\n";
        for (const auto& d : cs.diffs) std::cerr << "  " << d << "\n";
      }
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
      report["cases"] = cases;
      report["warnings"] = s.warnings;
      report["pass"] = s.pass();
      if (int rc = emit(report, c.out)) return rc;
      for (const auto& cs : s.cases) {
        if (cs.exit_code == kExitInvalid && !cs.pass) return kExitInvalid;
      }
      return s.pass() ? kExitPass : kExitFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "symflow: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
