#pragma once

#include <symflow/expr.hpp>
#include <symflow/fields.hpp>
#include <symflow/manifold.hpp>
#include <symflow/parser.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace symflow::tools {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInvalid = 2, kExitInternal = 3 };

// Invalid job: missing or unparsable files, unknown checks, bad arguments.
class JobError : public std::runtime_error {
 public:
  explicit JobError(const std::string& what) : std::runtime_error(what) {}
};

struct AnalysisJob {
  std::string name;
  std::filesystem::path base_dir;
  std::string system_path;
  DynSystem system;
  std::vector<std::string> field_order;
  std::map<std::string, VectorField> fields;
  std::vector<std::string> manifold_order;
  std::map<std::string, AlgebraicManifold> manifolds;
  FunctionDefinitions bindings;
  std::vector<CheckSpec> checks;
  std::string output;
  std::vector<double> x0;  // default initial point for numeric checks

  // System, fields and manifolds with the bound formal functions substituted.
  DynSystem bound_system() const;
  VectorField bound_field(const std::string& name) const;
  AlgebraicManifold bound_manifold(const std::string& name) const;
  SymbolContext context(bool allow_time = false) const;
};

// Job text grammar, one statement per line ('#' comments, '\' continues):
//   system = path.dsys                 (relative to the job file)
//   param omega = 1                    (overrides a parameter value)
//   field rot = path.vf | field rot = "dx: -y, dy: x"
//   manifold circle = x^2 + y^2 - 1
//   chart zaxis = x: 0, y: 0           (attaches a solved chart to a manifold)
//   bind alpha(u) = 1 - u
//   x0 = 0.5, 0.1
//   check = is_symmetry field=rot expect=proper
//   output = report.json
AnalysisJob load_job(const std::filesystem::path& path);
AnalysisJob parse_job_text(std::string_view text, const std::filesystem::path& base_dir, std::string name = "job");

struct CheckInfo {
  std::string name;
  std::string module;
  std::string operation;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  std::string summary;
};

const std::vector<CheckInfo>& check_registry();
const CheckInfo* find_check(const std::string& name);

struct RunOptions {
  bool timings = false;
};

struct RunResult {
  Json report;
  int exit_code = kExitPass;
};

// Runs the checks in declared order. A check passes when its verdict is positive or,
// with expect=..., when it equals the expectation.
RunResult run_job(const AnalysisJob& job, const RunOptions& opts = {});

// Reads, validates and runs; parse and validation problems yield exit code 2 with an
// "error" entry in the report.
RunResult run_job_file(const std::filesystem::path& path, const RunOptions& opts = {});

// Every key of expected appears in actual with an equal value; {"approx": v, "tol": t}
// matches numbers within t. Returns one line per mismatch, located by JSON pointer.
std::vector<std::string> match_golden(const Json& expected, const Json& actual);

struct CorpusCase {
  std::string name;
  bool pass = false;
  int exit_code = 0;
  double seconds = 0.0;
  std::vector<std::string> diffs;
};

struct CorpusSummary {
  std::vector<CorpusCase> cases;  // sorted by name
  std::vector<std::string> warnings;
  bool pass() const;
};

CorpusSummary run_corpus(const std::filesystem::path& dir, unsigned jobs = 1);

// Default corpus directory: $SYMFLOW_CORPUS, else the source tree's corpus/.
std::filesystem::path default_corpus_dir();

}  // namespace symflow::tools
