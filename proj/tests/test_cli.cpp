#include <symflow/tools/job.hpp>

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace symflow::tools;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = SYMFLOW_TEST_CORPUS;

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("symflow-" + tag + "-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SYMFLOW_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const Json* find_check_entry(const Json& report, const std::string& op) {
  for (const auto& c : report["checks"]) {
    if (c["op"] == op) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("run: conditional symmetry on the z-axis") {
  auto r = run_job_file(kCorpus / "ex09.job");
  CHECK(r.exit_code == kExitPass);
  const Json* c = find_check_entry(r.report, "is_conditional_symmetry");
  REQUIRE(c);
  CHECK((*c)["verdict"] == "conditional");
  CHECK((*c)["result"]["witness"]["generators"] == Json::array({"x", "y"}));
  CHECK(r.report["schema_version"] == kSchemaVersion);
}

TEST_CASE("run: flat center manifold coefficient table") {
  auto r = run_job_file(kCorpus / "ex10.job");
  CHECK(r.exit_code == kExitPass);
  const Json* c = find_check_entry(r.report, "center_manifold");
  REQUIRE(c);
  const Json& table = (*c)["result"]["coefficients"]["y"];
  CHECK(table.size() == 9);
  for (const auto& [k, v] : table.items()) CHECK(v == "0");
}

TEST_CASE("run: missing system file exits 2") {
  fs::path dir = scratch_dir("missing");
  std::ofstream(dir / "bad.job") << "system = nowhere.dsys\ncheck = is_symmetry field=rot\n";
  auto r = run_job_file(dir / "bad.job");
  CHECK(r.exit_code == kExitInvalid);
  CHECK(r.report.contains("error"));
  CHECK(cli("run " + (dir / "bad.job").string()) == kExitInvalid);
  CHECK(run_job_file(dir / "absent.job").exit_code == kExitInvalid);
  fs::remove_all(dir);
}

TEST_CASE("run: failing and unknown checks") {
  auto job = parse_job_text("system = ex03.dsys\nfield s = \"dx: x*y, dy: 0\"\ncheck = is_symmetry field=s\n", kCorpus);
  CHECK(run_job(job).exit_code == kExitFail);
  CHECK_THROWS_AS(parse_job_text("system = ex03.dsys\ncheck = no_such_check\n", kCorpus), JobError);
  CHECK_THROWS_AS(parse_job_text("system = ex03.dsys\ncheck = is_symmetry\n", kCorpus), JobError);
}

TEST_CASE("golden matching locates differences") {
  Json expected = Json::parse(R"({"a": {"b": [1, {"c": "x"}]}, "n": {"approx": 1.0, "tol": 0.1}})");
  Json actual = Json::parse(R"({"a": {"b": [1, {"c": "y"}]}, "n": 1.05, "extra": true})");
  auto d = match_golden(expected, actual);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("/a/b/1/c") != std::string::npos);
  actual["n"] = 2.0;
  actual["a"]["b"][1]["c"] = "x";
  d = match_golden(expected, actual);
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("/n") != std::string::npos);
}

TEST_CASE("corpus: shipped corpus passes") {
  auto s = run_corpus(kCorpus, 4);
  CHECK(s.pass());
  CHECK(s.cases.size() >= 13);
  CHECK(std::is_sorted(s.cases.begin(), s.cases.end(), [](const auto& a, const auto& b) { return a.name < b.name; }));
  for (const auto& c : s.cases) {
    INFO(c.name);
    CHECK(c.pass);
  }
}

TEST_CASE("corpus: corrupted golden fails with a located diff") {
  fs::path dir = scratch_dir("corrupt");
  for (const char* f : {"ex03.dsys", "ex03.job", "ex03.expected.json", "rotation.vf", "xs.vf"}) {
    if (fs::exists(kCorpus / f)) fs::copy_file(kCorpus / f, dir / f);
  }
  Json golden = Json::parse(slurp(dir / "ex03.expected.json"));
  golden["checks"][0]["verdict"] = "corrupted";
  std::ofstream(dir / "ex03.expected.json") << golden.dump(2);
  auto s = run_corpus(dir, 1);
  CHECK_FALSE(s.pass());
  REQUIRE(s.cases.size() == 1);
  REQUIRE_FALSE(s.cases[0].diffs.empty());
  CHECK(s.cases[0].diffs[0].find("/checks/0/verdict") != std::string::npos);
  CHECK(cli("corpus " + dir.string()) == kExitFail);
  fs::remove_all(dir);
}

TEST_CASE("corpus: empty directory passes with a warning") {
  fs::path dir = scratch_dir("empty");
  auto s = run_corpus(dir, 2);
  CHECK(s.pass());
  CHECK(s.cases.empty());
  CHECK_FALSE(s.warnings.empty());
  CHECK(cli("corpus " + dir.string()) == kExitPass);
  fs::remove_all(dir);
}

TEST_CASE("reports are byte-stable for symbolic checks") {
  for (const char* job : {"ex01.job", "ex07a.job", "ex09.job", "exA3.job"}) {
    const std::string a = run_job_file(kCorpus / job).report.dump(2);
    const std::string b = run_job_file(kCorpus / job).report.dump(2);
    CHECK(a == b);
  }
  fs::path dir = scratch_dir("stable");
  REQUIRE(cli("run " + (kCorpus / "ex09.job").string() + " --out " + (dir / "a.json").string()) == 0);
  REQUIRE(cli("run " + (kCorpus / "ex09.job").string() + " --out " + (dir / "b.json").string()) == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  fs::remove_all(dir);
}

TEST_CASE("coverage: every public operation has a check") {
  const std::set<std::string> ops = {
      "differentiate", "normalize", "exact_divide", "evaluate",
      "parse_system", "parse_vector_field",
      "lie_bracket", "lie_poisson", "evolutionary_representative", "pushforward", "restrict",
      "is_symmetry", "is_orbital_symmetry", "trivial_orbital", "find_lpti_symmetries", "find_orbital_symmetries",
      "find_first_integrals", "verify_darboux", "find_darboux", "is_invariant_manifold", "tangency_refinement",
      "is_conditional_symmetry", "is_conditional_orbital_symmetry", "is_partial_symmetry", "cofactor_matrix",
      "solve_tangent_fields", "characteristic_integrals",
      "find_fixed_points", "check_symmetry_vanishes", "tangency_to_subspaces", "restricted_commutator",
      "center_manifold_series", "detect_crossing",
      "integrate", "flow_map", "verify_symmetry_numeric", "verify_orbital_numeric",
      "verify_invariant_manifold_numeric", "separation_diagnostic"};
  std::set<std::string> covered;
  for (const auto& c : check_registry()) {
    covered.insert(c.operation);
    CHECK(find_check(c.name) == &c);
  }
  for (const auto& op : ops) {
    INFO(op);
    CHECK(covered.count(op) == 1);
  }
}

TEST_CASE("subcommands") {
  const std::string sys = (kCorpus / "ex07a.dsys").string();
  CHECK(cli("check-symmetry --system " + sys + " --field \"dx: -y, dy: x\"") == kExitPass);
  CHECK(cli("check-symmetry --system " + sys + " --field \"dx: x, dy: y\"") == kExitFail);
  CHECK(cli("check-orbital --system \"vars x, y; x' = x; y' = y\" --field \"dx: x, dy: y\"") == kExitPass);
  CHECK(cli("find-integrals --system \"vars x, y; x' = -y; y' = x\" --degree 2") == kExitPass);
  CHECK(cli("find-darboux --system " + sys + " --degree 2 --cofactor-degree 2") == kExitPass);
  CHECK(cli("conditional --system " + sys + " --field \"dx: -y, dy: x\" --orbital") == kExitPass);
  CHECK(cli("center-manifold --system \"vars x, y; x' = x*y; y' = -y - x^2\" --center x --order 6") == kExitPass);
  CHECK(cli("crossing --system \"vars x; params lam; x' = lam*x - x^3\" --parameter lam --point 0 --interval \"-1, 1\"") ==
        kExitPass);
  CHECK(cli("verify --system " + sys + " --field \"dx: -y, dy: x\" --x0 \"0.5, 0.2\"") == kExitPass);
  CHECK(cli("check-symmetry --system " + sys) == kExitInvalid);
  CHECK(cli("no-such-command") == kExitInvalid);
}
