#include <symflow/tools/job.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#ifndef SYMFLOW_SOURCE_CORPUS
#define SYMFLOW_SOURCE_CORPUS "corpus"
#endif

namespace symflow::tools {

bool CorpusSummary::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const CorpusCase& c) { return c.pass; });
}

std::filesystem::path default_corpus_dir() {
  if (const char* env = std::getenv("SYMFLOW_CORPUS"); env && *env) return env;
  return SYMFLOW_SOURCE_CORPUS;
}

namespace {

CorpusCase run_case(const std::filesystem::path& job_path) {
  CorpusCase c;
  c.name = job_path.stem().string();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r = run_job_file(job_path);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.exit_code = r.exit_code;
  auto golden = job_path;
  golden.replace_extension(".expected.json");
  if (!std::filesystem::exists(golden)) {
    c.diffs.push_back("missing golden " + golden.filename().string());
    return c;
  }
  Json expected;
  try {
    std::ifstream in(golden);
    expected = Json::parse(in);
  } catch (const std::exception& e) {
    c.diffs.push_back("unreadable golden " + golden.filename().string() + ": " + e.what());
    return c;
  }
  Json body = expected;
  if (body.is_object()) body.erase("exit_code");
  c.diffs = match_golden(body, r.report);
  // The golden may pin the exit code; otherwise the job must pass.
  if (!expected.contains("exit_code") && r.exit_code != kExitPass) {
    c.diffs.push_back("exit code " + std::to_string(r.exit_code));
  }
  if (expected.contains("exit_code") && expected["exit_code"] != r.exit_code) {
    c.diffs.push_back("/exit_code: expected " + expected["exit_code"].dump() + ", got " + std::to_string(r.exit_code));
  }
  c.pass = c.diffs.empty();
  return c;
}

}  // namespace

CorpusSummary run_corpus(const std::filesystem::path& dir, unsigned jobs) {
  CorpusSummary out;
  if (!std::filesystem::is_directory(dir)) {
    out.cases.push_back({dir.string(), false, kExitInvalid, 0.0, {"corpus directory not found"}});
    return out;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".job") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    out.warnings.push_back("no .job files in " + dir.string());
    return out;
  }
  out.cases.resize(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) out.cases[i] = run_case(files[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::sort(out.cases.begin(), out.cases.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

}  // namespace symflow::tools
