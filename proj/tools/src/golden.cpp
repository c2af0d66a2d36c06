#include <symflow/tools/job.hpp>

#include <cmath>

namespace symflow::tools {

namespace {

std::string escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

bool is_approx(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("approx") && j.contains("tol") && j["approx"].is_number() &&
         j["tol"].is_number();
}

void compare(const Json& expected, const Json& actual, const std::string& ptr, std::vector<std::string>& diffs) {
  const std::string where = ptr.empty() ? "/" : ptr;
  if (is_approx(expected)) {
    if (!actual.is_number()) {
      diffs.push_back(where + ": expected a number, got " + actual.dump());
      return;
    }
    const double want = expected["approx"].get<double>();
    const double tol = expected["tol"].get<double>();
    const double got = actual.get<double>();
    if (!(std::fabs(got - want) <= tol)) {
      diffs.push_back(where + ": expected " + std::to_string(want) + " within " + std::to_string(tol) + ", got " +
                      actual.dump());
    }
    return;
  }
  if (expected.is_object()) {
    if (!actual.is_object()) {
      diffs.push_back(where + ": expected an object, got " + actual.dump());
      return;
    }
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      const std::string child = ptr + "/" + escape(it.key());
      if (!actual.contains(it.key())) {
        diffs.push_back(child + ": missing");
        continue;
      }
      compare(it.value(), actual[it.key()], child, diffs);
    }
    return;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) {
      diffs.push_back(where + ": expected an array of " + std::to_string(expected.size()) + ", got " + actual.dump());
      return;
    }
    for (std::size_t i = 0; i < expected.size(); ++i) compare(expected[i], actual[i], ptr + "/" + std::to_string(i), diffs);
    return;
  }
  if (expected.is_number() && actual.is_number()) {
    if (expected.get<double>() != actual.get<double>()) {
      diffs.push_back(where + ": expected " + expected.dump() + ", got " + actual.dump());
    }
    return;
  }
  if (expected != actual) diffs.push_back(where + ": expected " + expected.dump() + ", got " + actual.dump());
}

}  // namespace

std::vector<std::string> match_golden(const Json& expected, const Json& actual) {
  std::vector<std::string> diffs;
  compare(expected, actual, "", diffs);
  return diffs;
}

}  // namespace symflow::tools
