#include "support.hpp"

#include <symflow/errors.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace symflow;
using namespace symflow::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_system: examples") {
  DynSystem s = sys("vars x,y; params omega; x' = -omega*y; y' = omega*x;");
  CHECK(s.dimension() == 2);
  REQUIRE(s.parameters().size() == 1);
  CHECK(s.parameters()[0].name == "omega");

  DynSystem a = sys("vars x, y\nparams omega\nx' = (1-x^2-y^2)*x - omega*y; y' = omega*x + (1-x^2-y^2)*y");
  CHECK(a.rhs()[0] == ex("x - x^3 - x*y^2 - omega*y"));
  CHECK(a.rhs()[1] == ex("omega*x + y - x^2*y - y^3"));

  CHECK_THROWS_AS(sys("vars x, y; x' = x; x' = y"), ParseError);
}

TEST_CASE("parse_system: errors carry positions") {
  try {
    sys("vars x\nx' = x +* 2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(sys("vars x, x; x' = x"), ParseError);
  CHECK_THROWS_AS(sys("vars x; funcs g/1; x' = g(x, x)"), ParseError);
  CHECK_THROWS_AS(sys("vars x; x' = 0.5*x"), ParseError);
  CHECK_THROWS_AS(sys("vars x, y; x' = x"), ParseError);
  CHECK_THROWS_AS(sys("vars x; x' = x; z' = x"), ParseError);
}

TEST_CASE("parse_vector_field: examples") {
  VectorField xr = parse_vector_field("dx: -y, dy: x");
  CHECK(xr.variables() == kXY);
  CHECK(xr.component(0) == ex("-y"));
  CHECK(xr.component(1) == ex("x"));
  CHECK_FALSE(xr.tau());
  VectorField xs = parse_vector_field("dx: x, dy: y");
  CHECK(xs.component(0) == ex("x"));
  VectorField tt = parse_vector_field("dt: 1", kXY);
  CHECK(tt.has_tau());
  CHECK(tt.component(0).is_zero());
  CHECK_THROWS_AS(parse_vector_field("dw: 1", kXY), UnknownVariable);
  CHECK_THROWS_AS(parse_vector_field("dx: (x", kXY), ParseError);
}

TEST_CASE("parse_number allows decimals, rationals do not") {
  CHECK(parse_number("1e-6") == doctest::Approx(1e-6));
  CHECK(parse_number_list("0.5, -2").size() == 2);
  CHECK(parse_rational("3/4") == Rational(3, 4));
}

TEST_CASE("corpus: every file parses and round-trips") {
  const std::filesystem::path dir = SYMFLOW_TEST_CORPUS;
  std::size_t systems = 0, fields = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string text = slurp(e.path());
    if (e.path().extension() == ".dsys") {
      DynSystem once = parse_system(text);
      DynSystem twice = parse_system(format_system(once));
      CHECK(once == twice);
      CHECK(format_system(twice) == format_system(once));
      ++systems;
    } else if (e.path().extension() == ".vf") {
      VectorField once = parse_vector_field(text);
      CHECK(parse_vector_field(format_vector_field(once)) == once);
      ++fields;
    } else if (e.path().extension() == ".job") {
      CHECK_NOTHROW(parse_job(text));
    }
  }
  CHECK(systems >= 10);
  CHECK(fields >= 3);
}

TEST_CASE("job text and check specs") {
  auto entries = parse_job("system = a.dsys\nfield rot = \"dx: -y, dy: x\"  # comment\ncheck = is_symmetry \\\n field=rot\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[1].key == "field");
  CHECK(entries[1].name == "rot");
  CHECK(entries[2].value.find("field=rot") != std::string::npos);
  CheckSpec c = parse_check("find_darboux deg_p=2 hint=\"-2*x^2 - 2*y^2\"");
  CHECK(c.op == "find_darboux");
  REQUIRE(c.args.size() == 2);
  CHECK(c.args[1].second == "-2*x^2 - 2*y^2");
  CHECK_THROWS_AS(parse_check("op k=\"unterminated"), ParseError);
}

TEST_CASE("chart parsing") {
  Chart c = parse_chart("x: 0, y: 0", kXYZ);
  CHECK(c.solved.size() == 2);
  CHECK_THROWS(parse_chart("w: 0", kXYZ));
}
