#include <symflow/fields.hpp>
#include <symflow/invariants.hpp>
#include <symflow/localgeom.hpp>
#include <symflow/numeric.hpp>
#include <symflow/parser.hpp>
#include <symflow/symmetry.hpp>

#include <benchmark/benchmark.h>

using namespace symflow;

namespace {

const DynSystem& limit_cycle() {
  static const DynSystem s = parse_system("vars x, y; x' = (1 - x^2 - y^2)*x - y; y' = x + (1 - x^2 - y^2)*y");
  return s;
}

void BM_LieBracketFormal(benchmark::State& state) {
  const std::vector<std::string> vars = {"x", "y"};
  VectorField xs = parse_vector_field("dx: x, dy: y", vars);
  VectorField x2 = parse_vector_field("dx: -beta(x, y)*y, dy: beta(x, y)*x", vars);
  for (auto _ : state) benchmark::DoNotOptimize(lie_bracket(xs, x2));
}
BENCHMARK(BM_LieBracketFormal);

void BM_OrbitalCofactor(benchmark::State& state) {
  DynSystem s = parse_system("vars x, y, z; x' = x^3 - 2*y*z + 3*z^2*x - 1; y' = y^2*z - x + 2*x*y*z; z' = x*y*z - z^3 + y");
  SymbolContext ctx;
  ctx.variables = s.variables();
  ctx.allow_time = true;
  VectorField v = s.field().scaled(parse_expression("x^2*t - 3*y*z*t + z^3 - x*y + 2", ctx));
  for (auto _ : state) benchmark::DoNotOptimize(is_orbital_symmetry(s, v));
}
BENCHMARK(BM_OrbitalCofactor);

void BM_LptiSearch(benchmark::State& state) {
  DynSystem s = parse_system("vars x, y; x' = x + y^2; y' = -y");
  Ansatz a;
  a.degree = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_lpti_symmetries(s, a));
}
BENCHMARK(BM_LptiSearch)->DenseRange(1, 4);

void BM_FindDarboux(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_darboux(limit_cycle(), 2, 2));
}
BENCHMARK(BM_FindDarboux);

void BM_ConditionalOrbital(benchmark::State& state) {
  VectorField rot = parse_vector_field("dx: -y, dy: x", {"x", "y"});
  for (auto _ : state) benchmark::DoNotOptimize(is_conditional_orbital_symmetry(limit_cycle(), rot));
}
BENCHMARK(BM_ConditionalOrbital);

void BM_CenterManifold(benchmark::State& state) {
  DynSystem s = parse_system("vars x, y; x' = x*y; y' = -y - x^2");
  for (auto _ : state) benchmark::DoNotOptimize(center_manifold_series(s, {"x"}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CenterManifold)->Arg(6)->Arg(10)->Arg(14);

void BM_Integrate(benchmark::State& state) {
  IntegratorOptions o;
  o.tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(limit_cycle(), {2.0, 0.0}, 0.0, 20.0, o));
}
BENCHMARK(BM_Integrate);

void BM_VerifyOrbitalNumeric(benchmark::State& state) {
  DynSystem s = parse_system("vars x, y; x' = -(x^2 + y^2)*y; y' = (x^2 + y^2)*x");
  VectorField xs = parse_vector_field("dx: x, dy: y", {"x", "y"});
  for (auto _ : state) benchmark::DoNotOptimize(verify_orbital_numeric(s, xs, {0.8, 0.0}, 0.3, 20.0, 1e-6));
}
BENCHMARK(BM_VerifyOrbitalNumeric);

}  // namespace
BENCHMARK_MAIN();
