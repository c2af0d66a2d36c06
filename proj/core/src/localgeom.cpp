#include <symflow/localgeom.hpp>

#include <symflow/errors.hpp>
#include <symflow/linalg.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace symflow {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kFixedPointTol = 1e-10;
constexpr double kDedupTol = 1e-8;
constexpr double kTangencyTol = 1e-9;
constexpr std::size_t kMaxSeeds = 4096;

NumericEnv merged_env(const DynSystem& sys, const NumericEnv& env) {
  NumericEnv out = env;
  for (const auto& [k, v] : sys.numeric_parameters()) out.constants.emplace(k, v);
  return out;
}

Matrix to_eigen(const std::vector<std::vector<double>>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i].size() != a.size()) throw Error("matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[i][j];
  }
  return m;
}

std::vector<std::vector<double>> from_eigen(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::map<std::string, Expr> point_values(const std::vector<std::string>& vars, const std::vector<Rational>& q) {
  std::map<std::string, Expr> out;
  for (std::size_t i = 0; i < vars.size(); ++i) out.emplace(vars[i], Expr(q[i]));
  return out;
}

bool vanishes_exactly(const std::vector<Expr>& f, const std::vector<std::string>& vars, const std::vector<Rational>& q) {
  auto vals = point_values(vars, q);
  return std::all_of(f.begin(), f.end(), [&](const Expr& e) { return substitute(e, vals).is_zero(); });
}

std::vector<std::vector<Expr>> exact_jacobian_at(const std::vector<std::vector<Expr>>& jac,
                                                 const std::vector<std::string>& vars, const std::vector<Rational>& q) {
  auto vals = point_values(vars, q);
  std::vector<std::vector<Expr>> out;
  for (const auto& row : jac) {
    std::vector<Expr> r;
    for (const auto& e : row) r.push_back(substitute(e, vals));
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<Matrix> evaluate_matrix(const std::vector<std::vector<Expr>>& m, const std::vector<std::string>& vars,
                                      std::span<const double> x, const NumericEnv& env) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Matrix out(n, n);
  try {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        out(i, j) = CompiledExpr(m[i][j], vars, env.constants, env.functions)(x);
      }
    }
  } catch (const UnboundSymbol&) {
    return std::nullopt;
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return out;
}

struct Isolation {
  bool isolated = true;
  std::string note;
};

Isolation classify_isolation(const std::vector<Expr>& f, const std::vector<std::string>& vars, const FixedPoint& p,
                             const std::optional<Matrix>& jac, const NumericEnv& env) {
  if (!jac) return {true, "jacobian not evaluable; assumed isolated"};
  Eigen::JacobiSVD<Matrix> svd(*jac, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  std::vector<Vector> kernel;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= 1e-8 * scale) kernel.push_back(svd.matrixV().col(k));
  }
  if (kernel.empty()) return {true, "nonsingular jacobian"};
  CompiledVector fn(f, vars, env);
  std::vector<double> y(vars.size());
  for (const auto& k : kernel) {
    bool flat = true;
    for (double d : {1e-3, -1e-3, 1e-2, -1e-2}) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = p.location[i] + d * k(static_cast<Eigen::Index>(i));
      auto r = fn(y);
      if (norm(r) > kFixedPointTol) {
        flat = false;
        break;
      }
    }
    if (flat) return {false, "equilibria continue along a kernel direction"};
  }
  return {true, "singular jacobian; f nonzero along kernel directions"};
}

std::vector<std::vector<double>> grid_seeds(std::size_t n, double box, int grid) {
  grid = std::max(grid, 1);
  while (grid > 1 && std::pow(static_cast<double>(grid), static_cast<double>(n)) > static_cast<double>(kMaxSeeds)) --grid;
  std::vector<double> axis;
  for (int i = 0; i < grid; ++i) axis.push_back(grid == 1 ? 0.0 : -box + 2.0 * box * i / (grid - 1));
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = axis[idx[i]];
    out.push_back(std::move(s));
    std::size_t k = 0;
    while (k < n && ++idx[k] == axis.size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

std::vector<std::vector<Rational>> integer_points(std::size_t n, double box) {
  long r = static_cast<long>(std::floor(box));
  std::vector<std::vector<Rational>> out;
  std::vector<long> idx(n, -r);
  if (std::pow(2.0 * r + 1.0, static_cast<double>(n)) > static_cast<double>(kMaxSeeds)) {
    out.push_back(std::vector<Rational>(n, Rational(0)));
    return out;
  }
  while (true) {
    std::vector<Rational> q;
    for (long v : idx) q.push_back(Rational(v));
    out.push_back(std::move(q));
    std::size_t k = 0;
    while (k < n && ++idx[k] > r) idx[k++] = -r;
    if (k == n) break;
  }
  return out;
}

std::optional<std::vector<double>> newton(const CompiledVector& fn, const CompiledVector& jac, std::vector<double> x,
                                          double box) {
  const std::size_t n = x.size();
  std::vector<double> fx(n), jx(n * n);
  for (int iter = 0; iter < 200; ++iter) {
    fn(x, fx);
    jac(x, jx);
    Matrix j(n, n);
    Vector r(n);
    for (std::size_t a = 0; a < n; ++a) {
      r(a) = fx[a];
      for (std::size_t b = 0; b < n; ++b) j(a, b) = jx[a * n + b];
    }
    if (!r.allFinite() || !j.allFinite()) return std::nullopt;
    Vector step = j.completeOrthogonalDecomposition().solve(r);
    double xn = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      x[a] -= step(a);
      xn = std::max(xn, std::fabs(x[a]));
    }
    if (!std::isfinite(xn) || xn > 1e6 * std::max(box, 1.0)) return std::nullopt;
    if (step.norm() <= 1e-14 * (1.0 + xn)) break;
  }
  fn(x, fx);
  if (!(norm(fx) <= kFixedPointTol)) return std::nullopt;
  return x;
}

bool same_point(const FixedPoint& a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) d = std::max(d, std::fabs(a.location[i] - b[i]));
  return d <= kDedupTol * (1.0 + norm(b));
}

std::vector<double> to_doubles(const std::vector<Rational>& q) {
  std::vector<double> out;
  for (const auto& v : q) out.push_back(to_double(v));
  return out;
}

bool exact_rational_matrix(const std::vector<std::vector<Expr>>& m) {
  for (const auto& row : m) {
    for (const auto& e : row) {
      if (!e.is_rational()) return false;
    }
  }
  return !m.empty();
}

bool triangular(const std::vector<std::vector<Expr>>& m) {
  bool upper = true, lower = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[i][j].is_zero()) continue;
      if (i > j) upper = false;
      if (i < j) lower = false;
    }
  }
  return upper || lower;
}

// Real basis of the generalized eigenspace for the selected eigenvalues.
std::vector<std::vector<double>> generalized_eigenspace(const Matrix& a, const std::vector<std::complex<double>>& mus) {
  const auto n = a.rows();
  if (mus.empty()) return {};
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd ac = a.cast<std::complex<double>>();
  for (const auto& mu : mus) p = p * (ac - mu * Eigen::MatrixXcd::Identity(n, n));
  Matrix pr = p.real();
  Eigen::JacobiSVD<Matrix> svd(pr, Eigen::ComputeFullV);
  std::vector<std::vector<double>> out;
  const auto d = static_cast<Eigen::Index>(mus.size());
  for (Eigen::Index k = n - d; k < n; ++k) {
    Vector col = svd.matrixV().col(k);
    out.emplace_back(col.data(), col.data() + n);
  }
  return out;
}

Matrix basis_matrix(const SpectralSplit& s, std::size_t n) {
  Matrix v(n, n);
  Eigen::Index c = 0;
  for (const auto* group : {&s.stable, &s.unstable, &s.center}) {
    for (const auto& b : *group) {
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i), c) = b[i];
      ++c;
    }
  }
  return v;
}

Matrix projector(const SpectralSplit& s, std::size_t n, int which) {
  Matrix v = basis_matrix(s, n);
  const auto ns = static_cast<Eigen::Index>(s.stable.size());
  const auto nu = static_cast<Eigen::Index>(s.unstable.size());
  Eigen::Index lo = which == 0 ? 0 : which == 1 ? ns : ns + nu;
  Eigen::Index len = which == 0 ? ns : which == 1 ? nu : static_cast<Eigen::Index>(s.center.size());
  Matrix e = Matrix::Zero(n, n);
  for (Eigen::Index k = lo; k < lo + len; ++k) e(k, k) = 1.0;
  return v * e * v.inverse();
}

}  // namespace

FixedPointSearch find_fixed_points(const DynSystem& system, const FixedPointOptions& opts) {
  const DynSystem sys = system.with_parameter_values();
  const auto& vars = sys.variables();
  const std::size_t n = vars.size();
  const auto& f = sys.rhs();
  NumericEnv env = merged_env(system, opts.env);
  auto jac_exprs = jacobian(f, vars);

  FixedPointSearch out;
  auto add_exact = [&](const std::vector<Rational>& q) {
    std::vector<double> x = to_doubles(q);
    for (auto& p : out.points) {
      if (same_point(p, x)) {
        if (!p.exact) {
          p.exact = q;
          p.location = x;
          p.residual = 0.0;
        }
        return;
      }
    }
    FixedPoint p;
    p.location = std::move(x);
    p.exact = q;
    out.points.push_back(std::move(p));
  };

  for (const auto& q : integer_points(n, opts.box)) {
    if (vanishes_exactly(f, vars, q)) add_exact(q);
  }

  std::optional<CompiledVector> fn, jn;
  try {
    fn.emplace(f, vars, env);
    std::vector<Expr> flat;
    for (const auto& row : jac_exprs) flat.insert(flat.end(), row.begin(), row.end());
    jn.emplace(flat, vars, env);
  } catch (const UnboundSymbol& e) {
    out.note = std::string("numeric search skipped: ") + e.what();
  }

  if (fn) {
    for (const auto& seed : grid_seeds(n, opts.box, opts.grid)) {
      ++out.seeds;
      auto x = newton(*fn, *jn, seed, opts.box);
      if (!x) {
        ++out.dropped;
        continue;
      }
      std::vector<Rational> q(n);
      bool small = true;
      for (std::size_t i = 0; i < n && small; ++i) small = recognize_rational((*x)[i], 64, 1e-6, q[i]);
      if (small && vanishes_exactly(f, vars, q)) {
        add_exact(q);
        continue;
      }
      if (std::any_of(out.points.begin(), out.points.end(), [&](const FixedPoint& p) { return same_point(p, *x); })) {
        continue;
      }
      FixedPoint p;
      p.location = *x;
      p.residual = norm((*fn)(*x));
      out.points.push_back(std::move(p));
    }
  }

  for (auto& p : out.points) {
    std::optional<Matrix> j;
    if (fn) j = evaluate_matrix(jac_exprs, vars, p.location, env);
    if (!j && p.exact) {
      auto exact = exact_jacobian_at(jac_exprs, vars, *p.exact);
      if (exact_rational_matrix(exact)) {
        RationalMatrix rm;
        for (const auto& row : exact) {
          RationalVector r;
          for (const auto& e : row) r.push_back(e.rational_value());
          rm.push_back(std::move(r));
        }
        if (rank(rm, n) == n) {
          p.isolated = true;
          p.isolation_note = "nonsingular jacobian";
          continue;
        }
      }
    }
    Isolation iso = fn ? classify_isolation(f, vars, p, j, env) : Isolation{true, "jacobian not evaluable; assumed isolated"};
    p.isolated = iso.isolated;
    p.isolation_note = iso.note;
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return a.location < b.location; });
  return out;
}

SpectralSplit spectral_split(const std::vector<std::vector<double>>& a) {
  SpectralSplit s;
  s.matrix = a;
  if (a.empty()) return s;
  Matrix m = to_eigen(a);
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw DomainError("eigenvalue computation failed");
  std::vector<std::complex<double>> st, un, ce;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    auto mu = es.eigenvalues()(k);
    s.eigenvalues.push_back(mu);
    if (mu.real() < -kHyperbolicThreshold) st.push_back(mu);
    else if (mu.real() > kHyperbolicThreshold) un.push_back(mu);
    else ce.push_back(mu);
  }
  s.stable = generalized_eigenspace(m, st);
  s.unstable = generalized_eigenspace(m, un);
  s.center = generalized_eigenspace(m, ce);
  return s;
}

SpectralSplit spectral_split(const DynSystem& system, const FixedPoint& p, const NumericEnv& env) {
  const DynSystem sys = system.with_parameter_values();
  const auto& vars = sys.variables();
  auto jac = jacobian(sys.rhs(), vars);
  std::vector<std::vector<Expr>> exact;
  if (p.exact) exact = exact_jacobian_at(jac, vars, *p.exact);

  if (!exact.empty() && exact_rational_matrix(exact) && triangular(exact)) {
    std::vector<std::vector<double>> a(vars.size(), std::vector<double>(vars.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) a[i][j] = to_double(exact[i][j].rational_value());
    }
    Matrix m = to_eigen(a);
    SpectralSplit s;
    s.jacobian = exact;
    s.matrix = a;
    s.exact_classification = true;
    std::vector<std::complex<double>> st, un, ce;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Rational& d = exact[i][i].rational_value();
      std::complex<double> mu(to_double(d), 0.0);
      s.eigenvalues.push_back(mu);
      (sgn(d) < 0 ? st : sgn(d) > 0 ? un : ce).push_back(mu);
    }
    s.stable = generalized_eigenspace(m, st);
    s.unstable = generalized_eigenspace(m, un);
    s.center = generalized_eigenspace(m, ce);
    return s;
  }

  auto m = evaluate_matrix(jac, vars, p.location, merged_env(system, env));
  if (!m) throw UnboundSymbol("jacobian at the fixed point cannot be evaluated");
  SpectralSplit s = spectral_split(from_eigen(*m));
  s.jacobian = std::move(exact);
  return s;
}

VanishingCheck check_symmetry_vanishes(const VectorField& v, const FixedPoint& p, bool isolated, const NumericEnv& env) {
  VanishingCheck c;
  if (isolated && !p.isolated) c.note = "fixed point is not isolated";
  const auto& vars = v.variables();
  bool decided = false;
  if (p.exact) {
    auto vals = point_values(vars, *p.exact);
    std::vector<Expr> at;
    for (const auto& s : v.components()) at.push_back(substitute(s, vals));
    if (std::all_of(at.begin(), at.end(), [](const Expr& e) { return e.is_zero(); })) {
      c.pass = true;
      c.exact = true;
      c.values.assign(vars.size(), 0.0);
      decided = true;
    } else if (std::all_of(at.begin(), at.end(), [](const Expr& e) { return e.is_rational(); })) {
      for (const auto& e : at) c.values.push_back(to_double(e.rational_value()));
      c.exact = true;
      decided = true;
    }
  }
  if (!decided) {
    try {
      c.values = CompiledVector(v.components(), vars, env)(p.location);
      c.pass = norm(c.values) <= kTangencyTol;
    } catch (const UnboundSymbol& e) {
      c.note = std::string("cannot evaluate v at the point: ") + e.what();
      return c;
    }
  }
  c.conditional = c.pass && isolated && p.isolated;
  return c;
}

TangencyReport tangency_to_subspaces(const VectorField& v, const FixedPoint& p, const SpectralSplit& split,
                                     const NumericEnv& env) {
  const auto& vars = v.variables();
  const std::size_t n = vars.size();
  if (split.matrix.size() != n) throw Error("spectral split and vector field have different dimensions");
  auto jac = jacobian(v.components(), vars);
  auto b = evaluate_matrix(jac, vars, p.location, env);
  if (!b) throw UnboundSymbol("Dv at the fixed point cannot be evaluated");
  TangencyReport r;
  r.dv = from_eigen(*b);
  const double tol = kTangencyTol * (1.0 + b->norm());
  const Matrix id = Matrix::Identity(n, n);
  auto defect = [&](int which, std::size_t dim) {
    if (dim == 0 || dim == n) return 0.0;
    Matrix pr = projector(split, n, which);
    return ((id - pr) * (*b) * pr).norm();
  };
  r.stable_defect = defect(0, split.stable.size());
  r.unstable_defect = defect(1, split.unstable.size());
  r.center_defect = defect(2, split.center.size());
  r.stable_ok = r.stable_defect <= tol;
  r.unstable_ok = r.unstable_defect <= tol;
  r.center_ok = r.center_defect <= tol;
  return r;
}

RestrictedCommutator restricted_commutator(const DynSystem& system, const VectorField& v, const AlgebraicManifold& m,
                                           const NumericEnv& env) {
  if (v.variables() != system.variables() || m.variables() != system.variables()) {
    throw Error("vector field, manifold and system have different variables");
  }
  const DynSystem sys = system.with_parameter_values();
  auto vals = system.parameter_values();
  std::vector<Expr> comps;
  for (const auto& c : v.components()) comps.push_back(substitute(c, vals));
  std::optional<Expr> tau;
  if (v.tau()) tau = substitute(*v.tau(), vals);
  VectorField q = evolutionary_representative(VectorField(v.variables(), comps, tau), sys);
  NumericEnv full = merged_env(system, env);
  for (const auto& g : m.generator_exprs()) {
    if (vanishes_on(q.apply(g), m, full) == Vanish::No) throw DomainError("vector field is not tangent to the manifold");
  }
  RestrictedCommutator r;
  auto bracket = lie_poisson(sys.rhs(), q.components(), sys.variables());
  r.zero = true;
  for (std::size_t i = 0; i < bracket.size(); ++i) {
    Expr b = bracket[i] + differentiate(q.component(i), kTime);
    r.residual.push_back(restrict_to(b, m));
    Vanish z = vanishes_on(b, m, full);
    r.vanishing.push_back(z);
    if (z != Vanish::Symbolic && z != Vanish::Numeric) r.zero = false;
  }
  return r;
}

bool CenterManifoldSeries::residual_zero() const {
  for (const auto& order : residuals) {
    for (const auto& p : order) {
      if (!p.is_zero()) return false;
    }
  }
  return true;
}

namespace {

Polynomial truncate(const Polynomial& p, int lo, int hi) {
  Polynomial out(p.variables());
  for (const auto& [e, c] : p.terms()) {
    int d = std::accumulate(e.begin(), e.end(), 0);
    if (d >= lo && d <= hi) out.add_term(e, c);
  }
  return out;
}

Matrix rational_block(const RationalMatrix& lin, const std::vector<std::size_t>& rows) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Matrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = to_double(lin[rows[i]][rows[j]]);
  }
  return m;
}

// Dh . f_c(x_c, h) - f_h(x_c, h), truncated at degree hi.
std::vector<Polynomial> graph_residual(const std::vector<Polynomial>& f, const std::vector<std::size_t>& ci,
                                       const std::vector<std::size_t>& hi, const std::vector<Polynomial>& h,
                                       const std::vector<std::string>& cvars, int max_degree) {
  std::vector<Polynomial> values(f.size());
  for (std::size_t k = 0; k < ci.size(); ++k) values[ci[k]] = Polynomial::variable(cvars, k);
  for (std::size_t k = 0; k < hi.size(); ++k) values[hi[k]] = h[k];
  std::vector<Polynomial> along;
  for (std::size_t idx : ci) along.push_back(truncate(f[idx].compose(values), 0, max_degree));
  std::vector<Polynomial> out;
  for (std::size_t j = 0; j < hi.size(); ++j) {
    Polynomial r = -truncate(f[hi[j]].compose(values), 0, max_degree);
    for (std::size_t k = 0; k < ci.size(); ++k) r += h[j].derivative(k) * along[k];
    out.push_back(truncate(r, 0, max_degree));
  }
  return out;
}

}  // namespace

CenterManifoldSeries CenterManifoldSeries::truncated(int m) const {
  CenterManifoldSeries out = *this;
  out.order = std::min(m, order);
  for (auto& p : out.h) p = truncate(p, 2, out.order);
  out.residuals.resize(static_cast<std::size_t>(std::max(out.order - 1, 0)));
  return out;
}

CenterManifoldSeries center_manifold_series(const DynSystem& sys, const std::vector<std::string>& center_vars,
                                            int order) {
  if (order < 2) throw Error("center manifold order must be at least 2");
  const auto& vars = sys.variables();
  auto f = sys.polynomial_rhs();
  std::vector<std::size_t> ci, hi;
  for (const auto& c : center_vars) {
    auto it = std::find(vars.begin(), vars.end(), c);
    if (it == vars.end()) throw UnknownVariable(c);
    ci.push_back(static_cast<std::size_t>(it - vars.begin()));
  }
  if (ci.empty()) throw DomainError("no center variables given");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (std::find(ci.begin(), ci.end(), i) == ci.end()) hi.push_back(i);
  }

  const std::size_t n = vars.size();
  RationalMatrix lin(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i].constant_term() != 0) throw DomainError("the origin is not an equilibrium");
    for (std::size_t j = 0; j < n; ++j) {
      Exponents e(n, 0);
      e[j] = 1;
      lin[i][j] = f[i].coefficient(e);
    }
  }
  for (std::size_t a : ci) {
    for (std::size_t b : hi) {
      if (lin[a][b] != 0 || lin[b][a] != 0) throw DomainError("linear part is not block diagonal");
    }
  }
  {
    Eigen::EigenSolver<Matrix> es(rational_block(lin, ci), false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (std::fabs(es.eigenvalues()(k).real()) > kHyperbolicThreshold) {
        throw DomainError("center block has an eigenvalue off the imaginary axis");
      }
    }
  }
  if (!hi.empty()) {
    Eigen::EigenSolver<Matrix> es(rational_block(lin, hi), false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (std::fabs(es.eigenvalues()(k).real()) <= kHyperbolicThreshold) {
        throw DomainError("hyperbolic block has an eigenvalue on the imaginary axis");
      }
    }
  }

  CenterManifoldSeries s;
  s.center_vars = center_vars;
  for (std::size_t j : hi) s.hyperbolic_vars.push_back(vars[j]);
  s.order = order;
  const auto& cvars = center_vars;
  const std::size_t nc = ci.size();
  const std::size_t nh = hi.size();
  s.h.assign(nh, Polynomial(cvars));

  for (int k = 2; k <= order; ++k) {
    auto monos = monomials_up_to(nc, k, k);
    const std::size_t nm = monos.size();
    std::vector<Polynomial> rk = graph_residual(f, ci, hi, s.h, cvars, k);
    for (auto& p : rk) p = truncate(p, k, k);

    // L(H)_j = sum_i dH_j/dx_i (B x_c)_i - sum_l C_jl H_l on degree-k monomials.
    RationalMatrix a(nh * nm, RationalVector(nh * nm));
    RationalVector rhs(nh * nm);
    std::vector<Polynomial> bx(nc, Polynomial(cvars));
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t l = 0; l < nc; ++l) bx[i] += Polynomial::variable(cvars, l) * lin[ci[i]][ci[l]];
    }
    std::map<Exponents, std::size_t> row_of;
    for (std::size_t m = 0; m < nm; ++m) row_of[monos[m]] = m;
    for (std::size_t l = 0; l < nh; ++l) {
      for (std::size_t m = 0; m < nm; ++m) {
        std::size_t col = l * nm + m;
        Polynomial mono = Polynomial::monomial(cvars, monos[m]);
        Polynomial drift(cvars);
        for (std::size_t i = 0; i < nc; ++i) drift += mono.derivative(i) * bx[i];
        for (const auto& [e, c] : drift.terms()) a[l * nm + row_of.at(e)][col] += c;
        for (std::size_t j = 0; j < nh; ++j) a[j * nm + m][col] -= lin[hi[j]][hi[l]];
      }
    }
    for (std::size_t j = 0; j < nh; ++j) {
      for (const auto& [e, c] : rk[j].terms()) rhs[j * nm + row_of.at(e)] = -c;
    }
    auto sol = solve_unique(a, rhs);
    if (!sol) throw DomainError("order " + std::to_string(k) + " of the center manifold is singular");
    for (std::size_t j = 0; j < nh; ++j) {
      for (std::size_t m = 0; m < nm; ++m) s.h[j].add_term(monos[m], (*sol)[j * nm + m]);
    }
    std::vector<Polynomial> check = graph_residual(f, ci, hi, s.h, cvars, k);
    for (auto& p : check) p = truncate(p, k, k);
    s.residuals.push_back(std::move(check));
  }
  return s;
}

CrossingReport detect_crossing(const DynSystem& system, const std::string& parameter, const std::vector<double>& x0,
                               double lo, double hi, int steps, const NumericEnv& env) {
  const auto& vars = system.variables();
  if (x0.size() != vars.size()) throw Error("x0 has the wrong dimension");
  if (!(lo < hi)) throw Error("parameter interval must satisfy lo < hi");
  if (steps < 1) throw Error("steps must be positive");
  const auto& params = system.parameters();
  if (std::none_of(params.begin(), params.end(), [&](const Parameter& p) { return p.name == parameter; })) {
    throw UnknownVariable(parameter);
  }
  NumericEnv full = env;
  for (const auto& [k, v] : system.numeric_parameters()) {
    if (k != parameter) full.constants.emplace(k, v);
  }
  full.constants.erase(parameter);
  std::vector<std::string> slots = vars;
  slots.push_back(parameter);
  const std::size_t n = vars.size();
  CompiledVector fn(system.rhs(), slots, full);
  std::vector<Expr> flat;
  for (const auto& row : jacobian(system.rhs(), vars)) flat.insert(flat.end(), row.begin(), row.end());
  CompiledVector jn(flat, slots, full);

  std::vector<double> point = x0;
  point.push_back(0.0);
  auto spectrum = [&](double lambda) {
    point.back() = lambda;
    auto j = jn(point);
    Matrix m(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) m(a, b) = j[a * n + b];
    }
    Eigen::EigenSolver<Matrix> es(m, false);
    std::complex<double> best(-std::numeric_limits<double>::infinity(), 0.0);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()(k).real() > best.real()) best = es.eigenvalues()(k);
    }
    return best;
  };
  auto g = [&](double lambda) { return spectrum(lambda).real(); };

  CrossingReport r;
  for (int i = 0; i <= steps; ++i) {
    double lambda = lo + (hi - lo) * i / steps;
    point.back() = lambda;
    auto fx = fn(point);
    double scale = 1.0 + norm(x0);
    if (!(norm(fx) <= kFixedPointTol * scale)) {
      throw DomainError("x0 is not a fixed point at " + parameter + " = " + std::to_string(lambda));
    }
    r.sweep.emplace_back(lambda, g(lambda));
  }
  std::optional<std::size_t> bracket;
  for (std::size_t i = 0; i + 1 < r.sweep.size(); ++i) {
    if ((r.sweep[i].second > 0) != (r.sweep[i + 1].second > 0)) {
      bracket = i;
      break;
    }
  }
  if (!bracket) throw DomainError("no eigenvalue crosses the imaginary axis in the interval");
  double a = r.sweep[*bracket].first, b = r.sweep[*bracket + 1].first;
  const bool rising = r.sweep[*bracket + 1].second > 0;
  while (b - a > 1e-8) {
    double mid = 0.5 * (a + b);
    if ((g(mid) > 0) == rising) b = mid;
    else a = mid;
  }
  r.lambda0 = 0.5 * (a + b);
  const double h = 1e-5 * std::max(1.0, std::fabs(r.lambda0));
  r.speed = (g(r.lambda0 + h) - g(r.lambda0 - h)) / (2.0 * h);
  auto mu = spectrum(r.lambda0);
  r.frequency = std::fabs(mu.imag());
  r.complex_pair = r.frequency > 1e-6;
  return r;
}

}  // namespace symflow
