#include <symflow/numeric.hpp>

#include <symflow/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace symflow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr double kBeta = 0.04;
constexpr double kAlpha = 0.2 - 0.75 * kBeta;

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

std::string state_str(double t, std::span<const double> x) {
  std::ostringstream os;
  os.precision(10);
  os << "t = " << t << ", x = (";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

NumericEnv merged_env(const DynSystem& sys, const NumericEnv& env) {
  NumericEnv out = env;
  for (const auto& [k, v] : sys.numeric_parameters()) out.constants.emplace(k, v);
  return out;
}

double integration_tol(double tol) { return std::clamp(tol * 1e-3, 1e-12, 1e-9); }

}  // namespace

std::vector<double> Trajectory::at(double t) const {
  if (times.empty()) throw Error("empty trajectory");
  const bool forward = times.back() >= times.front();
  const double lo = forward ? times.front() : times.back();
  const double hi = forward ? times.back() : times.front();
  t = std::clamp(t, lo, hi);
  std::size_t k;
  if (forward) {
    k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  } else {
    k = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), t, [](double a, double b) { return a > b; }) - times.begin());
  }
  if (k == 0) return states.front();
  if (k >= times.size()) return states.back();
  const std::size_t i = k - 1;
  const double h = times[k] - times[i];
  const double s = (t - times[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  std::vector<double> out(states[i].size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = h00 * states[i][j] + h10 * h * derivatives[i][j] + h01 * states[k][j] + h11 * h * derivatives[k][j];
  }
  return out;
}

Trajectory integrate(const RhsFunction& f, std::vector<double> x0, double t0, double t1, const IntegratorOptions& opts) {
  if (!(opts.tol >= 1e-12 && opts.tol <= 1e-3)) throw Error("integrator tolerance must lie in [1e-12, 1e-3]");
  const std::size_t n = x0.size();
  Trajectory tr;
  tr.tolerance = opts.tol;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), xn(n);
  f(t0, x0, k1);
  tr.times.push_back(t0);
  tr.states.push_back(x0);
  tr.derivatives.push_back(k1);
  if (t1 == t0) return tr;

  const double span = std::fabs(t1 - t0);
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double hmax = opts.max_step > 0 ? opts.max_step : span / 10.0;
  const double rtol = opts.tol, atol = opts.tol;
  auto scaled_norm = [&](std::span<const double> v, std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sc = atol + rtol * std::max(std::fabs(a[i]), std::fabs(b[i]));
      s += (v[i] / sc) * (v[i] / sc);
    }
    return n ? std::sqrt(s / static_cast<double>(n)) : 0.0;
  };

  auto fail = [&](const std::string& why, double t, std::span<const double> x) {
    std::string msg = why + " at " + state_str(t, x);
    if (!opts.allow_partial) throw IntegrationError(msg);
    tr.complete = false;
    tr.error = msg;
    return tr;
  };

  // Initial step (Hairer-Norsett-Wanner heuristic).
  double h;
  {
    double d0 = scaled_norm(x0, x0, x0), d1 = scaled_norm(k1, x0, x0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + dir * h0 * k1[i];
    f(t0 + dir * h0, y, k2);
    std::vector<double> dk(n);
    for (std::size_t i = 0; i < n; ++i) dk[i] = k2[i] - k1[i];
    double d2 = scaled_norm(dk, x0, x0) / h0;
    double m = std::max(d1, d2);
    double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    h = std::min({100 * h0, h1, hmax});
  }

  double t = t0;
  std::vector<double> x = std::move(x0);
  double err_old = 1e-4;
  bool last_rejected = false;
  for (std::size_t step = 0;; ++step) {
    if (step >= opts.max_steps) return fail("step limit reached", t, x);
    const double remaining = std::fabs(t1 - t);
    if (remaining <= 1e-14 * std::max(1.0, std::fabs(t1))) break;
    if (h > remaining) h = remaining;
    if (h < opts.min_step && h < remaining) return fail("step size underflow", t, x);
    const double hs = dir * h;
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + hs * a21 * k1[i];
    f(t + c2 * hs, y, k2);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, y, k3);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * hs, y, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, y, k5);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    f(t + hs, y, k6);
    for (std::size_t i = 0; i < n; ++i) {
      xn[i] = x[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    f(t + hs, xn, k7);
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    double err = scaled_norm(e, x, xn);
    if (!std::isfinite(err)) {
      ++tr.rejected;
      h *= 0.2;
      last_rejected = true;
      continue;
    }
    if (err <= 1.0) {
      const double fac = std::pow(std::max(err, 1e-10), -kAlpha) * std::pow(err_old, kBeta);
      double grow = std::clamp(0.9 * fac, 0.2, 10.0);
      if (last_rejected) grow = std::min(grow, 1.0);
      err_old = std::max(err, 1e-4);
      const bool at_end = h >= remaining;
      t = at_end ? t1 : t + hs;
      x = xn;
      k1 = k7;
      ++tr.accepted;
      tr.times.push_back(t);
      tr.states.push_back(x);
      tr.derivatives.push_back(k1);
      if (at_end) break;
      h = std::min(h * grow, hmax);
      last_rejected = false;
    } else {
      ++tr.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
    }
  }
  return tr;
}

Trajectory integrate(const DynSystem& sys, std::vector<double> x0, double t0, double t1, const IntegratorOptions& opts,
                     const NumericEnv& env) {
  if (x0.size() != sys.dimension()) throw Error("initial point has the wrong dimension");
  const DynSystem valued = sys.with_parameter_values();
  CompiledVector fn(valued.rhs(), valued.variables(), merged_env(sys, env));
  return integrate([&](double, std::span<const double> x, std::span<double> dx) { fn(x, dx); }, std::move(x0), t0, t1,
                   opts);
}

namespace {

// Flow of tau d_t + s d_x in (t, x).
class ExtendedFlow {
 public:
  ExtendedFlow(const VectorField& v, const NumericEnv& env) {
    std::vector<Expr> rhs;
    rhs.push_back(v.tau() ? *v.tau() : Expr(0));
    for (const auto& c : v.components()) rhs.push_back(c);
    std::vector<std::string> slots{kTime};
    slots.insert(slots.end(), v.variables().begin(), v.variables().end());
    fn_ = CompiledVector(rhs, slots, env);
  }

  std::pair<double, std::vector<double>> operator()(double eps, double t, const std::vector<double>& x,
                                                    double tol) const {
    if (eps == 0.0) return {t, x};
    std::vector<double> z{t};
    z.insert(z.end(), x.begin(), x.end());
    IntegratorOptions opts;
    opts.tol = tol;
    auto tr = integrate([&](double, std::span<const double> s, std::span<double> ds) { fn_(s, ds); }, z, 0.0, eps, opts);
    const auto& end = tr.states.back();
    return {end[0], std::vector<double>(end.begin() + 1, end.end())};
  }

 private:
  CompiledVector fn_;
};

std::vector<double> uniform(double a, double b, std::size_t k) {
  std::vector<double> out;
  for (std::size_t i = 0; i <= k; ++i) out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(k));
  return out;
}

// Reference solution on [lo, hi] from x at t0 (both directions as needed).
struct TwoSided {
  Trajectory back, fwd;
  bool has_back = false;
  std::vector<double> at(double t) const { return (has_back && t < fwd.start()) ? back.at(t) : fwd.at(t); }
};

TwoSided two_sided(const DynSystem& sys, const std::vector<double>& x, double t0, double lo, double hi,
                   const IntegratorOptions& opts, const NumericEnv& env) {
  TwoSided s;
  s.fwd = integrate(sys, x, t0, std::max(hi, t0), opts, env);
  if (lo < t0) {
    s.back = integrate(sys, x, t0, lo, opts, env);
    s.has_back = true;
  }
  return s;
}

// Distance from p to the curve sampled on [a, b], refined by golden-section search.
double curve_distance(const std::vector<double>& p, const std::function<std::vector<double>(double)>& curve,
                      const std::vector<double>& grid, const std::vector<std::vector<double>>& pts) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = dist(p, pts[i]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = dist(p, curve(c)), fd = dist(p, curve(d));
  for (int it = 0; it < 60 && b - a > 1e-14 * (1 + std::fabs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist(p, curve(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist(p, curve(d));
    }
  }
  return std::min({bd, fc, fd});
}

}  // namespace

std::vector<double> flow_map(const VectorField& v, double eps, std::vector<double> x, const NumericEnv& env, double tol) {
  if (v.has_tau()) throw DomainError("flow_map needs a field without a time component");
  if (x.size() != v.dimension()) throw Error("point has the wrong dimension");
  return ExtendedFlow(v, env)(eps, 0.0, x, tol).second;
}

VerificationReport verify_symmetry_numeric(const DynSystem& sys, const VectorField& v, const std::vector<double>& x0,
                                           double eps, double T, double tol, const NumericEnv& env) {
  if (v.variables() != sys.variables()) throw Error("vector field and system have different variables");
  VerificationReport r;
  r.check = "symmetry";
  r.tolerance = tol;
  const NumericEnv full = merged_env(sys, env);
  IntegratorOptions opts;
  opts.tol = integration_tol(tol);
  Trajectory base = integrate(sys, x0, 0.0, T, opts, env);
  const VectorField vv = VectorField(v.variables(), [&] {
    std::vector<Expr> c;
    for (const auto& e : v.components()) c.push_back(substitute(e, sys.parameter_values()));
    return c;
  }(), v.tau() ? std::optional<Expr>(substitute(*v.tau(), sys.parameter_values())) : std::nullopt);
  ExtendedFlow flow(vv, full);
  std::vector<std::pair<double, std::vector<double>>> mapped;
  for (double t : uniform(0.0, T, 200)) mapped.push_back(flow(eps, t, base.at(t), 1e-12));
  double lo = mapped.front().first, hi = lo;
  for (const auto& [t, x] : mapped) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  TwoSided ref = two_sided(sys, mapped.front().second, mapped.front().first, lo, hi, opts, env);
  double absolute = 0.0;
  for (const auto& [t, x] : mapped) {
    const std::vector<double> y = ref.at(t);
    const double d = dist(x, y);
    absolute = std::max(absolute, d);
    r.max_residual = std::max(r.max_residual, d / (1.0 + dist(y, std::vector<double>(y.size(), 0.0))));
  }
  r.pass = r.max_residual <= tol;
  r.diagnostics = {{"samples", 201.0}, {"absolute_residual", absolute}, {"time_shift_min", lo}, {"time_shift_max", hi - T}};
  return r;
}

VerificationReport verify_orbital_numeric(const DynSystem& sys, const VectorField& v, const std::vector<double>& x0,
                                          double eps, double T, double tol, const NumericEnv& env) {
  if (v.variables() != sys.variables()) throw Error("vector field and system have different variables");
  VerificationReport r;
  r.check = "orbital";
  r.tolerance = tol;
  const NumericEnv full = merged_env(sys, env);
  IntegratorOptions opts;
  opts.tol = integration_tol(tol);
  Trajectory base = integrate(sys, x0, 0.0, T, opts, env);
  std::vector<Expr> comps;
  for (const auto& e : v.components()) comps.push_back(substitute(e, sys.parameter_values()));
  ExtendedFlow flow(VectorField(v.variables(), comps), full);
  constexpr std::size_t K = 400;
  std::vector<std::vector<double>> mapped;
  for (double t : uniform(0.0, T, K)) mapped.push_back(flow(eps, t, base.at(t), 1e-12).second);

  IntegratorOptions wide = opts;
  wide.allow_partial = true;
  TwoSided ref;
  ref.fwd = integrate(sys, mapped.front(), 0.0, 2 * T, wide, env);
  ref.back = integrate(sys, mapped.front(), 0.0, -T, wide, env);
  ref.has_back = true;
  if (!ref.fwd.complete || !ref.back.complete) r.note = "reference solution stopped early";
  const double lo = ref.back.end(), hi = ref.fwd.end();
  std::vector<double> grid = uniform(lo, hi, 30000);
  std::vector<std::vector<double>> pts;
  for (double t : grid) pts.push_back(ref.at(t));
  auto curve = [&](double t) { return ref.at(t); };

  const std::size_t trim = K / 20;
  double diameter = 0.0;
  for (std::size_t i = trim; i + trim <= K; ++i) {
    r.max_residual = std::max(r.max_residual, curve_distance(mapped[i], curve, grid, pts));
    for (std::size_t j = i + 1; j + trim <= K; ++j) diameter = std::max(diameter, dist(mapped[i], mapped[j]));
  }
  r.tolerance = tol * (1.0 + diameter);
  r.pass = r.max_residual <= r.tolerance;
  r.diagnostics = {{"samples", static_cast<double>(K + 1 - 2 * trim)}, {"diameter", diameter},
                   {"window_start", lo}, {"window_end", hi}};
  return r;
}

VerificationReport verify_invariant_manifold_numeric(const DynSystem& sys, const AlgebraicManifold& m, double T,
                                                     double tol, const NumericEnv& env) {
  if (m.variables() != sys.variables()) throw Error("manifold and system have different variables");
  VerificationReport r;
  r.check = "invariant_manifold";
  r.tolerance = tol;
  const NumericEnv full = merged_env(sys, env);
  std::vector<Expr> gens;
  for (const auto& g : m.generator_exprs()) gens.push_back(substitute(g, sys.parameter_values()));
  AlgebraicManifold mv(m.variables(), gens, m.chart());
  auto seeds = sample_variety(mv, full, 10, 0x5eed2024);
  if (seeds.empty()) throw DomainError("no points of the manifold could be sampled");
  CompiledVector g(gens, m.variables(), full);
  IntegratorOptions opts;
  opts.tol = integration_tol(tol);
  opts.allow_partial = true;
  std::size_t partial = 0;
  for (const auto& s : seeds) {
    Trajectory tr = integrate(sys, s, 0.0, T, opts, env);
    if (!tr.complete) ++partial;
    auto probe = [&](const std::vector<double>& x) {
      for (double v : g(x)) r.max_residual = std::max(r.max_residual, std::fabs(v));
    };
    for (const auto& x : tr.states) probe(x);
    for (double t : uniform(tr.start(), tr.end(), 500)) probe(tr.at(t));
  }
  r.pass = r.max_residual <= tol;
  r.diagnostics = {{"seeds", static_cast<double>(seeds.size())}, {"stopped_early", static_cast<double>(partial)}};
  if (partial) r.note = "some solutions stopped before T";
  return r;
}

SeparationReport separation_diagnostic(const DynSystem& sys, const std::vector<double>& x0, double delta,
                                       const std::vector<double>& direction, double T, const NumericEnv& env) {
  if (direction.size() != x0.size()) throw Error("direction has the wrong dimension");
  const double dn = norm(direction);
  if (dn == 0.0) throw Error("direction must be nonzero");
  std::vector<double> x1 = x0;
  for (std::size_t i = 0; i < x1.size(); ++i) x1[i] += delta * direction[i] / dn;
  IntegratorOptions opts;
  opts.tol = 1e-11;
  Trajectory a = integrate(sys, x0, 0.0, T, opts, env);
  Trajectory b = integrate(sys, x1, 0.0, T, opts, env);

  SeparationReport rep;
  constexpr std::size_t K = 200, sub = 20;
  double s = 0.0;
  std::vector<double> prev = a.at(0.0);
  auto ts = uniform(0.0, T, K * sub);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    auto cur = a.at(ts[i]);
    s += dist(prev, cur);
    prev = std::move(cur);
    if (i % sub == 0) {
      double d = dist(a.at(ts[i]), b.at(ts[i]));
      if (d <= 0.0) continue;
      rep.times.push_back(ts[i]);
      rep.arclength.push_back(s);
      rep.separation.push_back(d);
    }
  }
  auto slope = [&](const std::vector<double>& u) {
    const double k = static_cast<double>(u.size());
    if (k < 2) return 0.0;
    double su = 0, sl = 0, suu = 0, sul = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      double l = std::log(rep.separation[i]);
      su += u[i];
      sl += l;
      suu += u[i] * u[i];
      sul += u[i] * l;
    }
    double den = k * suu - su * su;
    return den == 0.0 ? 0.0 : (k * sul - su * sl) / den;
  };
  rep.time_rate = slope(rep.times);
  rep.arclength_rate = slope(rep.arclength);
  return rep;
}

}  // namespace symflow
