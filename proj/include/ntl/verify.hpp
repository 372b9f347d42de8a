#pragma once

// Named numerical checks of the seminorm identities and functional
// inequalities. Each returns lhs, rhs, pass and a table of per-case rows.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ntl/energies.hpp"
#include "ntl/mollifier.hpp"
#include "ntl/parallel.hpp"
#include "ntl/spaces.hpp"

namespace ntl {

using NamedValues = std::vector<std::pair<std::string, double>>;

struct CheckResult {
  std::string name;
  NamedValues params;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  std::string relation;  // how lhs and rhs are compared
  std::vector<NamedValues> rows;
};

inline CheckResult make_check(std::string name, NamedValues params) {
  CheckResult r;
  r.name = std::move(name);
  r.params = std::move(params);
  return r;
}

struct TestFunction {
  std::string name;
  ScalarFunction f;
};

/// Smooth, non-affine-degenerate functions on (0, 1).
inline std::vector<TestFunction> smooth_suite() {
  const double pi = std::numbers::pi;
  std::vector<TestFunction> s;
  s.push_back({"x", make_function("linear")});
  s.push_back({"x^2", make_function("quadratic")});
  s.push_back({"x^3", make_function("cubic")});
  s.push_back({"sin(pi x)", make_function("sin_pi")});
  s.push_back({"cos(pi x)", make_function("cos_pi")});
  s.push_back({"sin(2 pi x)", make_function("sin_2pi")});
  s.push_back({"exp(x)", make_function("exp")});
  s.push_back({"(x-1/2)^2", {[](double x) { return (x - 0.5) * (x - 0.5); }, [](double x) { return 2.0 * (x - 0.5); }}});
  s.push_back({"bump", bump_function(0.0, 1.0, 0.5, 0.4)});
  s.push_back({"sin(3 pi x)+x",
               {[pi](double x) { return std::sin(3 * pi * x) + x; }, [pi](double x) { return 3 * pi * std::cos(3 * pi * x) + 1; }}});
  return s;
}

inline ScalarFunction sine_mode(int k) {
  const double w = k * std::numbers::pi;
  return {[w](double x) { return std::sin(w * x); }, [w](double x) { return w * std::cos(w * x); }};
}

inline double l2_norm_on(const std::function<double(double)>& f, const Interval& d, int panels = 256) {
  std::vector<double> b(panels + 1);
  for (int i = 0; i <= panels; ++i) b[i] = d.lo + d.length() * i / panels;
  double s = 0.0;
  for (const auto& q : composite_rule(b, 8)) s += q.w * f(q.x) * f(q.x);
  return std::sqrt(s);
}

namespace detail {

inline double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }
inline double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace detail

/// [x]^2 of the nonlocal seminorm on (0,1) at s = 1/2, p = 2 against 1/4.
inline CheckResult check_frak_linear(const std::vector<double>& deltas = {0.05, 0.1, 0.2, 0.3}, double rel_tol = 1e-6,
                                     double spread_tol = 1e-8) {
  CheckResult r = make_check("frak_linear", {{"s", 0.5}, {"p", 2.0}, {"rel_tol", rel_tol}, {"spread_tol", spread_tol}});
  r.relation = "max relative error <= rel_tol and spread <= spread_tol";
  std::vector<double> vals;
  double worst = 0.0;
  for (double d : deltas) {
    const double v = seminorm_frak_pow(affine_function(0, 1), ModelParams::make(0.5, 2.0, d), {0.0, 1.0});
    const double err = std::abs(v - 0.25) / 0.25;
    worst = std::max(worst, err);
    vals.push_back(v);
    r.rows.push_back({{"delta", d}, {"value", v}, {"exact", 0.25}, {"rel_err", err}});
  }
  const double spread = detail::max_of(vals) - detail::min_of(vals);
  r.lhs = worst;
  r.rhs = rel_tol;
  r.params.push_back({"spread", spread});
  r.pass = worst <= rel_tol && spread <= spread_tol;
  return r;
}

/// [x]^2 of the regional fractional seminorm on (0,1) against 1/(3-2s).
inline CheckResult check_frac_linear(const std::vector<double>& ss = {0.5, 0.6, 0.75, 0.9}, double rel_tol = 1e-4,
                                     double s_limit = 0.95, double limit_tol = 0.02) {
  CheckResult r = make_check("frac_linear", {{"p", 2.0}, {"rel_tol", rel_tol}, {"s_limit", s_limit}, {"limit_tol", limit_tol}});
  r.relation = "max relative error <= rel_tol and |value(s_limit) - 1| <= limit_tol";
  double worst = 0.0;
  for (double s : ss) {
    const double v = seminorm_frac_pow(affine_function(0, 1), ModelParams::make(s, 2.0, 0.1), {0.0, 1.0});
    const double exact = 1.0 / (3.0 - 2.0 * s);
    const double err = std::abs(v - exact) / exact;
    worst = std::max(worst, err);
    r.rows.push_back({{"s", s}, {"value", v}, {"exact", exact}, {"rel_err", err}});
  }
  const double vl = seminorm_frac_pow(affine_function(0, 1), ModelParams::make(s_limit, 2.0, 0.1), {0.0, 1.0});
  r.rows.push_back({{"s", s_limit}, {"value", vl}, {"exact", 1.0}, {"rel_err", std::abs(vl - 1.0)}});
  r.lhs = worst;
  r.rhs = rel_tol;
  r.pass = worst <= rel_tol && std::abs(vl - 1.0) <= limit_tol;
  return r;
}

/// |[u]_frak(delta)^2 - [u]_weighted^2| / [u]_weighted^2 for u = sin(pi x).
inline CheckResult check_localization(double s = 0.75, double delta = 1e-2, double tol = 1e-2) {
  CheckResult r = make_check("localization", {{"s", s}, {"p", 2.0}, {"delta", delta}});
  r.relation = "relative gap <= tol";
  const auto u = make_function("sin_pi");
  const Interval d{0.0, 1.0};
  const double a = seminorm_frak_pow(u, ModelParams::make(s, 2.0, delta), d);
  const double b = seminorm_weighted_pow(u, ModelParams::make(s, 2.0, 0.0), d);
  r.lhs = std::abs(a - b) / b;
  r.rhs = tol;
  r.rows.push_back({{"frak_sq", a}, {"weighted_sq", b}, {"rel_gap", r.lhs}});
  r.pass = r.lhs <= tol;
  return r;
}

/// Random continuous piecewise-linear fields on (0, 1), values in [-1, 1].
inline std::vector<FieldPair> random_fields(const Mesh& mesh, int count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<FieldPair> out;
  for (int k = 0; k < count; ++k) {
    FieldPair f(mesh, true);
    for (int i = 0; i < f.values().size(); ++i) f.values()[i] = dist(rng);
    out.push_back(std::move(f));
  }
  return out;
}

/// Two-sided comparison of nonlocal seminorms with horizons d1 <= d2.
inline CheckResult check_horizon(unsigned long long seed = 20240601, int fields = 50, int n = 16,
                                 const std::vector<std::pair<double, double>>& pairs = {{0.05, 0.1}, {0.1, 0.2}, {0.05, 0.3}},
                                 const std::vector<double>& ss = {0.6, 0.9}, double p = 2.0) {
  CheckResult r = make_check("horizon", {{"seed", static_cast<double>(seed)}, {"fields", static_cast<double>(fields)}, {"n", static_cast<double>(n)}, {"p", p}});
  r.relation = "violations == 0";
  // Omega_1 = (0, 1) carries the fields; Omega_2 is unused
  const Domain dom(0.0, 1.0, 2.0);
  const Mesh mesh = make_mesh(dom, n);
  const auto us = random_fields(mesh, fields, seed);
  const DofLayout layout{mesh.n1, mesh.n2, true};
  const auto pot = Potential::power(p);
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (double s : ss) {
    for (const auto& [d1, d2] : pairs) {
      const EnergyForm f1(ModelParams::make(s, p, d1), {}, mesh, layout, pot);
      const EnergyForm f2(ModelParams::make(s, p, d2), {}, mesh, layout, pot);
      const double lo_c = std::pow(d1 / d2, 1.0 + 1.0 / p);
      const double hi_c = std::pow(2.0 / (1.0 - d2), 1.0 + 1.0 / p) * std::pow(1.0 + d2, s + 1.0 / p);
      std::vector<double> a(us.size()), b(us.size());
      parallel_for(static_cast<int>(us.size()), [&](int k) {
        a[k] = std::pow(seminorm_pow(us[k], f1, Part::one), 1.0 / p);
        b[k] = std::pow(seminorm_pow(us[k], f2, Part::one), 1.0 / p);
      });
      int v = 0;
      double margin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < us.size(); ++k) {
        if (!(lo_c * a[k] <= b[k])) ++v;
        if (!(b[k] <= hi_c * a[k])) ++v;
        margin = std::min({margin, b[k] / (lo_c * a[k]), hi_c * a[k] / b[k]});
      }
      violations += v;
      worst_margin = std::min(worst_margin, margin);
      r.rows.push_back({{"s", s}, {"delta1", d1}, {"delta2", d2}, {"lower_const", lo_c}, {"upper_const", hi_c},
                        {"min_ratio_margin", margin}, {"violations", static_cast<double>(v)}});
    }
  }
  r.lhs = violations;
  r.rhs = 0.0;
  r.params.push_back({"min_ratio_margin", worst_margin});
  r.pass = violations == 0;
  return r;
}

/// Nonlocal-into-weighted bound with the explicit constant 2 Cbar/(1+p), and
/// weighted-into-fractional with one fitted constant per s.
inline CheckResult check_embedding(const std::vector<double>& ss = {0.6, 0.75, 0.9},
                                   const std::vector<double>& deltas = {0.05, 0.1, 0.2, 0.3}, double p = 2.0,
                                   double stability = 3.0) {
  CheckResult r = make_check("embedding", {{"p", p}, {"stability", stability}});
  r.relation = "nonlocal bound violations == 0 and max/min fitted fractional constant <= stability";
  const Interval d{0.0, 1.0};
  const auto suite = smooth_suite();
  const double C = sphere_measure(1) * cbar_dp(1, p) / (1.0 + p);
  r.params.push_back({"C_dp", C});
  int violations = 0;
  std::vector<double> fitted;
  for (double s : ss) {
    std::vector<double> w(suite.size()), fr(suite.size());
    parallel_for(static_cast<int>(suite.size()), [&](int k) {
      w[k] = seminorm_weighted_pow(suite[k].f, ModelParams::make(s, p, 0.0), d);
      fr[k] = seminorm_frac_pow(suite[k].f, ModelParams::make(s, p, 0.1), d);
    });
    for (double delta : deltas) {
      const double bound_c = C / std::pow(1.0 - delta, p - s * p + 1.0);
      double worst = 0.0;
      for (std::size_t k = 0; k < suite.size(); ++k) {
        const double lhs = seminorm_frak_pow(suite[k].f, ModelParams::make(s, p, delta), d);
        const double ratio = lhs / (bound_c * w[k]);
        worst = std::max(worst, ratio);
        if (!(ratio <= 1.0)) ++violations;
      }
      r.rows.push_back({{"s", s}, {"delta", delta}, {"bound_const", bound_c}, {"max_lhs_over_rhs", worst}});
    }
    double c_fit = 0.0;
    for (std::size_t k = 0; k < suite.size(); ++k) c_fit = std::max(c_fit, fr[k] / w[k]);
    fitted.push_back(c_fit);
    r.rows.push_back({{"s", s}, {"fitted_frac_const", c_fit}});
  }
  const double spread = detail::max_of(fitted) / detail::min_of(fitted);
  r.lhs = spread;
  r.rhs = stability;
  r.params.push_back({"nonlocal_violations", static_cast<double>(violations)});
  r.pass = violations == 0 && spread <= stability;
  return r;
}

/// L^2 bounds of the boundary-localized convolution on (0, 1): fitted C0 for
/// ||K u|| <= C0 ||u|| and C for ||u - K u|| <= C delta [u]_frak, stable in
/// delta; exact reproduction of affine maps.
inline CheckResult check_kdelta(const std::vector<double>& deltas = {0.3, 0.15, 0.075}, double s = 0.75,
                                double stability = 3.0, double affine_tol = 1e-10) {
  CheckResult r = make_check("kdelta", {{"s", s}, {"p", 2.0}, {"stability", stability}, {"affine_tol", affine_tol}});
  r.relation = "max/min of fitted C0 and C <= stability and affine error <= affine_tol";
  const Interval d{0.0, 1.0};
  auto suite = smooth_suite();
  for (int k : {4, 8, 16, 32}) suite.push_back({"sin(" + std::to_string(k) + " pi x)", sine_mode(k)});
  const HandleQuadrature hq{16};
  std::vector<double> c0s, cs;
  double affine_err = 0.0;
  for (double delta : deltas) {
    std::vector<double> r0(suite.size()), r1(suite.size());
    parallel_for(static_cast<int>(suite.size()), [&](int k) {
      const auto& u = suite[k].f;
      const auto ku = conv_Kdelta(u, delta, d);
      const double nu = l2_norm_on(u.value, d);
      const double nk = l2_norm_on(ku.value, d);
      const double nd = l2_norm_on([&](double x) { return u(x) - ku(x); }, d);
      const double fr = seminorm_frak(u, ModelParams::make(s, 2.0, delta), d, hq);
      r0[k] = nk / nu;
      r1[k] = nd / (delta * fr);
    });
    const auto aff = affine_function(0.3, -1.7);
    const auto ka = conv_Kdelta(aff, delta, d);
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      affine_err = std::max(affine_err, std::abs(ka(x) - aff(x)));
    }
    c0s.push_back(detail::max_of(r0));
    cs.push_back(detail::max_of(r1));
    r.rows.push_back({{"delta", delta}, {"C0", c0s.back()}, {"C", cs.back()}});
  }
  const double s0 = detail::max_of(c0s) / detail::min_of(c0s);
  const double s1 = detail::max_of(cs) / detail::min_of(cs);
  r.lhs = std::max(s0, s1);
  r.rhs = stability;
  r.params.push_back({"C0_spread", s0});
  r.params.push_back({"C_spread", s1});
  r.params.push_back({"affine_err", affine_err});
  r.pass = s0 <= stability && s1 <= stability && affine_err <= affine_tol;
  return r;
}

/// Hardy constant against its lower bound, and its decay as sp -> 1+.
inline CheckResult check_hardy(const std::vector<double>& ss = {0.6, 0.75, 0.9},
                               const std::vector<double>& decay = {0.51, 0.55, 0.6}, double p = 2.0) {
  CheckResult r = make_check("hardy", {{"p", p}});
  r.relation = "D >= lower bound for every s and D increasing along the decay sequence";
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (double s : ss) {
    const double D = hardy_constant(s, p);
    const double lb = hardy_lower_bound(s, p);
    ok = ok && D >= lb;
    worst = std::min(worst, D / lb);
    r.rows.push_back({{"s", s}, {"D", D}, {"lower_bound", lb}});
  }
  double prev = -1.0;
  for (double s : decay) {
    const double D = hardy_constant(s, p);
    ok = ok && D > prev && D > 0.0;
    prev = D;
    r.rows.push_back({{"s", s}, {"D", D}});
  }
  r.lhs = worst;  // min D / lower bound
  r.rhs = 1.0;
  r.pass = ok;
  return r;
}

/// Discrete Poincare constants at the given (s, delta) points; uniformity factor.
inline CheckResult check_poincare_points(const std::vector<std::pair<double, double>>& grid, int n = 32,
                                         double factor = 10.0) {
  CheckResult r = make_check("poincare", {{"p", 2.0}, {"n", static_cast<double>(n)}, {"factor", factor}});
  r.relation = "max/min <= factor";
  const Domain dom;
  const Mesh mesh = make_mesh(dom, n);
  std::vector<double> c(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    c[i] = poincare_constant_p2(ModelParams::make(grid[i].first, 2.0, grid[i].second), {}, mesh);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) r.rows.push_back({{"s", grid[i].first}, {"delta", grid[i].second}, {"C", c[i]}});
  r.lhs = detail::max_of(c) / detail::min_of(c);
  r.rhs = factor;
  r.pass = r.lhs <= factor;
  return r;
}

inline CheckResult check_poincare(const std::vector<double>& ss = {0.6, 0.75, 0.9, 1.0},
                                  const std::vector<double>& deltas = {0.0, 0.05, 0.1, 0.2}, int n = 32,
                                  double factor = 10.0) {
  std::vector<std::pair<double, double>> grid;
  for (double s : ss) {
    for (double d : deltas) grid.push_back({s, d});
  }
  return check_poincare_points(grid, n, factor);
}

/// Endpoint values of K_delta u equal those of u.
inline CheckResult check_trace_kdelta(const std::vector<double>& deltas = {0.3, 0.15, 0.075}, double tol = 1e-6) {
  CheckResult r = make_check("trace_kdelta", {{"tol", tol}});
  r.relation = "max endpoint mismatch near the boundary <= tol";
  const Interval d{0.0, 1.0};
  double worst = 0.0;
  for (const auto& t : smooth_suite()) {
    for (double delta : deltas) {
      const auto ku = conv_Kdelta(t.f, delta, d);
      // approach the endpoints: K u(x) -> u(endpoint)
      const double e = std::max(std::abs(ku(1e-9) - t.f(0.0)), std::abs(ku(1.0 - 1e-9) - t.f(1.0)));
      worst = std::max(worst, e);
    }
  }
  r.lhs = worst;
  r.rhs = tol;
  r.pass = worst <= tol;
  return r;
}

using CheckFn = std::function<CheckResult(unsigned long long seed)>;

/// Checks runnable by name with default arguments; `seed` feeds the
/// randomized ones.
inline const std::vector<std::pair<std::string, CheckFn>>& check_registry() {
  static const std::vector<std::pair<std::string, CheckFn>> reg = {
      {"frak_linear", [](unsigned long long) { return check_frak_linear(); }},
      {"frac_linear", [](unsigned long long) { return check_frac_linear(); }},
      {"localization", [](unsigned long long) { return check_localization(); }},
      {"horizon", [](unsigned long long seed) { return check_horizon(seed); }},
      {"embedding", [](unsigned long long) { return check_embedding(); }},
      {"kdelta", [](unsigned long long) { return check_kdelta(); }},
      {"hardy", [](unsigned long long) { return check_hardy(); }},
      {"poincare", [](unsigned long long) { return check_poincare(); }},
      {"trace_kdelta", [](unsigned long long) { return check_trace_kdelta(); }},
  };
  return reg;
}

}  // namespace ntl
