#pragma once

// Parameter sweeps over (s, delta) toward the corners of the parameter square,
// comparing minimizers and energies with those of the limit problem.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ntl/energies.hpp"
#include "ntl/error.hpp"
#include "ntl/field.hpp"
#include "ntl/parallel.hpp"
#include "ntl/solver.hpp"

namespace ntl {

///  a  delta -> 0 at fixed s       limit (s, 0)
///  b  s -> 1 at fixed delta       limit (1, delta), weak convergence only
///  c  s -> 1 with delta = 0       limit (1, 0)
///  d  delta -> 0 with s = 1       limit (1, 0)
///  e  (s, delta) -> (1, 0)        limit (1, 0)
enum class CaseId { a, b, c, d, e };

inline std::string_view to_string(CaseId c) noexcept {
  switch (c) {
    case CaseId::a: return "a";
    case CaseId::b: return "b";
    case CaseId::c: return "c";
    case CaseId::d: return "d";
    case CaseId::e: return "e";
  }
  return "?";
}

inline std::optional<CaseId> case_from_string(std::string_view s) noexcept {
  for (CaseId c : {CaseId::a, CaseId::b, CaseId::c, CaseId::d, CaseId::e}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct GridPoint {
  double s = 1.0;
  double delta = 0.0;
};

/// Limit parameters of a case, read off the grid.
inline GridPoint limit_point(CaseId c, const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  switch (c) {
    case CaseId::a: return {grid.front().s, 0.0};
    case CaseId::b: return {1.0, grid.front().delta};
    case CaseId::c:
    case CaseId::d:
    case CaseId::e: return {1.0, 0.0};
  }
  return {1.0, 0.0};
}

/// Distance of a grid point from the limit in the driving parameter.
inline double driving_parameter(CaseId c, const GridPoint& g) {
  switch (c) {
    case CaseId::a:
    case CaseId::d: return g.delta;
    case CaseId::b:
    case CaseId::c: return 1.0 - g.s;
    case CaseId::e: return std::max(1.0 - g.s, g.delta);
  }
  return 0.0;
}

/// Acceptance grids, ordered toward the limit.
inline std::vector<GridPoint> default_grid(CaseId c) {
  switch (c) {
    case CaseId::a: return {{0.75, 0.2}, {0.75, 0.1}, {0.75, 0.05}, {0.75, 0.025}};
    case CaseId::b: return {{0.8, 0.1}, {0.9, 0.1}, {0.95, 0.1}, {0.975, 0.1}};
    case CaseId::c: return {{0.8, 0.0}, {0.9, 0.0}, {0.95, 0.0}, {0.975, 0.0}};
    case CaseId::d: return {{1.0, 0.2}, {1.0, 0.1}, {1.0, 0.05}, {1.0, 0.025}};
    case CaseId::e: return {{0.8, 0.2}, {0.9, 0.1}, {0.95, 0.05}, {0.975, 0.025}};
  }
  return {};
}

/// Checks that the grid fits the case and is ordered toward the limit.
inline void validate_grid(CaseId c, const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw ParameterError("sweep grid is empty");
  const auto lim = limit_point(c, grid);
  for (const auto& g : grid) {
    std::ostringstream where;
    where << "case " << to_string(c) << " grid point (s=" << g.s << ", delta=" << g.delta << "): ";
    switch (c) {
      case CaseId::a:
        if (g.s != lim.s) throw ParameterError(where.str() + "s must be constant");
        break;
      case CaseId::b:
        if (g.delta != lim.delta) throw ParameterError(where.str() + "delta must be constant");
        break;
      case CaseId::c:
        if (g.delta != 0.0) throw ParameterError(where.str() + "delta = 0 required");
        break;
      case CaseId::d:
        if (g.s != 1.0) throw ParameterError(where.str() + "s = 1 required");
        break;
      case CaseId::e: break;
    }
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (driving_parameter(c, grid[i]) > driving_parameter(c, grid[i - 1])) {
      throw ParameterError("sweep grid must approach the limit monotonically");
    }
  }
}

struct SweepRow {
  double s = 0.0;
  double delta = 0.0;
  double distance = 0.0;  // L^p distance to the limit minimizer
  double energy = 0.0;    // minimal energy at the grid point
  double limit_energy = 0.0;
  std::vector<double> moments;  // case b: pairings with the weak test functions
  double weak_gap = 0.0;        // case b: max |moment - limit moment|
};

struct SweepReport {
  CaseId case_id = CaseId::e;
  GridPoint limit;
  std::string reference = "discrete";  // or "analytic"
  std::vector<SweepRow> rows;
  std::optional<double> fitted_slope;
  std::vector<double> limit_moments;
  std::vector<std::string> warnings;
  std::vector<FieldPair> fields;  // with keep_fields: limit minimizer, then one per row
};

struct SweepSetup {
  Domain domain;
  int n_per_side = 64;
  double p = 2.0;
  CoefficientField coeffs;
  LoadSpec loads;
  Potential potential = Potential::power(2.0);
  SolverOptions solver;
  /// Closed-form limit minimizer, used instead of the discrete limit solve.
  std::optional<std::pair<ScalarFunction, ScalarFunction>> analytic_limit;
  bool keep_fields = false;
};

/// Minimizer for one parameter point (p = 2 and the default potential use
/// the linear path).
inline SolveReport solve_point(const GridPoint& g, const SweepSetup& setup, const Mesh& mesh) {
  const auto mp = ModelParams::make(g.s, setup.p, g.delta);
  mp.validate(setup.domain, false);
  if (setup.potential.quadratic()) return solve_p2(mp, setup.coeffs, setup.loads, mesh, {}, setup.solver);
  return solve_general_p(mp, setup.coeffs, setup.potential, setup.loads, mesh, {}, setup.solver);
}

/// Fixed smooth test functions for the weak-topology proxy.
inline std::vector<ScalarFunction> weak_test_functions(const Domain& domain) {
  const double a = domain.a();
  const double L = domain.b() - domain.a();
  const double pi = std::numbers::pi;
  std::vector<ScalarFunction> f;
  f.push_back(constant_function(1.0));
  f.push_back({[=](double x) { return (x - a) / L; }, {}});
  f.push_back({[=](double x) { return std::sin(pi * (x - a) / L); }, {}});
  f.push_back({[=](double x) { return std::cos(pi * (x - a) / L); }, {}});
  f.push_back({[=](double x) { return std::sin(2.0 * pi * (x - a) / L); }, {}});
  return f;
}

/// int_Omega u phi over both parts.
inline double moment(const FieldPair& u, const ScalarFunction& phi) {
  double sum = 0.0;
  for (Part P : {Part::one, Part::two}) {
    const auto& mesh = u.mesh();
    std::vector<double> breaks;
    for (int i = 0; i <= mesh.elements(P); ++i) breaks.push_back(mesh.x(P, i));
    for (const auto& q : composite_rule(breaks, 8)) sum += q.w * u.eval(P, q.x) * phi(q.x);
  }
  return sum;
}

/// Least-squares slope of log(distance) against log(parameter); none when
/// fewer than three rows or any value is nonpositive.
inline std::optional<double> fit_rate(const std::vector<double>& params, const std::vector<double>& distances) {
  if (params.size() != distances.size() || params.size() < 3) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0) || !(distances[i] > 0.0)) return std::nullopt;
    const double x = std::log(params[i]);
    const double y = std::log(distances[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  const double slope = (n * sxy - sx * sy) / den;
  return std::abs(slope) < 1e-14 ? 0.0 : slope;
}

inline std::optional<double> fit_rate(CaseId c, const std::vector<SweepRow>& rows) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(driving_parameter(c, {r.s, r.delta}));
    y.push_back(c == CaseId::b ? r.weak_gap : r.distance);
  }
  return fit_rate(x, y);
}

struct MonotoneCheck {
  bool strict = true;  // every step decreases
  bool soft = true;    // no increase beyond the relative tolerance
  int inversions = 0;
};

inline MonotoneCheck check_monotone_decrease(const std::vector<double>& v, double rel_tol = 0.05) {
  MonotoneCheck m;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) {
      m.strict = false;
      ++m.inversions;
      if (v[i] > v[i - 1] * (1.0 + rel_tol)) m.soft = false;
    }
  }
  return m;
}

/// Solves every grid point and the limit problem and records distances,
/// energies and (case b) weak proxies.
inline SweepReport sweep_case(CaseId c, const std::vector<GridPoint>& grid, const SweepSetup& setup) {
  validate_grid(c, grid);
  const Mesh mesh = make_mesh(setup.domain, setup.n_per_side);
  SweepReport rep;
  rep.case_id = c;
  rep.limit = limit_point(c, grid);

  // slot 0 is the limit problem, slots 1.. the grid points
  std::vector<SolveReport> sol(grid.size() + 1);
  parallel_for(static_cast<int>(grid.size()) + 1, [&](int i) {
    const GridPoint g = i == 0 ? rep.limit : grid[i - 1];
    try {
      sol[i] = solve_point(g, setup, mesh);
    } catch (const std::exception& ex) {
      std::ostringstream msg;
      msg << "solve failed at (s=" << g.s << ", delta=" << g.delta << "): " << ex.what();
      throw SolverError(msg.str());
    }
  });

  const auto tests = weak_test_functions(setup.domain);
  for (const auto& phi : tests) rep.limit_moments.push_back(moment(sol[0].pair, phi));
  const double p = setup.p;
  if (setup.analytic_limit) rep.reference = "analytic";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& s = sol[k + 1];
    SweepRow row;
    row.s = grid[k].s;
    row.delta = grid[k].delta;
    row.distance = setup.analytic_limit
                       ? lp_distance(s.pair, setup.analytic_limit->first, setup.analytic_limit->second, p)
                       : lp_distance(s.pair, sol[0].pair, p);
    row.energy = s.breakdown.total;
    row.limit_energy = sol[0].breakdown.total;
    if (c == CaseId::b) {
      for (std::size_t j = 0; j < tests.size(); ++j) {
        row.moments.push_back(moment(s.pair, tests[j]));
        row.weak_gap = std::max(row.weak_gap, std::abs(row.moments.back() - rep.limit_moments[j]));
      }
    }
    rep.rows.push_back(std::move(row));
  }
  rep.fitted_slope = fit_rate(c, rep.rows);
  if (setup.keep_fields) {
    for (auto& s : sol) rep.fields.push_back(std::move(s.pair));
  }

  std::vector<double> tracked;
  for (const auto& r : rep.rows) tracked.push_back(c == CaseId::b ? r.weak_gap : r.distance);
  const auto mono = check_monotone_decrease(tracked);
  if (!mono.strict) {
    std::ostringstream msg;
    msg << (mono.soft ? "minor" : "large") << " non-monotone step(s) in the tracked distance: " << mono.inversions;
    rep.warnings.push_back(msg.str());
  }
  return rep;
}

struct EnergyLimitRow {
  double s = 0.0;
  double delta = 0.0;
  double energy = 0.0;
  double limit_energy = 0.0;
  double rel_gap = 0.0;
};

struct EnergyLimitTable {
  CaseId case_id = CaseId::a;
  GridPoint limit;
  std::vector<EnergyLimitRow> rows;
  double finest_gap = 0.0;
};

/// E_{s,delta}(u, u) with unit coefficients and zero load on `domain` along
/// the grid, against the limit energy of the same u.
inline EnergyLimitTable energy_limit_check(const ScalarFunction& u, CaseId c, const std::vector<GridPoint>& grid,
                                           const Domain& domain, double p = 2.0) {
  validate_grid(c, grid);
  EnergyLimitTable t;
  t.case_id = c;
  t.limit = limit_point(c, grid);
  const CoefficientField unit;
  const auto pot = Potential::power(p);
  const LoadSpec none;
  auto energy = [&](const GridPoint& g) {
    const auto mp = ModelParams::make(g.s, p, g.delta);
    const auto e = energy_eval(u, u, mp, domain, unit, pot, none);
    return e.part1_energy + e.part2_energy;
  };
  const double lim = energy(t.limit);
  std::vector<double> vals(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int i) { vals[i] = energy(grid[i]); });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EnergyLimitRow r{grid[i].s, grid[i].delta, vals[i], lim, 0.0};
    r.rel_gap = lim != 0.0 ? std::abs(vals[i] - lim) / std::abs(lim) : std::abs(vals[i]);
    t.rows.push_back(r);
  }
  t.finest_gap = t.rows.back().rel_gap;
  return t;
}

}  // namespace ntl
