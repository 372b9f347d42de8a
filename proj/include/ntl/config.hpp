#pragma once

// Run configuration: strict JSON schema, defaults, and validation that
// reports every violation.
//
// {
//   "domain":   {"a": -1, "xi": 0, "b": 1, "kappa0": 1, "kappa1": 1},
//   "params":   {"s": 0.75, "p": 2, "delta": 0.1, "mode": "nonlocal_fractional"},
//   "mesh":     {"n": 64},
//   "alpha": "constant:1", "beta": "constant:1",
//   "load":     {"f1": "constant:1", "f2": "constant:1"},
//   "boundary": {"g0": 0, "g1": 0, "g2": 0},
//   "potential": {"name": "power", "k1": 1, "k2": 1},
//   "solver":   {"tol": 1e-10, "grad_tol": 1e-8, "max_iter": 100000, "direct_limit": 512,
//                "penalty_eps": 0.01},
//   "seed": 20240601,
//   "output":   {"dir": "out"},
//   "sweep":    {"case": "e", "grid": [{"s": 0.8, "delta": 0.2}], "limit": "parabola"}
// }

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ntl/energies.hpp"
#include "ntl/error.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"
#include "ntl/harness.hpp"
#include "ntl/kernels.hpp"
#include "ntl/solver.hpp"
#include "ntl/spaces.hpp"

namespace ntl {

struct SweepConfig {
  CaseId case_id = CaseId::e;
  std::vector<GridPoint> grid;
  std::optional<std::string> limit;  // closed-form limit minimizer (same on both parts)
};

struct RunConfig {
  double a = -1.0, xi = 0.0, b = 1.0, kappa0 = 1.0, kappa1 = 1.0;
  ModelParams params = ModelParams::make(0.75, 2.0, 0.1);
  bool mode_given = false;
  int n = 64;
  std::string alpha = "constant:1";
  std::string beta = "constant:1";
  std::string f1 = "constant:1";
  std::string f2 = "constant:1";
  BoundaryData boundary;
  std::string potential = "power";
  double k1 = 1.0, k2 = 1.0;
  SolverOptions solver;
  std::optional<double> penalty_eps;
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";
  std::optional<SweepConfig> sweep;

  Domain domain() const { return Domain(a, xi, b, kappa0, kappa1); }
  CoefficientField coefficients() const { return {make_function(alpha), make_function(beta)}; }
  LoadSpec loads() const { return {make_function(f1), make_function(f2)}; }
  Potential make_potential() const {
    return potential == "power" ? Potential::power(params.p) : Potential::scaled_power(params.p, k1, k2);
  }
};

namespace detail {

using ConfigJson = nlohmann::json;

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class ConfigReader {
 public:
  std::vector<std::string> errors;

  void check_keys(const ConfigJson& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        std::string list;
        for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
        errors.push_back(where + it.key() + ": unknown key (allowed: " + list + ")");
      }
    }
  }

  const ConfigJson* object(const ConfigJson& parent, const std::string& key, const std::string& where) {
    if (!parent.contains(key)) return nullptr;
    const ConfigJson& v = parent.at(key);
    if (!v.is_object()) {
      errors.push_back(where + key + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  void number(const ConfigJson& obj, const std::string& key, const std::string& where, double& out) {
    if (!obj.contains(key)) return;
    const ConfigJson& v = obj.at(key);
    if (!v.is_number()) {
      errors.push_back(where + key + ": expected a number");
      return;
    }
    out = v.get<double>();
    if (!std::isfinite(out)) errors.push_back(where + key + ": expected a finite number");
  }

  void integer(const ConfigJson& obj, const std::string& key, const std::string& where, long long& out) {
    if (!obj.contains(key)) return;
    const ConfigJson& v = obj.at(key);
    if (!v.is_number_integer()) {
      errors.push_back(where + key + ": expected an integer");
      return;
    }
    out = v.get<long long>();
  }

  void string(const ConfigJson& obj, const std::string& key, const std::string& where, std::string& out) {
    if (!obj.contains(key)) return;
    const ConfigJson& v = obj.at(key);
    if (!v.is_string()) {
      errors.push_back(where + key + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }

  void function(const ConfigJson& obj, const std::string& key, const std::string& where, std::string& out) {
    std::string before = out;
    string(obj, key, where, out);
    if (out == before) return;
    try {
      make_function(out);
    } catch (const std::exception& e) {
      errors.push_back(where + key + ": " + e.what());
    }
  }
};

}  // namespace detail

/// Parses and validates a configuration document. `needs_trace` adds the
/// sp > 1 requirement of commands that involve traces (solve, sweep).
/// Throws ConfigError listing every violation.
inline RunConfig parse_config(const std::string& text, bool needs_trace = false) {
  using detail::ConfigJson;
  RunConfig cfg;
  ConfigJson root;
  try {
    root = ConfigJson::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level: expected an object"});
  detail::ConfigReader rd;
  rd.check_keys(root, "",
                {"domain", "params", "mesh", "alpha", "beta", "load", "boundary", "potential", "solver", "seed",
                 "output", "sweep"});

  if (const ConfigJson* d = rd.object(root, "domain", "")) {
    rd.check_keys(*d, "domain.", {"a", "xi", "b", "kappa0", "kappa1"});
    rd.number(*d, "a", "domain.", cfg.a);
    rd.number(*d, "xi", "domain.", cfg.xi);
    rd.number(*d, "b", "domain.", cfg.b);
    rd.number(*d, "kappa0", "domain.", cfg.kappa0);
    rd.number(*d, "kappa1", "domain.", cfg.kappa1);
  }
  if (!(cfg.a < cfg.xi && cfg.xi < cfg.b)) rd.errors.push_back("domain: a < xi < b required");
  if (!(cfg.kappa0 >= 1.0)) rd.errors.push_back("domain.kappa0: kappa0 >= 1 required");
  if (!(cfg.kappa1 > 0.0)) rd.errors.push_back("domain.kappa1: kappa1 > 0 required");

  double s = cfg.params.s, p = cfg.params.p, delta = cfg.params.delta;
  std::string mode;
  if (const ConfigJson* m = rd.object(root, "params", "")) {
    rd.check_keys(*m, "params.", {"s", "p", "delta", "mode"});
    rd.number(*m, "s", "params.", s);
    rd.number(*m, "p", "params.", p);
    rd.number(*m, "delta", "params.", delta);
    rd.string(*m, "mode", "params.", mode);
  }
  if (!(s > 0.0 && s <= 1.0)) rd.errors.push_back("params.s: s in (0,1] required");
  if (!(p > 1.0)) rd.errors.push_back("params.p: p > 1 required");
  if (!(delta >= 0.0)) rd.errors.push_back("params.delta: delta >= 0 required");
  if (!mode.empty()) {
    const auto m = mode_from_string(mode);
    if (!m) {
      rd.errors.push_back("params.mode: unknown mode '" + mode +
                          "' (nonlocal_fractional, weighted_fractional, nonlocal_local, local_local)");
    } else if (*m != mode_for(s, delta)) {
      rd.errors.push_back("params.mode: '" + mode + "' inconsistent with s = " + detail::format_number(s) +
                          ", delta = " + detail::format_number(delta));
    }
    cfg.mode_given = true;
  }
  if (cfg.a < cfg.xi && cfg.xi < cfg.b && cfg.kappa0 >= 1.0 && cfg.kappa1 > 0.0 && delta > 0.0 &&
      !(delta < delta_threshold(cfg.domain()))) {
    rd.errors.push_back("params.delta: " + delta_requirement(cfg.domain()));
  }
  if (needs_trace && !(s * p > 1.0)) rd.errors.push_back("params: sp>1 required");
  cfg.params = ModelParams{1, s, p, delta, mode_for(s, delta)};

  if (const ConfigJson* m = rd.object(root, "mesh", "")) {
    rd.check_keys(*m, "mesh.", {"n"});
    long long n = cfg.n;
    rd.integer(*m, "n", "mesh.", n);
    if (n < 2 || n > 4096) rd.errors.push_back("mesh.n: integer in [2, 4096] required");
    cfg.n = static_cast<int>(n);
  }

  rd.function(root, "alpha", "", cfg.alpha);
  rd.function(root, "beta", "", cfg.beta);
  if (const ConfigJson* l = rd.object(root, "load", "")) {
    rd.check_keys(*l, "load.", {"f1", "f2"});
    rd.function(*l, "f1", "load.", cfg.f1);
    rd.function(*l, "f2", "load.", cfg.f2);
  }
  if (const ConfigJson* g = rd.object(root, "boundary", "")) {
    rd.check_keys(*g, "boundary.", {"g0", "g1", "g2"});
    rd.number(*g, "g0", "boundary.", cfg.boundary.g0);
    rd.number(*g, "g1", "boundary.", cfg.boundary.g1);
    rd.number(*g, "g2", "boundary.", cfg.boundary.g2);
  }
  if (root.contains("potential")) {
    if (const ConfigJson* pot = rd.object(root, "potential", "")) {
      rd.check_keys(*pot, "potential.", {"name", "k1", "k2"});
      rd.string(*pot, "name", "potential.", cfg.potential);
      rd.number(*pot, "k1", "potential.", cfg.k1);
      rd.number(*pot, "k2", "potential.", cfg.k2);
      if (cfg.potential != "power" && cfg.potential != "scaled_power") {
        rd.errors.push_back("potential.name: 'power' or 'scaled_power' required");
      }
      if (!(cfg.k1 > 0.0 && cfg.k2 > 0.0)) rd.errors.push_back("potential: k1, k2 > 0 required");
      if (cfg.potential == "power" && (cfg.k1 != 1.0 || cfg.k2 != 1.0)) {
        rd.errors.push_back("potential: k1, k2 apply to 'scaled_power' only");
      }
    }
  }
  if (const ConfigJson* so = rd.object(root, "solver", "")) {
    rd.check_keys(*so, "solver.", {"tol", "grad_tol", "max_iter", "direct_limit", "penalty_eps"});
    rd.number(*so, "tol", "solver.", cfg.solver.linear_tol);
    rd.number(*so, "grad_tol", "solver.", cfg.solver.grad_tol);
    long long mi = cfg.solver.max_iter, dl = cfg.solver.direct_limit;
    rd.integer(*so, "max_iter", "solver.", mi);
    rd.integer(*so, "direct_limit", "solver.", dl);
    cfg.solver.max_iter = static_cast<int>(mi);
    cfg.solver.direct_limit = static_cast<int>(dl);
    if (so->contains("penalty_eps")) {
      double eps = 0.0;
      rd.number(*so, "penalty_eps", "solver.", eps);
      if (!(eps > 0.0)) rd.errors.push_back("solver.penalty_eps: epsilon > 0 required");
      cfg.penalty_eps = eps;
    }
    if (!(cfg.solver.linear_tol > 0.0)) rd.errors.push_back("solver.tol: > 0 required");
    if (!(cfg.solver.grad_tol > 0.0)) rd.errors.push_back("solver.grad_tol: > 0 required");
    if (mi < 1) rd.errors.push_back("solver.max_iter: >= 1 required");
    if (dl < 0) rd.errors.push_back("solver.direct_limit: >= 0 required");
  }
  if (root.contains("seed")) {
    const ConfigJson& v = root.at("seed");
    if (!v.is_number_unsigned()) {
      rd.errors.push_back("seed: expected a nonnegative integer");
    } else {
      cfg.seed = v.get<std::uint64_t>();
    }
  }
  if (const ConfigJson* o = rd.object(root, "output", "")) {
    rd.check_keys(*o, "output.", {"dir"});
    rd.string(*o, "dir", "output.", cfg.output_dir);
    if (cfg.output_dir.empty()) rd.errors.push_back("output.dir: non-empty path required");
  }
  if (const ConfigJson* sw = rd.object(root, "sweep", "")) {
    rd.check_keys(*sw, "sweep.", {"case", "grid", "limit"});
    SweepConfig sc;
    std::string c;
    rd.string(*sw, "case", "sweep.", c);
    if (c.empty()) {
      rd.errors.push_back("sweep.case: required (a, b, c, d or e)");
    } else if (const auto id = case_from_string(c)) {
      sc.case_id = *id;
    } else {
      rd.errors.push_back("sweep.case: one of a, b, c, d, e required");
    }
    if (!sw->contains("grid") || !sw->at("grid").is_array() || sw->at("grid").empty()) {
      rd.errors.push_back("sweep.grid: non-empty array of {s, delta} required");
    } else {
      int k = 0;
      for (const auto& g : sw->at("grid")) {
        const std::string where = "sweep.grid[" + std::to_string(k++) + "].";
        if (!g.is_object()) {
          rd.errors.push_back(where + ": expected an object");
          continue;
        }
        rd.check_keys(g, where, {"s", "delta"});
        GridPoint gp{-1.0, -1.0};
        rd.number(g, "s", where, gp.s);
        rd.number(g, "delta", where, gp.delta);
        if (!(gp.s > 0.0 && gp.s <= 1.0)) rd.errors.push_back(where + "s: s in (0,1] required");
        if (!(gp.delta >= 0.0)) rd.errors.push_back(where + "delta: delta >= 0 required");
        if (gp.delta > 0.0 && cfg.a < cfg.xi && cfg.xi < cfg.b && cfg.kappa0 >= 1.0 && cfg.kappa1 > 0.0 &&
            !(gp.delta < delta_threshold(cfg.domain()))) {
          rd.errors.push_back(where + "delta: " + delta_requirement(cfg.domain()));
        }
        if (needs_trace && gp.s > 0.0 && !(gp.s * p > 1.0)) rd.errors.push_back(where + "s: sp>1 required");
        sc.grid.push_back(gp);
      }
    }
    if (sw->contains("limit")) {
      std::string lim;
      rd.function(*sw, "limit", "sweep.", lim);
      if (!lim.empty()) sc.limit = lim;
    }
    if (rd.errors.empty()) {
      try {
        validate_grid(sc.case_id, sc.grid);
      } catch (const std::exception& e) {
        rd.errors.push_back(std::string("sweep.grid: ") + e.what());
      }
    }
    cfg.sweep = sc;
  }
  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return cfg;
}

/// Sweep inputs described by a parsed configuration.
inline SweepSetup make_sweep_setup(const RunConfig& cfg) {
  SweepSetup setup;
  setup.domain = cfg.domain();
  setup.n_per_side = cfg.n;
  setup.p = cfg.params.p;
  setup.coeffs = cfg.coefficients();
  setup.loads = cfg.loads();
  setup.potential = cfg.make_potential();
  setup.solver = cfg.solver;
  if (cfg.sweep && cfg.sweep->limit) {
    const auto f = make_function(*cfg.sweep->limit);
    setup.analytic_limit = std::make_pair(f, f);
  }
  return setup;
}

}  // namespace ntl
