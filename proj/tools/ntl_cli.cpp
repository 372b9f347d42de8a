// ntl: command-line front end.
//
//   ntl solve    [--config f.json] [--s --delta --p --mode --n --load --alpha --beta --penalty-eps] --out dir
//   ntl sweep    --case e [--config f.json] --out dir [--emit-plot-data]
//   ntl verify   <name|all> [--config f.json] [--out file]
//   ntl energy   --function sin_pi --kind nonlocal --s 0.75 --delta 0.1 --p 2
//   ntl convolve --function sin_pi --delta 0.1 --out file.csv
//
// Exit status: 0 success, 1 failed check or solver failure, 2 bad input.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ntl/ntl.hpp"

namespace fs = std::filesystem;

namespace {

bool g_quiet = false;

void progress(const std::string& msg) {
  if (!g_quiet) std::cerr << "[ntl] " << msg << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ntl::ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json load_config_json(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  const std::string text = read_file(path);
  try {
    auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw ntl::ConfigError({"top level: expected an object"});
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ntl::ConfigError({std::string("malformed JSON: ") + e.what()});
  }
}

std::string require_out(const std::string& out, const ntl::RunConfig& cfg) {
  return out.empty() ? cfg.output_dir : out;
}

ntl::Json config_echo(const ntl::RunConfig& cfg) {
  ntl::Json j;
  j["domain"] = ntl::Json{{"a", cfg.a}, {"xi", cfg.xi}, {"b", cfg.b}, {"kappa0", cfg.kappa0}, {"kappa1", cfg.kappa1}};
  j["params"] = ntl::to_json(cfg.params);
  j["n"] = cfg.n;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["load"] = ntl::Json{{"f1", cfg.f1}, {"f2", cfg.f2}};
  j["boundary"] = ntl::Json{{"g0", cfg.boundary.g0}, {"g1", cfg.boundary.g1}, {"g2", cfg.boundary.g2}};
  j["potential"] = ntl::Json{{"name", cfg.potential}, {"k1", cfg.k1}, {"k2", cfg.k2}};
  j["penalty_eps"] = cfg.penalty_eps ? ntl::Json(*cfg.penalty_eps) : ntl::Json(nullptr);
  j["seed"] = cfg.seed;
  return j;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string config, out, mode, load, alpha, beta;
  std::optional<double> s, delta, p, penalty_eps;
  std::optional<int> n;
};

int run_solve(const SolveArgs& a) {
  auto j = load_config_json(a.config);
  auto& params = j["params"];
  if (!params.is_object() && !params.is_null()) throw ntl::ConfigError({"params: expected an object"});
  if (a.s) params["s"] = *a.s;
  if (a.delta) params["delta"] = *a.delta;
  if (a.p) params["p"] = *a.p;
  if (!a.mode.empty()) params["mode"] = a.mode;
  if (params.is_null()) j.erase("params");
  if (a.n) j["mesh"]["n"] = *a.n;
  if (!a.load.empty()) j["load"] = {{"f1", a.load}, {"f2", a.load}};
  if (!a.alpha.empty()) j["alpha"] = a.alpha;
  if (!a.beta.empty()) j["beta"] = a.beta;
  if (a.penalty_eps) j["solver"]["penalty_eps"] = *a.penalty_eps;
  const auto cfg = ntl::parse_config(j.dump(), true);

  const auto domain = cfg.domain();
  const auto mesh = ntl::make_mesh(domain, cfg.n);
  const auto pot = cfg.make_potential();
  std::ostringstream msg;
  msg << "solve s=" << cfg.params.s << " delta=" << cfg.params.delta << " p=" << cfg.params.p << " n=" << cfg.n;
  progress(msg.str());

  ntl::SolveReport rep;
  if (cfg.penalty_eps) {
    rep = ntl::solve_penalty(cfg.params, cfg.coefficients(), cfg.loads(), mesh, cfg.boundary.g0, *cfg.penalty_eps,
                             &pot, cfg.boundary, cfg.solver);
  } else if (pot.quadratic()) {
    rep = ntl::solve_p2(cfg.params, cfg.coefficients(), cfg.loads(), mesh, cfg.boundary, cfg.solver);
  } else {
    rep = ntl::solve_general_p(cfg.params, cfg.coefficients(), pot, cfg.loads(), mesh, cfg.boundary, cfg.solver);
  }
  progress("solved by " + rep.method + " in " + std::to_string(rep.iterations) + " iteration(s)");

  const fs::path dir = require_out(a.out, cfg);
  ntl::Json report;
  report["config"] = config_echo(cfg);
  report["solution"] = ntl::to_json(rep);
  ntl::write_atomic(dir / "solution.csv", ntl::solution_table(rep.pair).str());
  ntl::write_atomic(dir / "report.json", ntl::dump_json(report));
  progress("wrote " + (dir / "solution.csv").string() + " and " + (dir / "report.json").string());
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string config, out, case_name;
  bool plot = false;
};

int run_sweep(const SweepArgs& a) {
  auto j = load_config_json(a.config);
  std::optional<ntl::CaseId> id;
  if (!a.case_name.empty()) {
    id = ntl::case_from_string(a.case_name);
    if (!id) throw ntl::ConfigError({"--case: one of a, b, c, d, e required"});
  }
  if (j.contains("sweep") && j["sweep"].is_object()) {
    auto& sw = j["sweep"];
    if (id && sw.contains("case") && sw["case"] != a.case_name) {
      throw ntl::ConfigError({"sweep.case: config says '" + sw["case"].dump() + "' but --case is '" + a.case_name + "'"});
    }
    if (id) sw["case"] = a.case_name;
    if (!sw.contains("grid") && sw.contains("case") && sw["case"].is_string()) {
      if (const auto c = ntl::case_from_string(sw["case"].get<std::string>())) {
        for (const auto& g : ntl::default_grid(*c)) sw["grid"].push_back({{"s", g.s}, {"delta", g.delta}});
      }
    }
  } else if (!j.contains("sweep")) {
    if (!id) throw ntl::ConfigError({"sweep: --case or a sweep section in the config required"});
    nlohmann::json sw{{"case", a.case_name}, {"grid", nlohmann::json::array()}};
    for (const auto& g : ntl::default_grid(*id)) sw["grid"].push_back({{"s", g.s}, {"delta", g.delta}});
    j["sweep"] = sw;
  }
  const auto cfg = ntl::parse_config(j.dump(), true);
  const auto& sc = *cfg.sweep;

  auto setup = ntl::make_sweep_setup(cfg);
  setup.keep_fields = a.plot;
  progress("sweep case " + std::string(ntl::to_string(sc.case_id)) + " over " + std::to_string(sc.grid.size()) +
           " grid point(s), n=" + std::to_string(cfg.n) + ", threads=" + std::to_string(ntl::thread_count()));
  const auto rep = ntl::sweep_case(sc.case_id, sc.grid, setup);
  for (const auto& w : rep.warnings) progress("warning: " + w);

  const fs::path dir = require_out(a.out, cfg);
  const std::string tag(ntl::to_string(sc.case_id));
  ntl::Json summary;
  summary["config"] = config_echo(cfg);
  summary["sweep"] = ntl::to_json(rep);
  ntl::write_atomic(dir / ("sweep_" + tag + ".csv"), ntl::sweep_table(rep).str());
  ntl::write_atomic(dir / ("sweep_" + tag + ".json"), ntl::dump_json(summary));
  if (a.plot) {
    std::vector<std::string> h{"x", "part", "u_limit"};
    for (std::size_t k = 0; k < rep.rows.size(); ++k) h.push_back("u_" + std::to_string(k));
    ntl::CsvTable t(h);
    const auto& mesh = rep.fields.front().mesh();
    for (ntl::Part P : {ntl::Part::one, ntl::Part::two}) {
      for (int i = 0; i <= mesh.elements(P); ++i) {
        std::vector<double> row{mesh.x(P, i), static_cast<double>(static_cast<int>(P))};
        for (const auto& f : rep.fields) row.push_back(f.nodal(P, i));
        t.add(row);
      }
    }
    ntl::write_atomic(dir / ("plot_" + tag + ".csv"), t.str());
  }
  progress("wrote " + (dir / ("sweep_" + tag + ".csv")).string());
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string name, config, out;
};

int run_verify(const VerifyArgs& a) {
  std::uint64_t seed = 20240601;
  if (!a.config.empty()) seed = ntl::parse_config(read_file(a.config)).seed;
  const auto& registry = ntl::check_registry();
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    if (a.name == "all" || registry[i].first == a.name) picked.push_back(i);
  }
  if (picked.empty()) {
    std::string list;
    for (const auto& [n, f] : registry) list += " " + n;
    throw ntl::ConfigError({"verify: unknown check '" + a.name + "' (known:" + list + ", all)"});
  }
  bool ok = true;
  ntl::Json out = ntl::Json::array();
  for (std::size_t i : picked) {
    const auto& n = registry[i].first;
    progress("check " + n);
    const auto r = registry[i].second(seed);
    ok = ok && r.pass;
    progress(std::string(r.pass ? "PASS " : "FAIL ") + n);
    out.push_back(ntl::to_json(r));
  }
  const std::string text = ntl::dump_json(a.name != "all" ? out[0] : out);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    ntl::write_atomic(a.out, text);
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct EnergyArgs {
  std::string function = "sin_pi", kind = "nonlocal", out;
  double s = 0.75, delta = 0.1, p = 2.0, lo = 0.0, hi = 1.0;
};

int run_energy(const EnergyArgs& a) {
  const auto u = ntl::make_function(a.function);
  const auto mp = ntl::ModelParams::make(a.s, a.p, a.delta);
  mp.check_ranges();
  if (!(a.lo < a.hi)) throw ntl::ParameterError("--a < --b required");
  const ntl::Interval d{a.lo, a.hi};
  if (a.delta > 0.0 && !(a.delta < 1.0 / 3.0)) throw ntl::ParameterError("delta < 1/3 required");
  ntl::Json j;
  double value = 0.0;
  if (a.kind == "nonlocal") {
    if (!(a.delta > 0.0)) throw ntl::ParameterError("nonlocal seminorm needs delta > 0");
    value = ntl::seminorm_frak_pow(u, mp, d);
  } else if (a.kind == "fractional") {
    if (!(a.s < 1.0)) throw ntl::ParameterError("fractional seminorm needs s < 1");
    value = ntl::seminorm_frac_pow(u, mp, d);
  } else if (a.kind == "weighted") {
    value = ntl::seminorm_weighted_pow(u, mp, d);
  } else if (a.kind == "local") {
    value = a.p * ntl::local_energy(u, a.p, d, ntl::detail::unit_weight, ntl::Potential::power_rho(a.p, 1.0));
  } else if (a.kind == "coupled") {
    const ntl::Domain dom(a.lo, 0.5 * (a.lo + a.hi), a.hi);
    const auto e = ntl::energy_eval(u, u, mp, dom, {}, ntl::Potential::power(a.p), {});
    value = e.part1_energy + e.part2_energy;
    j["breakdown"] = ntl::to_json(e);
  } else {
    throw ntl::ConfigError({"--kind: one of nonlocal, fractional, weighted, local, coupled required"});
  }
  ntl::Json out;
  out["value"] = value;
  out["mode"] = std::string(ntl::to_string(mp.mode));
  out["params"] = ntl::Json{{"function", a.function}, {"kind", a.kind}, {"s", a.s}, {"delta", a.delta},
                            {"p", a.p}, {"a", a.lo}, {"b", a.hi}};
  if (j.contains("breakdown")) out["breakdown"] = j["breakdown"];
  const std::string text = ntl::dump_json(out);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    ntl::write_atomic(a.out, text);
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct ConvolveArgs {
  std::string function = "sin_pi", out;
  double delta = 0.1, lo = 0.0, hi = 1.0;
  int n = 64;
};

int run_convolve(const ConvolveArgs& a) {
  if (!(a.lo < a.hi)) throw ntl::ParameterError("--a < --b required");
  if (a.n < 1) throw ntl::ParameterError("--n >= 1 required");
  const ntl::Interval d{a.lo, a.hi};
  const auto u = ntl::make_function(a.function);
  const auto Ku = ntl::conv_Kdelta(u, a.delta, d);
  ntl::CsvTable t({"x", "u", "Ku", "error"});
  for (int i = 0; i <= a.n; ++i) {
    const double x = i == a.n ? a.hi : a.lo + (a.hi - a.lo) * i / a.n;
    const double ux = u(x), kx = Ku(x);
    t.add({x, ux, kx, kx - ux});
  }
  if (a.out.empty()) {
    std::cout << t.str();
  } else {
    ntl::write_atomic(a.out, t.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled nonlocal-fractional transmission energies: solve, sweep, verify"};
  app.require_subcommand(1);
  app.add_flag("--quiet,-q", g_quiet, "Suppress progress lines");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Minimize the coupled energy");
  solve->add_option("--config", sa.config, "JSON config");
  solve->add_option("--s", sa.s);
  solve->add_option("--delta", sa.delta);
  solve->add_option("--p", sa.p);
  solve->add_option("--mode", sa.mode, "nonlocal_fractional, weighted_fractional, nonlocal_local or local_local");
  solve->add_option("--n", sa.n, "Elements per subdomain");
  solve->add_option("--load", sa.load, "Load on both parts, e.g. constant:1");
  solve->add_option("--alpha", sa.alpha);
  solve->add_option("--beta", sa.beta);
  solve->add_option("--penalty-eps", sa.penalty_eps, "Soft transmission with this epsilon");
  solve->add_option("--out", sa.out, "Output directory");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep toward a limit regime");
  sweep->add_option("--case", wa.case_name, "a, b, c, d or e");
  sweep->add_option("--config", wa.config, "JSON config");
  sweep->add_option("--out", wa.out, "Output directory");
  sweep->add_flag("--emit-plot-data", wa.plot, "Also write nodal values of every minimizer");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a named inequality check");
  verify->add_option("name", va.name, "Check name or 'all'")->required();
  verify->add_option("--config", va.config, "JSON config (seed)");
  verify->add_option("--out", va.out, "Output file (default stdout)");

  EnergyArgs ea;
  auto* energy = app.add_subcommand("energy", "Evaluate a seminorm or energy of a named function");
  energy->add_option("--function", ea.function);
  energy->add_option("--kind", ea.kind, "nonlocal, fractional, weighted, local or coupled");
  energy->add_option("--s", ea.s);
  energy->add_option("--delta", ea.delta);
  energy->add_option("--p", ea.p);
  energy->add_option("--a", ea.lo, "Left end");
  energy->add_option("--b", ea.hi, "Right end");
  energy->add_option("--out", ea.out, "Output file (default stdout)");

  ConvolveArgs ca;
  auto* convolve = app.add_subcommand("convolve", "Sample the boundary-localized convolution");
  convolve->add_option("--function", ca.function);
  convolve->add_option("--delta", ca.delta);
  convolve->add_option("--a", ca.lo, "Left end");
  convolve->add_option("--b", ca.hi, "Right end");
  convolve->add_option("--n", ca.n, "Sample intervals");
  convolve->add_option("--out", ca.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*sweep) return run_sweep(wa);
    if (*verify) return run_verify(va);
    if (*energy) return run_energy(ea);
    if (*convolve) return run_convolve(ca);
  } catch (const ntl::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return 2;
  } catch (const ntl::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ntl::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ntl::ModeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ntl::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
