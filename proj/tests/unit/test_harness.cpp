#include <gtest/gtest.h>

#include <random>

#include "ntl/harness.hpp"

using namespace ntl;

namespace {

SweepSetup unit_setup(int n = 32) {
  SweepSetup s;
  s.n_per_side = n;
  s.loads = {constant_function(1.0), constant_function(1.0)};
  return s;
}

}  // namespace

TEST(FitRate, Examples) {
  EXPECT_NEAR(*fit_rate({0.4, 0.2, 0.1}, {0.4, 0.2, 0.1}), 1.0, 1e-14);
  EXPECT_NEAR(*fit_rate({0.4, 0.2, 0.1}, {0.16, 0.04, 0.01}), 2.0, 1e-14);
  EXPECT_EQ(*fit_rate({0.4, 0.2, 0.1}, {0.3, 0.3, 0.3}), 0.0);
}

TEST(FitRate, Undefined) {
  EXPECT_FALSE(fit_rate({0.4, 0.2, 0.1}, {0.4, 0.0, 0.1}));
  EXPECT_FALSE(fit_rate({0.4, 0.2, 0.1}, {0.4, -0.2, 0.1}));
  EXPECT_FALSE(fit_rate({0.4, 0.2}, {0.4, 0.2}));
  EXPECT_FALSE(fit_rate({0.4, 0.4, 0.4}, {0.4, 0.2, 0.1}));
}

TEST(FitRate, FromRows) {
  std::vector<SweepRow> rows;
  for (double d : {0.2, 0.1, 0.05}) rows.push_back({0.75, d, 3.0 * d * d, 0, 0, {}, 0});
  EXPECT_NEAR(*fit_rate(CaseId::a, rows), 2.0, 1e-12);
}

TEST(Monotone, StrictAndSoft) {
  const auto a = check_monotone_decrease({0.4, 0.3, 0.2});
  EXPECT_TRUE(a.strict);
  EXPECT_EQ(a.inversions, 0);
  const auto b = check_monotone_decrease({0.4, 0.3, 0.31, 0.2});
  EXPECT_FALSE(b.strict);
  EXPECT_TRUE(b.soft);
  EXPECT_EQ(b.inversions, 1);
  const auto c = check_monotone_decrease({0.4, 0.3, 0.5});
  EXPECT_FALSE(c.soft);
}

TEST(Grid, DefaultsAreValid) {
  for (CaseId c : {CaseId::a, CaseId::b, CaseId::c, CaseId::d, CaseId::e}) {
    EXPECT_NO_THROW(validate_grid(c, default_grid(c)));
    EXPECT_EQ(default_grid(c).size(), 4u);
  }
}

TEST(Grid, Rejections) {
  EXPECT_THROW(validate_grid(CaseId::a, {}), ParameterError);
  EXPECT_THROW(validate_grid(CaseId::a, {{0.75, 0.2}, {0.8, 0.1}}), ParameterError);
  EXPECT_THROW(validate_grid(CaseId::b, {{0.8, 0.1}, {0.9, 0.2}}), ParameterError);
  EXPECT_THROW(validate_grid(CaseId::c, {{0.8, 0.1}}), ParameterError);
  EXPECT_THROW(validate_grid(CaseId::d, {{0.9, 0.1}}), ParameterError);
  EXPECT_THROW(validate_grid(CaseId::e, {{0.9, 0.1}, {0.8, 0.2}}), ParameterError);
}

TEST(Grid, LimitPoints) {
  const auto a = limit_point(CaseId::a, default_grid(CaseId::a));
  EXPECT_EQ(a.s, 0.75);
  EXPECT_EQ(a.delta, 0.0);
  const auto b = limit_point(CaseId::b, default_grid(CaseId::b));
  EXPECT_EQ(b.s, 1.0);
  EXPECT_EQ(b.delta, 0.1);
  for (CaseId c : {CaseId::c, CaseId::d, CaseId::e}) {
    const auto l = limit_point(c, default_grid(c));
    EXPECT_EQ(l.s, 1.0);
    EXPECT_EQ(l.delta, 0.0);
  }
}

TEST(CaseIds, RoundTrip) {
  for (CaseId c : {CaseId::a, CaseId::b, CaseId::c, CaseId::d, CaseId::e}) {
    EXPECT_EQ(*case_from_string(to_string(c)), c);
  }
  EXPECT_FALSE(case_from_string("f"));
}

TEST(Sweep, DegenerateGridHasZeroDistance) {
  const auto r = sweep_case(CaseId::e, {{1.0, 0.0}}, unit_setup(16));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].distance, 0.0);
  EXPECT_FALSE(r.fitted_slope);
}

TEST(Sweep, CaseEDecreasesToParabola) {
  auto setup = unit_setup(32);
  const auto par = make_function("parabola");
  setup.analytic_limit = std::make_pair(par, par);
  const auto r = sweep_case(CaseId::e, default_grid(CaseId::e), setup);
  EXPECT_EQ(r.reference, "analytic");
  std::vector<double> d;
  for (const auto& row : r.rows) {
    EXPECT_GE(row.distance, 0.0);
    d.push_back(row.distance);
  }
  EXPECT_TRUE(check_monotone_decrease(d).strict);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_TRUE(r.fitted_slope);
}

TEST(Sweep, CaseADecreases) {
  const auto r = sweep_case(CaseId::a, default_grid(CaseId::a), unit_setup(32));
  std::vector<double> d;
  for (const auto& row : r.rows) d.push_back(row.distance);
  EXPECT_TRUE(check_monotone_decrease(d).soft);
  EXPECT_LT(d.back(), d.front());
}

TEST(Sweep, CaseBRecordsWeakProxies) {
  const auto r = sweep_case(CaseId::b, default_grid(CaseId::b), unit_setup(32));
  EXPECT_EQ(r.limit_moments.size(), 5u);
  for (const auto& row : r.rows) EXPECT_EQ(row.moments.size(), 5u);
  EXPECT_LT(r.rows.back().weak_gap, r.rows.front().weak_gap);
}

TEST(Sweep, KeepFields) {
  auto setup = unit_setup(16);
  setup.keep_fields = true;
  const auto r = sweep_case(CaseId::d, default_grid(CaseId::d), setup);
  EXPECT_EQ(r.fields.size(), r.rows.size() + 1);
}

TEST(Sweep, DiagramPathsAgree) {
  // (s, 0) with s near 1 and (1, delta) with delta near 0 both approach (1, 0)
  const auto setup = unit_setup(32);
  const auto mesh = make_mesh(setup.domain, setup.n_per_side);
  const auto u10 = solve_point({1.0, 0.0}, setup, mesh);
  const auto ua = solve_point({0.975, 0.0}, setup, mesh);
  const auto ub = solve_point({1.0, 0.025}, setup, mesh);
  const auto ue = solve_point({0.975, 0.025}, setup, mesh);
  const double scale = lp_norm(u10.pair, 2.0);
  EXPECT_LE(lp_distance(ua.pair, u10.pair, 2.0), 0.1 * scale);
  EXPECT_LE(lp_distance(ub.pair, u10.pair, 2.0), 0.1 * scale);
  EXPECT_LE(lp_distance(ue.pair, u10.pair, 2.0), 0.1 * scale);
}

TEST(Sweep, LimitProblemUniqueFromPerturbedStart) {
  const auto setup = unit_setup(16);
  const auto mesh = make_mesh(setup.domain, setup.n_per_side);
  for (GridPoint g : {GridPoint{0.75, 0.0}, GridPoint{1.0, 0.1}, GridPoint{1.0, 0.0}}) {
    const auto mp = ModelParams::make(g.s, 2.0, g.delta);
    const auto ref = solve_p2(mp, {}, setup.loads, mesh);
    Eigen::VectorXd init = ref.pair.values();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (int i = 1; i + 1 < init.size(); ++i) init[i] += dist(rng);
    const auto again = solve_general_p(mp, {}, Potential::power(2), setup.loads, mesh, {}, {}, init);
    EXPECT_LE((again.pair.values() - ref.pair.values()).cwiseAbs().maxCoeff(), 1e-6) << g.s << " " << g.delta;
  }
}

TEST(Sweep, SolverFailureNamesGridPoint) {
  auto setup = unit_setup(8);
  setup.solver.max_iter = 0;
  setup.p = 3.0;
  setup.potential = Potential::power(3.0);
  try {
    sweep_case(CaseId::e, {{0.9, 0.1}}, setup);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("s="), std::string::npos);
  }
}

TEST(EnergyLimit, LinearIsExact) {
  const Domain dom(0.0, 1.0, 2.0);
  const auto t = energy_limit_check(affine_function(0, 1), CaseId::a, {{0.75, 0.2}, {0.75, 0.1}, {0.75, 0.01}}, dom);
  for (const auto& r : t.rows) EXPECT_NEAR(r.rel_gap, 0.0, 1e-10);
}

TEST(EnergyLimit, ConstantIsZero) {
  const auto t = energy_limit_check(constant_function(2.0), CaseId::e, default_grid(CaseId::e), Domain());
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.energy, 0.0);
    EXPECT_EQ(r.rel_gap, 0.0);
  }
  EXPECT_EQ(t.finest_gap, 0.0);
}

TEST(EnergyLimit, SineCaseA) {
  const Domain dom(0.0, 1.0, 2.0);
  const auto t =
      energy_limit_check(make_function("sin_pi"), CaseId::a, {{0.75, 0.2}, {0.75, 0.05}, {0.75, 0.01}}, dom);
  EXPECT_LE(t.finest_gap, 0.01);
  EXPECT_LT(t.rows.back().rel_gap, t.rows.front().rel_gap);
}

TEST(Moments, WeakTestFunctions) {
  const auto tests = weak_test_functions(Domain());
  EXPECT_EQ(tests.size(), 5u);
  FieldPair one(make_mesh(Domain(), 16));
  one.values().setOnes();
  // pairing a constant field with a test function is its integral over both parts
  EXPECT_NE(moment(one, tests.front()), 0.0);
  FieldPair zero(make_mesh(Domain(), 16));
  for (const auto& phi : tests) EXPECT_EQ(moment(zero, phi), 0.0);
}
