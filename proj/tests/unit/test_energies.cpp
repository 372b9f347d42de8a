#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>
#include <random>

#include "ntl/energies.hpp"
#include "ntl/verify.hpp"

using namespace ntl;
using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

namespace {

const Interval unit{0.0, 1.0};

// C_bar int sigma^{-1-sp} delta^{-1-p} int_{|y-x|<delta sigma} |u(x)-u(y)|^p dy dx
double frak_pow_oracle(const ScalarFunction& u, double s, double p, double delta) {
  tanh_sinh<double> outer;
  auto f = [&](double x) {
    const double sg = std::min(x, 1.0 - x);
    if (!(sg > 1e-100)) return 0.0;
    const double r = delta * sg;
    // |.|^p has kinks at y = x and, for the symmetric test functions, y = 1 - x
    auto g = [&](double y) { return std::pow(std::abs(u(x) - u(y)), p); };
    std::vector<double> br{x - r, x, x + r};
    if (std::abs(1.0 - 2.0 * x) < r && x != 0.5) br.push_back(1.0 - x);
    std::sort(br.begin(), br.end());
    double in = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) in += gauss<double, 30>::integrate(g, br[k], br[k + 1]);
    const double rp = std::pow(r, 1.0 + p);
    return rp > 0.0 ? in / rp * std::pow(sg, p - s * p) : 0.0;
  };
  const double v = outer.integrate(f, 0.0, 0.5, 1e-13) + outer.integrate(f, 0.5, 1.0, 1e-13);
  return cbar_dp(1, p) * v;
}

// kappa int int |u(x)-u(y)|^p / |x-y|^{1+sp} = 2 kappa int_0^1 int_0^x ... dt dx, t = x - y.
// Inner: t = x v^{1/(g+1)} absorbs t^g, g = p-1-sp; outer: x = w^4 absorbs x^{p-sp}.
double frac_pow_oracle(const ScalarFunction& u, double s, double p) {
  const double g = p - 1.0 - s * p;
  auto inner = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double ux = u(x);
    auto h = [&](double v) {
      const double t = x * std::pow(v, 1.0 / (g + 1.0));
      return t <= 0.0 ? 0.0 : std::pow(std::abs(ux - u(x - t)) / t, p);
    };
    double in = 0.0;
    for (int k = 0; k < 8; ++k) in += gauss<double, 30>::integrate(h, k / 8.0, (k + 1) / 8.0);
    return std::pow(x, g + 1.0) / (g + 1.0) * in;
  };
  auto outer = [&](double w) { return inner(w * w * w * w) * 4.0 * w * w * w; };
  double v = 0.0;
  for (int k = 0; k < 16; ++k) v += gauss<double, 30>::integrate(outer, k / 16.0, (k + 1) / 16.0);
  return 2.0 * kappa_dsp(1, s, p) * v;
}

double weighted_pow_oracle(const ScalarFunction& u, double s, double p) {
  tanh_sinh<double> q;
  auto f = [&](double x) { return std::pow(std::abs(u.slope(x)), p) * std::pow(std::min(x, 1.0 - x), p - s * p); };
  return q.integrate(f, 0.0, 0.5, 1e-13) + q.integrate(f, 0.5, 1.0, 1e-13);
}

ScalarFunction shifted(const ScalarFunction& u, double c) {
  return {[u, c](double x) { return u(x) + c; }, u.derivative};
}

ScalarFunction scaled(const ScalarFunction& u, double k) {
  return {[u, k](double x) { return k * u(x); }, [u, k](double x) { return k * u.slope(x); }};
}

}  // namespace

// ---------------------------------------------------------------------------
// Continuous (function handle) path

TEST(SeminormFrak, ConstantIsZero) {
  EXPECT_EQ(seminorm_frak(constant_function(3.0), ModelParams::make(0.75, 2, 0.1), unit), 0.0);
}

TEST(SeminormFrak, LinearIsQuarterForEveryHorizon) {
  for (double delta : {0.01, 0.05, 0.1, 0.2, 0.3, 0.33}) {
    const double v = seminorm_frak_pow(affine_function(0, 1), ModelParams::make(0.5, 2, delta), unit);
    EXPECT_NEAR(v, 0.25, 1e-12) << delta;
  }
}

TEST(SeminormFrak, MatchesBoostOracle) {
  // non-integer p leaves |t|^p at the inner endpoints, which caps the fixed rule near 1e-8
  for (auto [name, s, p, delta, tol] : std::vector<std::tuple<const char*, double, double, double, double>>{
           {"sin_pi", 0.75, 2.0, 0.1, 1e-10}, {"exp", 0.6, 3.0, 0.25, 1e-10}, {"cubic", 0.9, 2.5, 0.05, 1e-7}}) {
    const auto u = make_function(name);
    const double v = seminorm_frak_pow(u, ModelParams::make(s, p, delta), unit);
    const double o = frak_pow_oracle(u, s, p, delta);
    EXPECT_NEAR(v, o, tol * o) << name;
  }
}

TEST(SeminormFrak, RefinedInnerRuleForOddPowers) {
  // |u(x) - u(y)|^3 has a hidden kink where u(y) = u(x) for non-monotone u
  const auto u = make_function("sin_pi");
  const auto mp = ModelParams::make(0.6, 3.0, 0.25);
  const double o = frak_pow_oracle(u, 0.6, 3.0, 0.25);
  const double coarse = std::abs(seminorm_frak_pow(u, mp, unit) - o);
  const double fine = std::abs(seminorm_frak_pow(u, mp, unit, HandleQuadrature{8}) - o);
  EXPECT_LE(fine, 1e-8 * o);
  EXPECT_LE(coarse, 1e-5 * o);
  EXPECT_LT(fine, coarse);
}

TEST(SeminormFrak, RequiresPositiveAdmissibleHorizon) {
  EXPECT_THROW(seminorm_frak(affine_function(0, 1), ModelParams::make(0.75, 2, 0.0), unit), ModeError);
  EXPECT_THROW(seminorm_frak(affine_function(0, 1), ModelParams::make(0.75, 2, 0.34), unit), ParameterError);
}

TEST(SeminormFrak, LocalizesToWeighted) {
  const auto u = make_function("sin_pi");
  const double w = seminorm_weighted_pow(u, ModelParams::make(0.75, 2, 0.0), unit);
  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {0.2, 0.1, 0.05, 0.01}) {
    const double gap = std::abs(seminorm_frak_pow(u, ModelParams::make(0.75, 2, delta), unit) - w) / w;
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LE(prev, 1e-2);
}

TEST(SeminormFrac, LinearLaw) {
  for (double s : {0.3, 0.5, 0.6, 0.75, 0.9}) {
    const double v = seminorm_frac_pow(affine_function(0, 1), ModelParams::make(s, 2, 0.1), unit);
    EXPECT_NEAR(v, 1.0 / (3.0 - 2.0 * s), 1e-10) << s;
  }
  EXPECT_NEAR(seminorm_frac_pow(affine_function(0, 1), ModelParams::make(0.5, 2, 0.1), unit), 0.5, 1e-12);
  EXPECT_NEAR(seminorm_frac_pow(affine_function(0, 1), ModelParams::make(0.75, 2, 0.1), unit), 2.0 / 3.0, 1e-12);
}

TEST(SeminormFrac, TendsToDirichletEnergy) {
  double prev = 0.0;
  for (double s : {0.9, 0.99, 0.999}) {
    const double v = seminorm_frac_pow(affine_function(0, 1), ModelParams::make(s, 2, 0.1), unit);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 1.0, 3e-3);
}

TEST(SeminormFrac, MatchesBoostOracle) {
  for (auto [name, s, p] : std::vector<std::tuple<const char*, double, double>>{
           {"sin_pi", 0.75, 2.0}, {"exp", 0.6, 2.0}, {"cubic", 0.9, 3.0}}) {
    const auto u = make_function(name);
    const double v = seminorm_frac_pow(u, ModelParams::make(s, p, 0.1), unit);
    const double o = frac_pow_oracle(u, s, p);
    EXPECT_NEAR(v, o, 1e-7 * o) << name;
  }
}

TEST(SeminormFrac, LocalModeIsModeError) {
  EXPECT_THROW(seminorm_frac(affine_function(0, 1), ModelParams::make(1.0, 2, 0.1), unit), ModeError);
}

TEST(SeminormWeighted, Examples) {
  EXPECT_NEAR(seminorm_weighted_pow(affine_function(0, 1), ModelParams::make(0.5, 2, 0.0), unit), 0.25, 1e-12);
  EXPECT_NEAR(seminorm_weighted_pow(affine_function(0, 1), ModelParams::make(1.0, 2, 0.0), unit), 1.0, 1e-12);
  EXPECT_EQ(seminorm_weighted_pow(constant_function(-2.0), ModelParams::make(0.5, 2, 0.0), unit), 0.0);
}

TEST(SeminormWeighted, MatchesBoostOracle) {
  const auto u = make_function("sin_pi");
  for (double s : {0.6, 0.75, 0.9}) {
    const double v = seminorm_weighted_pow(u, ModelParams::make(s, 2, 0.0), unit);
    EXPECT_NEAR(v, weighted_pow_oracle(u, s, 2.0), 1e-10) << s;
  }
}

TEST(SeminormWeighted, FiniteDifferenceFallback) {
  const auto u = make_function("exp");
  const ScalarFunction no_derivative{u.value, {}};
  const auto mp = ModelParams::make(0.75, 2, 0.0);
  EXPECT_NEAR(seminorm_weighted_pow(no_derivative, mp, unit), seminorm_weighted_pow(u, mp, unit), 1e-8);
}

TEST(Seminorms, TranslationInvariance) {
  const auto u = make_function("sin_2pi");
  const auto v = shifted(u, 7.25);
  const auto mp = ModelParams::make(0.75, 2, 0.1);
  EXPECT_NEAR(seminorm_frak(v, mp, unit), seminorm_frak(u, mp, unit), 1e-10);
  EXPECT_NEAR(seminorm_frac(v, mp, unit), seminorm_frac(u, mp, unit), 1e-10);
  EXPECT_NEAR(seminorm_weighted(v, mp, unit), seminorm_weighted(u, mp, unit), 1e-10);
}

TEST(Seminorms, Homogeneity) {
  const auto u = make_function("exp");
  for (double lam : {-3.0, 0.5, 2.0}) {
    const auto v = scaled(u, lam);
    for (double p : {2.0, 3.0}) {
      const auto mp = ModelParams::make(0.75, p, 0.1);
      EXPECT_NEAR(seminorm_frak(v, mp, unit), std::abs(lam) * seminorm_frak(u, mp, unit), 1e-12 * std::abs(lam) * 10);
      EXPECT_NEAR(seminorm_frac(v, mp, unit), std::abs(lam) * seminorm_frac(u, mp, unit), 1e-12 * std::abs(lam) * 10);
      EXPECT_NEAR(seminorm_weighted(v, mp, unit), std::abs(lam) * seminorm_weighted(u, mp, unit),
                  1e-12 * std::abs(lam) * 10);
    }
  }
}

TEST(Seminorms, FractionalIntoNonlocalBound) {
  // [u]_frak <= C delta^{s-1} [u]_frac with one C across horizons
  const auto suite = smooth_suite();
  const double s = 0.75;
  std::vector<double> cs;
  for (double delta : {0.3, 0.1, 0.03}) {
    double worst = 0.0;
    for (const auto& t : suite) {
      const auto mp = ModelParams::make(s, 2, delta);
      worst = std::max(worst, seminorm_frak(t.f, mp, unit) / (std::pow(delta, s - 1.0) * seminorm_frac(t.f, mp, unit)));
    }
    cs.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
  EXPECT_LT(*hi, 10.0);
  EXPECT_LE(*hi / *lo, 10.0);
}

TEST(Seminorms, HorizonComparisonSmallSuite) {
  const auto r = check_horizon(99, 10, 12, {{0.05, 0.2}, {0.1, 0.3}}, {0.6, 0.9}, 2.0);
  EXPECT_TRUE(r.pass) << r.lhs;
}

TEST(Seminorms, WeightedEmbeddingConstant) {
  const auto r = check_embedding({0.6, 0.75, 0.9}, {0.05, 0.3}, 2.0, 3.0);
  EXPECT_TRUE(r.pass);
  double C = 0.0;
  for (const auto& [k, v] : r.params) {
    if (k == "C_dp") C = v;
  }
  EXPECT_NEAR(C, 2.0 * cbar_dp(1, 2.0) / 3.0, 1e-14);
}

TEST(EnergyEval, ZeroPair) {
  const Domain dom;
  const LoadSpec loads{make_function("exp"), make_function("sin_pi")};
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.75, 0.1}, {0.75, 0.0}, {1.0, 0.1}, {1.0, 0.0}}) {
    const auto e = energy_eval(constant_function(0), constant_function(0), ModelParams::make(s, 2, d), dom, {},
                               Potential::power(2), loads);
    EXPECT_EQ(e.part1_energy, 0.0);
    EXPECT_EQ(e.part2_energy, 0.0);
    EXPECT_EQ(e.load_term, 0.0);
    EXPECT_EQ(e.total, 0.0);
  }
}

TEST(EnergyEval, ParabolaLocalLocal) {
  const Domain dom;
  const auto u = make_function("parabola");
  const LoadSpec loads{constant_function(1), constant_function(1)};
  const auto e = energy_eval(u, u, ModelParams::make(1.0, 2, 0.0), dom, {}, Potential::power(2), loads);
  EXPECT_NEAR(e.part1_energy + e.part2_energy, 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(e.load_term, 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(e.total, -1.0 / 3.0, 1e-13);
  EXPECT_EQ(e.total, e.part1_energy + e.part2_energy - e.load_term);
}

TEST(EnergyEval, ConsistentWithSeminorms) {
  const Domain dom(0.0, 1.0, 2.0);
  const auto u = make_function("sin_pi");
  const auto mp = ModelParams::make(0.75, 2, 0.1);
  const auto e = energy_eval(u, u, mp, dom, {}, Potential::power(2), {});
  EXPECT_NEAR(e.part1_energy, 0.5 * seminorm_frak_pow(u, mp, dom.omega1()), 1e-12);
  EXPECT_NEAR(e.part2_energy, 0.5 * seminorm_frac_pow(u, mp, dom.omega2()), 1e-12);
}

TEST(EnergyEval, CoefficientWeightsXSlot) {
  const Domain dom(0.0, 1.0, 2.0);
  const auto u = make_function("exp");
  const auto mp = ModelParams::make(0.75, 2, 0.1);
  const CoefficientField two{constant_function(2.0), constant_function(3.0)};
  const auto e1 = energy_eval(u, u, mp, dom, {}, Potential::power(2), {});
  const auto e2 = energy_eval(u, u, mp, dom, two, Potential::power(2), {});
  EXPECT_NEAR(e2.part1_energy, 2.0 * e1.part1_energy, 1e-12 * e1.part1_energy);
  EXPECT_NEAR(e2.part2_energy, 3.0 * e1.part2_energy, 1e-12 * e1.part2_energy);
}

TEST(EnergyEval, ScaledPotential) {
  const Domain dom;
  const auto u = make_function("parabola");
  const auto mp = ModelParams::make(0.75, 3, 0.1);
  const auto a = energy_eval(u, u, mp, dom, {}, Potential::power(3), {});
  const auto b = energy_eval(u, u, mp, dom, {}, Potential::scaled_power(3, 0.5, 4.0), {});
  EXPECT_NEAR(b.part1_energy, 0.5 * a.part1_energy, 1e-12);
  EXPECT_NEAR(b.part2_energy, 4.0 * a.part2_energy, 1e-12);
  EXPECT_TRUE(Potential::scaled_power(3, 0.5, 4.0).satisfies_bounds());
}

TEST(EnergyEval, RejectsLargeHorizon) {
  const Domain dom;
  EXPECT_THROW(energy_eval(constant_function(0), constant_function(0), ModelParams::make(0.75, 2, 0.4), dom, {},
                           Potential::power(2), {}),
               ParameterError);
}

// ---------------------------------------------------------------------------
// Piecewise-linear path

TEST(DiscreteEnergy, AgreesWithHandlePathOnInterpolant) {
  const Domain dom;
  const auto mesh = make_mesh(dom, 16);
  const auto pot = Potential::power(2);
  const auto fp = random_fields(mesh, 1, 5).front();
  const auto u1 = fp.component(Part::one), u2 = fp.component(Part::two);
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.75, 0.1}, {0.75, 0.0}, {1.0, 0.1}, {1.0, 0.0}}) {
    const auto mp = ModelParams::make(s, 2, d);
    const EnergyForm form(mp, {}, mesh, fp.layout(), pot);
    const auto e = energy_eval(fp, form, pot, Eigen::VectorXd::Zero(fp.layout().size()));
    // the handle path sees the same piecewise-linear function
    const double h1 = d > 0 ? seminorm_frak_pow(u1, mp, dom.omega1(), HandleQuadrature{16}) / 2.0
                            : seminorm_weighted_pow(u1, mp, dom.omega1(), HandleQuadrature{16}) / 2.0;
    EXPECT_NEAR(e.part1_energy, h1, 2e-3 * h1) << s << " " << d;
  }
}

TEST(DiscreteEnergy, NonlocalPartMatchesBoostOracle) {
  // one hat function on a uniform mesh of (0, 1)
  const Domain dom(0.0, 1.0, 2.0);
  const auto mesh = make_mesh(dom, 8);
  FieldPair fp(mesh);
  fp.nodal(Part::one, 3) = 1.0;
  const auto u = fp.component(Part::one);
  const auto mp = ModelParams::make(0.75, 2, 0.2);
  const auto pot = Potential::power(2);
  const EnergyForm form(mp, {}, mesh, fp.layout(), pot);
  const double discrete = seminorm_pow(fp, form, Part::one);
  // oracle: split the inner integral at mesh nodes, Gauss on each piece
  auto inner = [&](double x) {
    if (!(std::min(x, 1.0 - x) > 1e-100)) return 0.0;
    const double r = mp.delta * std::min(x, 1.0 - x);
    std::vector<double> br{x - r};
    for (int i = 0; i <= 8; ++i) {
      const double n = i / 8.0;
      if (n > x - r && n < x + r) br.push_back(n);
    }
    br.push_back(x + r);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      s += gauss<double, 10>::integrate([&](double y) { return std::pow(u(x) - u(y), 2.0); }, br[k], br[k + 1]);
    }
    return s / (std::pow(mp.delta, 3.0) * std::pow(std::min(x, 1.0 - x), 1.0 + 1.5));
  };
  tanh_sinh<double> ts;
  double o = 0.0;
  // outer integrand has kinks wherever x +- r(x) crosses a node; split finely
  const int pieces = 400;
  for (int k = 0; k < pieces; ++k) {
    const double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    o += (k == 0 || k == pieces - 1) ? ts.integrate(inner, a, b, 1e-12) : gauss<double, 20>::integrate(inner, a, b);
  }
  o *= cbar_dp(1, 2);
  EXPECT_NEAR(discrete, o, 1e-6 * o);
}

TEST(DiscreteEnergy, TranslationInvarianceAndHomogeneity) {
  const Domain dom;
  const auto mesh = make_mesh(dom, 12);
  const auto pot = Potential::power(3);
  const auto mp = ModelParams::make(0.75, 3, 0.1);
  auto fp = random_fields(mesh, 1, 11).front();
  const EnergyForm form(mp, {}, mesh, fp.layout(), pot);
  const double a1 = seminorm_pow(fp, form, Part::one), a2 = seminorm_pow(fp, form, Part::two);
  FieldPair shifted_fp = fp;
  shifted_fp.values().array() += 4.5;
  EXPECT_NEAR(seminorm_pow(shifted_fp, form, Part::one), a1, 1e-10 * a1);
  EXPECT_NEAR(seminorm_pow(shifted_fp, form, Part::two), a2, 1e-10 * a2);
  FieldPair scaled_fp = fp;
  scaled_fp.values() *= -2.0;
  EXPECT_NEAR(seminorm_pow(scaled_fp, form, Part::one), 8.0 * a1, 1e-10 * a1);
  EXPECT_NEAR(seminorm_pow(scaled_fp, form, Part::two), 8.0 * a2, 1e-10 * a2);
}

TEST(AssembleP2, SymmetricAndMatchesEnergy) {
  const Domain dom;
  const auto mesh = make_mesh(dom, 16);
  const auto pot = Potential::power(2);
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.75, 0.1}, {0.75, 0.0}, {1.0, 0.1}, {1.0, 0.0}}) {
    const auto mp = ModelParams::make(s, 2, d);
    const auto as = assemble_p2(mp, {}, mesh);
    EXPECT_LE((as.full_matrix - as.full_matrix.transpose()).cwiseAbs().maxCoeff(),
              1e-12 * as.full_matrix.cwiseAbs().maxCoeff());
    const EnergyForm form(mp, {}, mesh, as.layout, pot);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(as.layout.size());
    for (const auto& fp : random_fields(mesh, 20, 17)) {
      const auto e = energy_eval(fp, form, pot, zero);
      const double q = fp.values().dot(as.full_matrix * fp.values());
      const double ref = 2.0 * (e.part1_energy + e.part2_energy);
      EXPECT_NEAR(q, ref, 1e-8 * ref);
    }
  }
}

TEST(AssembleP2, PositiveDefiniteAfterElimination) {
  const auto mesh = make_mesh(Domain(), 8);
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.75, 0.1}, {0.6, 0.3}, {0.75, 0.0}, {1.0, 0.0}}) {
    const auto as = assemble_p2(ModelParams::make(s, 2, d), {}, mesh);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(as.matrix);
    EXPECT_GT(es.eigenvalues()[0], 0.0) << s << " " << d;
    EXPECT_EQ(as.matrix.rows(), static_cast<int>(as.free_dofs.size()));
  }
}

TEST(AssembleP2, LoadVectorIsPairing) {
  const Domain dom;
  const auto mesh = make_mesh(dom, 10);
  const LoadSpec loads{make_function("exp"), make_function("cos_pi")};
  const auto as = assemble_p2(ModelParams::make(0.75, 2, 0.1), {}, mesh, loads);
  // b . 1 = int f1 + int f2
  const double total = as.full_rhs.sum();
  const double oracle = gauss_kronrod<double, 31>::integrate([](double x) { return std::exp(x); }, -1.0, 0.0) +
                        gauss_kronrod<double, 31>::integrate([](double x) { return std::cos(std::numbers::pi * x); },
                                                             0.0, 1.0);
  EXPECT_NEAR(total, oracle, 1e-12);
}

TEST(AssembleP2, RejectsOtherExponents) {
  EXPECT_THROW(assemble_p2(ModelParams::make(0.75, 3, 0.1), {}, make_mesh(Domain(), 4)), ModeError);
}
