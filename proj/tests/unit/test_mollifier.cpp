#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <numbers>

#include "ntl/energies.hpp"
#include "ntl/mollifier.hpp"
#include "ntl/verify.hpp"

using namespace ntl;
using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

namespace {

const Interval unit{0.0, 1.0};

double psi_mass_oracle(const Mollifier& psi) {
  return gauss_kronrod<double, 61>::integrate([&](double r) { return psi(r); }, -0.9, 0.9, 20, 1e-14);
}

}  // namespace

TEST(Psi, Support) {
  const auto& psi = default_mollifier();
  EXPECT_EQ(psi(0.95), 0.0);
  EXPECT_EQ(psi(0.9), 0.0);
  EXPECT_EQ(psi(-1.5), 0.0);
  EXPECT_GT(psi(0.45), 0.0);
  EXPECT_GT(psi(0.0), psi(0.45));
}

TEST(Psi, Even) {
  const auto& psi = default_mollifier();
  for (int k = 0; k <= 100; ++k) {
    const double r = 0.95 * k / 100.0;
    EXPECT_EQ(psi(r), psi(-r));
  }
}

TEST(Psi, UnitMass) { EXPECT_NEAR(psi_mass_oracle(default_mollifier()), 1.0, 1e-10); }

TEST(Psi, FixedRuleReproducesMoments) {
  const auto& psi = default_mollifier();
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < psi.z_nodes().size(); ++i) {
    m0 += psi.z_weights()[i];
    m1 += psi.z_weights()[i] * psi.z_nodes()[i];
  }
  EXPECT_NEAR(m0, 1.0, 1e-14);
  EXPECT_NEAR(m1, 0.0, 1e-15);
}

TEST(PsiDelta, RowMassIsOne) {
  for (double delta : {0.3, 0.15, 0.075}) {
    for (double x : {0.01, 0.1, 0.3, 0.5, 0.77, 0.999}) {
      const double r = 0.9 * delta * eta(unit, x);
      const double m = gauss_kronrod<double, 61>::integrate([&](double y) { return psi_delta(x, y, delta, unit); },
                                                             x - r, x + r, 20, 1e-14);
      EXPECT_NEAR(m, 1.0, 1e-8) << "delta=" << delta << " x=" << x;
    }
  }
}

TEST(PsiDelta, SupportAndAsymmetry) {
  const double delta = 0.2, x = 0.3;
  const double r = delta * eta(unit, x);
  EXPECT_EQ(psi_delta(x, x + 0.9 * r, delta, unit), 0.0);
  EXPECT_EQ(psi_delta(x, x - 0.95 * r, delta, unit), 0.0);
  const double y = x + 0.3 * r;
  EXPECT_GT(std::abs(psi_delta(x, y, delta, unit) - psi_delta(y, x, delta, unit)), 1e-3);
}

TEST(PsiDelta, HorizonChecked) {
  EXPECT_THROW(psi_delta(0.5, 0.5, 0.4, unit), ParameterError);
  EXPECT_THROW(conv_Kdelta(constant_function(1.0), 0.0, unit), ParameterError);
}

TEST(Kdelta, ReproducesConstantsAndAffine) {
  for (double delta : {0.3, 0.1, 0.01}) {
    const auto kc = conv_Kdelta(constant_function(2.5), delta, unit);
    const auto ka = conv_Kdelta(affine_function(-0.4, 3.0), delta, unit);
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      EXPECT_NEAR(kc(x), 2.5, 1e-13);
      EXPECT_NEAR(ka(x), -0.4 + 3.0 * x, 1e-10);
    }
  }
}

TEST(Kdelta, AgreesWithKernelIntegral) {
  const auto u = make_function("sin_pi");
  const double delta = 0.2;
  const auto ku = conv_Kdelta(u, delta, unit);
  for (double x : {0.05, 0.3, 0.6, 0.9}) {
    const double r = 0.9 * delta * eta(unit, x);
    const double v = gauss_kronrod<double, 61>::integrate(
        [&](double y) { return psi_delta(x, y, delta, unit) * u(y); }, x - r, x + r, 20, 1e-14);
    EXPECT_NEAR(ku(x), v, 1e-9);
  }
}

TEST(Kdelta, BoundaryValuesAreTraces) {
  const auto u = make_function("exp");
  const auto ku = conv_Kdelta(u, 0.2, unit);
  EXPECT_EQ(ku(0.0), u(0.0));
  EXPECT_EQ(ku(1.0), u(1.0));
  EXPECT_NEAR(ku(1e-9), u(0.0), 1e-6);
  EXPECT_NEAR(ku(1.0 - 1e-9), u(1.0), 1e-6);
}

TEST(Kdelta, ContractionConstantStable) {
  const auto suite = smooth_suite();
  std::vector<double> c0;
  for (double delta : {0.3, 0.15, 0.075}) {
    double worst = 0.0;
    for (const auto& t : suite) {
      const auto ku = conv_Kdelta(t.f, delta, unit);
      worst = std::max(worst, l2_norm_on(ku.value, unit) / l2_norm_on(t.f.value, unit));
    }
    c0.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(c0.begin(), c0.end());
  EXPECT_LE(*hi / *lo, 3.0);
  EXPECT_LE(*hi, 1.1);
}

TEST(Kdelta, ErrorLawForSquare) {
  const auto u = make_function("quadratic");
  const auto mp = ModelParams::make(0.75, 2.0, 0.2);
  const auto ku = conv_Kdelta(u, 0.2, unit);
  const double err = l2_norm_on([&](double x) { return u(x) - ku(x); }, unit);
  const double semi = seminorm_frak(u, mp, unit);
  const double ratio = err / (0.2 * semi);
  EXPECT_GT(err, 0.0);
  EXPECT_LT(ratio, 1.0);
  // the constant found at delta = 0.2 still bounds the error at smaller horizons
  for (double d : {0.1, 0.05, 0.025}) {
    const auto k2 = conv_Kdelta(u, d, unit);
    const double err2 = l2_norm_on([&](double x) { return u(x) - k2(x); }, unit);
    EXPECT_LE(err2, ratio * d * seminorm_frak(u, ModelParams::make(0.75, 2.0, d), unit)) << d;
  }
}

TEST(PsiMassTranspose, UniformlyBounded) {
  for (double delta : {0.3, 0.15, 0.075}) {
    double mx = 0.0;
    for (int i = 1; i < 100; ++i) mx = std::max(mx, psi_delta_mass_transpose(i / 100.0, delta, unit));
    EXPECT_LT(mx, 1.05) << delta;
    // Hoelder against a bounded u
    const auto u = make_function("cos_pi");
    const double x = 0.2;
    const double r = 0.9 * delta;  // covers every y whose window reaches x
    const double v = gauss_kronrod<double, 61>::integrate(
        [&](double y) { return y > 0.0 && y < 1.0 ? psi_delta(y, x, delta, unit) * u(y) : 0.0; },
        std::max(1e-12, x - r), std::min(1.0 - 1e-12, x + r), 20, 1e-12);
    EXPECT_LE(std::abs(v), mx * 1.0 + 1e-12);
  }
}

TEST(PsiMassTranspose, TendsToOneAwayFromKinks) {
  for (double x : {0.05, 0.1, 0.25}) {
    double prev = 1.0;
    for (double delta : {0.3, 0.15, 0.075}) {
      const double dev = std::abs(psi_delta_mass_transpose(x, delta, unit) - 1.0);
      EXPECT_LE(dev, 0.2 * delta * delta) << x << " " << delta;
      EXPECT_LT(dev, prev);
      prev = dev;
    }
  }
  // the kink of sigma at the midpoint costs O(delta)
  EXPECT_GT(psi_delta_mass_transpose(0.5, 0.075, unit), 0.95);
}
