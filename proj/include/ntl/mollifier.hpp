#pragma once

// Radial bump mollifier, its boundary-localized dilation, and the
// boundary-localized convolution operator K_delta on a subinterval.

#include <cassert>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ntl/constants.hpp"
#include "ntl/error.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"
#include "ntl/quadrature.hpp"

namespace ntl {

class Mollifier {
 public:
  static constexpr double support_radius = 0.9;
  static constexpr double c_psi = 0.45;

  explicit Mollifier(int d = 1) : d_(d) {
    if (d < 1 || d > 3) throw ParameterError("Mollifier: d in {1,2,3}");
    // normalization: |S^{d-1}| * int_0^R r^{d-1} profile(r) dr (for d=1 the
    // sphere measure is 2, i.e. both half-lines)
    const auto rule = composite_rule(uniform_breaks(0.0, support_radius, 256), 16);
    double radial = 0.0;
    for (const auto& q : rule) radial += q.w * std::pow(q.x, d - 1) * profile(q.x);
    normalization_ = 1.0 / (sphere_measure(d) * radial);

    const auto& gl = gauss_legendre(32);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double z = -support_radius + 2.0 * support_radius * gl.nodes[i];
      z_nodes_.push_back(z);
      z_weights_.push_back(2.0 * support_radius * gl.weights[i] * (*this)(z));
    }
    // the fixed rule carries a ~1e-8 mass defect on this bump; rescale so that
    // constants (and, by symmetry of the nodes, affine maps) are reproduced
    double mass = 0.0;
    for (double w : z_weights_) mass += w;
    for (double& w : z_weights_) w /= mass;
  }

  int dim() const noexcept { return d_; }
  double normalization() const noexcept { return normalization_; }

  /// psi(r) = c exp(-1/(0.81 - r^2)) for |r| < 0.9, else 0.
  double operator()(double r) const noexcept { return normalization_ * profile(r); }

  /// Fixed rule in z on the support: nodes z_i and weights w_i psi(|z_i|).
  const std::vector<double>& z_nodes() const noexcept { return z_nodes_; }
  const std::vector<double>& z_weights() const noexcept { return z_weights_; }

 private:
  static double profile(double r) noexcept {
    const double q = support_radius * support_radius - r * r;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
  }

  static std::vector<double> uniform_breaks(double lo, double hi, int n) {
    std::vector<double> b(n + 1);
    for (int i = 0; i <= n; ++i) b[i] = lo + (hi - lo) * i / n;
    return b;
  }

  int d_;
  double normalization_ = 1.0;
  std::vector<double> z_nodes_;
  std::vector<double> z_weights_;
};

inline const Mollifier& default_mollifier() {
  static const Mollifier m(1);
  return m;
}

// delta_0 = 1/3 for eta = sigma (kappa0 = kappa1 = 1)
inline void check_horizon(double delta) {
  const double bound = 1.0 / 3.0;
  if (!(delta > 0.0 && delta < bound)) throw ParameterError("delta in (0, delta_0) required");
}

/// psi_delta(x, y) = (delta eta(x))^{-1} psi(|y - x| / (delta eta(x))).
inline double psi_delta(double x, double y, double delta, const Interval& d,
                        const Mollifier& psi = default_mollifier()) {
  check_horizon(delta);
  const double e = eta(d, x);
  if (!(e > 0.0)) throw DomainError("psi_delta: x on the boundary (use the convolution form)");
  const double r = delta * e;
  return psi(std::abs(y - x) / r) / r;
}

inline double psi_delta(double x, double y, double delta, const Domain& domain, Part part) {
  return psi_delta(x, y, delta, domain.part(part));
}

/// K_delta u as a callable: x -> int psi(|z|) u(x - delta eta(x) z) dz.
/// Boundary points return u(x), the continuous extension.
inline ScalarFunction conv_Kdelta(ScalarFunction u, double delta, const Interval& d,
                                  const Mollifier& psi = default_mollifier()) {
  check_horizon(delta);
  auto f = [u = std::move(u), delta, d, psi](double x) {
    const double r = delta * eta(d, x);
    if (r == 0.0) return u(x);
    double sum = 0.0;
    const auto& z = psi.z_nodes();
    const auto& w = psi.z_weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double y = x - r * z[i];
      assert(d.contains_closed(y));
      sum += w[i] * u(y);
    }
    return sum;
  };
  return {f, {}};
}

inline ScalarFunction conv_Kdelta(ScalarFunction u, double delta, const Domain& domain, Part part) {
  return conv_Kdelta(std::move(u), delta, domain.part(part));
}

/// Psi_delta(x) = int_D psi_delta(y, x) dy, the column mass of the
/// (non-symmetric) dilated kernel.
inline double psi_delta_mass_transpose(double x, double delta, const Interval& d,
                                       const Mollifier& psi = default_mollifier()) {
  check_horizon(delta);
  if (!d.contains_open(x)) throw DomainError("psi_delta_mass_transpose: x must be interior");
  const double R = Mollifier::support_radius * delta;
  // support in y: |x - y| < R sigma(y); g is monotone on each side of x
  auto g = [&](double y) { return std::abs(x - y) - R * sigma(d, y); };
  auto root = [&](double lo, double hi) {
    // g(lo) >= 0 >= g(hi) on the left branch, reversed on the right
    const bool dec = g(lo) > g(hi);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool pos = g(mid) > 0.0;
      if (pos == dec) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double yl = root(d.lo, x);
  const double yr = root(x, d.hi);
  std::vector<double> breaks{yl};
  const double mid = d.midpoint();
  if (mid > yl && mid < yr) breaks.push_back(mid);
  breaks.push_back(yr);
  std::vector<double> fine;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (int k = 0; k < 64; ++k) fine.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * k / 64.0);
  }
  fine.push_back(yr);
  const auto rule = composite_rule(fine, 8);
  double sum = 0.0;
  for (const auto& q : rule) {
    const double r = delta * eta(d, q.x);
    if (r > 0.0) sum += q.w * psi(std::abs(x - q.x) / r) / r;
  }
  return sum;
}

inline double psi_delta_mass_transpose(double x, double delta, const Domain& domain, Part part) {
  return psi_delta_mass_transpose(x, delta, domain.part(part));
}

}  // namespace ntl
