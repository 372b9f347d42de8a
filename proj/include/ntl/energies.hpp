#pragma once

// Seminorms and energies of the coupled transmission problem.
//
// Two evaluation paths share the same formulas:
//  * function handles (verification path): tensor Gauss rules on smooth
//    pieces, Gauss-Jacobi on the boundary-singular panels;
//  * piecewise-linear fields (solver path): every contribution is a "term"
//    w * rho(|g . u|) with g a sparse stencil on nodal values, so energy,
//    gradient, Hessian and the p = 2 matrix all come from one quadrature.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ntl/constants.hpp"
#include "ntl/error.hpp"
#include "ntl/field.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"
#include "ntl/kernels.hpp"
#include "ntl/quadrature.hpp"

namespace ntl {

/// Convex integrand profile rho with its first two derivatives on [0, inf).
struct Rho {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// Energy potentials rho1 (Omega_1) and rho2 (Omega_2) with
/// c1 r^p <= rho_i(r) <= c2 r^p. The default rho(r) = r^p recovers the
/// plain energy.
struct Potential {
  std::string name = "power";
  Rho rho1;
  Rho rho2;
  double c1 = 1.0;
  double c2 = 1.0;
  double p = 2.0;
  double scale1 = 1.0;  // rho_i = scale_i r^p when power_law
  double scale2 = 1.0;
  bool power_law = true;

  static Rho power_rho(double p, double c) {
    return {[p, c](double r) { return c * std::pow(r, p); },
            [p, c](double r) { return c * p * std::pow(r, p - 1.0); },
            [p, c](double r) { return c * p * (p - 1.0) * std::pow(r, p - 2.0); }};
  }

  static Potential power(double p) { return scaled_power(p, 1.0, 1.0); }

  /// rho_i(r) = c_i r^p.
  static Potential scaled_power(double p, double k1, double k2) {
    Potential pot;
    pot.name = (k1 == 1.0 && k2 == 1.0) ? "power" : "scaled_power";
    pot.p = p;
    pot.scale1 = k1;
    pot.scale2 = k2;
    pot.rho1 = power_rho(p, k1);
    pot.rho2 = power_rho(p, k2);
    pot.c1 = std::min(k1, k2);
    pot.c2 = std::max(k1, k2);
    return pot;
  }

  const Rho& rho(Part part) const noexcept { return part == Part::one ? rho1 : rho2; }
  double scale(Part part) const noexcept { return part == Part::one ? scale1 : scale2; }
  bool quadratic() const noexcept { return power_law && p == 2.0; }

  /// Checks the growth bounds at sampled r.
  bool satisfies_bounds(int samples = 50) const {
    for (int k = 1; k <= samples; ++k) {
      const double r = std::pow(10.0, -3.0 + 6.0 * k / samples);
      for (const Rho* rh : {&rho1, &rho2}) {
        const double v = rh->value(r);
        const double lo = c1 * std::pow(r, p);
        const double hi = c2 * std::pow(r, p);
        if (v < lo * (1 - 1e-12) || v > hi * (1 + 1e-12)) return false;
      }
    }
    return true;
  }
};

/// Loads f1 on Omega_1 and f2 on Omega_2.
struct LoadSpec {
  ScalarFunction f1 = constant_function(0.0);
  ScalarFunction f2 = constant_function(0.0);
};

struct EnergyBreakdown {
  double part1_energy = 0.0;
  double part2_energy = 0.0;
  double load_term = 0.0;
  double total = 0.0;

  static EnergyBreakdown make(double e1, double e2, double load) { return {e1, e2, load, e1 + e2 - load}; }
};

// ---------------------------------------------------------------------------
// Function-handle path
// ---------------------------------------------------------------------------

namespace detail {

constexpr int kOuterOrder = 8;
constexpr int kBoundaryLevels = 16;

/// Outer rule on D for integrands ~ sigma^gamma * smooth on each half. Each
/// half is cut into `pieces` panels; the boundary panel is graded.
inline std::vector<QuadPoint> half_split_rule(const Interval& d, double gamma, int levels = kBoundaryLevels,
                                              int pieces = 1) {
  const double m = d.midpoint();
  const double h = (m - d.lo) / pieces;
  auto pts = endpoint_singular_rule(d.lo, d.lo + h, true, gamma, levels, kOuterOrder);
  const auto& gl = gauss_legendre(kOuterOrder);
  for (int k = 1; k < pieces; ++k) append_mapped(gl, d.lo + k * h, d.lo + (k + 1) * h, pts);
  for (int k = 0; k + 1 < pieces; ++k) append_mapped(gl, m + k * h, m + (k + 1) * h, pts);
  const auto right = endpoint_singular_rule(d.hi - h, d.hi, false, gamma, levels, kOuterOrder);
  pts.insert(pts.end(), right.begin(), right.end());
  return pts;
}

inline double unit_weight(double) { return 1.0; }

}  // namespace detail

/// Refinement of the function-handle rules for oscillatory integrands:
/// `pieces` uniform outer panels per half of D and inner panels per side.
struct HandleQuadrature {
  int pieces = 1;
};

/// (1/p) int_D c(x) int_{B(x, delta sigma)} ... nonlocal part with profile rho,
/// evaluated for a callable u. With c = 1 and rho = r^p this is [u]^p / p.
inline double nonlocal_energy(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                              const std::function<double(double)>& coef, const Rho& rho,
                              HandleQuadrature hq = {}) {
  if (!(mp.delta > 0.0)) throw ModeError("nonlocal seminorm requires delta > 0 (use the weighted seminorm)");
  if (!(mp.delta < 1.0 / 3.0)) throw ParameterError("delta < 1/3 required");
  const double p = mp.p;
  const double gamma = p - mp.s * p;
  const double cbar = cbar_dp(mp.d, p);
  const auto outer = detail::half_split_rule(d, gamma, detail::kBoundaryLevels, hq.pieces);
  const auto& gl = gauss_legendre(12);
  double sum = 0.0;
  for (const auto& q : outer) {
    const double x = q.x;
    const double sx = sigma(d, x);
    const double r = mp.delta * sx;
    const double ux = u(x);
    double inner = 0.0;
    const double hr = r / hq.pieces;
    for (int side = -1; side <= 1; side += 2) {
      for (int k = 0; k < hq.pieces; ++k) {
        for (std::size_t i = 0; i < gl.size(); ++i) {
          const double y = x + side * hr * (k + gl.nodes[i]);
          inner += hr * gl.weights[i] * rho.value(std::abs(ux - u(y)) / r);
        }
      }
    }
    sum += q.w * coef(x) * std::pow(sx, gamma) / r * inner;
  }
  return cbar * sum / p;
}

/// p-th power of the heterogeneous-horizon seminorm on D.
inline double seminorm_frak_pow(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                                HandleQuadrature hq = {}) {
  return mp.p * nonlocal_energy(u, mp, d, detail::unit_weight, Potential::power_rho(mp.p, 1.0), hq);
}

inline double seminorm_frak(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                            HandleQuadrature hq = {}) {
  return std::pow(seminorm_frak_pow(u, mp, d, hq), 1.0 / mp.p);
}

inline double seminorm_frak(const ScalarFunction& u, const ModelParams& mp, const Domain& domain) {
  return seminorm_frak(u, mp, domain.omega1());
}

/// (kappa/p) int_D c(x) int_D rho(|u(x)-u(y)|/|x-y|) |x-y|^{p-1-sp} dy dx.
inline double fractional_energy(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                                const std::function<double(double)>& coef, const Rho& rho, int outer_levels = 24) {
  if (!(mp.s < 1.0)) throw ModeError("fractional seminorm requires s < 1 (use the local seminorm)");
  const double p = mp.p;
  const double gamma_in = p - 1.0 - mp.s * p;
  const double kappa = kappa_dsp(mp.d, mp.s, p);
  const auto outer = composite_rule(graded_breaks(d.lo, d.hi, true, true, outer_levels), detail::kOuterOrder);
  double sum = 0.0;
  for (const auto& q : outer) {
    const double x = q.x;
    const double ux = u(x);
    auto dq_left = [&](double t) { return rho.value(std::abs(ux - u(x - t)) / t); };
    auto dq_right = [&](double t) { return rho.value(std::abs(u(x + t) - ux) / t); };
    const double inner = integrate_power_singular(dq_left, gamma_in, x - d.lo, 8) +
                         integrate_power_singular(dq_right, gamma_in, d.hi - x, 8);
    sum += q.w * coef(x) * inner;
  }
  return kappa * sum / p;
}

/// p-th power of the regional fractional seminorm (kappa-normalized).
inline double seminorm_frac_pow(const ScalarFunction& u, const ModelParams& mp, const Interval& d) {
  return mp.p * fractional_energy(u, mp, d, detail::unit_weight, Potential::power_rho(mp.p, 1.0));
}

inline double seminorm_frac(const ScalarFunction& u, const ModelParams& mp, const Interval& d) {
  return std::pow(seminorm_frac_pow(u, mp, d), 1.0 / mp.p);
}

/// (1/p) int_D c(x) rho(|u'(x)|) sigma^{p-sp}; s = 1 gives the local energy.
inline double weighted_energy(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                              const std::function<double(double)>& coef, const Rho& rho, HandleQuadrature hq = {}) {
  const double p = mp.p;
  const double gamma = p - mp.s * p;
  const auto outer = detail::half_split_rule(d, gamma, 12, hq.pieces);
  double sum = 0.0;
  for (const auto& q : outer) {
    const double w = gamma == 0.0 ? 1.0 : std::pow(sigma(d, q.x), gamma);
    sum += q.w * coef(q.x) * w * rho.value(std::abs(u.slope(q.x)));
  }
  return sum / p;
}

/// Local energy (1/p) int_D c |u'|^p-type, no weight.
inline double local_energy(const ScalarFunction& u, double p, const Interval& d,
                           const std::function<double(double)>& coef, const Rho& rho) {
  std::vector<double> breaks;
  for (int k = 0; k <= 64; ++k) breaks.push_back(d.lo + d.length() * k / 64.0);
  double sum = 0.0;
  for (const auto& q : composite_rule(breaks, 8)) sum += q.w * coef(q.x) * rho.value(std::abs(u.slope(q.x)));
  return sum / p;
}

/// p-th power of the weighted seminorm int_D |u'|^p sigma^{p-sp}.
inline double seminorm_weighted_pow(const ScalarFunction& u, const ModelParams& mp, const Interval& d,
                                    HandleQuadrature hq = {}) {
  return mp.p * weighted_energy(u, mp, d, detail::unit_weight, Potential::power_rho(mp.p, 1.0), hq);
}

inline double seminorm_weighted(const ScalarFunction& u, const ModelParams& mp, const Interval& d) {
  return std::pow(seminorm_weighted_pow(u, mp, d), 1.0 / mp.p);
}

inline double seminorm_weighted(const ScalarFunction& u, const ModelParams& mp, const Domain& domain, Part part) {
  return seminorm_weighted(u, mp, domain.part(part));
}

/// Load pairing int_D f u over D, split into `pieces` panels.
inline double load_pairing(const ScalarFunction& f, const ScalarFunction& u, const Interval& d, int pieces = 64) {
  std::vector<double> breaks;
  for (int k = 0; k <= pieces; ++k) breaks.push_back(d.lo + d.length() * k / pieces);
  double sum = 0.0;
  for (const auto& q : composite_rule(breaks, 8)) sum += q.w * f(q.x) * u(q.x);
  return sum;
}

/// Energy breakdown of a pair of callables. The mode of `mp` selects which of
/// the four energies is assembled.
inline EnergyBreakdown energy_eval(const ScalarFunction& u1, const ScalarFunction& u2, const ModelParams& mp,
                                   const Domain& domain, const CoefficientField& coeffs,
                                   const Potential& pot, const LoadSpec& loads) {
  mp.check_ranges();
  if (mp.delta > 0.0 && !(mp.delta < delta_threshold(domain))) throw ParameterError("delta < 1/3 required");
  auto alpha = [&](double x) { return coeffs.at(Part::one, x); };
  auto beta = [&](double x) { return coeffs.at(Part::two, x); };
  const double e1 = mp.nonlocal_part1() ? nonlocal_energy(u1, mp, domain.omega1(), alpha, pot.rho1)
                                        : weighted_energy(u1, mp, domain.omega1(), alpha, pot.rho1);
  const double e2 = mp.fractional_part2() ? fractional_energy(u2, mp, domain.omega2(), beta, pot.rho2)
                                          : local_energy(u2, mp.p, domain.omega2(), beta, pot.rho2);
  const double load =
      load_pairing(loads.f1, u1, domain.omega1()) + load_pairing(loads.f2, u2, domain.omega2());
  return EnergyBreakdown::make(e1, e2, load);
}

// ---------------------------------------------------------------------------
// Piecewise-linear path
// ---------------------------------------------------------------------------

/// One quadrature contribution (1/p) w rho_part(|g . u|).
struct Term {
  Part part;
  double w;
  Stencil g;
};

struct QuadratureOptions {
  int outer_order = 8;        // Gauss points per smooth outer piece
  int boundary_order = 8;     // Gauss-Jacobi points on boundary pieces
  int frac_outer_levels = 6;  // grading of outer fractional panels toward element ends
  int inner_order_near = 8;
  int inner_order_far = 4;
  int max_inner_levels = 12;
};

/// Quadrature form of the energy on a mesh for fixed parameters and
/// coefficients. Enumerates terms on demand; nothing is stored.
class EnergyForm {
 public:
  EnergyForm(ModelParams mp, CoefficientField coeffs, Mesh mesh, DofLayout layout, const Potential& pot,
             QuadratureOptions opts = {})
      : mp_(mp), coeffs_(std::move(coeffs)), mesh_(std::move(mesh)), layout_(layout), opts_(opts) {
    mp_.check_ranges();
    quadratic_ = pot.quadratic();
    if (mp_.delta > 0.0 && !(mp_.delta < 1.0 / 3.0)) throw ParameterError("delta < 1/3 required");
  }

  const ModelParams& params() const noexcept { return mp_; }
  const Mesh& mesh() const noexcept { return mesh_; }
  const DofLayout& layout() const noexcept { return layout_; }

  template <class F>
  void visit(F&& f) const {
    visit_part1(f);
    visit_part2(f);
  }

  template <class F>
  void visit_part1(F&& f) const {
    if (mp_.nonlocal_part1()) {
      visit_nonlocal(f);
    } else {
      visit_weighted(f);
    }
  }

  template <class F>
  void visit_part2(F&& f) const {
    if (mp_.fractional_part2()) {
      visit_fractional(f);
    } else {
      visit_local(f);
    }
  }

 private:
  // nonlocal heterogeneous-horizon part on Omega_1
  template <class F>
  void visit_nonlocal(F& f) const {
    const Part P = Part::one;
    const int n = mesh_.n1;
    const double x0 = mesh_.x(P, 0);
    const double xn = mesh_.x(P, n);
    const Interval d{x0, xn};
    const double mid = d.midpoint();
    const double delta = mp_.delta;
    const double p = mp_.p;
    const double gamma = p - mp_.s * p;
    const double cbar = cbar_dp(mp_.d, p);

    // outer breakpoints: nodes, midpoint, and preimages of nodes under the
    // ball-edge maps x -> x +- delta sigma(x)
    std::vector<double> breaks;
    for (int i = 0; i <= n; ++i) breaks.push_back(mesh_.x(P, i));
    breaks.push_back(mid);
    for (int i = 1; i < n; ++i) {
      const double z = mesh_.x(P, i);
      const double cand[4] = {(z + delta * x0) / (1.0 + delta), (z - delta * xn) / (1.0 - delta),
                              (z - delta * x0) / (1.0 - delta), (z + delta * xn) / (1.0 + delta)};
      const bool left_half[4] = {true, false, true, false};
      for (int k = 0; k < 4; ++k) {
        const double c = cand[k];
        if (!(c > x0 && c < xn)) continue;
        if (left_half[k] ? c <= mid : c >= mid) breaks.push_back(c);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    const double tol = 1e-13 * d.length();
    std::vector<double> pts;
    for (double b : breaks) {
      if (pts.empty() || b - pts.back() > tol) pts.push_back(b);
    }
    pts.back() = xn;

    const auto& gl_outer = gauss_legendre(opts_.outer_order);
    const auto& gj = gauss_jacobi_left(opts_.boundary_order, gamma);
    const int inner_order = quadratic_ ? 2 : opts_.inner_order_near;
    const auto& gl_inner = gauss_legendre(inner_order);

    std::vector<QuadPoint> outer;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      outer.clear();
      const double lo = pts[k];
      const double hi = pts[k + 1];
      const double len = hi - lo;
      if (k == 0 || k + 2 == pts.size()) {
        // ball stays inside the boundary element; integrand ~ sigma^gamma
        const bool at_lo = (k == 0);
        for (std::size_t i = 0; i < gj.size(); ++i) {
          const double t = len * gj.nodes[i];
          const double x = at_lo ? lo + t : hi - t;
          outer.push_back({x, std::pow(len, gamma + 1.0) * gj.weights[i] / std::pow(t, gamma)});
        }
      } else {
        append_mapped(gl_outer, lo, hi, outer);
      }
      const double xm = 0.5 * (lo + hi);
      const int ex = element_of(P, xm);
      for (const auto& q : outer) {
        const double x = q.x;
        const double sx = std::min(x - x0, xn - x);
        const double r = delta * sx;
        const double base = cbar * coeffs_.at(P, x) * q.w * std::pow(sx, gamma) / r;
        const double inv_r = 1.0 / r;
        // inner pieces: [x - r, x] and [x, x + r], each split at nodes
        for (int side = -1; side <= 1; side += 2) {
          double a = x;
          int e = ex;
          const double end = x + side * r;
          while (true) {
            const double node = side > 0 ? mesh_.x(P, e + 1) : mesh_.x(P, e);
            const bool last = side > 0 ? end <= node : end >= node;
            const double b = last ? end : node;
            const double plen = std::abs(b - a);
            if (plen > 0.0) {
              for (std::size_t j = 0; j < gl_inner.size(); ++j) {
                const double y = a + (b - a) * gl_inner.nodes[j];
                Term term{P, base * plen * gl_inner.weights[j], {}};
                add_basis(term.g, P, ex, x, inv_r);
                add_basis(term.g, P, e, y, -inv_r);
                f(term);
              }
            }
            if (last) break;
            a = b;
            e += side;
            if (e < 0 || e >= n) break;
          }
        }
      }
    }
  }

  // weighted local part on Omega_1 (s = 1 gives the plain local energy)
  template <class F>
  void visit_weighted(F& f) const {
    const Part P = Part::one;
    const int n = mesh_.n1;
    const double x0 = mesh_.x(P, 0);
    const double xn = mesh_.x(P, n);
    const double mid = 0.5 * (x0 + xn);
    const double gamma = mp_.p - mp_.s * mp_.p;
    const auto& gl = gauss_legendre(opts_.outer_order);
    const auto& gj = gauss_jacobi_left(opts_.boundary_order, gamma);
    std::vector<QuadPoint> pts;
    for (int e = 0; e < n; ++e) {
      pts.clear();
      const double lo = mesh_.x(P, e);
      const double hi = mesh_.x(P, e + 1);
      const double h = hi - lo;
      if (gamma != 0.0 && (e == 0 || e == n - 1)) {
        const bool at_lo = (e == 0);
        for (std::size_t i = 0; i < gj.size(); ++i) {
          const double t = h * gj.nodes[i];
          pts.push_back({at_lo ? lo + t : hi - t, std::pow(h, gamma + 1.0) * gj.weights[i] / std::pow(t, gamma)});
        }
      } else if (mid > lo && mid < hi) {
        append_mapped(gl, lo, mid, pts);
        append_mapped(gl, mid, hi, pts);
      } else {
        append_mapped(gl, lo, hi, pts);
      }
      Term term{P, 0.0, {}};
      term.g.add(layout_.index(P, e), -1.0 / h);
      term.g.add(layout_.index(P, e + 1), 1.0 / h);
      double w = 0.0;
      for (const auto& q : pts) {
        const double sx = std::min(q.x - x0, xn - q.x);
        w += q.w * coeffs_.at(P, q.x) * (gamma == 0.0 ? 1.0 : std::pow(sx, gamma));
      }
      term.w = w;
      f(term);
    }
  }

  // regional fractional part on Omega_2
  template <class F>
  void visit_fractional(F& f) const {
    const Part P = Part::two;
    const int n = mesh_.n2;
    const double p = mp_.p;
    const double gp = p - mp_.s * p;        // exponent after integrating t^{p-1-sp}
    const double gin = p - 1.0 - mp_.s * p;  // inner kernel exponent
    const double kappa = kappa_dsp(mp_.d, mp_.s, p);
    const auto& gl_near = gauss_legendre(opts_.inner_order_near);
    const auto& gl_far = gauss_legendre(quadratic_ ? opts_.inner_order_far : opts_.inner_order_near);

    for (int ex = 0; ex < n; ++ex) {
      const double lo = mesh_.x(P, ex);
      const double hi = mesh_.x(P, ex + 1);
      const auto outer = composite_rule(graded_breaks(lo, hi, true, true, opts_.frac_outer_levels), opts_.outer_order);
      const double hx = hi - lo;
      for (const auto& q : outer) {
        const double x = q.x;
        const double base = kappa * coeffs_.at(P, x) * q.w;
        // same element: difference quotient equals the element slope
        {
          Term term{P, base * (std::pow(x - lo, gp) + std::pow(hi - x, gp)) / gp, {}};
          term.g.add(layout_.index(P, ex), -1.0 / hx);
          term.g.add(layout_.index(P, ex + 1), 1.0 / hx);
          f(term);
        }
        for (int ey = 0; ey < n; ++ey) {
          if (ey == ex) continue;
          const double ylo = mesh_.x(P, ey);
          const double yhi = mesh_.x(P, ey + 1);
          const double len = yhi - ylo;
          const bool right = ey > ex;
          const double near = right ? ylo - x : x - yhi;  // distance to the element
          auto emit = [&](double a, double b, const QuadRule& rule) {
            for (std::size_t j = 0; j < rule.size(); ++j) {
              const double y = a + (b - a) * rule.nodes[j];
              const double t = std::abs(x - y);
              Term term{P, base * (b - a) * rule.weights[j] * std::pow(t, gin), {}};
              add_basis(term.g, P, ex, x, 1.0 / t);
              add_basis(term.g, P, ey, y, -1.0 / t);
              f(term);
            }
          };
          if (near >= len) {
            emit(ylo, yhi, gl_far);
          } else {
            int levels = static_cast<int>(std::ceil(std::log2(len / std::max(near, 1e-300))));
            levels = std::clamp(levels, 1, opts_.max_inner_levels);
            const auto br = graded_breaks(ylo, yhi, right, !right, levels);
            for (std::size_t k = 0; k + 1 < br.size(); ++k) emit(br[k], br[k + 1], gl_near);
          }
        }
      }
    }
  }

  // local part on Omega_2
  template <class F>
  void visit_local(F& f) const {
    const Part P = Part::two;
    const int n = mesh_.n2;
    const auto& gl = gauss_legendre(opts_.outer_order);
    for (int e = 0; e < n; ++e) {
      const double lo = mesh_.x(P, e);
      const double hi = mesh_.x(P, e + 1);
      const double h = hi - lo;
      double w = 0.0;
      for (std::size_t i = 0; i < gl.size(); ++i) {
        const double x = lo + h * gl.nodes[i];
        w += h * gl.weights[i] * coeffs_.at(P, x);
      }
      Term term{P, w, {}};
      term.g.add(layout_.index(P, e), -1.0 / h);
      term.g.add(layout_.index(P, e + 1), 1.0 / h);
      f(term);
    }
  }

  int element_of(Part p, double x) const {
    const int n = mesh_.elements(p);
    const auto first = mesh_.nodes.begin() + mesh_.node(p, 0);
    auto it = std::upper_bound(first, first + n + 1, x);
    return std::clamp(static_cast<int>(it - first) - 1, 0, n - 1);
  }

  void add_basis(Stencil& g, Part p, int e, double x, double scale) const {
    const double t = (x - mesh_.x(p, e)) / mesh_.h(p, e);
    g.add(layout_.index(p, e), scale * (1.0 - t));
    g.add(layout_.index(p, e + 1), scale * t);
  }

  ModelParams mp_;
  CoefficientField coeffs_;
  Mesh mesh_;
  DofLayout layout_;
  QuadratureOptions opts_;
  bool quadratic_ = true;
};

/// Load vector b_i = int f phi_i over both parts.
inline Eigen::VectorXd load_vector(const Mesh& mesh, const DofLayout& layout, const LoadSpec& loads, int order = 8) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.size());
  const auto& gl = gauss_legendre(order);
  for (Part P : {Part::one, Part::two}) {
    const auto& f = P == Part::one ? loads.f1 : loads.f2;
    for (int e = 0; e < mesh.elements(P); ++e) {
      const double lo = mesh.x(P, e);
      const double h = mesh.h(P, e);
      for (std::size_t i = 0; i < gl.size(); ++i) {
        const double t = gl.nodes[i];
        const double fx = f(lo + h * t) * h * gl.weights[i];
        b[layout.index(P, e)] += fx * (1.0 - t);
        b[layout.index(P, e + 1)] += fx * t;
      }
    }
  }
  return b;
}

/// Energy breakdown of a nodal field.
inline EnergyBreakdown energy_eval(const FieldPair& u, const EnergyForm& form, const Potential& pot,
                                   const Eigen::VectorXd& load) {
  if (u.layout().size() != form.layout().size()) throw ModeError("field layout does not match the energy form");
  const double p = form.params().p;
  double e[2] = {0.0, 0.0};
  const auto& vals = u.values();
  if (pot.power_law) {
    form.visit([&](const Term& t) {
      const double r = std::abs(t.g.dot(vals));
      e[t.part == Part::one ? 0 : 1] += t.w * pot.scale(t.part) * std::pow(r, p);
    });
  } else {
    form.visit([&](const Term& t) { e[t.part == Part::one ? 0 : 1] += t.w * pot.rho(t.part).value(std::abs(t.g.dot(vals))); });
  }
  return EnergyBreakdown::make(e[0] / p, e[1] / p, load.dot(vals));
}

/// p-th power of the seminorm of one component of a nodal field (unit
/// coefficients): the nonlocal or weighted seminorm on Omega_1, the
/// fractional or local one on Omega_2, per the mode of the form.
inline double seminorm_pow(const FieldPair& u, const EnergyForm& form, Part part) {
  const double p = form.params().p;
  const auto& vals = u.values();
  double sum = 0.0;
  auto acc = [&](const Term& t) { sum += t.w * std::pow(std::abs(t.g.dot(vals)), p); };
  if (part == Part::one) {
    form.visit_part1(acc);
  } else {
    form.visit_part2(acc);
  }
  return sum;
}

/// Dense matrix A with sum over terms of w g g^T, so that for p = 2 and the
/// default potential the energy is 1/2 u^T A u - b^T u on all nodal unknowns.
inline Eigen::MatrixXd quadratic_matrix(const EnergyForm& form, const Potential& pot) {
  const int n = form.layout().size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  form.visit([&](const Term& t) {
    const double w = t.w * pot.scale(t.part);
    for (int i = 0; i < t.g.n; ++i) {
      const double wi = w * t.g.c[i];
      for (int j = 0; j < t.g.n; ++j) A(t.g.idx[i], t.g.idx[j]) += wi * t.g.c[j];
    }
  });
  return A;
}

/// Result of the p = 2 Galerkin assembly. `matrix` and `rhs` act on the free
/// unknowns listed in `free_dofs` (Dirichlet nodes eliminated, interface
/// shared or duplicated per the layout); the full versions are kept for lifting.
struct Assembly {
  Eigen::MatrixXd full_matrix;
  Eigen::VectorXd full_rhs;
  std::vector<int> free_dofs;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  DofLayout layout;
};

inline std::vector<int> free_dofs(const DofLayout& layout) {
  std::vector<int> f;
  for (int i = 0; i < layout.size(); ++i) {
    if (i != layout.first_dirichlet() && i != layout.last_dirichlet()) f.push_back(i);
  }
  return f;
}

inline Assembly assemble_p2(const ModelParams& mp, const CoefficientField& coeffs, const Mesh& mesh,
                            const LoadSpec& loads = {}, bool shared_interface = true, QuadratureOptions opts = {}) {
  if (mp.p != 2.0) throw ModeError("assemble_p2 requires p = 2");
  const DofLayout layout{mesh.n1, mesh.n2, shared_interface};
  const auto pot = Potential::power(2.0);
  EnergyForm form(mp, coeffs, mesh, layout, pot, opts);
  Assembly as;
  as.layout = layout;
  as.full_matrix = quadratic_matrix(form, pot);
  // symmetrize against accumulation round-off
  as.full_matrix = 0.5 * (as.full_matrix + as.full_matrix.transpose()).eval();
  as.full_rhs = load_vector(mesh, layout, loads);
  as.free_dofs = free_dofs(layout);
  const int nf = static_cast<int>(as.free_dofs.size());
  as.matrix.resize(nf, nf);
  as.rhs.resize(nf);
  for (int i = 0; i < nf; ++i) {
    as.rhs[i] = as.full_rhs[as.free_dofs[i]];
    for (int j = 0; j < nf; ++j) as.matrix(i, j) = as.full_matrix(as.free_dofs[i], as.free_dofs[j]);
  }
  return as;
}

}  // namespace ntl
