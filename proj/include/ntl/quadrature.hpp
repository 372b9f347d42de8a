#pragma once

// One-dimensional quadrature building blocks: Gauss-Legendre and Gauss-Jacobi
// rules, composite rules with geometric grading, and an integrator for
// integrands carrying an algebraic endpoint singularity t^gamma.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "ntl/error.hpp"

namespace ntl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  double midpoint() const noexcept { return 0.5 * (lo + hi); }
  bool contains_closed(double x) const noexcept { return x >= lo && x <= hi; }
  bool contains_open(double x) const noexcept { return x > lo && x < hi; }
};

/// Nodes and weights of a rule on the reference interval [0, 1].
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// A weighted point of a composite rule on a physical interval.
struct QuadPoint {
  double x;
  double w;
};

namespace detail {

inline QuadRule compute_gauss_legendre(int n) {
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) {
      p1 = x;
      p0 = 1.0;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1], ascending order
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1,1], mapped to
// t^b on [0,1].
inline QuadRule compute_gauss_jacobi_left(int n, double b) {
  const double a = 0.0;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  if (n == 1) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = diag(0);
    eig.compute(m);
  } else {
    eig.computeFromTridiagonal(diag, sub.head(n - 1));
  }
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(2.0, -b - 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (x + 1.0);
    rule.weights[i] = scale * mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule with n points on [0,1]; cached per n.
inline const QuadRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Gauss rule for the weight t^gamma on [0,1] (gamma > -1): sum w_i g(t_i)
/// approximates the integral of t^gamma g(t). Cached per (n, gamma).
inline const QuadRule& gauss_jacobi_left(int n, double gamma) {
  if (!(gamma > -1.0)) throw ParameterError("gauss_jacobi_left: exponent must exceed -1");
  static std::mutex mutex;
  static std::map<std::pair<int, double>, QuadRule> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(n, gamma);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, detail::compute_gauss_jacobi_left(n, gamma)).first;
  return it->second;
}

/// Append the rule mapped onto [lo, hi] to `out`.
inline void append_mapped(const QuadRule& rule, double lo, double hi, std::vector<QuadPoint>& out) {
  const double h = hi - lo;
  for (std::size_t i = 0; i < rule.size(); ++i) out.push_back({lo + h * rule.nodes[i], h * rule.weights[i]});
}

/// Panel boundaries of a geometric grading on [lo, hi] toward either end
/// (ratio 1/2). Returned ascending, including lo and hi.
inline std::vector<double> graded_breaks(double lo, double hi, bool toward_lo, bool toward_hi, int levels) {
  std::vector<double> breaks;
  if (!(hi > lo)) return {lo, hi};
  if (toward_lo && toward_hi) {
    const double mid = 0.5 * (lo + hi);
    auto left = graded_breaks(lo, mid, true, false, levels);
    auto right = graded_breaks(mid, hi, false, true, levels);
    left.insert(left.end(), right.begin() + 1, right.end());
    return left;
  }
  const double h = hi - lo;
  breaks.push_back(lo);
  if (toward_lo) {
    for (int k = levels; k >= 1; --k) breaks.push_back(lo + h * std::ldexp(1.0, -k));
  } else if (toward_hi) {
    for (int k = 1; k <= levels; ++k) breaks.push_back(hi - h * std::ldexp(1.0, -k));
    std::sort(breaks.begin(), breaks.end());
  }
  breaks.push_back(hi);
  return breaks;
}

/// Composite Gauss-Legendre over consecutive panels.
inline std::vector<QuadPoint> composite_rule(const std::vector<double>& breaks, int order) {
  std::vector<QuadPoint> pts;
  const auto& gl = gauss_legendre(order);
  pts.reserve((breaks.size() - 1) * gl.size());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) append_mapped(gl, breaks[i], breaks[i + 1], pts);
  return pts;
}

/// Rule on [lo, hi] for integrands of the form dist(x, end)^gamma * smooth(x)
/// where `end` is lo (at_lo) or hi. Geometric grading toward the end; the
/// innermost panel uses Gauss-Jacobi, with the weight folded back so callers
/// evaluate the full integrand at the returned points.
inline std::vector<QuadPoint> endpoint_singular_rule(double lo, double hi, bool at_lo, double gamma, int levels,
                                                     int order) {
  std::vector<QuadPoint> pts;
  if (!(hi > lo)) return pts;
  const double h = hi - lo;
  const double inner = h * std::ldexp(1.0, -levels);
  const auto& gj = gauss_jacobi_left(order, gamma);
  const auto& gl = gauss_legendre(order);
  // innermost: integral_0^inner t^g f(t) dt = inner^{g+1} sum w_i f(inner t_i)
  const double scale = std::pow(inner, gamma + 1.0);
  for (std::size_t i = 0; i < gj.size(); ++i) {
    const double t = inner * gj.nodes[i];
    const double x = at_lo ? lo + t : hi - t;
    pts.push_back({x, scale * gj.weights[i] / std::pow(t, gamma)});
  }
  for (int k = levels; k >= 1; --k) {
    const double t0 = h * std::ldexp(1.0, -k);
    const double t1 = h * std::ldexp(1.0, -k + 1);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double t = t0 + (t1 - t0) * gl.nodes[i];
      pts.push_back({at_lo ? lo + t : hi - t, (t1 - t0) * gl.weights[i]});
    }
  }
  return pts;
}

/// Integral over [0, T] of t^gamma g(t), g smooth on [0, T].
template <class G>
double integrate_power_singular(G&& g, double gamma, double T, int levels = 6, int order = 8) {
  if (!(T > 0.0)) return 0.0;
  double sum = 0.0;
  const double inner = T * std::ldexp(1.0, -levels);
  const auto& gj = gauss_jacobi_left(order, gamma);
  const double scale = std::pow(inner, gamma + 1.0);
  for (std::size_t i = 0; i < gj.size(); ++i) sum += scale * gj.weights[i] * g(inner * gj.nodes[i]);
  const auto& gl = gauss_legendre(order);
  for (int k = levels; k >= 1; --k) {
    const double t0 = T * std::ldexp(1.0, -k);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double t = t0 + t0 * gl.nodes[i];
      sum += t0 * gl.weights[i] * std::pow(t, gamma) * g(t);
    }
  }
  return sum;
}

template <class F>
double integrate(F&& f, const std::vector<QuadPoint>& rule) {
  double sum = 0.0;
  for (const auto& q : rule) sum += q.w * f(q.x);
  return sum;
}

}  // namespace ntl
