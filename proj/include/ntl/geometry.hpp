#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ntl/error.hpp"
#include "ntl/quadrature.hpp"

namespace ntl {

enum class Part { one = 1, two = 2 };

inline const char* to_string(Part part) noexcept { return part == Part::one ? "1" : "2"; }

/// Interval Omega = (a, b) split at the interface point xi into
/// Omega_1 = (a, xi) and Omega_2 = (xi, b). kappa0 and kappa1 are the
/// comparability constants of the localization function.
class Domain {
 public:
  Domain() : Domain(-1.0, 0.0, 1.0) {}

  Domain(double a, double xi, double b, double kappa0 = 1.0, double kappa1 = 1.0)
      : a_(a), xi_(xi), b_(b), kappa0_(kappa0), kappa1_(kappa1) {
    if (!(a < xi && xi < b)) throw ParameterError("domain requires a < xi < b");
    if (!(kappa0 >= 1.0)) throw ParameterError("kappa0 >= 1 required");
    if (!(kappa1 > 0.0)) throw ParameterError("kappa1 > 0 required");
  }

  int dim() const noexcept { return 1; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double interface_point() const noexcept { return xi_; }
  double kappa0() const noexcept { return kappa0_; }
  double kappa1() const noexcept { return kappa1_; }

  Interval omega() const noexcept { return {a_, b_}; }
  Interval omega1() const noexcept { return {a_, xi_}; }
  Interval omega2() const noexcept { return {xi_, b_}; }
  Interval part(Part p) const noexcept { return p == Part::one ? omega1() : omega2(); }

  /// Part whose closure contains x; the interface point is reported as part 1.
  Part locate(double x) const {
    if (x < a_ || x > b_) throw DomainError("point outside the closed domain");
    return x <= xi_ ? Part::one : Part::two;
  }

 private:
  double a_, xi_, b_;
  double kappa0_, kappa1_;
};

/// Distance from x to the boundary of the interval d.
inline double sigma(const Interval& d, double x) {
  if (!d.contains_closed(x)) throw DomainError("sigma: point outside the subdomain closure");
  return std::min(x - d.lo, d.hi - x);
}

inline double sigma(const Domain& domain, Part part, double x) { return sigma(domain.part(part), x); }

/// Generalized distance function. The 1D build uses eta = sigma (kappa0 = 1).
inline double eta(const Interval& d, double x) { return sigma(d, x); }

inline double eta(const Domain& domain, Part part, double x) { return sigma(domain.part(part), x); }

/// Admissible horizon bound (1/3) min(1/kappa0, 1/kappa1).
inline double delta_threshold(const Domain& domain) noexcept {
  return std::min(1.0 / domain.kappa0(), 1.0 / domain.kappa1()) / 3.0;
}

enum class NodeTag { interior1, interior2, interface, dirichlet };

/// Uniform nodal mesh on each side of the interface. Node `interface_node`
/// sits exactly at xi; nodes [0, interface_node] cover Omega_1 and
/// [interface_node, size-1] cover Omega_2.
struct Mesh {
  std::vector<double> nodes;
  std::vector<NodeTag> tags;
  int n1 = 0;  // elements in Omega_1
  int n2 = 0;  // elements in Omega_2

  std::size_t size() const noexcept { return nodes.size(); }
  int interface_node() const noexcept { return n1; }
  int elements(Part p) const noexcept { return p == Part::one ? n1 : n2; }
  /// Global node index of local node i of a part.
  int node(Part p, int i) const noexcept { return p == Part::one ? i : n1 + i; }
  double x(Part p, int i) const noexcept { return nodes[node(p, i)]; }
  double h(Part p, int e) const noexcept { return x(p, e + 1) - x(p, e); }
};

inline Mesh make_mesh(const Domain& domain, int n_per_side) {
  if (n_per_side < 2) throw ParameterError("make_mesh: n_per_side >= 2 required");
  Mesh mesh;
  mesh.n1 = n_per_side;
  mesh.n2 = n_per_side;
  const int total = 2 * n_per_side + 1;
  mesh.nodes.resize(total);
  mesh.tags.resize(total);
  const double a = domain.a();
  const double xi = domain.interface_point();
  const double b = domain.b();
  for (int i = 0; i <= n_per_side; ++i) {
    // interpolate from both ends so that a, xi, b are hit exactly
    const double t = static_cast<double>(i) / n_per_side;
    mesh.nodes[i] = (i == n_per_side) ? xi : a + t * (xi - a);
    mesh.nodes[n_per_side + i] = (i == n_per_side) ? b : (i == 0 ? xi : xi + t * (b - xi));
  }
  for (int i = 0; i < total; ++i) {
    if (i == 0 || i == total - 1) {
      mesh.tags[i] = NodeTag::dirichlet;
    } else if (i == n_per_side) {
      mesh.tags[i] = NodeTag::interface;
    } else {
      mesh.tags[i] = i < n_per_side ? NodeTag::interior1 : NodeTag::interior2;
    }
  }
  return mesh;
}

}  // namespace ntl
