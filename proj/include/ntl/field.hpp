#pragma once

// Continuous piecewise-linear field pairs (u1, u2) on a partitioned mesh.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ntl/error.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"
#include "ntl/quadrature.hpp"

namespace ntl {

/// Global numbering of nodal unknowns. With a shared interface the node at xi
/// is a single unknown used by both parts (hard transmission constraint);
/// otherwise part 2 gets its own copy (penalty mode).
struct DofLayout {
  int n1 = 0;
  int n2 = 0;
  bool shared = true;

  int size() const noexcept { return n1 + n2 + (shared ? 1 : 2); }
  int index(Part p, int local) const noexcept {
    if (p == Part::one) return local;
    return shared ? n1 + local : n1 + 1 + local;
  }
  int first_dirichlet() const noexcept { return 0; }
  int last_dirichlet() const noexcept { return size() - 1; }
  int interface_dof(Part p) const noexcept { return index(p, p == Part::one ? n1 : 0); }
};

/// Sparse linear functional on nodal values (at most four entries).
struct Stencil {
  std::array<int, 4> idx{};
  std::array<double, 4> c{};
  int n = 0;

  void add(int i, double v) noexcept {
    idx[n] = i;
    c[n] = v;
    ++n;
  }
  double dot(const Eigen::VectorXd& u) const noexcept {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += c[k] * u[idx[k]];
    return s;
  }
};

class FieldPair {
 public:
  FieldPair() = default;

  FieldPair(Mesh mesh, bool shared_interface = true)
      : mesh_(std::move(mesh)), layout_{mesh_.n1, mesh_.n2, shared_interface} {
    values_ = Eigen::VectorXd::Zero(layout_.size());
  }

  /// Nodal interpolation of (f1, f2). In shared mode the interface value is
  /// taken from f1.
  static FieldPair interpolate(const Mesh& mesh, const ScalarFunction& f1, const ScalarFunction& f2,
                               bool shared_interface = true) {
    FieldPair fp(mesh, shared_interface);
    for (int i = 0; i <= mesh.n2; ++i) fp.values_[fp.layout_.index(Part::two, i)] = f2(mesh.x(Part::two, i));
    for (int i = 0; i <= mesh.n1; ++i) fp.values_[fp.layout_.index(Part::one, i)] = f1(mesh.x(Part::one, i));
    return fp;
  }

  const Mesh& mesh() const noexcept { return mesh_; }
  const DofLayout& layout() const noexcept { return layout_; }
  bool shared_interface() const noexcept { return layout_.shared; }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double nodal(Part p, int i) const { return values_[layout_.index(p, i)]; }
  double& nodal(Part p, int i) { return values_[layout_.index(p, i)]; }

  std::vector<double> u1() const { return part_values(Part::one); }
  std::vector<double> u2() const { return part_values(Part::two); }

  /// Element of part p containing x (closed on the left, last element closed).
  int element(Part p, double x) const {
    const int n = mesh_.elements(p);
    const auto first = mesh_.nodes.begin() + mesh_.node(p, 0);
    const auto last = first + n + 1;
    auto it = std::upper_bound(first, last, x);
    const int e = static_cast<int>(it - first) - 1;
    return std::clamp(e, 0, n - 1);
  }

  double eval(Part p, double x) const {
    const int e = element(p, x);
    const double x0 = mesh_.x(p, e);
    const double t = (x - x0) / mesh_.h(p, e);
    return (1.0 - t) * nodal(p, e) + t * nodal(p, e + 1);
  }

  double slope(Part p, int e) const { return (nodal(p, e + 1) - nodal(p, e)) / mesh_.h(p, e); }

  /// Callable view of one component.
  ScalarFunction component(Part p) const {
    FieldPair copy = *this;
    auto f = [copy, p](double x) { return copy.eval(p, x); };
    auto df = [copy, p](double x) { return copy.slope(p, copy.element(p, x)); };
    return {f, df};
  }

 private:
  std::vector<double> part_values(Part p) const {
    std::vector<double> v(mesh_.elements(p) + 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = nodal(p, static_cast<int>(i));
    return v;
  }

  Mesh mesh_;
  DofLayout layout_;
  Eigen::VectorXd values_;
};

/// Stencil of the nodal basis evaluated at x in element e of part p.
inline Stencil basis_at(const Mesh& mesh, const DofLayout& layout, Part p, int e, double x, double scale = 1.0) {
  Stencil s;
  const double t = (x - mesh.x(p, e)) / mesh.h(p, e);
  s.add(layout.index(p, e), scale * (1.0 - t));
  s.add(layout.index(p, e + 1), scale * t);
  return s;
}

/// L^p norm of f on an interval, split at the given breakpoints.
template <class F>
double lp_norm(F&& f, const std::vector<double>& breaks, double p, int order = 8) {
  double sum = 0.0;
  for (const auto& q : composite_rule(breaks, order)) sum += q.w * std::pow(std::abs(f(q.x)), p);
  return std::pow(sum, 1.0 / p);
}

/// (||u1 - v1||_p^p + ||u2 - v2||_p^p)^{1/p} for fields on the same mesh;
/// either argument may be a pair of callables.
inline double lp_distance(const ScalarFunction& u1, const ScalarFunction& u2, const ScalarFunction& v1,
                          const ScalarFunction& v2, const Mesh& mesh, double p, int order = 8) {
  double sum = 0.0;
  for (Part part : {Part::one, Part::two}) {
    const auto& u = part == Part::one ? u1 : u2;
    const auto& v = part == Part::one ? v1 : v2;
    std::vector<double> breaks;
    for (int i = 0; i <= mesh.elements(part); ++i) breaks.push_back(mesh.x(part, i));
    for (const auto& q : composite_rule(breaks, order)) sum += q.w * std::pow(std::abs(u(q.x) - v(q.x)), p);
  }
  return std::pow(sum, 1.0 / p);
}

inline double lp_distance(const FieldPair& u, const FieldPair& v, double p) {
  return lp_distance(u.component(Part::one), u.component(Part::two), v.component(Part::one),
                     v.component(Part::two), u.mesh(), p);
}

inline double lp_distance(const FieldPair& u, const ScalarFunction& v1, const ScalarFunction& v2, double p) {
  return lp_distance(u.component(Part::one), u.component(Part::two), v1, v2, u.mesh(), p);
}

inline double lp_norm(const FieldPair& u, double p) {
  const auto zero = constant_function(0.0);
  return lp_distance(u, zero, zero, p);
}

}  // namespace ntl
