#pragma once

// Traces, transmission, boundary-data extension, Poincare and Hardy constants.

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "ntl/energies.hpp"
#include "ntl/error.hpp"
#include "ntl/field.hpp"
#include "ntl/geometry.hpp"
#include "ntl/kernels.hpp"
#include "ntl/linalg.hpp"
#include "ntl/quadrature.hpp"

namespace ntl {

/// g0 on the interface, g1 at the outer end of Omega_1 (x = a), g2 at the
/// outer end of Omega_2 (x = b).
struct BoundaryData {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;

  bool homogeneous() const noexcept { return g0 == 0.0 && g1 == 0.0 && g2 == 0.0; }
  double norm() const noexcept { return std::sqrt(g0 * g0 + g1 * g1 + g2 * g2); }
  BoundaryData scaled(double k) const noexcept { return {k * g0, k * g1, k * g2}; }
};

struct TracePair {
  double left = 0.0;
  double right = 0.0;
};

inline void require_trace_regime(const ModelParams& mp) {
  if (!(mp.s * mp.p > 1.0)) throw ParameterError("sp>1 required");
}

/// Endpoint values of one component.
inline TracePair trace(const FieldPair& u, Part part, const ModelParams& mp) {
  require_trace_regime(mp);
  const int n = u.mesh().elements(part);
  return {u.nodal(part, 0), u.nodal(part, n)};
}

inline TracePair trace(const ScalarFunction& u, const Interval& d, const ModelParams& mp) {
  require_trace_regime(mp);
  return {u(d.lo), u(d.hi)};
}

/// |T1 u1(xi) - T2 u2(xi)|; zero by construction with a shared interface.
inline double transmission_residual(const FieldPair& u) {
  return std::abs(u.nodal(Part::one, u.mesh().n1) - u.nodal(Part::two, 0));
}

enum class InterfaceMode {
  hard,     // T1 u1 - T2 u2 = g0 imposed exactly
  penalty,  // both interface values free
  clamped,  // interface value fixed to g0 on both sides (extension problem)
};

/// Parametrization of the admissible set: Dirichlet values g1, g2 and the
/// interface condition selected by `mode`. A hard constraint with g0 = 0 uses
/// the shared layout; otherwise the interface is stored per side.
inline ReducedSpace make_reduced_space(const Mesh& mesh, const BoundaryData& g, InterfaceMode mode) {
  const bool shared = (mode == InterfaceMode::hard && g.g0 == 0.0) || mode == InterfaceMode::clamped;
  ReducedSpace rs;
  rs.layout = DofLayout{mesh.n1, mesh.n2, shared};
  const auto& L = rs.layout;
  rs.offset = Eigen::VectorXd::Zero(L.size());
  rs.offset[L.first_dirichlet()] = g.g1;
  rs.offset[L.last_dirichlet()] = g.g2;
  for (int i = 1; i < mesh.n1; ++i) rs.targets.push_back({L.index(Part::one, i)});
  const int i1 = L.interface_dof(Part::one);
  const int i2 = L.interface_dof(Part::two);
  switch (mode) {
    case InterfaceMode::clamped:
      rs.offset[i1] = g.g0;
      break;
    case InterfaceMode::hard:
      if (shared) {
        rs.targets.push_back({i1});
      } else {
        rs.targets.push_back({i1, i2});
        rs.offset[i2] = -g.g0;
      }
      break;
    case InterfaceMode::penalty:
      rs.targets.push_back({i1});
      rs.targets.push_back({i2});
      break;
  }
  for (int i = 1; i < mesh.n2; ++i) rs.targets.push_back({L.index(Part::two, i)});
  return rs;
}

/// Consistent P1 mass matrix over all nodal unknowns of the layout.
inline Eigen::MatrixXd mass_matrix(const Mesh& mesh, const DofLayout& layout) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(layout.size(), layout.size());
  for (Part P : {Part::one, Part::two}) {
    for (int e = 0; e < mesh.elements(P); ++e) {
      const double h = mesh.h(P, e);
      const int i = layout.index(P, e);
      const int j = layout.index(P, e + 1);
      M(i, i) += h / 3.0;
      M(j, j) += h / 3.0;
      M(i, j) += h / 6.0;
      M(j, i) += h / 6.0;
    }
  }
  return M;
}

/// Minimal-energy (zero load) field with Dirichlet values g1, g2 and interface
/// value g0 on both sides.
inline FieldPair extend_boundary_data(const BoundaryData& g, const ModelParams& mp, const CoefficientField& coeffs,
                                      const Mesh& mesh, QuadratureOptions opts = {}) {
  if (mp.p != 2.0) throw ModeError("extend_boundary_data requires p = 2");
  require_trace_regime(mp);
  const auto rs = make_reduced_space(mesh, g, InterfaceMode::clamped);
  FieldPair out(mesh, rs.layout.shared);
  if (g.homogeneous()) return out;
  const auto pot = Potential::power(2.0);
  const EnergyForm form(mp, coeffs, mesh, rs.layout, pot, opts);
  const Eigen::MatrixXd A = quadratic_matrix(form, pot);
  const Eigen::MatrixXd Ar = rs.restrict_matrix(A);
  const Eigen::VectorXd br = -rs.restrict_vector(A * rs.offset);
  LinearSolveInfo info;
  const Eigen::VectorXd w = solve_spd(0.5 * (Ar + Ar.transpose()), br, info);
  out.values() = rs.lift(w);
  return out;
}

/// ||(u1, u2)||_{L^p} / (p (E1 + E2))^{1/p}; zero for the zero field.
inline double poincare_ratio(const FieldPair& u, const EnergyForm& form, const Potential& pot) {
  const double p = form.params().p;
  const double num = lp_norm(u, p);
  if (num == 0.0) return 0.0;
  const auto e = energy_eval(u, form, pot, Eigen::VectorXd::Zero(u.layout().size()));
  const double den = std::pow(p * (e.part1_energy + e.part2_energy), 1.0 / p);
  if (!(den > 0.0)) throw SolverError("poincare_ratio: zero energy on a nonzero admissible field");
  return num / den;
}

/// Discrete Poincare constant sup ||u||_{L^2} / (2E(u))^{1/2} over fields with
/// homogeneous Dirichlet data and shared interface: 1/sqrt(lambda_min(A, M)).
inline double poincare_constant_p2(const ModelParams& mp, const CoefficientField& coeffs, const Mesh& mesh,
                                   QuadratureOptions opts = {}) {
  if (mp.p != 2.0) throw ModeError("poincare_constant_p2 requires p = 2");
  const auto rs = make_reduced_space(mesh, {}, InterfaceMode::hard);
  const auto pot = Potential::power(2.0);
  const EnergyForm form(mp, coeffs, mesh, rs.layout, pot, opts);
  Eigen::MatrixXd A = rs.restrict_matrix(quadratic_matrix(form, pot));
  A = 0.5 * (A + A.transpose()).eval();
  const Eigen::MatrixXd M = rs.restrict_matrix(mass_matrix(mesh, rs.layout));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("poincare_constant_p2: eigensolver failed");
  const double lmin = es.eigenvalues()[0];
  if (!(lmin > 0.0)) throw SolverError("poincare_constant_p2: energy form not positive definite");
  return 1.0 / std::sqrt(lmin);
}

/// D_{s,p} = 2 int_0^1 |1 - r^{(sp-1)/p}|^p / (1 - r)^{1+sp} dr.
inline double hardy_constant(double s, double p) {
  if (!(s * p > 1.0)) throw ParameterError("sp>1 required");
  if (!(s < 1.0)) throw ParameterError("s < 1 required");
  const double a = (s * p - 1.0) / p;
  // f(t) with t = 1 - r; 1 - r^a = -expm1(a log1p(-t))
  auto f = [&](double t) {
    const double num = -std::expm1(a * std::log1p(-t));
    return std::pow(std::abs(num), p) / std::pow(t, 1.0 + s * p);
  };
  // t -> 0 (r -> 1): f ~ a^p t^{p-1-sp}; t -> 1 (r -> 0): r^a has an algebraic
  // singularity, handled by geometric grading toward r = 0
  const double gamma = p - 1.0 - s * p;
  double sum = 0.0;
  for (const auto& q : endpoint_singular_rule(0.0, 0.5, true, gamma, 40, 10)) sum += q.w * f(q.x);
  for (const auto& q : composite_rule(graded_breaks(0.5, 1.0, false, true, 60), 10)) sum += q.w * f(q.x);
  return 2.0 * sum;
}

/// ((sp-1)/p)^p / kappa_{1,s,p}, the lower bound on D_{s,p}.
inline double hardy_lower_bound(double s, double p) {
  if (!(s * p > 1.0)) throw ParameterError("sp>1 required");
  return std::pow((s * p - 1.0) / p, p) / kappa_dsp(1, s, p);
}

}  // namespace ntl
