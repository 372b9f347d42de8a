#pragma once

// Discrete minimization of the coupled energy in all four modes, with the
// transmission condition imposed exactly (shared or tied interface unknowns)
// or through the penalty eps^{-2} |T1 u1 - T2 u2 - g0|^p.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "ntl/energies.hpp"
#include "ntl/error.hpp"
#include "ntl/field.hpp"
#include "ntl/linalg.hpp"
#include "ntl/spaces.hpp"

namespace ntl {

struct SolverOptions {
  double linear_tol = 1e-10;  // CG relative residual
  int direct_limit = 512;     // Cholesky up to this many free unknowns
  double grad_tol = 1e-8;     // general p: gradient max-norm
  int max_iter = 100000;
  double armijo = 1e-4;
  double shrink = 0.5;
  double min_step = 1e-20;
  QuadratureOptions quad{};
};

struct SolveReport {
  FieldPair pair;
  EnergyBreakdown breakdown;
  double penalty_term = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double wall_time = 0.0;  // seconds; not part of any serialized report
  std::string method;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PenaltySpec {
  bool active = false;
  double eps = 1.0;
  double g0 = 0.0;
};

/// J(u) = sum_terms (1/p) w rho(|g.u|) - b.u [+ eps^{-2} |u1(xi) - u2(xi) - g0|^p]
/// on the full nodal vector, with derivatives.
class DiscreteFunctional {
 public:
  DiscreteFunctional(const EnergyForm& form, const Potential& pot, Eigen::VectorXd load, PenaltySpec pen)
      : form_(form), pot_(pot), b_(std::move(load)), pen_(pen) {
    const auto& L = form_.layout();
    i1_ = L.interface_dof(Part::one);
    i2_ = L.interface_dof(Part::two);
  }

  double p() const noexcept { return form_.params().p; }

  double value(const Eigen::VectorXd& u) const {
    const double p = this->p();
    double e = 0.0;
    form_.visit([&](const Term& t) { e += t.w * rho_value(t.part, std::abs(t.g.dot(u))); });
    return e / p - b_.dot(u) + penalty_value(u);
  }

  double penalty_value(const Eigen::VectorXd& u) const {
    if (!pen_.active) return 0.0;
    return std::pow(std::abs(u[i1_] - u[i2_] - pen_.g0), p()) / (pen_.eps * pen_.eps);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const {
    const double p = this->p();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
    form_.visit([&](const Term& t) {
      const double r = t.g.dot(u);
      if (r == 0.0) return;
      const double c = t.w * rho_d1(t.part, std::abs(r)) * (r > 0 ? 1.0 : -1.0) / p;
      for (int k = 0; k < t.g.n; ++k) g[t.g.idx[k]] += c * t.g.c[k];
    });
    g -= b_;
    if (pen_.active) {
      const double r = u[i1_] - u[i2_] - pen_.g0;
      if (r != 0.0) {
        const double c = p * std::pow(std::abs(r), p - 1.0) * (r > 0 ? 1.0 : -1.0) / (pen_.eps * pen_.eps);
        g[i1_] += c;
        g[i2_] -= c;
      }
    }
    return g;
  }

  /// Hessian with |r| floored at r_floor so that p < 2 stays finite and p > 2
  /// stays nondegenerate.
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u, double r_floor) const {
    const double p = this->p();
    const int n = static_cast<int>(u.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    form_.visit([&](const Term& t) {
      const double r = std::max(std::abs(t.g.dot(u)), r_floor);
      const double c = t.w * rho_d2(t.part, r) / p;
      for (int i = 0; i < t.g.n; ++i) {
        for (int j = 0; j < t.g.n; ++j) H(t.g.idx[i], t.g.idx[j]) += c * t.g.c[i] * t.g.c[j];
      }
    });
    if (pen_.active) {
      const double r = std::max(std::abs(u[i1_] - u[i2_] - pen_.g0), r_floor);
      const double c = p * (p - 1.0) * std::pow(r, p - 2.0) / (pen_.eps * pen_.eps);
      H(i1_, i1_) += c;
      H(i2_, i2_) += c;
      H(i1_, i2_) -= c;
      H(i2_, i1_) -= c;
    }
    return H;
  }

 private:
  double rho_value(Part part, double r) const {
    return pot_.power_law ? pot_.scale(part) * std::pow(r, p()) : pot_.rho(part).value(r);
  }
  double rho_d1(Part part, double r) const {
    return pot_.power_law ? pot_.scale(part) * p() * std::pow(r, p() - 1.0) : pot_.rho(part).d1(r);
  }
  double rho_d2(Part part, double r) const {
    return pot_.power_law ? pot_.scale(part) * p() * (p() - 1.0) * std::pow(r, p() - 2.0) : pot_.rho(part).d2(r);
  }

  const EnergyForm& form_;
  const Potential& pot_;
  Eigen::VectorXd b_;
  PenaltySpec pen_;
  int i1_ = 0;
  int i2_ = 0;
};

inline SolveReport finish_report(SolveReport rep, const EnergyForm& form, const Potential& pot,
                                 const Eigen::VectorXd& load, const DiscreteFunctional* f) {
  rep.breakdown = energy_eval(rep.pair, form, pot, load);
  if (f) rep.penalty_term = f->penalty_value(rep.pair.values());
  return rep;
}

/// Quadratic case: minimize 1/2 u^T A u - b^T u (+ penalty) over the reduced space.
inline SolveReport solve_quadratic(const ModelParams& mp, const CoefficientField& coeffs, const LoadSpec& loads,
                                   const Mesh& mesh, const ReducedSpace& rs, PenaltySpec pen,
                                   const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pot = Potential::power(2.0);
  const EnergyForm form(mp, coeffs, mesh, rs.layout, pot, opts.quad);
  Eigen::MatrixXd A = quadratic_matrix(form, pot);
  Eigen::VectorXd b = load_vector(mesh, rs.layout, loads);
  if (pen.active) {
    // eps^{-2} (u1 - u2 - g0)^2 = 1/2 (2 eps^{-2}) r^2
    const int i1 = rs.layout.interface_dof(Part::one);
    const int i2 = rs.layout.interface_dof(Part::two);
    const double k = 2.0 / (pen.eps * pen.eps);
    A(i1, i1) += k;
    A(i2, i2) += k;
    A(i1, i2) -= k;
    A(i2, i1) -= k;
    b[i1] += k * pen.g0;
    b[i2] -= k * pen.g0;
  }
  Eigen::MatrixXd Ar = rs.restrict_matrix(A);
  Ar = 0.5 * (Ar + Ar.transpose()).eval();
  const Eigen::VectorXd br = rs.restrict_vector(b - A * rs.offset);
  LinearSolveInfo info;
  const Eigen::VectorXd w = solve_spd(Ar, br, info, opts.linear_tol, opts.direct_limit);
  SolveReport rep;
  rep.pair = FieldPair(mesh, rs.layout.shared);
  rep.pair.values() = rs.lift(w);
  rep.iterations = info.iterations;
  rep.residual = info.residual;
  rep.method = info.direct ? "cholesky" : "cg";
  const Eigen::VectorXd load = load_vector(mesh, rs.layout, loads);
  const DiscreteFunctional f(form, pot, load, pen);
  rep = finish_report(std::move(rep), form, pot, load, &f);
  rep.wall_time = seconds_since(t0);
  return rep;
}

/// Damped Newton with Armijo backtracking; falls back to steepest descent
/// when the regularized Newton direction is not a descent direction.
inline SolveReport solve_descent(const ModelParams& mp, const CoefficientField& coeffs, const Potential& pot,
                                 const LoadSpec& loads, const Mesh& mesh, const ReducedSpace& rs, PenaltySpec pen,
                                 const SolverOptions& opts, const std::optional<Eigen::VectorXd>& initial) {
  const auto t0 = std::chrono::steady_clock::now();
  if (pot.p != mp.p) throw ParameterError("potential exponent differs from p");
  const EnergyForm form(mp, coeffs, mesh, rs.layout, pot, opts.quad);
  const Eigen::VectorXd load = load_vector(mesh, rs.layout, loads);
  const DiscreteFunctional f(form, pot, load, pen);

  // default start: the p = 2 minimizer for the same data (the p > 2 Hessian
  // vanishes at u = 0)
  Eigen::VectorXd w;
  if (initial) {
    w = rs.project(*initial);
  } else if (mp.p == 2.0) {
    w = Eigen::VectorXd::Zero(rs.free_size());
  } else {
    ModelParams mp2 = mp;
    mp2.p = 2.0;
    const auto start = solve_quadratic(mp2, coeffs, loads, mesh, rs, pen, opts);
    w = rs.project(start.pair.values());
  }
  Eigen::VectorXd u = rs.lift(w);
  double J = f.value(u);
  Eigen::VectorXd g = rs.restrict_vector(f.gradient(u));
  int it = 0;
  while (g.lpNorm<Eigen::Infinity>() > opts.grad_tol) {
    if (it >= opts.max_iter) {
      std::ostringstream msg;
      msg << "descent did not converge in " << opts.max_iter << " iterations (gradient " << g.lpNorm<Eigen::Infinity>()
          << ")";
      throw SolverError(msg.str());
    }
    ++it;
    const double umax = std::max(u.lpNorm<Eigen::Infinity>(), 1e-300);
    Eigen::MatrixXd H = rs.restrict_matrix(f.hessian(u, 1e-8 * umax));
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::VectorXd d;
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() == Eigen::Success) d = -llt.solve(g);
    const bool newton = d.size() != 0 && d.allFinite() && g.dot(d) < 0.0;
    if (!newton) d = -g;
    const double slope = g.dot(d);
    // Newton decrement at round-off level: the gradient tolerance is below
    // the noise floor of this functional
    if (newton && -slope <= 1e-15 * std::max(1.0, std::abs(J))) break;
    double t = 1.0;
    while (true) {
      const Eigen::VectorXd w_try = w + t * d;
      const Eigen::VectorXd u_try = rs.lift(w_try);
      const double J_try = f.value(u_try);
      if (J_try <= J + opts.armijo * t * slope) {
        w = w_try;
        u = u_try;
        J = J_try;
        break;
      }
      t *= opts.shrink;
      if (t < opts.min_step) {
        // the line search cannot improve further: accept if at round-off level
        if (std::abs(slope) <= 1e-13 * std::max(1.0, std::abs(J))) goto converged;
        throw SolverError("line search: step size underflow");
      }
    }
    g = rs.restrict_vector(f.gradient(u));
  }
converged:
  SolveReport rep;
  rep.pair = FieldPair(mesh, rs.layout.shared);
  rep.pair.values() = u;
  rep.iterations = it;
  rep.residual = g.lpNorm<Eigen::Infinity>();
  rep.method = "newton-armijo";
  rep = finish_report(std::move(rep), form, pot, load, &f);
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace detail

/// p = 2, default potential: one SPD solve.
inline SolveReport solve_p2(const ModelParams& mp, const CoefficientField& coeffs, const LoadSpec& loads,
                            const Mesh& mesh, const BoundaryData& bc = {}, const SolverOptions& opts = {}) {
  if (mp.p != 2.0) throw ModeError("solve_p2 requires p = 2");
  const auto rs = make_reduced_space(mesh, bc, InterfaceMode::hard);
  return detail::solve_quadratic(mp, coeffs, loads, mesh, rs, {}, opts);
}

/// Any p > 1 and convex potential.
inline SolveReport solve_general_p(const ModelParams& mp, const CoefficientField& coeffs, const Potential& pot,
                                   const LoadSpec& loads, const Mesh& mesh, const BoundaryData& bc = {},
                                   const SolverOptions& opts = {},
                                   const std::optional<Eigen::VectorXd>& initial = std::nullopt) {
  const auto rs = make_reduced_space(mesh, bc, InterfaceMode::hard);
  return detail::solve_descent(mp, coeffs, pot, loads, mesh, rs, {}, opts, initial);
}

/// Soft transmission: interface stored per side, penalty eps^{-2}|T1u1 - T2u2 - g0|^p.
inline SolveReport solve_penalty(const ModelParams& mp, const CoefficientField& coeffs, const LoadSpec& loads,
                                 const Mesh& mesh, double g0, double epsilon, const Potential* pot = nullptr,
                                 const BoundaryData& bc = {}, const SolverOptions& opts = {}) {
  if (!(epsilon > 0.0)) throw ParameterError("penalty epsilon > 0 required");
  BoundaryData outer = bc;
  outer.g0 = 0.0;
  const auto rs = make_reduced_space(mesh, outer, InterfaceMode::penalty);
  const detail::PenaltySpec pen{true, epsilon, g0};
  const Potential def = Potential::power(mp.p);
  const Potential& P = pot ? *pot : def;
  if (P.quadratic()) return detail::solve_quadratic(mp, coeffs, loads, mesh, rs, pen, opts);
  return detail::solve_descent(mp, coeffs, P, loads, mesh, rs, pen, opts, std::nullopt);
}

/// Number of random admissible perturbations v (||v||_inf = 1, zero on the
/// constrained values) for which J(u* + amplitude v) <= J(u*).
inline int probe_optimality(const SolveReport& rep, const ModelParams& mp, const CoefficientField& coeffs,
                            const Potential& pot, const LoadSpec& loads, int count = 100, double amplitude = 1e-3,
                            unsigned seed = 12345, const QuadratureOptions& quad = {}) {
  const Mesh& mesh = rep.pair.mesh();
  const auto& L = rep.pair.layout();
  const EnergyForm form(mp, coeffs, mesh, L, pot, quad);
  const Eigen::VectorXd load = load_vector(mesh, L, loads);
  const detail::DiscreteFunctional f(form, pot, load, {});
  const auto rs = make_reduced_space(mesh, {}, L.shared ? InterfaceMode::hard : InterfaceMode::penalty);
  const double J0 = f.value(rep.pair.values());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  int violations = 0;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd w(rs.free_size());
    for (int i = 0; i < w.size(); ++i) w[i] = dist(rng);
    w /= w.lpNorm<Eigen::Infinity>();
    Eigen::VectorXd v = rs.lift(w);  // homogeneous offset
    if (!(f.value(rep.pair.values() + amplitude * v) > J0)) ++violations;
  }
  return violations;
}

}  // namespace ntl
