#pragma once

// Dense SPD solves and the affine parametrization of admissible fields.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ntl/error.hpp"
#include "ntl/field.hpp"

namespace ntl {

struct LinearSolveInfo {
  int iterations = 0;     // 0 for the direct path
  double residual = 0.0;  // relative residual ||b - Ax|| / ||b||
  bool direct = true;
};

/// Jacobi-preconditioned conjugate gradients.
inline Eigen::VectorXd conjugate_gradient(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rel_tol,
                                          int max_iter, LinearSolveInfo& info) {
  const int n = static_cast<int>(b.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  info = {0, 0.0, false};
  if (bnorm == 0.0) return x;
  const Eigen::VectorXd dinv = A.diagonal().cwiseInverse();
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd d = z;
  double rz = r.dot(z);
  for (int k = 1; k <= max_iter; ++k) {
    const Eigen::VectorXd Ad = A * d;
    const double dAd = d.dot(Ad);
    if (!(dAd > 0.0)) throw SolverError("conjugate gradients: matrix not positive definite");
    const double a = rz / dAd;
    x += a * d;
    r -= a * Ad;
    info.iterations = k;
    info.residual = r.norm() / bnorm;
    if (info.residual <= rel_tol) return x;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  std::ostringstream msg;
  msg << "conjugate gradients did not converge in " << max_iter << " iterations (residual " << info.residual << ")";
  throw SolverError(msg.str());
}

/// Cholesky for n <= direct_limit, CG with relative residual rel_tol otherwise.
inline Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, LinearSolveInfo& info,
                                 double rel_tol = 1e-10, int direct_limit = 512) {
  const int n = static_cast<int>(b.size());
  if (n == 0) {
    info = {};
    return b;
  }
  if (n <= direct_limit) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
      std::ostringstream msg;
      msg << "Cholesky failed: matrix not positive definite (n = " << n
          << ", smallest eigenvalue " << es.eigenvalues()[0] << ")";
      throw SolverError(msg.str());
    }
    Eigen::VectorXd x = llt.solve(b);
    const double bnorm = b.norm();
    info = {0, bnorm > 0.0 ? (b - A * x).norm() / bnorm : 0.0, true};
    return x;
  }
  return conjugate_gradient(A, b, rel_tol, 10 * n, info);
}

/// Admissible fields u = P w + c over free unknowns w. Each free unknown
/// drives one or two nodal values with coefficient 1.
struct ReducedSpace {
  DofLayout layout;
  std::vector<std::vector<int>> targets;  // free unknown -> nodal indices
  Eigen::VectorXd offset;                 // c

  int free_size() const noexcept { return static_cast<int>(targets.size()); }

  Eigen::VectorXd lift(const Eigen::VectorXd& w) const {
    Eigen::VectorXd u = offset;
    for (int k = 0; k < free_size(); ++k) {
      for (int i : targets[k]) u[i] += w[k];
    }
    return u;
  }

  /// P^T v
  Eigen::VectorXd restrict_vector(const Eigen::VectorXd& v) const {
    Eigen::VectorXd r(free_size());
    for (int k = 0; k < free_size(); ++k) {
      double s = 0.0;
      for (int i : targets[k]) s += v[i];
      r[k] = s;
    }
    return r;
  }

  /// P^T A P
  Eigen::MatrixXd restrict_matrix(const Eigen::MatrixXd& A) const {
    const int m = free_size();
    Eigen::MatrixXd R(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        double s = 0.0;
        for (int i : targets[a]) {
          for (int j : targets[b]) s += A(i, j);
        }
        R(a, b) = s;
      }
    }
    return R;
  }

  /// Best free coordinates of a full nodal vector (first target of each unknown).
  Eigen::VectorXd project(const Eigen::VectorXd& u) const {
    Eigen::VectorXd w(free_size());
    for (int k = 0; k < free_size(); ++k) w[k] = u[targets[k].front()] - offset[targets[k].front()];
    return w;
  }
};

}  // namespace ntl
