#pragma once

#include <cmath>
#include <numbers>

#include "ntl/error.hpp"

namespace ntl {

/// A_{d,p}: integral over the unit sphere of |omega . e|^p,
/// 2 pi^{(d-1)/2} Gamma((p+1)/2) / Gamma((d+p)/2).
inline double a_dp(int d, double p) {
  if (d < 1) throw ParameterError("a_dp: d >= 1 required");
  if (!(p > 1.0)) throw ParameterError("a_dp: p > 1 required");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (d - 1)) * std::tgamma(0.5 * (p + 1.0)) /
         std::tgamma(0.5 * (d + p));
}

/// Normalization of the fractional seminorm, (p - sp) / A_{d,p}; zero at s = 1.
inline double kappa_dsp(int d, double s, double p) {
  if (!(s > 0.0 && s <= 1.0)) throw ParameterError("kappa_dsp: s in (0,1] required");
  return (p - s * p) / a_dp(d, p);
}

/// Normalization of the heterogeneous-horizon seminorm, (d + p) / A_{d,p}.
inline double cbar_dp(int d, double p) { return (d + p) / a_dp(d, p); }

/// Surface measure of the unit sphere S^{d-1}.
inline double sphere_measure(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace ntl
