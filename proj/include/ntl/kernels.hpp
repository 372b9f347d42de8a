#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "ntl/constants.hpp"
#include "ntl/error.hpp"
#include "ntl/functions.hpp"
#include "ntl/geometry.hpp"

namespace ntl {

/// Corner or interior point of the (s, delta) parameter square.
///   nonlocal_fractional  s < 1, delta > 0
///   weighted_fractional  s < 1, delta = 0
///   nonlocal_local       s = 1, delta > 0
///   local_local          s = 1, delta = 0
enum class Mode { nonlocal_fractional, weighted_fractional, nonlocal_local, local_local };

inline std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::nonlocal_fractional: return "nonlocal_fractional";
    case Mode::weighted_fractional: return "weighted_fractional";
    case Mode::nonlocal_local: return "nonlocal_local";
    case Mode::local_local: return "local_local";
  }
  return "?";
}

inline std::optional<Mode> mode_from_string(std::string_view s) noexcept {
  for (Mode m : {Mode::nonlocal_fractional, Mode::weighted_fractional, Mode::nonlocal_local, Mode::local_local}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

inline Mode mode_for(double s, double delta) noexcept {
  const bool local2 = s >= 1.0;
  const bool local1 = delta <= 0.0;
  if (local2) return local1 ? Mode::local_local : Mode::nonlocal_local;
  return local1 ? Mode::weighted_fractional : Mode::nonlocal_fractional;
}

/// "delta < 1/3 required" for the default domain, the numeric bound otherwise.
inline std::string delta_requirement(const Domain& domain) {
  const double d0 = delta_threshold(domain);
  if (d0 == 1.0 / 3.0) return "delta < 1/3 required";
  char buf[64];
  std::snprintf(buf, sizeof buf, "delta < %.17g required", d0);
  return buf;
}

struct ModelParams {
  int d = 1;
  double s = 0.75;
  double p = 2.0;
  double delta = 0.1;
  Mode mode = Mode::nonlocal_fractional;

  /// Parameters with the mode implied by (s, delta).
  static ModelParams make(double s, double p, double delta) {
    ModelParams mp{1, s, p, delta, mode_for(s, delta)};
    mp.check_ranges();
    return mp;
  }

  bool nonlocal_part1() const noexcept { return delta > 0.0; }
  bool fractional_part2() const noexcept { return s < 1.0; }

  void check_ranges() const {
    if (d != 1) throw ParameterError("only d = 1 is supported");
    if (!(s > 0.0 && s <= 1.0)) throw ParameterError("s in (0,1] required");
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p in (1,inf) required");
    if (!(delta >= 0.0)) throw ParameterError("delta >= 0 required");
    if (mode != mode_for(s, delta)) {
      throw ModeError("mode " + std::string(to_string(mode)) + " inconsistent with (s, delta)");
    }
  }

  /// Full check against a domain: ranges, delta < delta_0 and, when traces
  /// are involved, sp > 1.
  void validate(const Domain& domain, bool needs_trace = true) const {
    check_ranges();
    if (delta > 0.0 && !(delta < delta_threshold(domain))) {
      throw ParameterError(delta_requirement(domain));
    }
    if (needs_trace && !(s * p > 1.0)) throw ParameterError("sp>1 required");
  }
};

/// Coefficients alpha on Omega_1 and beta on Omega_2 with the declared
/// bounds alpha0 <= alpha, beta <= 1/alpha0.
struct CoefficientField {
  ScalarFunction alpha = constant_function(1.0);
  ScalarFunction beta = constant_function(1.0);
  double alpha0 = 1e-3;

  /// Lambda = alpha on Omega_1, beta on Omega_2.
  double lambda(const Domain& domain, double x) const {
    return domain.locate(x) == Part::one ? alpha(x) : beta(x);
  }

  double at(Part part, double x) const {
    const double v = part == Part::one ? alpha(x) : beta(x);
#ifndef NDEBUG
    if (!(v >= alpha0 && v <= 1.0 / alpha0)) throw ParameterError("coefficient outside declared bounds");
#endif
    return v;
  }
};

/// Symmetrized heterogeneous-horizon kernel on D = Omega_1.
inline double gamma_sym(double x, double y, const ModelParams& mp, const Interval& d) {
  if (!(mp.delta > 0.0)) throw ModeError("gamma_sym requires delta > 0");
  const double sx = sigma(d, x);
  const double sy = sigma(d, y);
  const double r = std::abs(x - y);
  const double expo = mp.d + mp.s * mp.p;
  double v = 0.0;
  if (r < mp.delta * sx) v += std::pow(sx, -expo);
  if (r < mp.delta * sy) v += std::pow(sy, -expo);
  return cbar_dp(mp.d, mp.p) / (2.0 * std::pow(mp.delta, mp.d + mp.p)) * v;
}

inline double gamma_sym(double x, double y, const ModelParams& mp, const Domain& domain) {
  return gamma_sym(x, y, mp, domain.omega1());
}

/// Fractional kernel factor |x - y|^{-d - sp}.
inline double frac_kernel(double x, double y, const ModelParams& mp) {
  if (x == y) throw DomainError("frac_kernel: singular on the diagonal");
  return std::pow(std::abs(x - y), -(mp.d + mp.s * mp.p));
}

/// Weight sigma(x)^{p - sp} of the weighted Sobolev seminorm.
inline double weight(double x, const ModelParams& mp, const Domain& domain, Part part) {
  const double e = mp.p - mp.s * mp.p;
  if (e == 0.0) {
    sigma(domain, part, x);  // domain check
    return 1.0;
  }
  return std::pow(sigma(domain, part, x), e);
}

}  // namespace ntl
