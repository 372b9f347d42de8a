#pragma once

// Scalar function handles and the small named library used for coefficients,
// loads and test fields ("constant:1", "affine:1,0.5", "sin_pi", ...).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ntl/error.hpp"

namespace ntl {

/// A real function on an interval with an optional analytic derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // may be empty

  double operator()(double x) const { return value(x); }
  bool has_derivative() const noexcept { return static_cast<bool>(derivative); }

  /// Analytic derivative when available, else central difference with step h.
  double slope(double x, double h = 1e-6) const {
    if (derivative) return derivative(x);
    return (value(x + h) - value(x - h)) / (2.0 * h);
  }
};

inline ScalarFunction constant_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

/// c0 + c1 x
inline ScalarFunction affine_function(double c0, double c1) {
  return {[c0, c1](double x) { return c0 + c1 * x; }, [c1](double) { return c1; }};
}

/// base + amp * exp(-1/(1 - r^2)) * e, r = (x - center)/width, a smooth bump.
inline ScalarFunction bump_function(double base, double amp, double center, double width) {
  auto f = [=](double x) {
    const double r = (x - center) / width;
    if (std::abs(r) >= 1.0) return base;
    return base + amp * std::exp(1.0 - 1.0 / (1.0 - r * r));
  };
  auto df = [=](double x) {
    const double r = (x - center) / width;
    if (std::abs(r) >= 1.0) return 0.0;
    const double q = 1.0 - r * r;
    return amp * std::exp(1.0 - 1.0 / q) * (-2.0 * r / (q * q)) / width;
  };
  return {f, df};
}

/// Piecewise-linear interpolation of (x_i, y_i) samples, constant beyond the ends.
inline ScalarFunction tabulated_function(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ParameterError("tabulated: need >= 2 matching samples");
  if (!std::is_sorted(xs.begin(), xs.end())) throw ParameterError("tabulated: abscissae must be sorted");
  auto locate = [xs](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    return std::min(i, xs.size() - 2);
  };
  auto f = [xs, ys, locate](double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const std::size_t i = locate(x);
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - t) * ys[i] + t * ys[i + 1];
  };
  auto df = [xs, ys, locate](double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    const std::size_t i = locate(x);
    return (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  };
  return {f, df};
}

struct FunctionSpec {
  std::string name;
  std::vector<double> args;
};

/// Parses "name" or "name:a,b,c".
inline FunctionSpec parse_function_spec(std::string_view text) {
  FunctionSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    std::stringstream ss{std::string(text.substr(colon + 1))};
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        spec.args.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ParameterError("bad numeric argument '" + item + "' in function spec");
      }
    }
  }
  return spec;
}

/// Names understood by make_function, with their argument counts.
inline const std::vector<std::pair<std::string, std::size_t>>& function_library() {
  static const std::vector<std::pair<std::string, std::size_t>> names = {
      {"constant", 1}, {"affine", 2},    {"bump", 4},  {"linear", 0},    {"sin_pi", 0},
      {"parabola", 0}, {"quadratic", 0}, {"cubic", 0}, {"exp", 0},       {"zero", 0},
      {"cos_pi", 0},   {"sin_2pi", 0},   {"tabulated", 0}};
  return names;
}

/// Builds a named function. `tabulated` takes interleaved x0,y0,x1,y1,...
inline ScalarFunction make_function(const FunctionSpec& spec) {
  const auto& a = spec.args;
  auto need = [&](std::size_t n) {
    if (a.size() != n) {
      throw ParameterError("function '" + spec.name + "' expects " + std::to_string(n) + " argument(s)");
    }
  };
  const double pi = std::numbers::pi;
  if (spec.name == "constant") {
    need(1);
    return constant_function(a[0]);
  }
  if (spec.name == "zero") {
    need(0);
    return constant_function(0.0);
  }
  if (spec.name == "affine") {
    need(2);
    return affine_function(a[0], a[1]);
  }
  if (spec.name == "bump") {
    need(4);
    return bump_function(a[0], a[1], a[2], a[3]);
  }
  if (spec.name == "linear") {
    need(0);
    return affine_function(0.0, 1.0);
  }
  if (spec.name == "sin_pi") {
    need(0);
    return {[pi](double x) { return std::sin(pi * x); }, [pi](double x) { return pi * std::cos(pi * x); }};
  }
  if (spec.name == "cos_pi") {
    need(0);
    return {[pi](double x) { return std::cos(pi * x); }, [pi](double x) { return -pi * std::sin(pi * x); }};
  }
  if (spec.name == "sin_2pi") {
    need(0);
    return {[pi](double x) { return std::sin(2 * pi * x); },
            [pi](double x) { return 2 * pi * std::cos(2 * pi * x); }};
  }
  if (spec.name == "parabola") {  // (1 - x^2)/2
    need(0);
    return {[](double x) { return 0.5 * (1.0 - x * x); }, [](double x) { return -x; }};
  }
  if (spec.name == "quadratic") {
    need(0);
    return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }};
  }
  if (spec.name == "cubic") {
    need(0);
    return {[](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }};
  }
  if (spec.name == "exp") {
    need(0);
    return {[](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }};
  }
  if (spec.name == "tabulated") {
    if (a.size() < 4 || a.size() % 2 != 0) throw ParameterError("tabulated expects x0,y0,x1,y1,...");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < a.size(); i += 2) {
      xs.push_back(a[i]);
      ys.push_back(a[i + 1]);
    }
    return tabulated_function(std::move(xs), std::move(ys));
  }
  throw ParameterError("unknown function '" + spec.name + "'");
}

inline ScalarFunction make_function(std::string_view text) { return make_function(parse_function_spec(text)); }

}  // namespace ntl
