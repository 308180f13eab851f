#pragma once

// Targets of revolution ds^2 = drho^2 + g(rho)^2 dtheta^2 and the co-rotational
// nonlinearity f = g g'.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wmblow/error.hpp"
#include "wmblow/numerics.hpp"

namespace wmblow {

using ScalarFn = std::function<double(double)>;

/// Warping function g with its first three derivatives.
struct SurfaceProfile {
  std::string name;
  ScalarFn g, g1, g2, g3;
  double zero_D = std::numeric_limits<double>::infinity();  ///< first positive zero of g
  double turning = std::numeric_limits<double>::infinity(); ///< first positive zero of g'

  double f(double u) const { return g(u) * g1(u); }
  double fp(double u) const {
    const double a = g1(u);
    return a * a + g(u) * g2(u);
  }
  double fpp(double u) const { return 3.0 * g1(u) * g2(u) + g(u) * g3(u); }
};

namespace detail {

// First sign change of fn on (0, limit], refined by bisection; inf if none.
inline double first_zero(const ScalarFn& fn, double limit, double step = 1e-3) {
  double a = step;
  double fa = fn(a);
  for (double b = 2 * step; b <= limit; b += step) {
    const double fb = fn(b);
    if (fb == 0.0) return b;
    if ((fa > 0) != (fb > 0)) return num::bisect(fn, a, b, 1e-15);
    a = b;
    fa = fb;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Builds a profile from closed-form callables; zero_D and turning are
/// located numerically on (0, search_limit].
inline SurfaceProfile make_profile(std::string name, ScalarFn g, ScalarFn g1, ScalarFn g2,
                                   ScalarFn g3, double search_limit = 10.0) {
  SurfaceProfile p{std::move(name), std::move(g), std::move(g1), std::move(g2),
                   std::move(g3)};
  p.zero_D = detail::first_zero(p.g, search_limit);
  p.turning = detail::first_zero(p.g1, search_limit);
  return p;
}

/// The round sphere, g = sin.
inline SurfaceProfile make_sphere() {
  SurfaceProfile p{"sphere",
                   [](double x) { return std::sin(x); },
                   [](double x) { return std::cos(x); },
                   [](double x) { return -std::sin(x); },
                   [](double x) { return -std::cos(x); }};
  p.zero_D = num::kPi;
  p.turning = num::kPi / 2;
  return p;
}

/// g(rho) = sin(rho) (1 + c sin^2 rho), |c| <= 0.2.
inline SurfaceProfile make_deformed_sphere(double c) {
  if (!(std::abs(c) <= 0.2))
    throw InvalidProfile("deformation parameter must satisfy |c| <= 0.2, got " +
                         std::to_string(c));
  // 1 + c sin^2 must stay positive on (0, pi); it does for |c| < 1, but
  // check the sampled profile rather than rely on the bound.
  for (int i = 1; i < 1000; ++i) {
    const double x = num::kPi * i / 1000.0;
    const double s = std::sin(x);
    if (s * (1 + c * s * s) <= 0)
      throw InvalidProfile("g nonpositive on (0, pi) for c = " + std::to_string(c));
  }
  SurfaceProfile p{
      "deformed:" + std::to_string(c),
      [c](double x) {
        const double s = std::sin(x);
        return s + c * s * s * s;
      },
      [c](double x) {
        const double s = std::sin(x), co = std::cos(x);
        return co + 3 * c * s * s * co;
      },
      [c](double x) {
        const double s = std::sin(x), co = std::cos(x);
        return -s + c * (6 * s * co * co - 3 * s * s * s);
      },
      [c](double x) {
        const double s = std::sin(x), co = std::cos(x);
        return -co + c * (6 * co * co * co - 21 * s * s * co);
      }};
  p.zero_D = num::kPi;
  p.turning = num::kPi / 2;
  return p;
}

/// g(u) = u: the flat plane, for which the equation is the linear m = 1 wave.
inline SurfaceProfile make_flat() {
  return make_profile(
      "flat", [](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; });
}

/// Parses "sphere" or "deformed:<c>".
inline SurfaceProfile make_target(const std::string& key) {
  if (key == "sphere") return make_sphere();
  const std::string prefix = "deformed:";
  if (key.rfind(prefix, 0) == 0) {
    double c = 0;
    try {
      std::size_t pos = 0;
      c = std::stod(key.substr(prefix.size()), &pos);
      if (pos != key.size() - prefix.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("bad deformation in target '" + key + "'");
    }
    return make_deformed_sphere(c);
  }
  throw ConfigError("unknown target '" + key + "'");
}

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// True when g is odd about the far pole, g(D + x) = -g(D - x). Then Q has an
/// expansion in odd powers of 1/R at infinity.
inline bool far_pole_odd(const SurfaceProfile& p, double tol = 1e-12) {
  if (!std::isfinite(p.zero_D)) return false;
  const double span = std::min(1.0, p.zero_D);
  for (int i = 1; i <= 32; ++i) {
    const double x = span * i / 33.0;
    if (std::abs(p.g(p.zero_D + x) + p.g(p.zero_D - x)) > tol) return false;
  }
  return true;
}

/// Evaluates the computable necessary conditions on a profile. Report-only:
/// never throws for a bad profile.
inline ValidationReport validate_profile(const SurfaceProfile& p, unsigned seed = 12345) {
  ValidationReport r;
  auto add = [&](std::string name, double residual, double tol) {
    r.checks.push_back({std::move(name), std::isfinite(residual) && residual < tol, residual});
  };

  add("pole g(0)=0", std::abs(p.g(0.0)), 1e-12);
  add("pole g'(0)=1", std::abs(p.g1(0.0) - 1.0), 1e-12);

  double odd = 0.0;
  for (double x : {0.1, 0.37, 0.5, 1.0, 1.3, 2.0, 2.9, 3.1})
    odd = std::max(odd, std::abs(p.g(x) + p.g(-x)));
  add("g odd", odd, 1e-12);

  const double D = p.zero_D;
  if (std::isfinite(D)) {
    add("g(zero_D)=0", std::abs(p.g(D)), 1e-10);
    double worst = 0.0;  // most negative sample of g on (0, D)
    for (int i = 1; i < 2000; ++i) worst = std::min(worst, p.g(D * i / 2000.0));
    add("g>0 on (0,zero_D)", -worst, 1e-300);
    add("f(0)=f(zero_D)=0", std::max(std::abs(p.f(0.0)), std::abs(p.f(D))), 1e-10);
  } else {
    add("g(zero_D)=0", std::numeric_limits<double>::infinity(), 1e-10);
    add("g>0 on (0,zero_D)", std::numeric_limits<double>::infinity(), 1e-300);
    add("f(0)=f(zero_D)=0", std::numeric_limits<double>::infinity(), 1e-10);
  }

  // Derivative consistency against centered differences at random points.
  const double span = std::isfinite(D) ? D : 3.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.05 * span, 0.95 * span);
  const double h = 1e-5;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  double e1 = 0, e2 = 0, ef = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = dist(rng);
    e1 = std::max(e1, rel((p.g(x + h) - p.g(x - h)) / (2 * h), p.g1(x)));
    e2 = std::max(e2, rel((p.g1(x + h) - p.g1(x - h)) / (2 * h), p.g2(x)));
    ef = std::max(ef, rel((p.f(x + h) - p.f(x - h)) / (2 * h), p.fp(x)));
  }
  add("g1 vs FD", e1, 1e-6);
  add("g2 vs FD", e2, 1e-6);
  add("f' vs FD", ef, 1e-6);
  return r;
}

}  // namespace wmblow
