#pragma once

// Small numerical toolkit shared by the solver modules: grids, fixed-step
// Runge-Kutta, Hermite interpolation, finite-difference weights on
// nonuniform grids, quadrature weights and scalar root/minimum search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wmblow/error.hpp"

namespace wmblow::num {

inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  if (n == 1) {
    x[0] = a;
    return x;
  }
  for (std::size_t i = 0; i < n; ++i)
    x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

/// n points spaced uniformly in log between a > 0 and b > a.
inline std::vector<double> logspace(double a, double b, std::size_t n) {
  auto s = linspace(std::log(a), std::log(b), n);
  for (auto& v : s) v = std::exp(v);
  return s;
}

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, const Vec<N>& k) {
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
  return out;
}

/// One classical RK4 step for y' = rhs(x, y).
template <std::size_t N, class Rhs>
Vec<N> rk4_step(Rhs&& rhs, double x, const Vec<N>& y, double h) {
  const Vec<N> k1 = rhs(x, y);
  const Vec<N> k2 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k1));
  const Vec<N> k3 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k2));
  const Vec<N> k4 = rhs(x + h, axpy(y, h, k3));
  Vec<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Advances from x0 to x1 with `substeps` equal RK4 steps.
template <std::size_t N, class Rhs>
Vec<N> rk4_advance(Rhs&& rhs, double x0, double x1, Vec<N> y, int substeps) {
  const double h = (x1 - x0) / substeps;
  for (int i = 0; i < substeps; ++i) y = rk4_step<N>(rhs, x0 + i * h, y, h);
  return y;
}

/// Cubic Hermite interpolation on [x0, x1] from values and slopes.
inline double hermite(double x0, double x1, double y0, double y1, double d0,
                      double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

/// Index i with x[i] <= v < x[i+1], clamped to [0, n-2].
inline std::size_t bracket(std::span<const double> x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::ptrdiff_t i = (it - x.begin()) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(x.size()) - 2);
  return static_cast<std::size_t>(i);
}

/// Hermite interpolation of sampled (x, y, dy/dx).
inline double hermite_sample(std::span<const double> x, std::span<const double> y,
                             std::span<const double> dy, double v) {
  const std::size_t i = bracket(x, v);
  return hermite(x[i], x[i + 1], y[i], y[i + 1], dy[i], dy[i + 1], v);
}

inline double linear_sample(std::span<const double> x, std::span<const double> y,
                            double v) {
  const std::size_t i = bracket(x, v);
  const double t = (v - x[i]) / (x[i + 1] - x[i]);
  return (1 - t) * y[i] + t * y[i + 1];
}

/// Fornberg's algorithm: weights c[k][j] such that
/// f^{(k)}(z) ~= sum_j c[k][j] f(xs[j]) for k = 0..m.
inline std::vector<std::vector<double>> fd_weights(double z, std::span<const double> xs,
                                                   int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Derivative of order `order` of samples y(x) on a (possibly nonuniform)
/// grid using a centered stencil of `width` points (shifted at the ends).
inline std::vector<double> derivative(std::span<const double> x, std::span<const double> y,
                                      int order, int width = 5) {
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(width))
    throw ContractViolation("derivative: grid smaller than stencil");
  std::vector<double> out(n);
  const std::size_t half = static_cast<std::size_t>(width / 2);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    lo = std::min(lo, n - static_cast<std::size_t>(width));
    const auto w = fd_weights(x[i], x.subspan(lo, width), order);
    double acc = 0.0;
    for (int j = 0; j < width; ++j) acc += w[order][j] * y[lo + j];
    out[i] = acc;
  }
  return out;
}

/// Trapezoid weights for a nonuniform grid.
inline std::vector<double> trapezoid_weights(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return acc;
}

/// Root of a continuous function with f(a) f(b) <= 0.
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-14, int max_iter = 200) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NonConvergence("bisect: root not bracketed");
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * (1 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Golden-section search for a minimum of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-10, int max_iter = 300) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * (1 + std::abs(c)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// C^2 step: 0 for x <= 0, 1 for x >= 1, quintic in between.
inline double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

inline double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace wmblow::num
