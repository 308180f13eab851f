#pragma once

// Iterative approximate blow-up solutions u_k = Q(R) + v_1 + v_2 + ... inside
// the backward light cone r < t, with R = lambda(t) r, lambda = t^{-1-nu},
// a = r/t and the scale sigma := t lambda(t) = t^{-nu} (so R = a sigma).
//
// Everything is expressed through (sigma, R, a); t itself is never formed,
// which keeps the very small times needed for large sigma representable.
//
// Steps (k = 1):
//   0. t^2 e_0(R) in closed form.
//   1. v_1 = w(R) / sigma^2 with L w = -t^2 e_0, w(0) = w'(0) = 0.
//   2. t^2 e_1(R, a) = -t^2 d_t^2 v_1 + t^2 N_1(v_1) and its principal part.
//   3. v_2 from the a-variable systems (see light_cone.hpp).
//   4. e_2 and the three-part split of the nonlinearity.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "wmblow/error.hpp"
#include "wmblow/fit.hpp"
#include "wmblow/ground_state.hpp"
#include "wmblow/numerics.hpp"
#include "wmblow/radial_field.hpp"

namespace wmblow {

/// b = log^2(1+R^2)/(t lambda)^2, b1 = log(1+R^2)/(t lambda)^2, b2 = 1/(t lambda)^2.
struct SymbolTriple {
  double b = 0, b1 = 0, b2 = 0;
};

inline SymbolTriple symbols(double sigma, double R) {
  const double l = std::log1p(R * R);
  const double b2 = 1.0 / (sigma * sigma);
  return {l * l * b2, l * b2, b2};
}

/// f(u + v) - f(u) - f'(u) v, evaluated as the integral remainder
/// int_0^v (v - s) f''(u + s) ds so small v loses no digits.
inline double taylor_remainder2(const SurfaceProfile& p, double u, double v) {
  static constexpr std::array<double, 8> x{-0.9602898564975363, -0.7966664774136267,
                                           -0.5255324099163290, -0.1834346424956498,
                                           0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> w{0.1012285362903763, 0.2223810344533745,
                                           0.3137066458778873, 0.3626837833783620,
                                           0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};
  double acc = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double s = 0.5 * v * (x[i] + 1.0);
    acc += w[i] * (v - s) * p.fpp(u + s);
  }
  return 0.5 * v * acc;
}

// ---------------------------------------------------------------------------
// Step 0

/// t^2 e_0(R) = -(1+nu)(2+nu) R Q'(R) - (1+nu)^2 R^2 Q''(R).
inline double initial_error_at(const GroundState& gs, double nu, double R) {
  const double k = 1.0 + nu;
  return -k * (k + 1.0) * R * gs.d1(R) - k * k * R * R * gs.d2(R);
}

/// t^2 e_0 sampled on the ground-state grid. Independent of t: u_0 = Q(lambda r)
/// cancels the static part of the equation exactly.
inline RadialField initial_error(const GroundState& gs, double nu, double /*t*/ = 1.0) {
  RadialField e;
  e.R = gs.R_grid;
  e.value.resize(e.R.size());
  for (std::size_t i = 0; i < e.R.size(); ++i) e.value[i] = initial_error_at(gs, nu, e.R[i]);
  e.dvalue = num::derivative(e.R, e.value, 1, 5);
  return e;
}

// ---------------------------------------------------------------------------
// Step 1

/// Solution w of L w = F (L = d_R^2 + R^{-1} d_R - f'(Q)/R^2) with w = O(R^3)
/// at the axis, stored on the ground-state grid. F is the source -t^2 e^0.
struct InteriorCorrection {
  std::shared_ptr<const GroundState> gs;
  std::function<double(double)> source;  ///< F(R)
  std::vector<double> R, w, dw, d2w;
  std::vector<double> flux;  ///< J(R) = int_0^R s phi0(s) F(s) ds

  double value(double r) const {
    if (r <= R.front()) return w.front() * std::pow(r / R.front(), 3);
    if (r >= R.back()) throw ContractViolation("interior correction evaluated beyond grid");
    return num::hermite_sample(R, w, dw, r);
  }
  double d1(double r) const {
    if (r <= R.front()) return 3 * w.front() * r * r / std::pow(R.front(), 3);
    return num::hermite_sample(R, dw, d2w, r);
  }
  /// w'' from the equation itself.
  double d2(double r) const {
    const double q = gs->value(r);
    return source(r) - d1(r) / r + gs->profile->fp(q) * value(r) / (r * r);
  }
};

/// Variation of parameters with the zero mode phi0 = R Q' and its reduced-order
/// partner theta0 = phi0 int ds/(s phi0^2). Writing w = phi0 y gives
/// (R phi0^2 y')' = R phi0 F, integrated as the first-order system
/// dJ/ds = R^2 phi0 F, dy/ds = J / phi0^2 in s = log R (RK4).
inline InteriorCorrection solve_interior(std::shared_ptr<const GroundState> gs,
                                         std::function<double(double)> source,
                                         int substeps = 2) {
  const auto& g = *gs;
  const auto& prof = *g.profile;
  InteriorCorrection c;
  c.gs = gs;
  c.source = source;
  c.R = g.R_grid;
  const std::size_t n = c.R.size();
  c.w.resize(n);
  c.dw.resize(n);
  c.d2w.resize(n);
  c.flux.resize(n);

  auto phi0 = [&](double R) { return prof.g(g.value(R)); };
  auto rhs = [&](double s, const num::Vec<2>& st) {
    const double R = std::exp(s);
    const double p = phi0(R);
    return num::Vec<2>{R * R * p * source(R), st[0] / (p * p)};
  };

  // Axis data: phi0 ~ c R and F ~ F1 R give J = R^2 phi0 F / 4, y = R F / (8 phi0) R.
  const double R0 = c.R[0];
  const double p0 = phi0(R0), F0 = source(R0);
  num::Vec<2> st{R0 * R0 * p0 * F0 / 4.0, R0 * R0 * F0 / (8.0 * p0)};
  auto store = [&](std::size_t i, const num::Vec<2>& s) {
    const double R = c.R[i];
    const double p = phi0(R);
    const double dp = prof.g1(g.value(R)) * g.d1(R);
    c.flux[i] = s[0];
    c.w[i] = p * s[1];
    c.dw[i] = dp * s[1] + s[0] / (R * p);
  };
  store(0, st);
  for (std::size_t i = 1; i < n; ++i) {
    st = num::rk4_advance<2>(rhs, std::log(c.R[i - 1]), std::log(c.R[i]), st, substeps);
    if (!std::isfinite(st[0]) || !std::isfinite(st[1]))
      throw QuadratureFailure("Green integrals diverged at R = " + std::to_string(c.R[i]));
    store(i, st);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double R = c.R[i];
    c.d2w[i] = source(R) - c.dw[i] / R + prof.fp(g.Q[i]) * c.w[i] / (R * R);
  }
  return c;
}

/// Step 1 for a general principal part: checks the source decays at least
/// like R^{-1} before solving.
inline InteriorCorrection step1_correction(std::shared_ptr<const GroundState> gs,
                                           std::function<double(double)> src) {
  std::vector<double> Rs = num::logspace(1e2, 1e4, 32), Fs;
  bool zero = true;
  for (double R : Rs) {
    Fs.push_back(std::abs(src(R)));
    zero = zero && Fs.back() == 0.0;
  }
  if (!zero) {
    const double slope = fit_exponent(Rs, Fs, {1e2, 1e4}).slope;
    if (slope > -0.8)
      throw QuadratureFailure("source decays like R^" + std::to_string(slope) +
                              ", slower than R^-1");
  }
  return solve_interior(std::move(gs), std::move(src));
}

/// Step 1 with the principal part of e_0 (which is all of e_0 for k = 1).
/// The correction is v_1 = w / sigma^2.
inline InteriorCorrection step1_correction(std::shared_ptr<const GroundState> gs, double nu) {
  const auto* g = gs.get();
  return step1_correction(gs, [g, nu](double R) { return -initial_error_at(*g, nu, R); });
}

/// sup over [lo, hi] of |L w - F| using 5-point differences of the samples.
inline double interior_residual(const InteriorCorrection& c, double lo, double hi) {
  const auto Lw = apply_static_linearization(*c.gs, c.w);
  double m = 0.0;
  for (std::size_t i = 0; i < c.R.size(); ++i)
    if (c.R[i] >= lo && c.R[i] <= hi) m = std::max(m, std::abs(Lw[i] - c.source(c.R[i])));
  return m;
}

/// Fit of w ~ c R log R + d R over a window; returns c.
inline double fit_rlogr_coefficient(const InteriorCorrection& c, double lo, double hi,
                                    std::size_t n = 64) {
  const auto Rs = num::logspace(lo, hi, n);
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double R = Rs[i];
    A(i, 0) = std::log(R);
    A(i, 1) = 1.0;
    b(i) = c.value(R) / R;
  }
  return lstsq(A, b)(0);
}

// ---------------------------------------------------------------------------
// Step 2

/// t^2 e_1 as a function of (R, a) for k = 1, split into the time-derivative
/// part E^t v_1 = -t^2 d_t^2 v_1 and t^2 N_1(v_1). v_1 has no a-dependence, so
/// the a-derivative part E^a v_1 vanishes identically.
struct FirstErrorParts {
  double time_part = 0.0;
  double nonlinear = 0.0;
  double total() const { return time_part + nonlinear; }
};

class FirstError {
 public:
  FirstError(std::shared_ptr<const InteriorCorrection> v1, double nu) : v1_(std::move(v1)), nu_(nu) {}

  double nu() const { return nu_; }
  const InteriorCorrection& interior() const { return *v1_; }

  /// v_1 at (R, a): w(R)/sigma^2 with sigma = R/a.
  double v1(double R, double a) const {
    const double s = a / R;
    return s * s * v1_->value(R);
  }

  FirstErrorParts parts(double R, double a) const {
    if (!(a > 0.0) || a > 1.0) throw ContractViolation("e_1 evaluated outside the light cone");
    const double k = 1.0 + nu_;
    const double w = v1_->value(R), w1 = v1_->d1(R), w2 = v1_->d2(R);
    const double Dw = R * w1, D2w = R * w1 + R * R * w2;
    // t^2 d_t^2 (t^{2 nu} w(R)) = t^{2 nu} [(2nu - k D)^2 - (2nu - k D)] w
    const double m = 2.0 * nu_;
    const double PDw = (m * m - m) * w - k * (2.0 * m - 1.0) * Dw + k * k * D2w;
    const double s2 = (a / R) * (a / R);  // t^{2 nu} = sigma^{-2}
    FirstErrorParts out;
    out.time_part = -s2 * PDw;
    const auto& p = *v1_->gs->profile;
    const double q = v1_->gs->value(R);
    const double v = s2 * w;
    // t^2 N_1 = a^{-2} [f'(Q) v - f(Q+v) + f(Q)] = -a^{-2} rem2(Q, v)
    out.nonlinear = -taylor_remainder2(p, q, v) / (a * a);
    return out;
  }
  double operator()(double R, double a) const { return parts(R, a).total(); }

 private:
  std::shared_ptr<const InteriorCorrection> v1_;
  double nu_;
};

/// Principal part of t^2 e_1 at fixed a:
///   sum_{j<=1} alpha_j(a) R^{-1} log^j R + sum_{j<=2} beta_j(a) R^{-2} log^j R,
/// i.e. the top two R-degrees, found by least squares over a large-R window
/// with lower degrees included in the basis and discarded. When the target is
/// odd about its far pole only odd powers of 1/R occur, the R^{-2} degree is
/// identically zero and is left out of the basis (fitting it would only absorb
/// the R^{-5} tail).
/// In the light-cone form this reads
///   sigma^{-1} sum a q_j(a) log^j R + sigma^{-2} sum qt_j(a) log^j R
/// with q_j = alpha_j / a^2 and qt_j = beta_j / a^2.
struct PrincipalPart {
  int k = 1;
  bool odd_tail = false;
  std::vector<double> a_grid;
  std::vector<std::vector<double>> q;   ///< q[j][ia], j = 0..2k-1
  std::vector<std::vector<double>> qt;  ///< qt[j][ia], j = 0..2k
  double fit_lo = 1e2, fit_hi = 1e5;
  double max_rel_residual = 0.0;  ///< worst weighted fit residual over the a-grid

  double q_at(std::size_t j, double a) const { return sample(q[j], a); }
  double qt_at(std::size_t j, double a) const { return sample(qt[j], a); }

  /// t^2 e^0_1 at (R, a) (unregularized logs).
  double value(double R, double a) const {
    const double l = std::log(R);
    double top = 0, sub = 0, lj = 1;
    for (std::size_t j = 0; j < q.size(); ++j, lj *= l) top += q_at(j, a) * lj;
    lj = 1;
    for (std::size_t j = 0; j < qt.size(); ++j, lj *= l) sub += qt_at(j, a) * lj;
    return a * a * (top / R + sub / (R * R));
  }

 private:
  double sample(const std::vector<double>& v, double a) const {
    if (a <= a_grid.front()) return v.front();
    if (a >= a_grid.back()) return v.back();
    return num::linear_sample(a_grid, v, a);
  }
};

inline PrincipalPart principal_part(const FirstError& e1, std::vector<double> a_grid,
                                    double fit_lo = 1e2, double fit_hi = 1e5,
                                    std::size_t n_fit = 200) {
  PrincipalPart pp;
  pp.odd_tail = far_pole_odd(*e1.interior().gs->profile);
  pp.a_grid = std::move(a_grid);
  pp.fit_lo = fit_lo;
  pp.fit_hi = fit_hi;
  pp.q.assign(2, std::vector<double>(pp.a_grid.size()));
  pp.qt.assign(3, std::vector<double>(pp.a_grid.size()));
  const auto Rs = num::logspace(fit_lo, fit_hi, n_fit);
  // Basis columns scaled by R (relative weighting): R^{1-p} log^j R, j <= p.
  struct Col { int p, j; };
  std::vector<Col> cols;
  const std::vector<int> degrees =
      pp.odd_tail ? std::vector<int>{1, 3, 5} : std::vector<int>{1, 2, 3, 4};
  for (int p : degrees)
    for (int j = 0; j <= p; ++j) cols.push_back({p, j});
  Eigen::MatrixXd A(n_fit, cols.size());
  for (std::size_t i = 0; i < n_fit; ++i) {
    const double R = Rs[i], l = std::log(R);
    for (std::size_t c = 0; c < cols.size(); ++c)
      A(i, c) = std::pow(R, 1 - cols[c].p) * std::pow(l, cols[c].j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  for (std::size_t ia = 0; ia < pp.a_grid.size(); ++ia) {
    const double a = pp.a_grid[ia];
    Eigen::VectorXd b(n_fit);
    for (std::size_t i = 0; i < n_fit; ++i) b(i) = Rs[i] * e1(Rs[i], a);
    const Eigen::VectorXd c = qr.solve(b);
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    pp.max_rel_residual = std::max(pp.max_rel_residual, (A * c - b).cwiseAbs().maxCoeff() / scale);
    const double a2 = a * a;
    pp.q[0][ia] = c(0) / a2;
    pp.q[1][ia] = c(1) / a2;
    for (std::size_t j = 0; j < 3; ++j) pp.qt[j][ia] = pp.odd_tail ? 0.0 : c(2 + j) / a2;
  }
  return pp;
}

}  // namespace wmblow
