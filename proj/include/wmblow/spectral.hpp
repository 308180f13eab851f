#pragma once

// Half-power conjugated linearization  -d_R^2 + 3/(4R^2) + V(R)  and its
// distorted Fourier transform: generalized eigenfunctions regular at the axis,
// the spectral density from their far-field amplitude, the transform pair,
// weighted norms and the transference diagonal diagnostic.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wmblow/error.hpp"
#include "wmblow/ground_state.hpp"
#include "wmblow/numerics.hpp"
#include "wmblow/radial_field.hpp"

namespace wmblow {

struct LinearizedOperator {
  std::shared_ptr<const GroundState> gs;  ///< null for the free operator
  std::function<double(double)> V;
  double V0 = 0.0;     ///< V(0+)
  double m_inf = 1.0;  ///< 3/(4R^2) + V ~ (m_inf^2 - 1/4) / R^2 at infinity
  std::vector<double> R, Vs;  ///< samples on the ground-state grid

  double potential(double r) const { return r <= 0.0 ? V0 : V(r); }
  /// (-d^2 + 3/(4R^2) + V) h from h and h''.
  double apply(double r, double h, double h2) const {
    return -h2 + (0.75 / (r * r) + potential(r)) * h;
  }
};

inline LinearizedOperator build_operator(std::shared_ptr<const GroundState> gs) {
  LinearizedOperator op;
  op.gs = gs;
  const auto& p = *gs->profile;
  // V(0) = f'''(0) Q'(0)^2 / 2 and f'''(0) = 4 g'''(0) for odd g
  const double q1 = gs->value(gs->R_grid.front()) / gs->R_grid.front();
  op.V0 = 2.0 * p.g3(0.0) * q1 * q1;
  op.m_inf = std::abs(p.g1(p.zero_D));
  constexpr double r_series = 1e-3;
  auto direct = [gs](double r) { return -(1.0 - gs->profile->fp(gs->value(r))) / (r * r); };
  const double v_s = direct(r_series), V0 = op.V0;
  op.V = [direct, v_s, V0](double r) {
    if (r >= r_series) return direct(r);
    const double z = r / r_series;
    return V0 + (v_s - V0) * z * z;
  };
  op.R = gs->R_grid;
  op.Vs.reserve(op.R.size());
  for (double r : op.R) op.Vs.push_back(op.V(r));
  return op;
}

/// V = 0: the m = 1 Bessel operator, with transform kernel (2/k) R^{1/2} J_1(kR).
inline LinearizedOperator free_operator() {
  LinearizedOperator op;
  op.V = [](double) { return 0.0; };
  op.V0 = 0.0;
  op.m_inf = 1.0;
  return op;
}

/// R^{1/2} R Q'(R), annihilated by the operator.
inline double resonance(const GroundState& gs, double r) {
  return std::sqrt(r) * gs.profile->g(gs.value(r));
}

/// Pointwise residual of the operator on the resonance, with exact derivatives
/// from R Q' = g(Q).
inline double resonance_residual(const LinearizedOperator& op, double r) {
  const auto& p = *op.gs->profile;
  const double q = op.gs->value(r);
  const double g = p.g(q), g1 = p.g1(q), g2 = p.g2(q);
  const double phi = g, dphi = g1 * g / r;
  const double d2phi = (g2 * g * g + g1 * g1 * g - g1 * g) / (r * r);
  const double s = std::sqrt(r);
  const double h = s * phi;
  const double h2 = -0.25 * phi / (r * s) + dphi / s + s * d2phi;
  return op.apply(r, h, h2);
}

// ---------------------------------------------------------------------------
// Generalized eigenfunctions

struct EigenOptions {
  double r_start = 1e-4;
  double kh = 0.05;        ///< RK4 step as a fraction of 1/sqrt(xi)
  double rel_h = 0.02;     ///< and as a fraction of R
  double r_match = 200.0;  ///< far-field fit starts here
  int periods = 6;
  double r_limit = 1e5;
};

namespace detail {

using Pair = num::Vec<2>;

/// Integrates phi'' = (3/(4R^2) + V - xi) phi through the given increasing
/// nodes, starting from the Frobenius branch R^{3/2}(1 + (V0 - xi) R^2 / 8).
/// obs(i, phi, phi') is called at every node.
template <class Obs>
void integrate_eigen(const LinearizedOperator& op, double xi, const std::vector<double>& nodes,
                     const EigenOptions& opt, Obs&& obs) {
  const double b = (op.V0 - xi) / 8.0;
  auto rhs = [&op, xi](double r, const Pair& y) {
    return Pair{y[1], (0.75 / (r * r) + op.potential(r) - xi) * y[0]};
  };
  double r = opt.r_start;
  Pair y{std::pow(r, 1.5) * (1.0 + b * r * r), std::sqrt(r) * (1.5 + 3.5 * b * r * r)};
  const double inv_k = xi > 0.0 ? 1.0 / std::sqrt(xi) : 1e300;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double target = nodes[i];
    if (target <= r) {
      // nodes inside the start radius take the series value
      const double z = std::max(target, 0.0);
      obs(i, std::pow(z, 1.5) * (1.0 + b * z * z), std::sqrt(z) * (1.5 + 3.5 * b * z * z));
      continue;
    }
    while (r < target) {
      const double h = std::min({target - r, opt.kh * inv_k, opt.rel_h * r + 1e-300});
      y = num::rk4_step<2>(rhs, r, y, h);
      r = (target - r - h <= 1e-14 * target) ? target : r + h;
    }
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
      throw StepFailure("eigenfunction integration failed at xi = " + std::to_string(xi) +
                        ", R = " + std::to_string(r));
    obs(i, y[0], y[1]);
  }
}

}  // namespace detail

/// phi(., xi) on the given grid (any increasing R >= 0).
inline RadialField generalized_eigenfunction(const LinearizedOperator& op, double xi,
                                             const std::vector<double>& grid,
                                             const EigenOptions& opt = {}) {
  if (xi < 0.0) throw ContractViolation("generalized_eigenfunction needs xi >= 0");
  RadialField out;
  out.R = grid;
  out.value.resize(grid.size());
  out.dvalue.resize(grid.size());
  detail::integrate_eigen(op, xi, grid, opt, [&](std::size_t i, double v, double dv) {
    out.value[i] = v;
    out.dvalue[i] = dv;
  });
  return out;
}

struct FarField {
  double amplitude = 0.0;  ///< phi ~ A sin(sqrt(xi) R + theta)
  double phase = 0.0;
  double rms_residual = 0.0;  ///< relative to A
};

/// Least-squares fit of phi to alpha sqrt(R) J_m(kR) + beta sqrt(R) Y_m(kR) over
/// a window of opt.periods wavelengths beyond max(r_match, R_from).
inline FarField far_field(const LinearizedOperator& op, double xi, const EigenOptions& opt = {},
                          double r_from = 0.0) {
  if (!(xi > 0.0)) throw AmplitudeExtraction("far field needs xi > 0");
  const double k = std::sqrt(xi);
  const double period = 2.0 * num::kPi / k;
  const double lo = std::max(opt.r_match, r_from);
  const double hi = lo + opt.periods * period;
  if (opt.periods < 5 || hi > opt.r_limit)
    throw AmplitudeExtraction("oscillation window for xi = " + std::to_string(xi) +
                              " holds fewer than 5 periods below R = " + std::to_string(opt.r_limit));
  const std::size_t per = 16;
  const std::size_t m = per * static_cast<std::size_t>(opt.periods) + 1;
  std::vector<double> nodes = num::linspace(lo, hi, m);
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  detail::integrate_eigen(op, xi, nodes, opt, [&](std::size_t i, double v, double) {
    const double r = nodes[i], s = std::sqrt(r);
    A(i, 0) = s * std::cyl_bessel_j(op.m_inf, k * r);
    A(i, 1) = s * std::cyl_neumann(op.m_inf, k * r);
    b(i) = v;
  });
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  FarField f;
  // sqrt(R) J_m(kR) ~ sqrt(2/(pi k)) cos(kR - m pi/2 - pi/4), Y_m likewise with sin
  f.amplitude = std::sqrt(2.0 / (num::kPi * k)) * std::hypot(c(0), c(1));
  f.phase = std::atan2(c(0), -c(1));
  f.rms_residual = (A * c - b).norm() / std::sqrt(double(m)) / f.amplitude;
  if (!std::isfinite(f.amplitude) || f.amplitude <= 0.0)
    throw AmplitudeExtraction("amplitude fit failed at xi = " + std::to_string(xi));
  return f;
}

// ---------------------------------------------------------------------------
// Spectral basis

struct SpectralOptions {
  double r_max = 16.0;    ///< transform grid [0, r_max]
  std::size_t n_r = 4096;
  EigenOptions eigen{};
};

struct SpectralBasis {
  std::vector<double> r_grid;   ///< uniform, starting at 0
  std::vector<double> r_weight; ///< trapezoid weights
  std::vector<double> xi_grid;  ///< log-spaced, strictly positive
  std::vector<double> xi_weight;  ///< trapezoid weights in log xi, times xi
  std::vector<double> amplitude, rho, rho1;
  Eigen::MatrixXd phi;          ///< phi(R_i, xi_j)
  double c_norm = 1.0;
  /// int_0^{xi_min} rho, from 1/(xi rho) = q0 L^2 + q1 L + q2 (L = log xi) fitted
  /// on the lowest decade, or from a power law when rho vanishes at the origin.
  double tail_mass = 0.0;
  std::array<double, 3> tail_quad{};
};

using SpectralCoefficients = std::vector<double>;

namespace detail {

inline std::vector<double> log_derivative(const std::vector<double>& xi, const std::vector<double>& y) {
  // xi d/dxi by centered differences in log xi, fourth order inside
  const std::size_t n = xi.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j >= 2 && j + 2 < n) {
      const double h = (std::log(xi[j + 2]) - std::log(xi[j - 2])) / 4.0;
      out[j] = (-y[j + 2] + 8.0 * y[j + 1] - 8.0 * y[j - 1] + y[j - 2]) / (12.0 * h);
      continue;
    }
    const std::size_t a = j == 0 ? 0 : j - 1, b = j + 1 == n ? n - 1 : j + 1;
    out[j] = (y[b] - y[a]) / (std::log(xi[b]) - std::log(xi[a]));
  }
  return out;
}

inline void fit_tail(SpectralBasis& B) {
  // with a zero-energy resonance, 1/(xi rho) is a quadratic in log xi with
  // positive discriminant; otherwise rho vanishes like a power
  B.tail_mass = 0.0;
  B.tail_quad = {0.0, 0.0, 0.0};
  const double x0 = B.xi_grid[0];
  std::size_t m = 0;
  while (m < B.xi_grid.size() && B.xi_grid[m] <= 10.0 * x0) ++m;
  m = std::max<std::size_t>(m, 6);
  const double s = std::log(B.rho[m - 1] / B.rho[0]) / std::log(B.xi_grid[m - 1] / x0);
  if (s > -0.5) {
    if (s > -1.0) B.tail_mass = B.rho[0] * x0 / (s + 1.0);
    return;
  }
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double L = std::log(B.xi_grid[j]);
    A(j, 0) = L * L;
    A(j, 1) = L;
    A(j, 2) = 1.0;
    y(j) = 1.0 / (B.xi_grid[j] * B.rho[j]);
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  const double disc = 4.0 * c(0) * c(2) - c(1) * c(1);
  if (!(c(0) > 0.0) || !(disc > 0.0))
    throw AmplitudeExtraction("low-frequency density does not fit the resonant form");
  B.tail_quad = {c(0), c(1), c(2)};
  const double sd = std::sqrt(disc), L0 = std::log(x0);
  // int_{-inf}^{L0} dL / (c0 L^2 + c1 L + c2)
  B.tail_mass = (2.0 / sd) * (std::atan((2.0 * c(0) * L0 + c(1)) / sd) + 0.5 * num::kPi);
}

}  // namespace detail

/// Columns phi(., xi_j) on a uniform transform grid, far-field amplitudes and
/// rho = c_norm / (pi sqrt(xi) A^2).
inline SpectralBasis spectral_density(const LinearizedOperator& op, const std::vector<double>& xi_grid,
                                      const SpectralOptions& opt = {}) {
  if (xi_grid.size() < 8) throw ConfigError("spectral grid needs at least 8 frequencies");
  for (std::size_t j = 0; j < xi_grid.size(); ++j)
    if (!(xi_grid[j] > 0.0) || (j > 0 && xi_grid[j] <= xi_grid[j - 1]))
      throw ConfigError("spectral grid must be strictly positive and increasing");
  SpectralBasis B;
  B.xi_grid = xi_grid;
  B.r_grid = num::linspace(0.0, opt.r_max, opt.n_r);
  B.r_weight = num::trapezoid_weights(B.r_grid);
  const std::size_t n = B.r_grid.size(), m = xi_grid.size();
  B.phi.resize(n, m);
  B.amplitude.resize(m);
  B.rho.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double xi = xi_grid[j];
    detail::integrate_eigen(op, xi, B.r_grid, opt.eigen,
                            [&](std::size_t i, double v, double) { B.phi(i, j) = v; });
    const FarField ff = far_field(op, xi, opt.eigen, opt.r_max);
    B.amplitude[j] = ff.amplitude;
    B.rho[j] = 1.0 / (num::kPi * std::sqrt(xi) * ff.amplitude * ff.amplitude);
  }
  B.xi_weight.resize(m);
  const std::size_t last = m - 1;
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = j == 0 ? std::log(xi_grid[0]) : std::log(xi_grid[j - 1]);
    const double hi = j == last ? std::log(xi_grid[last]) : std::log(xi_grid[j + 1]);
    double w = 0.5 * (hi - lo);
    if (j == 0 || j == last) w = 0.5 * (hi - lo);
    B.xi_weight[j] = xi_grid[j] * w;
  }
  B.rho1 = detail::log_derivative(xi_grid, B.rho);
  for (std::size_t j = 0; j < m; ++j) B.rho1[j] /= xi_grid[j];
  detail::fit_tail(B);
  return B;
}

inline SpectralCoefficients distorted_ft(const SpectralBasis& B, std::span<const double> h) {
  if (h.size() != B.r_grid.size()) throw ContractViolation("distorted_ft: sample count mismatch");
  Eigen::VectorXd hw(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) hw(i) = h[i] * B.r_weight[i];
  const Eigen::VectorXd out = B.phi.transpose() * hw;
  return {out.data(), out.data() + out.size()};
}

inline SpectralCoefficients distorted_ft(const SpectralBasis& B, const std::function<double(double)>& h) {
  std::vector<double> s(B.r_grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = h(B.r_grid[i]);
  return distorted_ft(B, s);
}

/// Measure weights w_j rho_j c_norm, with the low-frequency tail lumped on the first node.
inline std::vector<double> measure(const SpectralBasis& B) {
  std::vector<double> w(B.xi_grid.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = B.c_norm * B.rho[j] * B.xi_weight[j];
  w[0] += B.c_norm * B.tail_mass;
  return w;
}

inline std::vector<double> distorted_ift(const SpectralBasis& B, std::span<const double> x) {
  if (x.size() != B.xi_grid.size()) throw ContractViolation("distorted_ift: coefficient count mismatch");
  const auto w = measure(B);
  Eigen::VectorXd xw(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) xw(j) = x[j] * w[j];
  const Eigen::VectorXd out = B.phi * xw;
  return {out.data(), out.data() + out.size()};
}

inline double weighted_norm(const SpectralBasis& B, std::span<const double> x, double alpha) {
  if (x.size() != B.xi_grid.size()) throw ContractViolation("weighted_norm: coefficient count mismatch");
  const auto w = measure(B);
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    acc += x[j] * x[j] * std::pow(1.0 + B.xi_grid[j] * B.xi_grid[j], alpha) * w[j];
  return std::sqrt(acc);
}

inline double l2_norm(const SpectralBasis& B, std::span<const double> h) {
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * h[i] * B.r_weight[i];
  return std::sqrt(acc);
}

/// Rescales rho so that Plancherel holds exactly on h; returns the new c_norm.
inline double calibrate(SpectralBasis& B, std::span<const double> h) {
  B.c_norm = 1.0;
  const double a = weighted_norm(B, distorted_ft(B, h), 0.0), b = l2_norm(B, h);
  B.c_norm = (b * b) / (a * a);
  return B.c_norm;
}

// ---------------------------------------------------------------------------
// Transference diagonal

struct DiagnosticReport {
  double norm_hat = 0.0;          ///< |F h| in L^{2,alpha}
  double norm_K_half = 0.0;       ///< |K h| in L^{2,1/2}
  double norm_K0_half = 0.0;      ///< |K0 h| in L^{2,1/2}
  std::array<double, 2> smoothing{};  ///< |K0 h|_{alpha+1/2} / |F h|_alpha for alpha = 0, 1/2
  std::vector<double> K, K0;
};

/// K h = F(R h') + 2 xi d_xi F h, K0 h = K h + (3/2 + xi rho'/rho) F h.
inline DiagnosticReport transference_diagnostic(const SpectralBasis& B, std::span<const double> h) {
  const std::size_t n = h.size();
  std::vector<double> rdh(n);
  const auto dh = num::derivative(B.r_grid, std::vector<double>(h.begin(), h.end()), 1, 5);
  for (std::size_t i = 0; i < n; ++i) rdh[i] = B.r_grid[i] * dh[i];
  const auto hat = distorted_ft(B, h);
  const auto hat_r = distorted_ft(B, rdh);
  const auto dlog = detail::log_derivative(B.xi_grid, hat);
  DiagnosticReport d;
  const std::size_t m = hat.size();
  d.K.resize(m);
  d.K0.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    d.K[j] = hat_r[j] + 2.0 * dlog[j];
    d.K0[j] = d.K[j] + (1.5 + B.xi_grid[j] * B.rho1[j] / B.rho[j]) * hat[j];
  }
  d.norm_hat = weighted_norm(B, hat, 0.0);
  d.norm_K_half = weighted_norm(B, d.K, 0.5);
  d.norm_K0_half = weighted_norm(B, d.K0, 0.5);
  const double h0 = weighted_norm(B, hat, 0.0), h1 = weighted_norm(B, hat, 0.5);
  d.smoothing[0] = h0 > 0 ? d.norm_K0_half / h0 : 0.0;
  d.smoothing[1] = h1 > 0 ? weighted_norm(B, d.K0, 1.0) / h1 : 0.0;
  return d;
}

}  // namespace wmblow
