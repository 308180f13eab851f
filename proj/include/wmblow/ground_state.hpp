#pragma once

// The stationary harmonic map Q(R) connecting the poles 0 and zero_D, obtained
// from the first-order reduction R Q' = g(Q), i.e. dQ/ds = g(Q) in s = log R.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "wmblow/error.hpp"
#include "wmblow/geometry.hpp"
#include "wmblow/numerics.hpp"
#include "wmblow/radial_field.hpp"

namespace wmblow {

struct GridSpec {
  double r_min = 1e-6;
  double r_max = 1e6;
  std::size_t n = 4096;
  double normalization_point = 1.0;  ///< R at which Q = turning
  double max_substep = 2e-3;         ///< RK4 step bound in s = log R
};

class GroundState {
 public:
  std::vector<double> R_grid, Q, Q1, Q2;
  std::shared_ptr<const SurfaceProfile> profile;

  /// Q at arbitrary R > 0: Hermite in log R inside the grid, pole
  /// asymptotics outside it.
  double value(double R) const {
    const double s = std::log(R);
    if (s <= s_.front()) return Q.front() * (R / R_grid.front());
    if (s >= s_.back()) {
      const double D = profile->zero_D;
      const double p = profile->g1(D);  // D - Q ~ R^{g'(D)}
      return D - (D - Q.back()) * std::pow(R / R_grid.back(), p);
    }
    const std::size_t i = num::bracket(s_, s);
    return num::hermite(s_[i], s_[i + 1], Q[i], Q[i + 1], profile->g(Q[i]),
                        profile->g(Q[i + 1]), s);
  }
  double d1(double R) const { return profile->g(value(R)) / R; }
  double d2(double R) const {
    const double q = value(R);
    return (profile->g1(q) - 1.0) * profile->g(q) / (R * R);
  }

  /// R^2 Q'' + R Q' - f(Q) evaluated with a 5-point finite-difference
  /// second derivative in log R of the stored samples.
  std::vector<double> static_residual() const {
    const auto qss = num::derivative(s_, Q, 2, 5);
    std::vector<double> r(Q.size());
    for (std::size_t i = 0; i < Q.size(); ++i) r[i] = qss[i] - profile->f(Q[i]);
    return r;
  }

  double max_static_residual(double r_lo, double r_hi) const {
    const auto res = static_residual();
    double m = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i)
      if (R_grid[i] >= r_lo && R_grid[i] <= r_hi) m = std::max(m, std::abs(res[i]));
    return m;
  }

  std::span<const double> log_grid() const { return s_; }

 private:
  friend GroundState solve_ground_state(const SurfaceProfile&, const GridSpec&);
  std::vector<double> s_;
};

inline GroundState solve_ground_state(const SurfaceProfile& p, const GridSpec& spec = {}) {
  if (!(spec.r_min > 0 && spec.r_max > spec.r_min && spec.n >= 8))
    throw ConfigError("ground-state grid needs 0 < r_min < r_max and n >= 8");
  if (!std::isfinite(p.turning) || !std::isfinite(p.zero_D) || p.turning >= p.zero_D)
    throw NonConvergence("profile '" + p.name +
                         "' has no equator before an antipode; no orbit from 0 to zero_D");

  GroundState gs;
  gs.profile = std::make_shared<const SurfaceProfile>(p);
  gs.R_grid = num::logspace(spec.r_min, spec.r_max, spec.n);
  gs.s_.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) gs.s_[i] = std::log(gs.R_grid[i]);
  gs.Q.assign(spec.n, 0.0);

  auto rhs = [&p](double, const num::Vec<1>& y) { return num::Vec<1>{p.g(y[0])}; };
  auto advance = [&](double s0, double s1, double q) {
    const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(s1 - s0) / spec.max_substep)));
    return num::rk4_advance<1>(rhs, s0, s1, num::Vec<1>{q}, sub)[0];
  };

  const double s_norm = std::log(spec.normalization_point);
  const auto& s = gs.s_;
  // Integrate outward in both directions from the normalization point.
  std::size_t k = num::bracket(s, s_norm);
  if (s_norm < s.front()) k = 0;
  // forward: nodes k+1 .. n-1 (or from node 0 if s_norm precedes the grid)
  {
    double sc = s_norm, q = p.turning;
    for (std::size_t i = (s_norm < s.front() ? 0 : k + 1); i < spec.n; ++i) {
      q = advance(sc, s[i], q);
      sc = s[i];
      gs.Q[i] = q;
    }
  }
  if (s_norm >= s.front()) {
    double sc = s_norm, q = p.turning;
    for (std::size_t j = k + 1; j-- > 0;) {
      q = advance(sc, s[j], q);
      sc = s[j];
      gs.Q[j] = q;
    }
  }

  for (std::size_t i = 1; i < spec.n; ++i)
    if (!(gs.Q[i] > gs.Q[i - 1]) || !(gs.Q[i] < p.zero_D) || !(gs.Q[i - 1] > 0))
      throw NonConvergence("ground-state orbit is not monotone inside (0, zero_D)");

  gs.Q1.resize(spec.n);
  gs.Q2.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double R = gs.R_grid[i], q = gs.Q[i];
    gs.Q1[i] = p.g(q) / R;
    gs.Q2[i] = (p.g1(q) - 1.0) * p.g(q) / (R * R);
  }
  return gs;
}

/// Scaling zero mode phi0 = R Q'(R) = g(Q(R)), with its R-derivative.
inline RadialField zero_mode(const GroundState& gs) {
  RadialField z;
  z.R = gs.R_grid;
  z.value.resize(gs.Q.size());
  z.dvalue.resize(gs.Q.size());
  for (std::size_t i = 0; i < gs.Q.size(); ++i) {
    z.value[i] = gs.profile->g(gs.Q[i]);
    z.dvalue[i] = gs.profile->g1(gs.Q[i]) * gs.Q1[i];
  }
  return z;
}

/// L h = h'' + h'/R - f'(Q) h / R^2 of samples on the ground-state grid,
/// via a 5-point second derivative in log R.
inline std::vector<double> apply_static_linearization(const GroundState& gs,
                                                      std::span<const double> h) {
  const auto hss = num::derivative(gs.log_grid(), h, 2, 5);
  std::vector<double> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double R = gs.R_grid[i];
    out[i] = (hss[i] - gs.profile->fp(gs.Q[i]) * h[i]) / (R * R);
  }
  return out;
}

}  // namespace wmblow
