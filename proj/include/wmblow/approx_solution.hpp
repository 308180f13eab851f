#pragma once

// The k = 1 approximate solution u_2 = Q(R) + v_1 + v_2 as one object, its
// evaluation at physical (t, r), initial data for the evolver and the
// decay-gain measurement of e_2 against e_0.

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "wmblow/energy.hpp"
#include "wmblow/error.hpp"
#include "wmblow/fit.hpp"
#include "wmblow/ground_state.hpp"
#include "wmblow/light_cone.hpp"
#include "wmblow/profile_builder.hpp"

namespace wmblow {

struct ApproxOptions {
  GridSpec ground{};
  std::size_t n_a_fit = 33;  ///< a-samples for the principal part
  double fit_lo = 1e2, fit_hi = 1e5;
  ConeOptions cone{};
};

struct ApproxSolution {
  double nu = 0.0;
  int k_steps = 1;
  std::shared_ptr<const GroundState> gs;
  std::shared_ptr<const InteriorCorrection> interior;  ///< w, with v_1 = w / sigma^2
  std::shared_ptr<const FirstError> e1;
  PrincipalPart principal;
  ConeSource source;
  std::shared_ptr<const EvenCorrection> v2;
  std::shared_ptr<const SecondError> e2;

  double kappa() const { return 1.0 + nu; }
  double sigma(double t) const { return std::pow(t, -nu); }
  double lambda(double t) const { return std::pow(t, -1.0 - nu); }

  /// u_level(t, r): level 0 is Q(lambda r), 1 adds v_1, 2 adds v_2.
  double u(double t, double r, int level = 2) const {
    const double R = lambda(t) * r;
    double out = gs->value(R);
    if (level >= 1 && R > 0.0) {
      const double s = sigma(t);
      out += interior->value(R) / (s * s);
    }
    if (level >= 2 && r > 0.0) out += v2->value(R, light_cone_a(t, r));
    return out;
  }

  /// d_t u_level at fixed r, from the chain rule through (sigma, R, a).
  double ut(double t, double r, int level = 2) const {
    const double R = lambda(t) * r;
    const double k = kappa();
    double tdt = -k * R * gs->d1(R);
    if (level >= 1 && R > 0.0) {
      const double s = sigma(t);
      tdt += (2.0 * nu * interior->value(R) - k * R * interior->d1(R)) / (s * s);
    }
    if (level >= 2 && r > 0.0) tdt += v2->eval(R, light_cone_a(t, r)).t_dt;
    return tdt / t;
  }

 private:
  double light_cone_a(double t, double r) const {
    const double a = r / t;
    if (a > 1.0) throw ContractViolation("approximate solution evaluated outside r <= t");
    return std::min(a, v2->a_max());
  }
};

inline ApproxSolution build_approx_solution(const SurfaceProfile& p, double nu,
                                            const ApproxOptions& opt = {}) {
  if (!(nu > 0.0)) throw ConfigError("nu must be positive");
  ApproxSolution s;
  s.nu = nu;
  s.gs = std::make_shared<const GroundState>(solve_ground_state(p, opt.ground));
  s.interior = std::make_shared<const InteriorCorrection>(step1_correction(s.gs, nu));
  s.e1 = std::make_shared<const FirstError>(s.interior, nu);
  // Chebyshev-Lobatto samples in a keep the polynomial fit well conditioned
  std::vector<double> ag;
  const std::size_t m = opt.n_a_fit;
  for (std::size_t i = 0; i < m; ++i)
    ag.push_back(0.02 + 0.98 * 0.5 * (1.0 - std::cos(num::kPi * i / (m - 1.0))));
  s.principal = principal_part(*s.e1, ag, opt.fit_lo, opt.fit_hi);
  s.source = cone_source(s.principal, nu);
  s.v2 = std::make_shared<const EvenCorrection>(step3_correction(s.source, opt.cone));
  s.e2 = std::make_shared<const SecondError>(s.e1, s.v2);
  return s;
}

// ---------------------------------------------------------------------------
// Initial data

struct InitialData {
  double t0 = 0.0;
  std::vector<double> r, u, ut;
};

/// Weight that is 1 for r <= t0 (1 - width) and 0 for r >= t0 (C^2 quintic blend).
inline double cone_cutoff(double r, double t0, double width) {
  if (width <= 0.0 || r >= t0) return r < t0 ? 1.0 : 0.0;
  return 1.0 - num::smoothstep((r / t0 - (1.0 - width)) / width);
}

/// u = Q(lambda r) + chi (u_level - Q), u_t likewise, with chi the cone cutoff.
inline InitialData assemble_data(const ApproxSolution& s, double t0, std::span<const double> r_grid,
                                 double cutoff_width, int level = 2) {
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive");
  if (r_grid.empty() || r_grid.back() <= t0)
    throw ConfigError("radial grid must extend beyond r = t0");
  InitialData d;
  d.t0 = t0;
  d.r.assign(r_grid.begin(), r_grid.end());
  d.u.resize(d.r.size());
  d.ut.resize(d.r.size());
  const double lam = s.lambda(t0);
  for (std::size_t i = 0; i < d.r.size(); ++i) {
    const double r = d.r[i];
    const double R = lam * r;
    const double q = r > 0.0 ? s.gs->value(R) : 0.0;
    const double qt = r > 0.0 ? -s.kappa() * R * s.gs->d1(R) / t0 : 0.0;
    const double chi = level > 0 ? cone_cutoff(r, t0, cutoff_width) : 0.0;
    d.u[i] = q;
    d.ut[i] = qt;
    if (chi > 0.0 && r > 0.0) {
      d.u[i] += chi * (s.u(t0, r, level) - q);
      d.ut[i] += chi * (s.ut(t0, r, level) - qt);
    }
  }
  return d;
}

inline double data_energy(const ApproxSolution& s, const InitialData& d) {
  return field_energy(d.r, d.u, d.ut, *s.gs->profile);
}

// ---------------------------------------------------------------------------
// Decay gain

struct DecayGain {
  std::vector<double> sigma, sup_e0, sup_e1, sup_e2;
  FitResult fit;     ///< slope of sup e2 / sup e0 against sigma
  FitResult fit_e1;  ///< same for e1, for comparison
};

/// For each sigma = t lambda: sup over 0 < a <= a_max (R = a sigma) of |t^2 e_k|,
/// against sup over the same R-range of |t^2 e_0|.
inline DecayGain decay_gain(const ApproxSolution& s, const std::vector<double>& sigmas,
                            double a_max = 0.5, std::size_t n = 600) {
  DecayGain g;
  std::vector<double> r2, r1;
  for (double sig : sigmas) {
    double m0 = 0, m1 = 0, m2 = 0;
    for (double R : num::logspace(1e-3, a_max * sig, n)) {
      const double a = R / sig;
      m0 = std::max(m0, std::abs(initial_error_at(*s.gs, s.nu, R)));
      m1 = std::max(m1, std::abs((*s.e1)(R, a)));
      m2 = std::max(m2, std::abs((*s.e2)(R, a)));
    }
    g.sigma.push_back(sig);
    g.sup_e0.push_back(m0);
    g.sup_e1.push_back(m1);
    g.sup_e2.push_back(m2);
    r2.push_back(m2 / m0);
    r1.push_back(m1 / m0);
  }
  FitOptions fo;
  fo.min_points = 3;
  const Window w{sigmas.front(), sigmas.back()};
  g.fit = fit_exponent(g.sigma, r2, w, fo);
  g.fit_e1 = fit_exponent(g.sigma, r1, w, fo);
  return g;
}

}  // namespace wmblow
