#pragma once

// Method-of-lines integration of  -u_tt + u_rr + u_r/r = f(u)/r^2  backward in
// t, as forward evolution in s = t0 - t. The linear part u/r^2 sits in the
// conservative m = 1 stencil; (f(u) - u)/r^2 = O(r) is a regular source.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wmblow/approx_solution.hpp"
#include "wmblow/energy.hpp"
#include "wmblow/error.hpp"
#include "wmblow/fit.hpp"
#include "wmblow/geometry.hpp"
#include "wmblow/ground_state.hpp"
#include "wmblow/numerics.hpp"

namespace wmblow {

struct EvolutionState {
  double t = 0.0;
  std::vector<double> r, u, ut;  ///< ut is d_t u in physical time
  std::size_t step_count = 0;
  double dt = 0.0;
};

struct EvolveParams {
  double cfl = 0.5;
  double t_min = 0.0;          ///< stop time; 0 means t0 / 1000
  std::size_t snapshots = 40;  ///< geometric in t between t0 and t_min
  double min_cells = 10.0;     ///< stop when the level-set scale 1/lambda drops below this many cells
  double max_jump = 0.5;       ///< stop when |u_{i+1} - u_i| exceeds this anywhere
  double level = std::numeric_limits<double>::quiet_NaN();  ///< u value tracked for the inner scale
  std::size_t check_every = 10;
};

struct Trajectory {
  std::vector<EvolutionState> snapshots;
  std::vector<double> t, energy, outflow;  ///< energy samples and cumulative boundary outflow
  std::string stop_reason;
};

namespace detail {

/// First r where u crosses `level`, by bisection on the local cubic interpolant.
inline double level_crossing(std::span<const double> r, std::span<const double> u, double level) {
  std::size_t i = 1;
  while (i < u.size() && (u[i] - level) * (u[i - 1] - level) > 0.0 && u[i] != level) ++i;
  if (i >= u.size()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t a = i >= 2 ? i - 2 : 0;
  const std::size_t b = std::min(a + 3, u.size() - 1);
  auto cubic = [&](double x) {
    double s = 0.0;
    for (std::size_t j = a; j <= b; ++j) {
      double l = 1.0;
      for (std::size_t k = a; k <= b; ++k)
        if (k != j) l *= (x - r[k]) / (r[j] - r[k]);
      s += l * u[j];
    }
    return s - level;
  };
  return num::bisect(cubic, r[i - 1], r[i], 1e-14 * r[i]);
}

}  // namespace detail

class Evolver {
 public:
  Evolver(const SurfaceProfile& p, std::vector<double> r, std::vector<double> u,
          std::vector<double> ut, double t0, const EvolveParams& prm)
      : p_(p), prm_(prm), r_(std::move(r)), U_(std::move(u)), t0_(t0) {
    const std::size_t n = r_.size();
    if (n < 8 || U_.size() != n || ut.size() != n) throw ConfigError("evolver: bad grid sizes");
    if (r_.front() != 0.0) throw ConfigError("evolver grid must start at r = 0");
    h_ = r_[1] - r_[0];
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(r_[i] - r_[i - 1] - h_) > 1e-9 * h_) throw ConfigError("evolver grid must be uniform");
    if (!(prm.cfl > 0.0 && prm.cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
    V_.resize(n);
    for (std::size_t i = 0; i < n; ++i) V_[i] = -ut[i];
    U_[0] = 0.0;
    V_[0] = 0.0;
    for (int k = 0; k < 3; ++k) U_edge_[k] = U_[n - 1 - k];
    dt_ = prm.cfl * h_;
  }

  double t() const { return t0_ - s_; }
  double h() const { return h_; }
  std::size_t steps() const { return steps_; }

  EvolutionState state() const {
    EvolutionState st;
    st.t = t();
    st.r = r_;
    st.u = U_;
    st.ut.resize(V_.size());
    for (std::size_t i = 0; i < V_.size(); ++i) st.ut[i] = V_[i] == 0.0 ? 0.0 : -V_[i];
    st.step_count = steps_;
    st.dt = dt_;
    return st;
  }

  double energy() const {
    std::vector<double> ut(V_.begin(), V_.end());
    return field_energy(r_, U_, ut, p_);
  }

  /// 4 pi r u_r u_s at the outer node: rate of energy leaving through r_max.
  double outflow_rate() const {
    const std::size_t N = r_.size() - 1;
    const double ur = (3 * U_[N] - 4 * U_[N - 1] + U_[N - 2]) / (2 * h_);
    return -4.0 * num::kPi * r_[N] * ur * V_[N];
  }

  /// One RK4 step of size ds.
  void step(double ds) {
    const std::size_t n = U_.size();
    k1u_.resize(n), k1v_.resize(n), tu_.resize(n), tv_.resize(n);
    au_.assign(n, 0.0), av_.assign(n, 0.0);
    const double w[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
    const double c[4] = {0.0, 0.5, 0.5, 1.0};
    tu_ = U_;
    tv_ = V_;
    for (int st = 0; st < 4; ++st) {
      if (st > 0)
        for (std::size_t i = 0; i < n; ++i) {
          tu_[i] = U_[i] + c[st] * ds * k1u_[i];
          tv_[i] = V_[i] + c[st] * ds * k1v_[i];
        }
      rhs(tu_, tv_, k1u_, k1v_);
      for (std::size_t i = 0; i < n; ++i) {
        au_[i] += w[st] * k1u_[i];
        av_[i] += w[st] * k1v_[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      U_[i] += ds * au_[i];
      V_[i] += ds * av_[i];
    }
    U_[0] = 0.0;
    V_[0] = 0.0;
    V_[n - 1] = au_[n - 1];
    s_ += ds;
    ++steps_;
  }

  /// Advances to physical time t_target < t() with steps of at most cfl h.
  void advance_to(double t_target) {
    const double s_target = t0_ - t_target;
    while (s_ < s_target - 1e-15 * t0_) {
      const double ds = std::min(dt_, s_target - s_);
      step(ds);
    }
  }

  const std::vector<double>& u() const { return U_; }
  const std::vector<double>& r() const { return r_; }

 private:
  void rhs(const std::vector<double>& U, const std::vector<double>& V, std::vector<double>& du,
           std::vector<double>& dv) const {
    const std::size_t N = U.size() - 1;
    const double ih2 = 1.0 / (h_ * h_);
    du[0] = 0.0;
    dv[0] = 0.0;
    for (std::size_t i = 1; i < N; ++i) {
      const double r = r_[i];
      const double rp = r + 0.5 * h_, rm = r - 0.5 * h_;
      const double lap = (rp * (U[i + 1] - U[i]) - rm * (U[i] - U[i - 1])) * ih2 / r;
      const double u = U[i];
      du[i] = V[i];
      dv[i] = lap - p_.f(u) / (r * r);
    }
    // outgoing characteristic on the deviation from the initial edge data
    const double d0 = U[N] - U_edge_[0], d1 = U[N - 1] - U_edge_[1], d2 = U[N - 2] - U_edge_[2];
    du[N] = -(3 * d0 - 4 * d1 + d2) / (2 * h_) - d0 / (2 * r_[N]);
    dv[N] = 0.0;
  }

  const SurfaceProfile& p_;
  EvolveParams prm_;
  std::vector<double> r_, U_, V_;
  double t0_ = 0.0, s_ = 0.0, h_ = 0.0, dt_ = 0.0;
  double U_edge_[3] = {0.0, 0.0, 0.0};
  std::size_t steps_ = 0;
  mutable std::vector<double> k1u_, k1v_, tu_, tv_, au_, av_;
};

/// Evolves from t0 toward t_min, storing snapshots on a geometric t schedule.
inline Trajectory evolve(const SurfaceProfile& p, const InitialData& data, const EvolveParams& prm = {}) {
  if (!(data.t0 > 0.0)) throw ConfigError("initial time must be positive");
  const double t_min = prm.t_min > 0.0 ? prm.t_min : data.t0 * 1e-3;
  if (!(t_min < data.t0)) throw ConfigError("t_min must be below t0");
  if (prm.snapshots < 2) throw ConfigError("need at least two snapshots");
  Evolver ev(p, data.r, data.u, data.ut, data.t0, prm);
  const double level = std::isnan(prm.level) ? p.turning : prm.level;

  Trajectory tr;
  double e_prev = ev.energy(), out = 0.0, rate_prev = ev.outflow_rate();
  tr.t.push_back(data.t0);
  tr.energy.push_back(e_prev);
  tr.outflow.push_back(0.0);
  tr.snapshots.push_back(ev.state());

  auto resolved = [&](std::string& why) {
    const auto& u = ev.u();
    for (std::size_t i = 1; i < u.size(); ++i)
      if (std::abs(u[i] - u[i - 1]) > prm.max_jump) {
        why = "gradient unresolved at r = " + std::to_string(ev.r()[i]);
        return false;
      }
    if (std::isfinite(level)) {
      const double rc = detail::level_crossing(ev.r(), u, level);
      if (std::isfinite(rc) && rc < prm.min_cells * ev.h()) {
        why = "inner scale below " + std::to_string(prm.min_cells) + " cells";
        return false;
      }
    }
    return true;
  };
  std::string why;
  if (!resolved(why)) throw Underresolved("initial data: " + why + "; refine the grid");

  const double ratio = std::pow(t_min / data.t0, 1.0 / (prm.snapshots - 1.0));
  double t_next = data.t0 * ratio;
  std::size_t since = 0;
  tr.stop_reason = "reached t_min";
  while (true) {
    const double t_prev = ev.t();
    const double target = std::max(t_next, t_prev - prm.cfl * ev.h());
    ev.advance_to(target);
    const double rate = ev.outflow_rate();
    out += 0.5 * (rate + rate_prev) * (t_prev - ev.t());
    rate_prev = rate;
    const bool at_snap = ev.t() <= t_next * (1 + 1e-12);
    if (++since >= prm.check_every || at_snap) {
      since = 0;
      const double e = ev.energy();
      if (!std::isfinite(e) || e > 1.1 * e_prev + 1e-300)
        throw Instability("energy grew from " + std::to_string(e_prev) + " to " + std::to_string(e) +
                          " near t = " + std::to_string(ev.t()));
      e_prev = e;
      tr.t.push_back(ev.t());
      tr.energy.push_back(e);
      tr.outflow.push_back(out);
      if (!resolved(why)) {
        tr.stop_reason = why;
        break;
      }
    }
    if (at_snap) {
      tr.snapshots.push_back(ev.state());
      if (tr.snapshots.size() >= prm.snapshots) break;
      t_next *= ratio;
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// Energy of eps = u - ref over r <= window t, with density eps_t^2 + eps_r^2 + eps^2/r^2.
inline double local_energy_eps(const EvolutionState& st, const std::function<double(double)>& ref,
                               const std::function<double(double)>& ref_t, double window = 1.0) {
  const double rc = window * st.t;
  std::vector<double> r, e, et;
  for (std::size_t i = 0; i < st.r.size() && st.r[i] <= rc; ++i) {
    r.push_back(st.r[i]);
    const double x = st.r[i];
    e.push_back(x > 0 ? st.u[i] - ref(x) : 0.0);
    et.push_back(x > 0 ? st.ut[i] - ref_t(x) : 0.0);
  }
  if (r.size() < 2) return 0.0;
  return field_energy(r, e, et, make_flat());
}

/// eps measured against level `level` of the approximate solution.
inline double local_energy_eps(const EvolutionState& st, const ApproxSolution& s, int level = 0,
                               double window = 1.0) {
  return local_energy_eps(
      st, [&](double r) { return s.u(st.t, r, level); }, [&](double r) { return s.ut(st.t, r, level); },
      window);
}

inline double state_energy(const EvolutionState& st, const SurfaceProfile& p) {
  return field_energy(st.r, st.u, st.ut, p);
}

struct RateSeries {
  std::vector<double> t, lambda_level, lambda_lsq;
  FitResult fit_level, fit_lsq;
  double max_disagreement = 0.0;  ///< max |lambda_level / lambda_lsq - 1| in the window
  double slope_disagreement = 0.0;  ///< |slope_level / slope_lsq - 1|
  bool struwe_monotone = true;      ///< lambda t increases as t decreases
};

/// lambda from u(t, 1/lambda) = turning.
inline double lambda_level(const EvolutionState& st, double turning) {
  const double rc = detail::level_crossing(st.r, st.u, turning);
  if (!std::isfinite(rc) || rc <= 0.0)
    throw LevelNotCrossed("profile never reaches " + std::to_string(turning) + " at t = " +
                          std::to_string(st.t));
  return 1.0 / rc;
}

/// lambda minimizing int_0^2 |u(t, R / lambda) - Q(R)|^2 dR, near `guess`.
inline double lambda_lsq(const EvolutionState& st, const GroundState& gs, double guess) {
  const auto R = num::linspace(0.01, 2.0, 200);
  std::vector<double> q(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) q[i] = gs.value(R[i]);
  const double h = st.r[1] - st.r[0];
  auto interp = [&](double r) {
    const double x = r / h;
    std::size_t i = static_cast<std::size_t>(x);
    i = std::clamp<std::size_t>(i, 1, st.r.size() - 3);
    const double z = x - i;
    const double a = st.u[i - 1], b = st.u[i], c = st.u[i + 1], d = st.u[i + 2];
    return b + 0.5 * z * (c - a + z * (2 * a - 5 * b + 4 * c - d + z * (3 * (b - c) + d - a)));
  };
  auto cost = [&](double ll) {
    const double lam = std::exp(ll);
    double acc = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) {
      const double d = interp(R[i] / lam) - q[i];
      acc += d * d;
    }
    return acc;
  };
  return std::exp(num::golden_min(cost, std::log(guess) - 0.4, std::log(guess) + 0.4, 1e-10));
}

/// Both extractions at every snapshot, fitted over `window` in t.
inline RateSeries extract_lambda(const Trajectory& tr, const GroundState& gs, Window window) {
  if (tr.snapshots.size() < 10) throw DegenerateFit("rate extraction needs at least 10 snapshots, got " + std::to_string(tr.snapshots.size()));
  RateSeries rs;
  const double turning = gs.profile->turning;
  for (const auto& st : tr.snapshots) {
    const double ll = lambda_level(st, turning);
    rs.t.push_back(st.t);
    rs.lambda_level.push_back(ll);
    rs.lambda_lsq.push_back(lambda_lsq(st, gs, ll));
  }
  FitOptions fo;
  rs.fit_level = fit_exponent(rs.t, rs.lambda_level, window, fo);
  rs.fit_lsq = fit_exponent(rs.t, rs.lambda_lsq, window, fo);
  rs.slope_disagreement = std::abs(rs.fit_level.slope / rs.fit_lsq.slope - 1.0);
  double prev = -1.0;
  for (std::size_t i = 0; i < rs.t.size(); ++i) {
    if (rs.t[i] < window.lo || rs.t[i] > window.hi) continue;
    rs.max_disagreement = std::max(rs.max_disagreement, std::abs(rs.lambda_level[i] / rs.lambda_lsq[i] - 1.0));
    const double lt = rs.lambda_level[i] * rs.t[i];
    if (lt <= prev) rs.struwe_monotone = false;
    prev = lt;
  }
  return rs;
}

}  // namespace wmblow
