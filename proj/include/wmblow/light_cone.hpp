#pragma once

// Steps 3 and 4 of the approximate-solution scheme: the self-similar
// correction v_2 near the light cone and the resulting error e_2.
//
// Writing v = t^mu W(a) G(R), the conjugated wave operator factorizes with
// A = a d_a acting on W and D = R d_R acting on G:
//   t^2 Lt (t^mu W G) = t^mu { a^-2 [(A + D)^2 - 1] - X^2 + X } (W G),
//   X = mu - A - kappa D,  kappa = 1 + nu,
// where Lt = -d_t^2 + d_r^2 + r^-1 d_r - r^-2. Matching powers of log R gives
//   Lmu W_j + F_j = S_j,
//   Lmu W  = (1 - a^2) W'' + (1/a + (2 mu - 2) a) W' + (mu - mu^2 - a^-2) W,
//   F_j    = (j+1) B1 W_{j+1} + (j+1)(j+2) B2 W_{j+2},
//   B1 W   = (2/a - 2 kappa a) W' + kappa (2 mu - 1) W,   B2 W = (a^-2 - kappa^2) W.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "wmblow/error.hpp"
#include "wmblow/fit.hpp"
#include "wmblow/numerics.hpp"
#include "wmblow/profile_builder.hpp"

namespace wmblow {

/// Principal part coefficients as polynomials in a^2.
struct ConeSource {
  double nu = 0.0;
  std::array<std::vector<double>, 2> q;   ///< coefficients of a q_j(a) sigma^-1 log^j R
  std::array<std::vector<double>, 3> qt;  ///< coefficients of qt_i(a) sigma^-2 log^i R
  double max_fit_residual = 0.0;

  static double horner(const std::vector<double>& c, double a) {
    const double z = a * a;
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
  }
  double q_at(std::size_t j, double a) const { return horner(q[j], a); }
  double qt_at(std::size_t i, double a) const { return horner(qt[i], a); }
  bool is_zero() const {
    for (const auto& v : q)
      for (double c : v)
        if (c != 0.0) return false;
    for (const auto& v : qt)
      for (double c : v)
        if (c != 0.0) return false;
    return true;
  }
};

inline ConeSource zero_cone_source(double nu) {
  ConeSource s;
  s.nu = nu;
  for (auto& v : s.q) v.assign(1, 0.0);
  for (auto& v : s.qt) v.assign(1, 0.0);
  return s;
}

/// Fits each coefficient of the principal part with a polynomial in a^2
/// (e_1 / a^2 is analytic in a^2 since v_1 carries the factor a^2).
inline ConeSource cone_source(const PrincipalPart& pp, double nu, int degree = 8) {
  ConeSource s;
  s.nu = nu;
  const std::size_t n = pp.a_grid.size();
  if (n <= static_cast<std::size_t>(degree))
    throw ContractViolation("cone_source: a-grid smaller than polynomial degree");
  Eigen::MatrixXd V(n, degree + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = pp.a_grid[i] * pp.a_grid[i];
    double p = 1.0;
    for (int d = 0; d <= degree; ++d, p *= z) V(i, d) = p;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  auto fit = [&](const std::vector<double>& y) {
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    const Eigen::VectorXd c = qr.solve(b);
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    s.max_fit_residual = std::max(s.max_fit_residual, (V * c - b).cwiseAbs().maxCoeff() / scale);
    return std::vector<double>(c.data(), c.data() + c.size());
  };
  for (std::size_t j = 0; j < 2; ++j) s.q[j] = fit(pp.q[j]);
  for (std::size_t i = 0; i < 3; ++i) s.qt[i] = fit(pp.qt[i]);
  return s;
}

/// Exponent s of the singular part in W(x) ~ c0 + c1 x + c2 x^2 + c3 x^s,
/// x = 1 - a, together with the slope of log|W'| against log x.
struct EndpointReport {
  double exponent = 0.0;
  double amplitude = 0.0;
  double rms_residual = 0.0;
  double derivative_slope = 0.0;
};

/// Nodes on [a0, 1 - delta]: geometric near 0, uniform in the middle,
/// geometric in 1 - a near the light cone.
inline std::vector<double> cone_nodes(double a0 = 1e-4, double delta = 1e-4, double ratio = 1.01,
                                      double h_mid = 5e-4) {
  std::vector<double> a{a0};
  while (a.back() * ratio < 0.05) a.push_back(a.back() * ratio);
  const double a_mid = 0.5;
  const auto n_mid = static_cast<std::size_t>(std::ceil((a_mid - 0.05) / h_mid));
  for (std::size_t i = 0; i <= n_mid; ++i)
    a.push_back(0.05 + (a_mid - 0.05) * static_cast<double>(i) / static_cast<double>(n_mid));
  double x = 1.0 - a_mid;
  while (x / ratio > delta) {
    x /= ratio;
    a.push_back(1.0 - x);
  }
  a.push_back(1.0 - delta);
  return a;
}

struct ConeOptions {
  double a0 = 1e-4;
  double delta = 1e-4;
  int substeps = 2;
  double endpoint_lo = 2e-4;  ///< window in x = 1 - a for the endpoint fit
  double endpoint_hi = 1e-2;
  /// Exponent used by the blow-up guard; NaN means use the nominal mu of each group.
  double guard_mu = std::numeric_limits<double>::quiet_NaN();
  /// Overrides of the group exponents (nominal: nu and 2 nu).
  double mu_top = std::numeric_limits<double>::quiet_NaN();
  double mu_sub = std::numeric_limits<double>::quiet_NaN();
};

/// The five profiles W^0, W^1 (exponent nu) and Wt^0, Wt^1, Wt^2 (exponent 2 nu)
/// of v_2, sampled on the cone nodes with their a-derivatives.
class EvenCorrection {
 public:
  static constexpr std::size_t kComp = 5;
  using State = num::Vec<2 * kComp>;

  double nu = 0.0;
  std::array<double, 2> mu{};  ///< group exponents
  ConeSource src;
  std::vector<double> a;
  std::array<std::vector<double>, kComp> W, dW;
  std::array<double, kComp> axis_coef{};  ///< W^j ~ c a^3, Wt^i ~ d a^2
  std::array<EndpointReport, kComp> endpoint{};
  std::size_t dominant = 0;  ///< component with the largest singular amplitude

  static bool top(std::size_t c) { return c < 2; }
  static std::size_t power(std::size_t c) { return top(c) ? c : c - 2; }
  double mu_of(std::size_t c) const { return top(c) ? mu[0] : mu[1]; }
  double kappa() const { return 1.0 + nu; }
  double a_max() const { return a.back(); }

  /// d/da of the packed state (W_0..W_4, W_0'..W_4').
  State rhs(double x, const State& y) const {
    State out{};
    const double k = kappa();
    for (std::size_t c = 0; c < kComp; ++c) {
      const double m = mu_of(c);
      const std::size_t j = power(c);
      const std::size_t hi = top(c) ? 2 : 3;
      double S = top(c) ? -x * src.q_at(j, x) : -src.qt_at(j, x);
      // coupling to the higher log powers of the same group
      for (std::size_t l = 1; l <= 2; ++l) {
        if (j + l >= hi) break;
        const std::size_t cc = c + l;
        const double Wl = y[cc], dWl = y[kComp + cc];
        if (l == 1) S -= (j + 1.0) * ((2.0 / x - 2.0 * k * x) * dWl + k * (2.0 * m - 1.0) * Wl);
        else S -= (j + 1.0) * (j + 2.0) * (1.0 / (x * x) - k * k) * Wl;
      }
      const double Wc = y[c], dWc = y[kComp + c];
      out[c] = dWc;
      out[kComp + c] =
          (S - (1.0 / x + (2.0 * m - 2.0) * x) * dWc - (m - m * m - 1.0 / (x * x)) * Wc) /
          (1.0 - x * x);
    }
    return out;
  }

  State state_at(double x) const {
    State y{};
    if (x <= a.front()) {
      for (std::size_t c = 0; c < kComp; ++c) {
        const double p = top(c) ? 3.0 : 2.0;
        y[c] = axis_coef[c] * std::pow(x, p);
        y[kComp + c] = p * axis_coef[c] * std::pow(x, p - 1.0);
      }
      return y;
    }
    const double xc = std::min(x, a.back());
    const std::size_t i = num::bracket(a, xc);
    const State yi = node_state(i), yj = node_state(i + 1);
    const State di = rhs(a[i], yi), dj = rhs(a[i + 1], yj);
    for (std::size_t c = 0; c < kComp; ++c) {
      y[c] = num::hermite(a[i], a[i + 1], yi[c], yj[c], di[c], dj[c], xc);
      y[kComp + c] =
          num::hermite(a[i], a[i + 1], yi[kComp + c], yj[kComp + c], di[kComp + c], dj[kComp + c], xc);
    }
    return y;
  }

  State node_state(std::size_t i) const {
    State y{};
    for (std::size_t c = 0; c < kComp; ++c) {
      y[c] = W[c][i];
      y[kComp + c] = dW[c][i];
    }
    return y;
  }

  /// v_2 and its time derivative t d_t v_2 (fixed r) and t^2 Lt v_2 at (R, a).
  struct Eval {
    double v = 0.0, t_dt = 0.0, wave = 0.0;
  };

  Eval eval(double R, double x) const {
    if (!(x > 0.0) || x > 1.0) throw ContractViolation("v_2 evaluated outside the light cone");
    const double sigma = R / x;
    const double R2 = R * R, op = 1.0 + R2;
    const double L = 0.5 * std::log1p(R2), DL = R2 / op, D2L = 2.0 * R2 / (op * op);
    const double rho = R / std::sqrt(op), Drho = rho / op, D2rho = rho * (1.0 - 2.0 * R2) / (op * op);
    const double k = kappa();
    const State y = state_at(x);
    const State d = rhs(std::min(x, a.back()), y);

    Eval out;
    for (std::size_t c = 0; c < kComp; ++c) {
      const double w = y[c], w1 = y[kComp + c], w2 = d[kComp + c];
      if (w == 0.0 && w1 == 0.0) continue;
      const double m = mu_of(c);
      const int j = static_cast<int>(power(c));
      const double Lj = std::pow(L, j);
      const double DLj = j >= 1 ? j * std::pow(L, j - 1) * DL : 0.0;
      const double D2Lj = (j >= 2 ? j * (j - 1) * std::pow(L, j - 2) * DL * DL : 0.0) +
                          (j >= 1 ? j * std::pow(L, j - 1) * D2L : 0.0);
      double G = Lj, DG = DLj, D2G = D2Lj, scale = 1.0 / sigma;
      if (!top(c)) {
        G = rho * Lj;
        DG = Drho * Lj + rho * DLj;
        D2G = D2rho * Lj + 2.0 * Drho * DLj + rho * D2Lj;
        scale /= sigma;
      }
      const double LW = (1 - x * x) * w2 + (1 / x + (2 * m - 2) * x) * w1 + (m - m * m - 1 / (x * x)) * w;
      const double B1 = (2 / x - 2 * k * x) * w1 + k * (2 * m - 1) * w;
      const double B2 = (1 / (x * x) - k * k) * w;
      out.v += scale * w * G;
      out.t_dt += scale * (m * w * G - x * w1 * G - k * w * DG);
      out.wave += scale * (LW * G + B1 * DG + B2 * D2G);
    }
    return out;
  }
  double value(double R, double x) const { return eval(R, x).v; }
};

namespace detail {

inline EndpointReport fit_endpoint(const std::vector<double>& a, const std::vector<double>& w,
                                   const std::vector<double>& dw, double lo, double hi) {
  std::vector<double> xs, ys, lx, ld;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = 1.0 - a[i];
    if (x < lo * (1 - 1e-9) || x > hi * (1 + 1e-9)) continue;
    xs.push_back(x);
    ys.push_back(w[i]);
    if (dw[i] != 0.0) {
      lx.push_back(std::log(x));
      ld.push_back(std::log(std::abs(dw[i])));
    }
  }
  EndpointReport r;
  if (xs.size() < 8) return r;
  const std::size_t n = xs.size();
  auto solve = [&](double s, Eigen::VectorXd* coef) {
    Eigen::MatrixXd A(n, 4);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
      A(i, 0) = 1.0;
      A(i, 1) = xs[i];
      A(i, 2) = xs[i] * xs[i];
      A(i, 3) = std::pow(xs[i], s);
      b(i) = ys[i];
    }
    const Eigen::VectorXd c = lstsq(A, b);
    if (coef) *coef = c;
    return std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
  };
  // coarse scan then golden refinement around the best point
  double best = 0.1, fbest = solve(0.1, nullptr);
  for (double s = 0.1; s <= 3.0; s += 0.02) {
    const double f = solve(s, nullptr);
    if (f < fbest) {
      fbest = f;
      best = s;
    }
  }
  const double s = num::golden_min([&](double v) { return solve(v, nullptr); },
                                   std::max(0.05, best - 0.02), best + 0.02, 1e-8);
  Eigen::VectorXd c;
  r.rms_residual = solve(s, &c);
  r.exponent = s;
  r.amplitude = c(3);
  if (lx.size() >= 2) {
    Eigen::MatrixXd A(lx.size(), 2);
    Eigen::VectorXd b(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
      A(i, 0) = lx[i];
      A(i, 1) = 1.0;
      b(i) = ld[i];
    }
    r.derivative_slope = lstsq(A, b)(0);
  }
  return r;
}

}  // namespace detail

/// Step 3: integrates both groups as one coupled system from the axis series
/// W^j ~ c_j a^3, Wt^i ~ d_i a^2 up to a = 1 - delta.
inline EvenCorrection step3_correction(const ConeSource& src, const ConeOptions& opt = {}) {
  EvenCorrection ec;
  ec.nu = src.nu;
  ec.mu = {std::isnan(opt.mu_top) ? src.nu : opt.mu_top,
           std::isnan(opt.mu_sub) ? 2.0 * src.nu : opt.mu_sub};
  ec.src = src;
  ec.a = cone_nodes(opt.a0, opt.delta);
  const std::size_t n = ec.a.size();
  for (auto& v : ec.W) v.assign(n, 0.0);
  for (auto& v : ec.dW) v.assign(n, 0.0);

  // axis series, highest log power first
  auto& c = ec.axis_coef;
  c[1] = -src.q_at(1, 0.0) / 8.0;
  c[0] = (-src.q_at(0, 0.0) - 6.0 * c[1]) / 8.0;
  c[4] = -src.qt_at(2, 0.0) / 3.0;
  c[3] = (-src.qt_at(1, 0.0) - 8.0 * c[4]) / 3.0;
  c[2] = (-src.qt_at(0, 0.0) - 4.0 * c[3] - 2.0 * c[4]) / 3.0;

  if (src.is_zero()) return ec;

  EvenCorrection::State y = ec.state_at(ec.a[0]);
  auto store = [&](std::size_t i) {
    for (std::size_t k = 0; k < EvenCorrection::kComp; ++k) {
      ec.W[k][i] = y[k];
      ec.dW[k][i] = y[EvenCorrection::kComp + k];
    }
  };
  store(0);
  auto f = [&ec](double x, const EvenCorrection::State& s) { return ec.rhs(x, s); };
  for (std::size_t i = 1; i < n; ++i) {
    y = num::rk4_advance<2 * EvenCorrection::kComp>(f, ec.a[i - 1], ec.a[i], y, opt.substeps);
    for (double v : y)
      if (!std::isfinite(v))
        throw SingularEndpoint("light-cone system diverged at a = " + std::to_string(ec.a[i]));
    store(i);
  }

  // lower log powers inherit (1-a)^s log(1-a) from the ones above them, so only
  // the highest nonzero power of each group has a clean endpoint slope
  auto leading = [&ec](std::size_t k) {
    const std::size_t last = EvenCorrection::top(k) ? 1 : 4;
    for (std::size_t c = k + 1; c <= last; ++c)
      for (double v : ec.W[c])
        if (v != 0.0) return false;
    return true;
  };
  double amp = -1.0;
  for (std::size_t k = 0; k < EvenCorrection::kComp; ++k) {
    ec.endpoint[k] = detail::fit_endpoint(ec.a, ec.W[k], ec.dW[k], opt.endpoint_lo, opt.endpoint_hi);
    if (!leading(k)) continue;
    const double guard = std::isnan(opt.guard_mu) ? ec.mu_of(k) : opt.guard_mu;
    const double slope = ec.endpoint[k].derivative_slope;
    // half a power of slack absorbs the log factor at integer exponents
    if (slope < std::min(0.0, guard - 0.5) - 0.5)
      throw SingularEndpoint("W component " + std::to_string(k) + " has |W'| ~ (1-a)^" +
                             std::to_string(slope) + ", faster than (1-a)^" +
                             std::to_string(guard - 0.5));
    if (EvenCorrection::top(k) && std::abs(ec.endpoint[k].amplitude) > amp) {
      amp = std::abs(ec.endpoint[k].amplitude);
      ec.dominant = k;
    }
  }
  return ec;
}

// ---------------------------------------------------------------------------
// Step 4

struct SecondErrorParts {
  double e1 = 0.0;    ///< t^2 e_1
  double wave = 0.0;  ///< t^2 Lt v_2
  double I = 0.0;     ///< a^-2 [f(u1+v2) - f(u1) - f'(u1) v2]
  double II = 0.0;    ///< a^-2 (f'(u1) - f'(u0)) v2
  double III = 0.0;   ///< a^-2 (f'(u0) - 1) v2
  double total() const { return e1 + wave - (I + II + III); }
};

class SecondError {
 public:
  SecondError(std::shared_ptr<const FirstError> e1, std::shared_ptr<const EvenCorrection> v2)
      : e1_(std::move(e1)), v2_(std::move(v2)) {}

  SecondErrorParts parts(double R, double x) const {
    if (!(x > 0.0) || x > v2_->a_max())
      throw ContractViolation("e_2 evaluated outside the resolved light cone");
    SecondErrorParts out;
    out.e1 = (*e1_)(R, x);
    const auto ev = v2_->eval(R, x);
    out.wave = ev.wave;
    const auto& gs = *e1_->interior().gs;
    const auto& p = *gs.profile;
    const double q = gs.value(R);
    const double u1 = q + e1_->v1(R, x);
    const double v = ev.v, a2 = x * x;
    out.I = taylor_remainder2(p, u1, v) / a2;
    out.II = (p.fp(u1) - p.fp(q)) * v / a2;
    out.III = (p.fp(q) - 1.0) * v / a2;
    return out;
  }
  double operator()(double R, double x) const { return parts(R, x).total(); }

 private:
  std::shared_ptr<const FirstError> e1_;
  std::shared_ptr<const EvenCorrection> v2_;
};

}  // namespace wmblow
