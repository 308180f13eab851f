#pragma once

// Log-log exponent fitting used by every asymptotic check.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "wmblow/error.hpp"

namespace wmblow {

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;     ///< standard error of the slope
  Window window;
  std::size_t n_points = 0;
  double log_coef = 0.0;    ///< coefficient of log|log x| (log-corrected fits)
  double log_coef_stderr = 0.0;
  double rms_residual = 0.0;
};

enum class LogCorrection {
  kNone,   ///< log y = p log x + c
  kFixed,  ///< log y - q log|log x| = p log x + c with q given
  kFree,   ///< log y = p log x + q log|log x| + c
};

struct FitOptions {
  LogCorrection correction = LogCorrection::kNone;
  double log_power = 0.0;  ///< q for kFixed
  std::size_t min_points = 8;
};

/// Least squares A c = b (column-pivoted QR). Also returns the residual
/// variance estimate through `sigma2` when non-null.
inline Eigen::VectorXd lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double* sigma2 = nullptr, Eigen::MatrixXd* cov = nullptr) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd c = qr.solve(b);
  if (sigma2 || cov) {
    const auto dof = static_cast<double>(A.rows() - A.cols());
    const double s2 = dof > 0 ? (A * c - b).squaredNorm() / dof : 0.0;
    if (sigma2) *sigma2 = s2;
    if (cov) *cov = s2 * (A.transpose() * A).inverse();
  }
  return c;
}

inline FitResult fit_exponent(std::span<const double> x, std::span<const double> y,
                              Window window, const FitOptions& opt = {}) {
  std::vector<double> lx, ly, llx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.lo * (1 - 1e-12) || x[i] > window.hi * (1 + 1e-12)) continue;
    if (!(x[i] > 0) || !(y[i] > 0))
      throw DegenerateFit("non-positive sample in window at x = " + std::to_string(x[i]));
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    llx.push_back(std::log(std::abs(std::log(x[i]))));
  }
  const std::size_t n = lx.size();
  if (n < opt.min_points)
    throw DegenerateFit("need >= " + std::to_string(opt.min_points) + " points, got " +
                        std::to_string(n));
  double xmin = lx[0], xmax = lx[0];
  for (double v : lx) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  if (xmax - xmin < std::log(2.0)) throw DegenerateFit("x spread below a factor 2");

  const bool free = opt.correction == LogCorrection::kFree;
  Eigen::MatrixXd A(n, free ? 3 : 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = lx[i];
    A(i, 1) = 1.0;
    if (free) A(i, 2) = llx[i];
    b(i) = ly[i];
    if (opt.correction == LogCorrection::kFixed) b(i) -= opt.log_power * llx[i];
  }
  double s2 = 0;
  Eigen::MatrixXd cov;
  const Eigen::VectorXd c = lstsq(A, b, &s2, &cov);

  FitResult r;
  r.slope = c(0);
  r.intercept = c(1);
  r.stderr_ = std::sqrt(std::max(0.0, cov(0, 0)));
  r.window = window;
  r.n_points = n;
  r.rms_residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
  if (free) {
    r.log_coef = c(2);
    r.log_coef_stderr = std::sqrt(std::max(0.0, cov(2, 2)));
  } else if (opt.correction == LogCorrection::kFixed) {
    r.log_coef = opt.log_power;
  }
  return r;
}

}  // namespace wmblow
