#pragma once

// Co-rotational energy E = 2 pi int (u_t^2 + u_r^2 + g(u)^2 / r^2) r dr.

#include <cmath>
#include <span>

#include "wmblow/error.hpp"
#include "wmblow/geometry.hpp"
#include "wmblow/numerics.hpp"

namespace wmblow {

/// Trapezoid weights for the pointwise terms, midpoint differences for u_r.
/// Samples with r <= 0 contribute nothing (u = 0 on the axis).
/// Integration is restricted to r <= r_cut when r_cut > 0.
inline double field_energy(std::span<const double> r, std::span<const double> u,
                           std::span<const double> ut, const SurfaceProfile& p,
                           double r_cut = 0.0) {
  if (r.size() != u.size() || r.size() != ut.size() || r.size() < 2)
    throw ContractViolation("field_energy: size mismatch");
  std::size_t n = r.size();
  if (r_cut > 0.0)
    while (n > 2 && r[n - 1] > r_cut) --n;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = r[i + 1] - r[i];
    const double rm = 0.5 * (r[i] + r[i + 1]);
    const double du = (u[i + 1] - u[i]) / h;
    acc += h * rm * du * du;
    for (std::size_t k : {i, i + 1}) {
      if (r[k] <= 0.0) continue;
      const double gk = p.g(u[k]);
      acc += 0.5 * h * r[k] * (ut[k] * ut[k] + gk * gk / (r[k] * r[k]));
    }
  }
  return 2.0 * num::kPi * acc;
}

/// Energy of the harmonic map, 4 pi int_0^D g (Bogomolny bound), by Gauss-Legendre.
inline double harmonic_map_energy(const SurfaceProfile& p, int panels = 64) {
  static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563,
                                  0.3399810435848563, 0.8611363115940526};
  static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461,
                                  0.6521451548625461, 0.3478548451374538};
  const double h = p.zero_D / panels;
  double acc = 0.0;
  for (int k = 0; k < panels; ++k)
    for (int i = 0; i < 4; ++i) acc += 0.5 * h * w[i] * p.g(h * (k + 0.5 * (x[i] + 1.0)));
  return 4.0 * num::kPi * acc;
}

}  // namespace wmblow
