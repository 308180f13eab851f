#include <gtest/gtest.h>

#include <cmath>

#include "wmblow/ground_state.hpp"

using namespace wmblow;
using num::kPi;

namespace {

double max_err_vs_arctan(const GroundState& gs, double lo, double hi) {
  double e = 0;
  for (std::size_t i = 0; i < gs.R_grid.size(); ++i) {
    const double R = gs.R_grid[i];
    if (R < lo || R > hi) continue;
    e = std::max(e, std::abs(gs.Q[i] - 2 * std::atan(R)));
  }
  return e;
}

}  // namespace

TEST(GroundState, SphereMatchesTwoArctan) {
  const auto gs = solve_ground_state(make_sphere());
  EXPECT_LT(max_err_vs_arctan(gs, 1e-3, 1e3), 1e-8);
  EXPECT_NEAR(gs.value(1.0), kPi / 2, 1e-10);
  // off-grid evaluation
  for (double R : {1e-3, 0.0123, 0.77, 3.3, 456.0})
    EXPECT_NEAR(gs.value(R), 2 * std::atan(R), 1e-8) << R;
}

TEST(GroundState, InvariantsHoldForAllTargets) {
  for (const char* key : {"sphere", "deformed:0.1", "deformed:-0.2"}) {
    const auto p = make_target(key);
    const auto gs = solve_ground_state(p);
    EXPECT_LT(gs.Q.front(), 1e-4) << key;
    EXPECT_LT(p.zero_D - gs.Q.back(), 1e-4) << key;
    for (std::size_t i = 1; i < gs.Q.size(); ++i) ASSERT_GT(gs.Q[i], gs.Q[i - 1]);
    EXPECT_NEAR(gs.value(1.0), p.turning, 1e-10) << key;
    EXPECT_LT(gs.max_static_residual(1e-3, 1e3), 1e-8) << key;
  }
}

TEST(GroundState, SecondDerivativeAgreesWithDifferences) {
  const auto gs = solve_ground_state(make_sphere());
  for (double R : {0.01, 0.5, 2.0, 30.0}) {
    const double exact2 = -4 * R / ((1 + R * R) * (1 + R * R));
    EXPECT_NEAR(gs.d2(R), exact2, 1e-8);
    EXPECT_NEAR(gs.d1(R), 2 / (1 + R * R), 1e-8);
  }
}

TEST(GroundState, ZeroModeSphere) {
  const auto gs = solve_ground_state(make_sphere());
  const auto z = zero_mode(gs);
  EXPECT_NEAR(z.at(1.0), 1.0, 1e-10);
  double e = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double R = z.R[i];
    if (R < 1e-3 || R > 1e3) continue;
    e = std::max(e, std::abs(z.value[i] - 2 * R / (1 + R * R)));
  }
  EXPECT_LT(e, 1e-8);
  EXPECT_LT(z.value.front(), 1e-5);
  EXPECT_LT(z.value.back(), 1e-5);
}

TEST(GroundState, ZeroModeIsInKernelOfLinearization) {
  for (const char* key : {"sphere", "deformed:0.1"}) {
    const auto gs = solve_ground_state(make_target(key));
    const auto z = zero_mode(gs);
    const auto Lz = apply_static_linearization(gs, z.value);
    double e = 0;
    for (std::size_t i = 0; i < z.size(); ++i)
      if (z.R[i] >= 1e-2 && z.R[i] <= 1e2) e = std::max(e, std::abs(Lz[i]));
    EXPECT_LT(e, 1e-6) << key;
  }
}

TEST(GroundState, ScalingCovariance) {
  const auto p = make_deformed_sphere(0.1);
  const auto gs = solve_ground_state(p);
  GridSpec spec;
  spec.normalization_point = 3.7;
  const auto gs_mu = solve_ground_state(p, spec);
  for (double R : {1e-2, 0.3, 1.0, 5.0, 40.0, 900.0})
    EXPECT_NEAR(gs_mu.value(R), gs.value(R / 3.7), 1e-8) << R;
}

TEST(GroundState, RefinementReducesStaticResidual) {
  const auto p = make_sphere();
  GridSpec coarse{1e-6, 1e6, 512, 1.0, 1e-2};
  GridSpec fine{1e-6, 1e6, 1024, 1.0, 1e-2};
  const double r1 = solve_ground_state(p, coarse).max_static_residual(1e-3, 1e3);
  const double r2 = solve_ground_state(p, fine).max_static_residual(1e-3, 1e3);
  EXPECT_GT(r1 / r2, 4.0);
}

TEST(GroundState, ConeHasNoOrbit) {
  const auto cone = make_profile(
      "cone", [](double x) { return x; }, [](double) { return 1.0; },
      [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_THROW(solve_ground_state(cone), NonConvergence);
}
