#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wmblow/geometry.hpp"

using namespace wmblow;
using num::kPi;

TEST(Geometry, SpherePoleAndEquator) {
  const auto s = make_sphere();
  EXPECT_DOUBLE_EQ(s.g(0), 0.0);
  EXPECT_DOUBLE_EQ(s.g1(0), 1.0);
  EXPECT_NEAR(s.f(kPi / 2), 0.0, 1e-16);
  EXPECT_DOUBLE_EQ(s.zero_D, kPi);
  EXPECT_DOUBLE_EQ(s.turning, kPi / 2);
}

TEST(Geometry, SphereFPrimeIsCosTwoU) {
  const auto s = make_sphere();
  EXPECT_NEAR(s.fp(0), 1.0, 1e-15);
  EXPECT_NEAR(s.fp(kPi / 2), -1.0, 1e-15);
  const double h = 1e-5;
  for (double u : {0.1, 0.8, 1.9, 2.7}) {
    EXPECT_NEAR(s.fp(u), std::cos(2 * u), 1e-14);
    EXPECT_NEAR((s.f(u + h) - s.f(u - h)) / (2 * h), std::cos(2 * u), 1e-9);
  }
}

TEST(Geometry, DeformedZeroIsSphere) {
  const auto d = make_deformed_sphere(0.0);
  const auto s = make_sphere();
  for (double x = -3.0; x <= 3.0; x += 0.173) {
    EXPECT_DOUBLE_EQ(d.g(x), s.g(x));
    EXPECT_DOUBLE_EQ(d.g1(x), s.g1(x));
    EXPECT_DOUBLE_EQ(d.g2(x), s.g2(x));
    EXPECT_DOUBLE_EQ(d.g3(x), s.g3(x));
  }
}

TEST(Geometry, DeformedValues) {
  const auto d = make_deformed_sphere(0.1);
  EXPECT_NEAR(d.g(kPi / 2), 1.1, 1e-15);
  EXPECT_NEAR(d.g(kPi), 0.0, 1e-15);
  EXPECT_TRUE(validate_profile(d).all_pass());
}

TEST(Geometry, DeformedRejectsOutOfRange) {
  EXPECT_THROW(make_deformed_sphere(0.5), InvalidProfile);
  EXPECT_THROW(make_deformed_sphere(-1.5), InvalidProfile);
}

TEST(Geometry, ValidateSphereAndDeformed) {
  const auto r = validate_profile(make_sphere());
  EXPECT_TRUE(r.all_pass());
  EXPECT_TRUE(validate_profile(make_deformed_sphere(0.15)).all_pass());
  EXPECT_TRUE(validate_profile(make_deformed_sphere(-0.2)).all_pass());
}

TEST(Geometry, FlatConeFailsAntipodeCheck) {
  const auto cone = make_profile(
      "cone", [](double x) { return x; }, [](double) { return 1.0; },
      [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_FALSE(std::isfinite(cone.zero_D));
  const auto r = validate_profile(cone);
  ASSERT_NE(r.find("g(zero_D)=0"), nullptr);
  EXPECT_FALSE(r.find("g(zero_D)=0")->pass);
  EXPECT_TRUE(r.find("pole g'(0)=1")->pass);
}

TEST(Geometry, NumericalZerosOfGenericProfile) {
  const auto p = make_profile(
      "deformed-generic",
      [](double x) { return std::sin(x) * (1 + 0.1 * std::sin(x) * std::sin(x)); },
      [](double x) { return std::cos(x) * (1 + 0.3 * std::sin(x) * std::sin(x)); },
      [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_NEAR(p.zero_D, kPi, 1e-12);
  EXPECT_NEAR(p.turning, kPi / 2, 1e-12);
}

// Every registered target: endpoints are zeros of f, derivatives agree with
// finite differences at random points.
TEST(Geometry, RegisteredProfilesProperties) {
  std::mt19937_64 rng(7);
  for (const char* key : {"sphere", "deformed:0.1", "deformed:-0.15", "deformed:0.2"}) {
    const auto p = make_target(key);
    EXPECT_LT(std::abs(p.f(0.0)), 1e-10) << key;
    EXPECT_LT(std::abs(p.f(p.zero_D)), 1e-10) << key;
    std::uniform_real_distribution<double> u(0.05, 3.0);
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      EXPECT_NEAR((p.g(x + h) - p.g(x - h)) / (2 * h), p.g1(x), 1e-6 * std::max(1.0, std::abs(p.g1(x))));
      EXPECT_NEAR((p.g1(x + h) - p.g1(x - h)) / (2 * h), p.g2(x), 1e-6 * std::max(1.0, std::abs(p.g2(x))));
      EXPECT_NEAR((p.g2(x + h) - p.g2(x - h)) / (2 * h), p.g3(x), 1e-6 * std::max(1.0, std::abs(p.g3(x))));
      EXPECT_NEAR((p.fp(x + h) - p.fp(x - h)) / (2 * h), p.fpp(x), 1e-6 * std::max(1.0, std::abs(p.fpp(x))));
    }
  }
}

TEST(Geometry, TargetKeyErrors) {
  EXPECT_THROW(make_target("torus"), ConfigError);
  EXPECT_THROW(make_target("deformed:abc"), ConfigError);
}
