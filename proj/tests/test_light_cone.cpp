#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "wmblow/approx_solution.hpp"

using namespace wmblow;

namespace {

const ApproxSolution& approx(const std::string& key, double nu, std::size_t n = 4096) {
  static std::map<std::tuple<std::string, double, std::size_t>, ApproxSolution> cache;
  auto k = std::make_tuple(key, nu, n);
  auto it = cache.find(k);
  if (it == cache.end()) {
    ApproxOptions o;
    o.ground.n = n;
    it = cache.emplace(k, build_approx_solution(make_target(key), nu, o)).first;
  }
  return it->second;
}

template <class F>
double d1(F f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}
template <class F>
double d2(F f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST(ConeSource, ZeroSourceGivesZeroCorrection) {
  const auto ec = step3_correction(zero_cone_source(0.4));
  for (double x : {1e-3, 0.2, 0.7, 0.99}) {
    const auto y = ec.state_at(x);
    for (double v : y) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(ec.value(3.0 * x, x), 0.0);
  }
}

TEST(ConeSource, OddTailTargetsHaveNoSecondGroup) {
  const auto& s = approx("sphere", 0.25);
  EXPECT_TRUE(s.principal.odd_tail);
  for (double x : {0.0, 0.3, 0.9})
    for (int i = 0; i < 3; ++i) EXPECT_EQ(s.source.qt_at(i, x), 0.0);
  EXPECT_LT(s.source.max_fit_residual, 1e-6);
}

TEST(EvenCorrection, AxisBehaviour) {
  for (const char* key : {"sphere", "deformed:0.1"}) {
    const auto& s = approx(key, 0.5);
    const auto& ec = *s.v2;
    for (std::size_t c = 0; c < EvenCorrection::kComp; ++c) {
      const double p = EvenCorrection::top(c) ? 3.0 : 2.0;
      for (double x : {1e-3, 1e-2, 5e-2}) {
        const double ratio = ec.state_at(x)[c] / std::pow(x, p);
        EXPECT_NEAR(ratio, ec.axis_coef[c], 0.05 * std::abs(ec.axis_coef[c]) + 1e-12) << key << " " << c;
      }
    }
  }
}

TEST(EvenCorrection, SolvesOdeAtInteriorPoints) {
  const auto& ec = *approx("deformed:0.1", 0.3).v2;
  // compare the stored W'' (from the ODE) against differences of the node values
  for (double x : {0.1, 0.4, 0.8}) {
    const double h = 1e-3;
    for (std::size_t c = 0; c < 2; ++c) {
      auto w = [&](double z) { return ec.state_at(z)[c]; };
      const double fd = d2(w, x, h);
      const double an = ec.rhs(x, ec.state_at(x))[EvenCorrection::kComp + c];
      EXPECT_NEAR(fd, an, 1e-4 * (std::abs(an) + 1.0)) << x << " " << c;
    }
  }
}

TEST(EvenCorrection, EndpointExponentIsNuPlusHalf) {
  for (double nu : {0.25, 0.75}) {
    const auto& ec = *approx("sphere", nu).v2;
    EXPECT_NEAR(ec.endpoint[ec.dominant].exponent, nu + 0.5, 0.1) << nu;
    // the profile itself stays bounded up to the cone
    for (std::size_t c = 0; c < EvenCorrection::kComp; ++c) EXPECT_TRUE(std::isfinite(ec.W[c].back()));
  }
}

TEST(EvenCorrection, GuardRejectsSingularExponent) {
  const auto& s = approx("sphere", 0.25);
  ConeOptions o;
  o.mu_top = -1.0;
  o.guard_mu = 0.25;
  EXPECT_THROW(step3_correction(s.source, o), SingularEndpoint);
}

TEST(EvenCorrection, RejectsPointsOutsideCone) {
  const auto& ec = *approx("sphere", 0.25).v2;
  EXPECT_THROW(ec.eval(1.0, 1.2), ContractViolation);
  EXPECT_THROW(ec.eval(1.0, 0.0), ContractViolation);
}

TEST(SecondError, ZeroCorrectionReproducesFirstError) {
  const auto& s = approx("deformed:0.1", 0.4);
  auto zero = std::make_shared<const EvenCorrection>(step3_correction(zero_cone_source(0.4)));
  const SecondError e2(s.e1, zero);
  for (double R : {0.1, 2.0, 30.0}) {
    const double x = R / 64.0;
    EXPECT_DOUBLE_EQ(e2(R, x), (*s.e1)(R, x));
  }
}

TEST(SecondError, MatchesWaveOperatorOnApproximateSolution) {
  for (const char* key : {"sphere", "deformed:0.1"}) {
    const double nu = 0.25;
    const auto& s = approx(key, nu, 65536);
    const auto& p = *s.gs->profile;
    for (double sigma : {4.0, 8.0})
      for (double a : {0.3, 0.5}) {
        const double t = std::pow(sigma, -1.0 / nu), r = a * t, R = a * sigma;
        const double ht = 2e-3 * t, hr = 2e-3 * r;
        const double utt = d2([&](double z) { return s.u(z, r); }, t, ht);
        const double urr = d2([&](double z) { return s.u(t, z); }, r, hr);
        const double ur = d1([&](double z) { return s.u(t, z); }, r, hr);
        const double fd = t * t * (-utt + urr + ur / r - p.f(s.u(t, r)) / (r * r));
        const double an = (*s.e2)(R, a);
        EXPECT_LT(std::abs(fd - an), 1e-3 * std::abs(an)) << key << " sigma=" << sigma << " a=" << a;
      }
  }
}

TEST(SecondError, GainsTwoPowersOfSigma) {
  for (double nu : {0.25, 0.5}) {
    const auto g = decay_gain(approx("sphere", nu), {8, 16, 32, 64, 128, 256, 512});
    EXPECT_NEAR(g.fit.slope, -2.0, 0.2) << nu;
    EXPECT_LT(g.fit.slope, g.fit_e1.slope - 0.5) << nu;
  }
  const auto g = decay_gain(approx("deformed:0.1", 0.25), {8, 16, 32, 64, 128, 256, 512});
  EXPECT_NEAR(g.fit.slope, -2.0, 0.2);
}

TEST(ApproxSolution, TimeDerivativeMatchesDifferences) {
  const auto& s = approx("deformed:0.1", 0.5);
  const double t = 0.02;
  for (double a : {0.05, 0.3, 0.6}) {
    const double r = a * t;
    for (int level : {0, 1, 2}) {
      const double fd = d1([&](double z) { return s.u(z, r, level); }, t, 1e-4 * t);
      const double an = s.ut(t, r, level);
      EXPECT_NEAR(fd, an, 1e-6 * (std::abs(an) + 1.0 / t)) << a << " " << level;
    }
  }
}

TEST(InitialData, LevelZeroIsRescaledGroundState) {
  const auto& s = approx("sphere", 0.5);
  const double t0 = 0.1;
  const auto r = num::linspace(0.0, 2.0, 801);
  const auto d = assemble_data(s, t0, r, 0.1, 0);
  const double lam = s.lambda(t0);
  for (std::size_t i = 1; i < r.size(); i += 40) {
    const double R = lam * r[i];
    EXPECT_DOUBLE_EQ(d.u[i], s.gs->value(R));
    EXPECT_DOUBLE_EQ(d.ut[i], -1.5 * R * s.gs->d1(R) / t0);
  }
  EXPECT_EQ(d.u[0], 0.0);
}

TEST(InitialData, CutoffSeamIsSmooth) {
  const auto& s = approx("sphere", 0.5);
  const double t0 = 0.1;
  // corrections vanish outside r = t0 and the blend is C^2
  for (double r : {t0, 1.01 * t0, 2 * t0}) EXPECT_EQ(cone_cutoff(r, t0, 0.1), 0.0);
  EXPECT_EQ(cone_cutoff(0.85 * t0, t0, 0.1), 1.0);
  const double lam = s.lambda(t0);
  const double eps = 1e-9 * t0;
  const auto r = std::vector<double>{t0 - eps, t0, t0 + eps, 3 * t0};
  const auto d = assemble_data(s, t0, r, 0.1, 2);
  EXPECT_LT(std::abs(d.u[0] - d.u[2]), 1e-8);
  EXPECT_NEAR(d.u[2], s.gs->value(lam * r[2]), 1e-15);
}

TEST(InitialData, RejectsShortGrid) {
  const auto& s = approx("sphere", 0.5);
  const auto r = num::linspace(0.0, 0.05, 11);
  EXPECT_THROW(assemble_data(s, 0.1, r, 0.1), ConfigError);
}

TEST(Energy, SphereHarmonicMapIsEightPi) {
  EXPECT_NEAR(harmonic_map_energy(make_sphere()), 8.0 * num::kPi, 1e-12);
}

TEST(Energy, StaticEnergyIsScaleInvariant) {
  const auto& s = approx("sphere", 0.5);
  const auto& gs = *s.gs;
  const double ref = harmonic_map_energy(*gs.profile);
  for (double lam : {1.0, 10.0, 100.0}) {
    // nonuniform grid resolving the core at 1/lam
    std::vector<double> r{0.0};
    for (double x : num::logspace(1e-5, 1e5, 40001)) r.push_back(x / lam);
    std::vector<double> u(r.size()), ut(r.size(), 0.0);
    for (std::size_t i = 1; i < r.size(); ++i) u[i] = gs.value(lam * r[i]);
    EXPECT_NEAR(field_energy(r, u, ut, *gs.profile), ref, 1e-6 * ref) << lam;
  }
}

TEST(Energy, DataEnergyConvergesUnderRefinement) {
  const auto& s = approx("sphere", 0.5);
  const double t0 = 0.1;
  auto energy = [&](std::size_t n) {
    const auto r = num::linspace(0.0, 4.0, n);
    return data_energy(s, assemble_data(s, t0, r, 0.1, 2));
  };
  const double e1 = energy(1 << 15), e2 = energy(1 << 16), e3 = energy(1 << 17);
  EXPECT_LT(std::abs(e3 - e2), 1e-4 * e3);
  EXPECT_LT(std::abs(e3 - e2), std::abs(e2 - e1));
}
