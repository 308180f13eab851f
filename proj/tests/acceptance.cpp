// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wmblow/harness.hpp"

using namespace wmblow;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& fn) {
  Outcome o;
  const auto t = Clock::now();
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              seconds_since(t));
  std::fflush(stdout);
}

// --- criterion 5/6 helpers

std::vector<double> bump_on(const std::vector<double>& r, double c, double w) {
  std::vector<double> h(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) h[i] = std::pow(r[i] / c, 1.5) * std::exp(-(r[i] - c) * (r[i] - c) / (w * w));
  return h;
}

std::vector<std::pair<double, double>> bump_params(int n, std::uint64_t seed = 2024) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(1.5, 4.0), uw(0.6, 1.2);
  std::vector<std::pair<double, double>> out;
  for (int k = 0; k < n; ++k) {
    const double c = uc(rng), w = uw(rng);
    out.emplace_back(c, w);
  }
  return out;
}

SpectralBasis sphere_basis(std::size_t n_xi, std::size_t n_r) {
  const auto gs = std::make_shared<const GroundState>(solve_ground_state(make_sphere()));
  SpectralOptions o;
  o.n_r = n_r;
  return spectral_density(build_operator(gs), num::logspace(1e-4, 1e2, n_xi), o);
}

// --- criterion 9 helpers

InitialData grid_data(double t0, double r_max, std::size_t n, const std::function<double(double)>& u,
                      const std::function<double(double)>& ut) {
  InitialData d;
  d.t0 = t0;
  d.r = num::linspace(0.0, r_max, n);
  for (double r : d.r) {
    d.u.push_back(u(r));
    d.ut.push_back(ut(r));
  }
  return d;
}

double standing_wave_error(std::size_t n) {
  const double k = 2.0;
  const auto d = grid_data(
      1.0, 20.0, n, [&](double r) { return std::cyl_bessel_j(1, k * r) * std::cos(k); },
      [&](double r) { return -k * std::cyl_bessel_j(1, k * r) * std::sin(k); });
  EvolveParams prm;
  prm.t_min = 0.5;
  prm.snapshots = 2;
  const auto tr = evolve(make_flat(), d, prm);
  const auto& st = tr.snapshots.back();
  double err = 0.0;
  for (std::size_t i = 0; i < st.r.size() && st.r[i] <= 15.0; ++i)
    err = std::max(err, std::abs(st.u[i] - std::cyl_bessel_j(1, k * st.r[i]) * std::cos(k * st.t)));
  return err;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

int main() {
  const auto sphere = make_sphere();
  const auto deformed = make_deformed_sphere(0.1);

  // Long evolutions start first and run concurrently with the cheap checks.
  const fs::path root = fs::temp_directory_path() / "wmblow_acceptance";
  fs::remove_all(root);
  const std::vector<double> rate_nus{0.25, 0.5, 1.0};
  std::map<double, std::future<std::pair<ArtifactBundle, double>>> runs;
  for (double nu : rate_nus) {
    ExperimentConfig c;
    c.nu = nu;
    c.t0 = 0.1;
    c.n_r = 1u << 14;
    c.output_dir = (root / ("rate_nu_" + detail::fmt_double(nu))).string();
    runs[nu] = std::async(std::launch::async, [c] {
      const auto t = Clock::now();
      auto b = run_experiment(c);
      return std::make_pair(std::move(b), seconds_since(t));
    });
  }

  report(1, "ground-state fidelity", [&] {
    const auto t = Clock::now();
    const auto gs = solve_ground_state(sphere);
    double err = 0.0;
    for (double R : num::logspace(1e-3, 1e3, 4001)) err = std::max(err, std::abs(gs.value(R) - 2.0 * std::atan(R)));
    const auto gd = solve_ground_state(deformed);
    const double res = gd.max_static_residual(1e-3, 1e3);
    const double dt = seconds_since(t);
    return Outcome{err < 1e-8 && res < 1e-8 && dt < 1.0,
                   fmt("sphere sup err %.2e, deformed residual %.2e, %.3f s for both", err, res, dt)};
  });

  report(2, "initial-error class", [&] {
    const auto t = Clock::now();
    std::string d;
    bool ok = true;
    for (const auto* p : {&sphere, &deformed}) {
      const auto gs = solve_ground_state(*p);
      for (double nu : {0.25, 0.5, 1.0}) {
        std::vector<double> R, e;
        for (double x : num::logspace(1e2, 1e4, 64)) {
          R.push_back(x);
          e.push_back(std::abs(initial_error_at(gs, nu, x)));
        }
        const double s = fit_exponent(R, e, {1e2, 1e4}).slope;
        ok = ok && std::abs(s + 1.0) <= 0.05;
        d += fmt("%s nu=%.2f slope %.4f; ", p->name.substr(0, 8).c_str(), nu, s);
      }
    }
    const double dt = seconds_since(t);
    return Outcome{ok && dt < 1.0, d + fmt("%.3f s", dt)};
  });

  report(3, "step-1 correction class", [&] {
    std::string d;
    bool ok = true;
    for (const auto* p : {&sphere, &deformed}) {
      const auto gs = std::make_shared<const GroundState>(solve_ground_state(*p));
      const auto w = step1_correction(gs, 0.5);
      const double c1 = fit_rlogr_coefficient(w, 1e2, 1e3), c2 = fit_rlogr_coefficient(w, 1e3, 1e4);
      const double drift = std::abs(c1 / c2 - 1.0);
      std::vector<double> R, a;
      for (double x : num::logspace(1e-4, 1e-2, 32)) {
        R.push_back(x);
        a.push_back(std::abs(w.value(x)));
      }
      const double axis = fit_exponent(R, a, {1e-4, 1e-2}).slope;
      const double res = interior_residual(w, 1e-2, 1e4);
      ok = ok && drift < 0.05 && std::abs(axis - 3.0) < 0.05 && res < 1e-6;
      d += fmt("%s c=%.4f drift %.1e axis power %.3f residual %.1e; ", p->name.substr(0, 8).c_str(), c2, drift, axis,
               res);
    }
    return Outcome{ok, d};
  });

  report(4, "double-step error gain", [&] {
    const auto t = Clock::now();
    std::vector<double> sig;
    for (int k = 3; k <= 9; ++k) sig.push_back(std::ldexp(1.0, k));
    std::string d;
    bool ok = true;
    for (double nu : {0.25, 1.0}) {
      const auto s = build_approx_solution(sphere, nu);
      const double p = decay_gain(s, sig).fit.slope;
      ok = ok && std::abs(p + 2.0) <= 0.2;
      d += fmt("nu=%.2f power %.3f; ", nu, p);
    }
    const double dt = seconds_since(t);
    return Outcome{ok && dt < 120.0, d + "sigma 8..512"};
  });

  report(5, "spectral sanity", [&] {
    const auto t = Clock::now();
    const auto gs = std::make_shared<const GroundState>(solve_ground_state(sphere));
    const auto op = build_operator(gs);
    double res = 0.0, pot = 0.0;
    for (double r : num::logspace(1e-2, 1e2, 400)) res = std::max(res, std::abs(resonance_residual(op, r)));
    for (double r : num::logspace(1e-3, 1e3, 400)) {
      const double ex = -8.0 / ((1 + r * r) * (1 + r * r));
      pot = std::max(pot, std::abs(op.potential(r) - ex));
    }
    const auto B = sphere_basis(256, 4096);
    double pl = 0.0;
    for (const auto& [c, w] : bump_params(5)) {
      const auto h = bump_on(B.r_grid, c, w);
      pl = std::max(pl, std::abs(weighted_norm(B, distorted_ft(B, h), 0.0) / l2_norm(B, h) - 1.0));
    }
    const double dt = seconds_since(t);
    return Outcome{res < 1e-6 && pl < 1e-2 && pot < 1e-8 && dt < 120.0,
                   fmt("resonance %.1e, worst Plancherel %.1e, potential %.1e, n_xi 256", res, pl, pot)};
  });

  report(6, "transference diagonal", [&] {
    const auto coarse = sphere_basis(128, 2048), fine = sphere_basis(256, 4096);
    int reduced = 0;
    double worst_ratio = 0.0, drift = 0.0;
    for (const auto& [c, w] : bump_params(5)) {
      const auto d = transference_diagnostic(fine, bump_on(fine.r_grid, c, w));
      const double ratio = d.norm_K0_half / d.norm_K_half;
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio <= 0.5) ++reduced;
      const auto dc = transference_diagnostic(coarse, bump_on(coarse.r_grid, c, w));
      for (int a = 0; a < 2; ++a) drift = std::max(drift, std::abs(dc.smoothing[a] / d.smoothing[a] - 1.0));
    }
    return Outcome{reduced >= 4 && drift < 0.1,
                   fmt("%d/5 bumps reduced >= 2x (worst K0/K %.2f), smoothing change %.1f%%", reduced, worst_ratio,
                       100 * drift)};
  });

  report(9, "solver verification", [&] {
    const auto d = grid_data(
        2.0, 10.0, 4096, [](double r) { return 1e-2 * r * std::exp(-(r - 3) * (r - 3)); }, [](double) { return 0.0; });
    EvolveParams prm;
    prm.t_min = 1.0;
    prm.snapshots = 5;
    const auto tr = evolve(make_flat(), d, prm);
    double drift = 0.0;
    for (double e : tr.energy) drift = std::max(drift, std::abs(e / tr.energy.front() - 1.0));
    const double e1 = standing_wave_error(1024), e2 = standing_wave_error(2048), e3 = standing_wave_error(4096);
    const double f1 = e1 / e2, f2 = e2 / e3;
    const auto gs = solve_ground_state(sphere);
    auto static_dev = [&](std::size_t n) {
      const auto sd = grid_data(2.0, 20.0, n, [&](double r) { return gs.value(r); }, [](double) { return 0.0; });
      EvolveParams sp;
      sp.t_min = 1.0;
      sp.snapshots = 2;
      const auto st = evolve(sphere, sd, sp).snapshots.back();
      double m = 0.0;
      for (std::size_t i = 1; i < st.r.size(); ++i) m = std::max(m, std::abs(st.u[i] - gs.value(st.r[i])));
      return m;
    };
    const double s1 = static_dev(1024), s2 = static_dev(2048), s3 = static_dev(4096);
    const bool ok = drift < 1e-6 && std::abs(f1 - 4) <= 0.5 && std::abs(f2 - 4) <= 0.5 && std::abs(s1 / s2 - 4) <= 0.5 &&
                    std::abs(s2 / s3 - 4) <= 0.5;
    return Outcome{ok, fmt("energy drift %.1e, convergence %.2f %.2f, static deviation ratios %.2f %.2f", drift, f1,
                           f2, s1 / s2, s2 / s3)};
  });

  report(10, "determinism", [&] {
    ExperimentConfig c;
    c.n_r = 2048;
    c.n_R = 2048;
    c.spectral = true;
    c.n_xi = 256;
    c.output_dir = (root / "det_a").string();
    const auto a = run_experiment(c);
    c.output_dir = (root / "det_b").string();
    run_experiment(c);
    int same = 0, total = 0;
    for (const auto& f : a.files) {
      if (f == "config.txt") continue;
      ++total;
      if (slurp(root / "det_a" / f) == slurp(root / "det_b" / f)) ++same;
    }
    const bool manifest = slurp(root / "det_a" / "manifest.json") == slurp(root / "det_b" / "manifest.json");
    return Outcome{manifest && same == total,
                   fmt("manifest %s, %d/%d artifacts byte-identical", manifest ? "identical" : "differs", same, total)};
  });

  std::map<double, std::pair<ArtifactBundle, double>> done;
  for (auto& [nu, f] : runs) {
    try {
      done.emplace(nu, f.get());
    } catch (const std::exception& e) {
      std::printf("rate run nu=%.2f failed: %s\n", nu, e.what());
    }
  }

  report(7, "blow-up rate", [&] {
    if (done.size() != rate_nus.size()) return Outcome{false, "a rate run failed"};
    bool ok = true;
    std::string d;
    for (const auto& [nu, run] : done) {
      const auto& j = run.first.manifest["extract_lambda"];
      const double target = -(1.0 + nu);
      const double sl = j["level"]["slope"], sq = j["lsq"]["slope"];
      const double el = std::abs(sl / target - 1.0), eq = std::abs(sq / target - 1.0);
      const double agree = std::max(j["slope_disagreement"].get<double>(), j["max_disagreement"].get<double>());
      const bool pass = el <= 0.05 && eq <= 0.05 && agree <= 0.05 && run.second < 600.0;
      ok = ok && pass;
      d += fmt("nu=%.2f target %.2f level %.3f (%+.1f%%) lsq %.3f (%+.1f%%) agree %.1f%% %.0fs%s; ", nu, target, sl,
               100 * (sl / target - 1), sq, 100 * (sq / target - 1), 100 * agree, run.second, pass ? "" : " x");
    }
    return Outcome{ok, d + "t in [t0/sqrt(10), t0], n_r 16384"};
  });

  report(8, "eps-energy decay", [&] {
    if (!done.count(1.0)) return Outcome{false, "nu = 1 run failed"};
    const auto& j = done.at(1.0).first.manifest["local_energy_eps"];
    const double p = j["log_corrected"]["slope"], q = j["pure"]["slope"];
    const double tol = 0.1 * std::max(1.0, 0.5);
    const auto& w = j["log_corrected"]["window"];
    return Outcome{std::abs(p - 1.0) <= tol, fmt("nu=1 log-corrected power %.3f (target 1 +- %.2f), pure power %.3f, t in [%.3g, %.3g]", p, tol, q,
                                                  w[0].get<double>(), w[1].get<double>())};
  });

  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
