#pragma once

// Experiment configuration, the staged pipeline run and its artifacts.
//
// Config files are plain text, one `key = value` per line, `#` starts a
// comment. Keys:
//   target       sphere | deformed:<c>
//   nu           > 0
//   k_steps      iteration count of the approximate solution (only 1)
//   t0           > 0, initial time of the backward evolution
//   n_r          evolution grid points on [0, r_max_factor t0]
//   n_R          ground-state grid points in log R
//   n_a          light-cone samples for the principal-part fit
//   n_xi         spectral frequencies
//   cfl          in (0, 0.5]
//   seed         seed of the random bump functions
//   output_dir   directory for this run
//   spectral     0 | 1, run the spectral stage
//   snapshots    evolution snapshots between t0 and t0 / 1000
//   r_max_factor outer radius over t0 (> 1)
//   cutoff       width of the light-cone cutoff, in units of t0
//   fit_decades  width of the rate-fit window below t0
//   xi_min, xi_max  spectral frequency range (log-spaced)
//   write_snapshots 0 | 1, write snapshots/snap_NNN.csv with r, u, ut
// Grid sizes must be powers of two in [2^8, 2^20].

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wmblow/approx_solution.hpp"
#include "wmblow/error.hpp"
#include "wmblow/evolver.hpp"
#include "wmblow/fit.hpp"
#include "wmblow/geometry.hpp"
#include "wmblow/ground_state.hpp"
#include "wmblow/spectral.hpp"

namespace wmblow {

inline constexpr const char* kVersion = "wmblow 0.1.0";

struct ExperimentConfig {
  std::string target = "sphere";
  double nu = 0.5;
  int k_steps = 1;
  double t0 = 0.1;
  std::size_t n_r = 4096, n_R = 4096, n_a = 256, n_xi = 256;
  double cfl = 0.5;
  std::uint64_t seed = 12345;
  std::string output_dir = "out";
  bool spectral = false;
  std::size_t snapshots = 61;
  double r_max_factor = 2.0;
  double cutoff = 0.1;
  double fit_decades = 0.5;
  double xi_min = 1e-4, xi_max = 1e2;
  bool write_snapshots = false;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline bool power_of_two_in_range(std::size_t n) {
  return n >= (1u << 8) && n <= (1u << 20) && (n & (n - 1)) == 0;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  make_target(c.target);
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) throw ConfigError("nu must be positive, got " + detail::fmt_double(c.nu));
  if (!(c.t0 > 0.0) || !std::isfinite(c.t0)) throw ConfigError("t0 must be positive");
  if (c.k_steps != 1) throw ConfigError("only k_steps = 1 is implemented, got " + std::to_string(c.k_steps));
  const std::pair<const char*, std::size_t> sizes[] = {{"n_r", c.n_r}, {"n_R", c.n_R}, {"n_a", c.n_a}, {"n_xi", c.n_xi}};
  for (const auto& [name, n] : sizes)
    if (!detail::power_of_two_in_range(n))
      throw ConfigError(std::string(name) + " must be a power of two in [256, 1048576], got " + std::to_string(n));
  if (!(c.cfl > 0.0 && c.cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
  if (c.snapshots < 10) throw ConfigError("need at least 10 snapshots");
  if (!(c.r_max_factor > 1.0)) throw ConfigError("r_max_factor must exceed 1");
  if (!(c.cutoff >= 0.0 && c.cutoff < 1.0)) throw ConfigError("cutoff must lie in [0, 1)");
  if (!(c.fit_decades > 0.0 && c.fit_decades <= 3.0)) throw ConfigError("fit_decades must lie in (0, 3]");
  // snapshots are geometric over three decades; the rate fit needs 8 in its window
  if (static_cast<double>(c.snapshots - 1) * c.fit_decades / 3.0 < 7.0 - 1e-9)
    throw ConfigError("too few snapshots for an 8-point rate fit over " + detail::fmt_double(c.fit_decades) + " decades");
  if (!(c.xi_min > 0.0 && c.xi_max > 10.0 * c.xi_min)) throw ConfigError("need 0 < xi_min and xi_max > 10 xi_min");
  if (c.output_dir.empty()) throw ConfigError("output_dir must be set");
}

inline std::string emit_config(const ExperimentConfig& c) {
  using detail::fmt_double;
  std::ostringstream o;
  o << "target = " << c.target << "\n"
    << "nu = " << fmt_double(c.nu) << "\n"
    << "k_steps = " << c.k_steps << "\n"
    << "t0 = " << fmt_double(c.t0) << "\n"
    << "n_r = " << c.n_r << "\n"
    << "n_R = " << c.n_R << "\n"
    << "n_a = " << c.n_a << "\n"
    << "n_xi = " << c.n_xi << "\n"
    << "cfl = " << fmt_double(c.cfl) << "\n"
    << "seed = " << c.seed << "\n"
    << "output_dir = " << c.output_dir << "\n"
    << "spectral = " << (c.spectral ? 1 : 0) << "\n"
    << "snapshots = " << c.snapshots << "\n"
    << "r_max_factor = " << fmt_double(c.r_max_factor) << "\n"
    << "cutoff = " << fmt_double(c.cutoff) << "\n"
    << "fit_decades = " << fmt_double(c.fit_decades) << "\n"
    << "xi_min = " << fmt_double(c.xi_min) << "\n"
    << "xi_max = " << fmt_double(c.xi_max) << "\n"
    << "write_snapshots = " << (c.write_snapshots ? 1 : 0) << "\n";
  return o.str();
}

/// Applies one `key = value` assignment.
inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto num = [&](auto& out) {
    std::istringstream in(value);
    in >> out;
    if (!in || !(in >> std::ws).eof()) throw ConfigError("bad value '" + value + "' for key '" + key + "'");
  };
  auto size = [&](std::size_t& out) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("bad value '" + value + "' for key '" + key + "'");
    num(out);
  };
  auto flag = [&](bool& out) {
    if (value != "0" && value != "1") throw ConfigError(key + " must be 0 or 1");
    out = value == "1";
  };
  if (key == "target") c.target = value;
  else if (key == "nu") num(c.nu);
  else if (key == "k_steps") num(c.k_steps);
  else if (key == "t0") num(c.t0);
  else if (key == "n_r") size(c.n_r);
  else if (key == "n_R") size(c.n_R);
  else if (key == "n_a") size(c.n_a);
  else if (key == "n_xi") size(c.n_xi);
  else if (key == "cfl") num(c.cfl);
  else if (key == "seed") num(c.seed);
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "spectral") flag(c.spectral);
  else if (key == "write_snapshots") flag(c.write_snapshots);
  else if (key == "snapshots") size(c.snapshots);
  else if (key == "r_max_factor") num(c.r_max_factor);
  else if (key == "cutoff") num(c.cutoff);
  else if (key == "fit_decades") num(c.fit_decades);
  else if (key == "xi_min") num(c.xi_min);
  else if (key == "xi_max") num(c.xi_max);
  else throw ConfigError("unknown key '" + key + "'");
}

/// Parses config text over the defaults. Does not validate.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_key(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of the configuration with output_dir blanked, so reruns into other
/// directories share it.
inline std::string config_hash(ExperimentConfig c) {
  c.output_dir = "-";
  return fnv1a_hex(emit_config(c));
}

// ---------------------------------------------------------------------------
// Errors

/// A library error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& msg, bool config)
      : Error("[" + stage + "] " + msg), stage_(std::move(stage)), config_(config) {}
  const std::string& stage() const { return stage_; }
  bool config() const { return config_; }

 private:
  std::string stage_;
  bool config_;
};

template <class F>
auto run_stage(const std::string& stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(stage, e.what(), true);
  } catch (const Error& e) {
    throw StageError(stage, e.what(), false);
  }
}

/// CLI exit code for an exception: 2 configuration, 3 numerical, 1 other.
inline int exit_code(const std::exception& e) {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->config() ? 2 : 3;
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

// ---------------------------------------------------------------------------
// Output

using nlohmann::ordered_json;

inline ordered_json to_json(const FitResult& f) {
  return ordered_json{{"slope", f.slope},
                      {"intercept", f.intercept},
                      {"stderr", f.stderr_},
                      {"window", {f.window.lo, f.window.hi}},
                      {"n_points", f.n_points},
                      {"log_coef", f.log_coef},
                      {"rms_residual", f.rms_residual}};
}

inline void ensure_dir(const std::filesystem::path& p) {
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create " + p.string() + ": " + ec.message());
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << s;
}

/// Columns of equal length to CSV with a header row.
inline void write_csv(const std::filesystem::path& p, const std::vector<std::string>& names,
                      const std::vector<const std::vector<double>*>& cols) {
  std::ostringstream o;
  for (std::size_t j = 0; j < names.size(); ++j) o << (j ? "," : "") << names[j];
  o << "\n";
  const std::size_t n = cols.empty() ? 0 : cols.front()->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) o << (j ? "," : "") << detail::fmt_double((*cols[j])[i]);
    o << "\n";
  }
  write_text(p, o.str());
}

struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (names[j] == name) return cols[j];
    throw ConfigError("no column '" + name + "'");
  }
};

inline CsvTable read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(detail::trim(cell));
    return out;
  };
  if (!std::getline(in, line)) throw ConfigError("empty csv " + p.string());
  t.names = split(line);
  t.cols.resize(t.names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.names.size())
      throw ConfigError(p.string() + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells");
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        std::size_t pos = 0;
        t.cols[j].push_back(std::stod(cells[j], &pos));
        if (pos != cells[j].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(p.string() + ": row " + std::to_string(row) + ": bad number '" + cells[j] + "'");
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Pipeline

struct ArtifactBundle {
  std::filesystem::path dir;
  ordered_json manifest;
  std::vector<std::string> files;
};

/// Window [t0 10^{-decades}, t0] for rate fits.
inline Window rate_window(double t0, double decades) { return {t0 * std::pow(10.0, -decades), t0}; }

/// Smooth bumps (r/c)^{3/2} exp(-(r-c)^2/w^2) with random centre and width.
inline std::vector<std::vector<double>> random_bumps(const std::vector<double>& r, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(1.5, 4.0), uw(0.6, 1.2);
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) {
    const double c = uc(rng), w = uw(rng);
    std::vector<double> h(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      h[i] = std::pow(r[i] / c, 1.5) * std::exp(-(r[i] - c) * (r[i] - c) / (w * w));
    out.push_back(std::move(h));
  }
  return out;
}

/// Last pipeline stage to run. The spectral stage runs after the ground state
/// whenever the config enables it.
enum class Through { kGroundState, kProfile, kFits };

inline ArtifactBundle finish_bundle(ArtifactBundle& B) {
  B.files.push_back("manifest.json");
  B.manifest["files"] = B.files;
  write_text(B.dir / "manifest.json", B.manifest.dump(2) + "\n");
  return B;
}

inline ArtifactBundle run_experiment(const ExperimentConfig& cfg, Through last = Through::kFits) {
  run_stage("config", [&] { validate(cfg); });
  namespace fs = std::filesystem;
  ArtifactBundle B;
  B.dir = cfg.output_dir;
  run_stage("output", [&] { ensure_dir(B.dir); });
  auto& M = B.manifest;
  M["version"] = kVersion;
  M["config_hash"] = config_hash(cfg);
  {
    ordered_json c;
    c["target"] = cfg.target;
    c["nu"] = cfg.nu;
    c["k_steps"] = cfg.k_steps;
    c["t0"] = cfg.t0;
    c["n_r"] = cfg.n_r;
    c["n_R"] = cfg.n_R;
    c["n_a"] = cfg.n_a;
    c["n_xi"] = cfg.n_xi;
    c["cfl"] = cfg.cfl;
    c["seed"] = cfg.seed;
    c["spectral"] = cfg.spectral;
    c["snapshots"] = cfg.snapshots;
    c["r_max_factor"] = cfg.r_max_factor;
    c["cutoff"] = cfg.cutoff;
    c["fit_decades"] = cfg.fit_decades;
    c["xi_min"] = cfg.xi_min;
    c["xi_max"] = cfg.xi_max;
    c["write_snapshots"] = cfg.write_snapshots;
    M["config"] = c;
  }
  auto file = [&](const std::string& name) {
    B.files.push_back(name);
    return B.dir / name;
  };
  write_text(file("config.txt"), emit_config(cfg));

  const SurfaceProfile p = make_target(cfg.target);
  ApproxOptions aopt;
  aopt.ground.n = cfg.n_R;
  aopt.n_a_fit = cfg.n_a;

  // ground state
  const auto gs = run_stage("ground_state", [&] {
    return std::make_shared<const GroundState>(solve_ground_state(p, aopt.ground));
  });
  {
    ordered_json j{{"static_residual", gs->max_static_residual(1e-3, 1e3)}, {"energy", harmonic_map_energy(p)}};
    if (cfg.target == "sphere") {
      double err = 0.0;
      for (double R : num::logspace(1e-3, 1e3, 2001)) err = std::max(err, std::abs(gs->value(R) - 2.0 * std::atan(R)));
      j["closed_form_error"] = err;
    }
    M["solve_ground_state"] = j;
    std::vector<double> d1(gs->R_grid.size());
    for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = gs->d1(gs->R_grid[i]);
    write_csv(file("ground_state.csv"), {"R", "Q", "dQ"}, {&gs->R_grid, &gs->Q, &d1});
  }

  if (cfg.spectral) {
    run_stage("spectral", [&] {
      const auto op = build_operator(gs);
      double res = 0.0;
      for (double r : num::logspace(1e-2, 1e2, 200)) res = std::max(res, std::abs(resonance_residual(op, r)));
      const auto xi = num::logspace(cfg.xi_min, cfg.xi_max, cfg.n_xi);
      SpectralBasis sb = spectral_density(op, xi, {});
      const auto bumps = random_bumps(sb.r_grid, cfg.seed, 5);
      ordered_json pl = ordered_json::array(), tr = ordered_json::array();
      for (const auto& h : bumps) {
        const auto hat = distorted_ft(sb, h);
        pl.push_back(std::abs(weighted_norm(sb, hat, 0.0) / l2_norm(sb, h) - 1.0));
        const auto d = transference_diagnostic(sb, h);
        tr.push_back({{"K_half", d.norm_K_half}, {"K0_half", d.norm_K0_half}, {"smoothing", d.smoothing}});
      }
      M["spectral_density"] = {{"resonance_residual", res},
                               {"tail_mass", sb.tail_mass},
                               {"plancherel_error", pl}};
      M["transference_diagnostic"] = tr;
      write_csv(file("spectral.csv"), {"xi", "rho", "amplitude"}, {&sb.xi_grid, &sb.rho, &sb.amplitude});
    });
  }

  if (last == Through::kGroundState) return finish_bundle(B);

  // approximate solution
  const ApproxSolution s = run_stage("profile_builder", [&] {
    ApproxOptions o = aopt;
    return build_approx_solution(p, cfg.nu, o);
  });
  run_stage("profile_builder", [&] {
    std::vector<double> R, e0;
    for (double x : num::logspace(1e2, 1e4, 64)) {
      R.push_back(x);
      e0.push_back(std::abs(initial_error_at(*s.gs, cfg.nu, x)));
    }
    M["initial_error"] = {{"decay", to_json(fit_exponent(R, e0, {1e2, 1e4}))}};
    const double c1 = fit_rlogr_coefficient(*s.interior, 1e2, 1e3);
    const double c2 = fit_rlogr_coefficient(*s.interior, 1e3, 1e4);
    M["step1_correction"] = {{"rlogr_coefficient", c2},
                             {"window_drift", std::abs(c1 / c2 - 1.0)},
                             {"residual", interior_residual(*s.interior, 1e-2, 1e4)}};
    M["principal_part"] = {{"odd_tail", s.principal.odd_tail}, {"max_rel_residual", s.principal.max_rel_residual}};
    std::vector<double> sig;
    for (int k = 3; k <= 9; ++k) sig.push_back(std::ldexp(1.0, k));
    const auto g = decay_gain(s, sig);
    M["decay_gain"] = {{"e2_over_e0", to_json(g.fit)}, {"e1_over_e0", to_json(g.fit_e1)}};
    write_csv(file("decay_gain.csv"), {"sigma", "sup_e0", "sup_e1", "sup_e2"}, {&g.sigma, &g.sup_e0, &g.sup_e1, &g.sup_e2});
  });

  if (last == Through::kProfile) return finish_bundle(B);

  // evolution
  const Trajectory tr = run_stage("evolver", [&] {
    const auto r = num::linspace(0.0, cfg.r_max_factor * cfg.t0, cfg.n_r);
    const auto data = assemble_data(s, cfg.t0, r, cfg.cutoff, 2);
    EvolveParams prm;
    prm.cfl = cfg.cfl;
    prm.snapshots = cfg.snapshots;
    return evolve(p, data, prm);
  });
  {
    std::vector<double> ts;
    for (const auto& st : tr.snapshots) ts.push_back(st.t);
    M["evolve"] = {{"stop_reason", tr.stop_reason},
                   {"snapshots", tr.snapshots.size()},
                   {"t_end", tr.snapshots.back().t},
                   {"steps", tr.snapshots.back().step_count},
                   {"energy_start", tr.energy.front()},
                   {"energy_end", tr.energy.back()},
                   {"outflow", tr.outflow.back()},
                   {"balance_error", tr.energy.front() - tr.energy.back() - tr.outflow.back()}};
    write_csv(file("energy.csv"), {"t", "energy", "outflow"}, {&tr.t, &tr.energy, &tr.outflow});
    if (cfg.write_snapshots) {
      run_stage("output", [&] { ensure_dir(B.dir / "snapshots"); });
      std::vector<double> snap_t;
      for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        const auto& st = tr.snapshots[k];
        char name[40];
        std::snprintf(name, sizeof name, "snapshots/snap_%03zu.csv", k);
        write_csv(file(name), {"r", "u", "ut"}, {&st.r, &st.u, &st.ut});
        snap_t.push_back(st.t);
      }
      std::vector<double> idx(snap_t.size());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<double>(k);
      write_csv(file("snapshots/index.csv"), {"index", "t"}, {&idx, &snap_t});
    }
  }

  run_stage("fits", [&] {
    const Window w = rate_window(cfg.t0, cfg.fit_decades);
    const RateSeries rs = extract_lambda(tr, *s.gs, w);
    std::vector<double> exact;
    for (double t : rs.t) exact.push_back(s.lambda(t));
    write_csv(file("lambda.csv"), {"t", "lambda_level", "lambda_lsq", "lambda_ansatz"},
              {&rs.t, &rs.lambda_level, &rs.lambda_lsq, &exact});
    M["extract_lambda"] = {{"target_slope", -(1.0 + cfg.nu)},
                           {"level", to_json(rs.fit_level)},
                           {"lsq", to_json(rs.fit_lsq)},
                           {"max_disagreement", rs.max_disagreement},
                           {"slope_disagreement", rs.slope_disagreement},
                           {"struwe_monotone", rs.struwe_monotone}};
    std::vector<double> t, eps;
    for (const auto& st : tr.snapshots) {
      t.push_back(st.t);
      eps.push_back(local_energy_eps(st, s, 0));
    }
    write_csv(file("eps_energy.csv"), {"t", "eps_energy"}, {&t, &eps});
    const Window all{t.back(), t.front()};
    FitOptions lc;
    lc.correction = LogCorrection::kFixed;
    lc.log_power = 2.0;
    M["local_energy_eps"] = {{"target_power", cfg.nu},
                             {"pure", to_json(fit_exponent(t, eps, all))},
                             {"log_corrected", to_json(fit_exponent(t, eps, all, lc))}};
  });

  return finish_bundle(B);
}

/// Runs one job per nu concurrently, each in its own subdirectory of the
/// configured output directory.
inline std::vector<ArtifactBundle> run_sweep(const ExperimentConfig& base, const std::vector<double>& nus) {
  if (nus.empty()) throw ConfigError("empty nu list");
  std::vector<std::future<ArtifactBundle>> jobs;
  for (double nu : nus) {
    ExperimentConfig c = base;
    c.nu = nu;
    c.output_dir = (std::filesystem::path(base.output_dir) / ("nu_" + detail::fmt_double(nu))).string();
    validate(c);
    jobs.push_back(std::async(std::launch::async, [c] { return run_experiment(c); }));
  }
  std::vector<ArtifactBundle> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace wmblow
