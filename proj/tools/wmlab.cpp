// wmlab: command-line front end for the blow-up experiments.
//
// Output goes under $WMLAB_OUT (default ./wmlab_out), one directory per
// subcommand unless --out is given. Exit codes: 0 success, 2 configuration
// error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "wmblow/harness.hpp"

using namespace wmblow;
namespace fs = std::filesystem;

namespace {

fs::path output_root() {
  const char* env = std::getenv("WMLAB_OUT");
  return env && *env ? fs::path(env) : fs::path("wmlab_out");
}

struct Common {
  std::string config_file, out, target;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "config file (key = value lines)");
  sub->add_option("--out", c.out, "output directory (default $WMLAB_OUT/<subcommand>)");
  sub->add_option("--target", c.target, "sphere | deformed:<c>");
  sub->add_option("--set", c.sets, "extra key=value override, repeatable");
}

ExperimentConfig base_config(const Common& c, const std::string& sub) {
  ExperimentConfig cfg = c.config_file.empty() ? ExperimentConfig{} : load_config(c.config_file);
  cfg.output_dir = (output_root() / sub).string();
  if (!c.target.empty()) cfg.target = c.target;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_key(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

void report(const ArtifactBundle& b) {
  std::cout << "wrote " << b.files.size() << " files to " << b.dir.string() << "\n";
}

void print_fit(const std::string& label, const ordered_json& f) {
  std::cout << std::left << std::setw(22) << label << " slope " << std::setprecision(6) << f["slope"].get<double>()
            << " +- " << f["stderr"].get<double>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wmlab: co-rotational wave map blow-up experiments"};
  app.require_subcommand(1);

  Common gs_c, pb_c, sp_c, ev_c, sw_c, run_c;

  auto* gs = app.add_subcommand("ground-state", "solve for the harmonic map Q and check it");
  add_common(gs, gs_c);
  std::size_t gs_n = 0;
  gs->add_option("--n", gs_n, "ground-state grid size");

  auto* pb = app.add_subcommand("build-profile", "build the k = 1 approximate solution and its error checks");
  add_common(pb, pb_c);
  double pb_nu = 0.0;
  pb->add_option("--nu", pb_nu, "rate parameter nu > 0");

  auto* sp = app.add_subcommand("spectral", "spectral density, Plancherel and transference diagnostics");
  add_common(sp, sp_c);
  double xi_min = 0.0, xi_max = 0.0;
  std::size_t nxi = 0;
  sp->add_option("--ximin", xi_min, "lowest frequency");
  sp->add_option("--ximax", xi_max, "highest frequency");
  sp->add_option("--nxi", nxi, "number of frequencies (power of two)");

  auto* ev = app.add_subcommand("evolve", "evolve the approximate data and fit the rate");
  add_common(ev, ev_c);
  double ev_nu = 0.0, ev_t0 = 0.0, ev_cfl = 0.0;
  std::size_t ev_n = 0, ev_snaps = 0;
  ev->add_option("--nu", ev_nu, "rate parameter nu > 0");
  ev->add_option("--t0", ev_t0, "initial time");
  ev->add_option("--n", ev_n, "evolution grid size");
  ev->add_option("--cfl", ev_cfl, "time step over grid spacing");
  ev->add_option("--snapshots", ev_snaps, "number of stored snapshots");

  auto* sw = app.add_subcommand("sweep", "run the evolve pipeline for several nu concurrently");
  add_common(sw, sw_c);
  std::vector<double> nu_list;
  sw->add_option("--nu-list", nu_list, "comma-separated nu values")->delimiter(',')->required();

  auto* ft = app.add_subcommand("fit", "log-log exponent fit of two CSV columns");
  std::string fit_in, fx = "x", fy = "y";
  double lo = 0.0, hi = 0.0, log_power = 0.0;
  bool free_log = false;
  ft->add_option("--input", fit_in, "CSV file with a header row")->required();
  ft->add_option("--x", fx, "abscissa column");
  ft->add_option("--y", fy, "ordinate column");
  ft->add_option("--lo", lo, "window lower end (default: data minimum)");
  ft->add_option("--hi", hi, "window upper end (default: data maximum)");
  ft->add_option("--log-power", log_power, "fit y / log^q|x| instead of y");
  ft->add_flag("--free-log", free_log, "fit the log|log x| coefficient as well");

  auto* rn = app.add_subcommand("run", "full pipeline from a config file");
  add_common(rn, run_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gs->parsed()) {
      auto cfg = base_config(gs_c, "ground-state");
      if (gs_n) cfg.n_R = gs_n;
      const auto b = run_experiment(cfg, Through::kGroundState);
      const auto& j = b.manifest["solve_ground_state"];
      std::cout << "static residual " << j["static_residual"].get<double>() << "\n";
      if (j.contains("closed_form_error")) std::cout << "closed-form error " << j["closed_form_error"].get<double>() << "\n";
      std::cout << "energy " << std::setprecision(12) << j["energy"].get<double>() << "\n";
      report(b);
    } else if (pb->parsed()) {
      auto cfg = base_config(pb_c, "build-profile");
      if (pb->count("--nu")) cfg.nu = pb_nu;
      const auto b = run_experiment(cfg, Through::kProfile);
      print_fit("e0 decay", b.manifest["initial_error"]["decay"]);
      print_fit("e2/e0 gain", b.manifest["decay_gain"]["e2_over_e0"]);
      std::cout << "v1 R log R coefficient " << b.manifest["step1_correction"]["rlogr_coefficient"].get<double>() << "\n";
      report(b);
    } else if (sp->parsed()) {
      auto cfg = base_config(sp_c, "spectral");
      cfg.spectral = true;
      if (sp->count("--ximin")) cfg.xi_min = xi_min;
      if (sp->count("--ximax")) cfg.xi_max = xi_max;
      if (nxi) cfg.n_xi = nxi;
      const auto b = run_experiment(cfg, Through::kGroundState);
      std::cout << "resonance residual " << b.manifest["spectral_density"]["resonance_residual"].get<double>() << "\n";
      report(b);
    } else if (ev->parsed()) {
      auto cfg = base_config(ev_c, "evolve");
      if (ev->count("--nu")) cfg.nu = ev_nu;
      if (ev->count("--t0")) cfg.t0 = ev_t0;
      if (ev_n) cfg.n_r = ev_n;
      if (ev->count("--cfl")) cfg.cfl = ev_cfl;
      if (ev_snaps) cfg.snapshots = ev_snaps;
      cfg.write_snapshots = true;
      const auto b = run_experiment(cfg);
      const auto& j = b.manifest["extract_lambda"];
      std::cout << "target slope " << j["target_slope"].get<double>() << "\n";
      print_fit("lambda (level set)", j["level"]);
      print_fit("lambda (least squares)", j["lsq"]);
      std::cout << "stop: " << b.manifest["evolve"]["stop_reason"].get<std::string>() << "\n";
      report(b);
    } else if (sw->parsed()) {
      const auto cfg = base_config(sw_c, "sweep");
      for (const auto& b : run_sweep(cfg, nu_list)) {
        const auto& j = b.manifest["extract_lambda"];
        std::cout << "nu " << b.manifest["config"]["nu"].get<double>() << ": target " << j["target_slope"].get<double>()
                  << ", level " << j["level"]["slope"].get<double>() << ", lsq " << j["lsq"]["slope"].get<double>()
                  << "  (" << b.dir.string() << ")\n";
      }
    } else if (ft->parsed()) {
      const auto t = read_csv(fit_in);
      const auto& x = t.column(fx);
      const auto& y = t.column(fy);
      if (x.empty()) throw ConfigError("no rows in " + fit_in);
      Window w{lo, hi};
      if (!ft->count("--lo")) w.lo = *std::min_element(x.begin(), x.end());
      if (!ft->count("--hi")) w.hi = *std::max_element(x.begin(), x.end());
      FitOptions fo;
      if (free_log) fo.correction = LogCorrection::kFree;
      else if (ft->count("--log-power")) {
        fo.correction = LogCorrection::kFixed;
        fo.log_power = log_power;
      }
      std::cout << to_json(fit_exponent(x, y, w, fo)).dump(2) << "\n";
    } else if (rn->parsed()) {
      if (run_c.config_file.empty()) throw ConfigError("run needs --config");
      report(run_experiment(base_config(run_c, "run")));
    }
  } catch (const std::exception& e) {
    std::cerr << "wmlab: " << e.what() << "\n";
    return exit_code(e);
  }
  return 0;
}
