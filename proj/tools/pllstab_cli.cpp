// Command-line driver for the pllstab library.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pllstab/circuit.hpp"
#include "pllstab/cli_io.hpp"
#include "pllstab/errors.hpp"

namespace fs = std::filesystem;
using namespace pllstab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnstable = 4;

struct Common {
  std::string config;
  std::string out = ".";
  std::vector<std::string> sets;
  bool seed_free = false;
};

// Applies --set section.key=value overrides on top of the config file text.
RunConfig make_config(const Common& c) {
  std::string text;
  if (!c.config.empty()) {
    std::ifstream f(c.config);
    if (!f) throw ConfigError("cannot open config file " + c.config, 0);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  for (const std::string& s : c.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      throw ConfigError("override must look like section.key=value: " + s, 0);
    }
    text += "\n[" + s.substr(0, dot) + "]\n" + s.substr(dot + 1, eq - dot - 1) + " = " +
            s.substr(eq + 1) + "\n";
  }
  return parse_config(text);
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path p = fs::path(c.out) / name;
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string(), 0);
  return f;
}

SwingParams post_fault_sp(const RunConfig& cfg) {
  const CircuitParams& p = cfg.scenario.params;
  return swing_params(network_equivalents(p, false), p);
}

ResetJudge build_judge(const RunConfig& cfg, ResetJudgeKind kind) {
  const SwingParams sp = post_fault_sp(cfg);
  switch (kind) {
    case ResetJudgeKind::kNone: return std::monostate{};
    case ResetJudgeKind::kAblm: return build_ablm(sp, cfg.ablm);
    case ResetJudgeKind::kZubov: return build_zubov(sp, cfg.zubov);
    case ResetJudgeKind::kAtrm: return build_atrm(sp, cfg.atrm);
  }
  return std::monostate{};
}

ResetJudgeKind parse_method(const std::string& m) {
  if (m == "ablm") return ResetJudgeKind::kAblm;
  if (m == "zubov") return ResetJudgeKind::kZubov;
  if (m == "atrm") return ResetJudgeKind::kAtrm;
  throw ConfigError("unknown method '" + m + "'", 0);
}

CctResult method_cct(const RunConfig& cfg, const std::string& method, double rf) {
  if (method == "ray") return ablm_cct(cfg.scenario, rf, AblmPath::kRay);
  if (method == "trapezoid") return ablm_cct(cfg.scenario, rf, AblmPath::kTrapezoid);
  if (method == "ablm") return ablm_cct(cfg.scenario, rf, cfg.ablm);
  if (method == "zubov") return zubov_cct(cfg.scenario, rf, cfg.zubov);
  if (method == "atrm") return atrm_cct(cfg.scenario, rf, cfg.atrm);
  throw ConfigError("unknown method '" + method + "'", 0);
}

std::string cct_text(const CctResult& r) {
  switch (r.status) {
    case CctStatus::kOk: return fmt9(r.value);
    case CctStatus::kAlwaysStable: return "always_stable";
    case CctStatus::kAlwaysUnstable: return "always_unstable";
  }
  return "";
}

int cmd_equilibria(const Common& c) {
  const RunConfig cfg = make_config(c);
  const CircuitParams& p = cfg.scenario.params;
  auto f = open_out(c, "equilibria.csv");
  f << "network,z_eq1,theta1,z_eq2,theta2,p_m,p_e,d_c,delta_sep,delta_uep\n";
  for (bool faulted : {false, true}) {
    const NetworkEquivalents ne = network_equivalents(p, faulted);
    const SwingParams sp = swing_params(ne, p);
    std::string sep = "", uep = "";
    try {
      const EquilibriumPair eq = equilibria(sp, 0);
      sep = fmt9(eq.delta_sep);
      uep = fmt9(eq.delta_uep);
    } catch (const NoEquilibriumError&) {
      sep = uep = "none";
    }
    f << (faulted ? "faulted" : "normal") << ',' << fmt9(ne.z_eq1) << ',' << fmt9(ne.theta1)
      << ',' << fmt9(ne.z_eq2) << ',' << fmt9(ne.theta2) << ',' << fmt9(sp.p_m) << ','
      << fmt9(sp.p_e) << ',' << fmt9(sp.d_c) << ',' << sep << ',' << uep << '\n';
    if (!faulted) {
      std::printf("delta_sep = %.4f rad\ndelta_uep = %.4f rad\nscr = %.4f\n", std::stod(sep),
                  std::stod(uep), scr(ne));
    }
  }
  return 0;
}

int cmd_simulate(const Common& c, int stride) {
  const RunConfig cfg = make_config(c);
  SimOptions so;
  so.record_stride = stride;
  so.stop_on_verdict = false;
  const TrajectoryRecord r = simulate(cfg.scenario, nullptr, so);
  auto f = open_out(c, "trajectory.csv");
  write_trajectory_csv(f, r, cfg.f0);
  std::printf("verdict = %s\n", to_string(r.verdict).c_str());
  return 0;
}

int cmd_oracle_cct(const Common& c, std::vector<double> rfs) {
  const RunConfig cfg = make_config(c);
  if (rfs.empty()) rfs.push_back(cfg.scenario.params.r_f_ohm);
  auto f = open_out(c, "oracle_cct.csv");
  f << "rf_ohm,real_cct_s\n";
  for (double rf : rfs) {
    const CctResult r = real_cct(cfg.scenario, rf);
    f << fmt9(rf) << ',' << cct_text(r) << '\n';
    std::printf("rf = %g ohm: real CCT = %s s\n", rf, cct_text(r).c_str());
  }
  return 0;
}

int cmd_sd_trm(const Common& c, int k_min, int k_max) {
  const RunConfig cfg = make_config(c);
  const SwingParams sp = post_fault_sp(cfg);
  const auto curves = trm_boundary(sp, k_min, k_max, default_window(sp));
  auto f = open_out(c, "sd_curves.csv");
  write_curves_csv(f, curves);
  std::printf("%zu boundary branches traced\n", curves.size());
  return 0;
}

int cmd_sd_band(const Common& c) {
  const RunConfig cfg = make_config(c);
  const SwingParams sp = post_fault_sp(cfg);
  const auto curves = trm_boundary(sp, -3, 2, default_window(sp));
  const SdForm form = classify_sd_form(curves, sp);
  auto f = open_out(c, "sd_band.csv");
  f << "form,omega_cr,recommended_level\n"
    << to_string(form.form) << ',' << (form.omega_cr ? fmt9(*form.omega_cr) : "") << ','
    << (form.recommended_level ? fmt9(*form.recommended_level) : "") << '\n';
  auto g = open_out(c, "sd_band_levels.csv");
  g << "omega\n";
  for (double w : form.band_levels) g << fmt9(w) << '\n';
  std::printf("form = %s\n", to_string(form.form));
  if (form.omega_cr) std::printf("omega_cr = %.4f rad/s\n", *form.omega_cr);
  if (form.recommended_level) std::printf("recommended = %.4f rad/s\n", *form.recommended_level);
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<double>& values) {
  const RunConfig cfg = make_config(c);
  SweepParam sp;
  if (param == "k_i") sp = SweepParam::kKi;
  else if (param == "k_p") sp = SweepParam::kKp;
  else if (param == "i_cd") sp = SweepParam::kIcd;
  else throw ConfigError("sweep parameter must be k_i, k_p or i_cd", 0);
  const auto entries = sweep_parameter(cfg.scenario.params, sp, values);
  auto f = open_out(c, "sweep.csv");
  f << "value,uep_branch,side,index,delta,omega\n";
  auto g = open_out(c, "sweep_extent.csv");
  g << "value,delta_min,delta_max,omega_min,omega_max,error\n";
  for (const SweepEntry& e : entries) {
    for (const BoundaryCurve& cv : e.curves) {
      for (std::size_t i = 0; i < cv.points.size(); ++i) {
        f << fmt9(e.value) << ',' << cv.uep_branch << ',' << to_string(cv.side) << ',' << i
          << ',' << fmt9(cv.points[i].delta) << ',' << fmt9(cv.points[i].omega) << '\n';
      }
    }
    if (e.error) {
      g << fmt9(e.value) << ",,,,," << "no_equilibrium\n";
    } else {
      const SdExtent x = sd_extent(e.curves);
      g << fmt9(e.value) << ',' << fmt9(x.delta_min) << ',' << fmt9(x.delta_max) << ','
        << fmt9(x.omega_min) << ',' << fmt9(x.omega_max) << ",\n";
    }
  }
  return 0;
}

int cmd_lyap_build(const Common& c, const std::string& method) {
  const RunConfig cfg = make_config(c);
  const SwingParams sp = post_fault_sp(cfg);
  if (method == "zubov") {
    const ZubovCertificate z = build_zubov(sp, cfg.zubov);
    auto f = open_out(c, "zubov_certificate.csv");
    write_certificate_csv(f, z);
    std::printf("c = %.6g, residual = %.3g\n", z.c, z.residual);
  } else if (method == "atrm") {
    const AtrmCertificate a = build_atrm(sp, cfg.atrm);
    auto f = open_out(c, "atrm_certificate.csv");
    write_certificate_csv(f, a);
    auto g = open_out(c, "atrm_boundary.csv");
    write_boundary_csv(g, a);
    for (const AtrmStage& s : a.stages) std::printf("degree %d: t_s = %.4f\n", s.degree, s.t_s);
  } else if (method == "ablm") {
    const AblmCertificate a = build_ablm(sp, cfg.ablm);
    auto f = open_out(c, "ablm_certificate.csv");
    f << "path,delta_sep,v_cr\n"
      << to_string(a.path) << ',' << fmt9(a.delta_sep) << ',' << fmt9(a.v_cr) << '\n';
    std::printf("v_cr = %.6g\n", a.v_cr);
  } else {
    throw ConfigError("unknown method '" + method + "'", 0);
  }
  return 0;
}

int cmd_lyap_judge(const Common& c, const std::string& method, double delta, double omega) {
  const RunConfig cfg = make_config(c);
  const ResetJudge j = build_judge(cfg, parse_method(method));
  const bool ok = judge_certifies(j, {delta, omega});
  std::printf("%s\n", ok ? "stable" : "unstable");
  return ok ? 0 : kExitUnstable;
}

int cmd_lyap_cct(const Common& c, const std::string& method, std::vector<double> rfs) {
  const RunConfig cfg = make_config(c);
  if (rfs.empty()) rfs.push_back(cfg.scenario.params.r_f_ohm);
  auto f = open_out(c, "lyap_cct.csv");
  f << "rf_ohm,method,est_cct_s\n";
  for (double rf : rfs) {
    const CctResult r = method_cct(cfg, method, rf);
    f << fmt9(rf) << ',' << method << ',' << cct_text(r) << '\n';
    std::printf("rf = %g ohm: %s CCT = %s s\n", rf, method.c_str(), cct_text(r).c_str());
  }
  return 0;
}

int cmd_reset_demo(const Common& c, int stride) {
  const RunConfig cfg = make_config(c);
  ResetPolicy pol;
  pol.mode = cfg.reset.mode;
  pol.omega_target = cfg.reset.omega_target;
  pol.max_resets = cfg.reset.max_resets;
  pol.judge = build_judge(cfg, cfg.reset.judge);
  const ResetDemo d = reset_demo(cfg.scenario, pol, stride);
  auto f = open_out(c, "reset_demo_base.csv");
  write_trajectory_csv(f, d.base, cfg.f0);
  auto g = open_out(c, "reset_demo_reset.csv");
  write_trajectory_csv(g, d.reset, cfg.f0);
  std::printf("base: %s\nreset: %s (%zu reset events)\n", to_string(d.base.verdict).c_str(),
              to_string(d.reset.verdict).c_str(), d.resets.size());
  return 0;
}

int cmd_tables(const Common& c) {
  const RunConfig cfg = make_config(c);
  auto f = open_out(c, "cct.csv");
  f << "rf_ohm,real_cct_s,method,est_cct_s,err_pct\n";
  for (double rf : {3.0, 1.0, 0.5, 0.1}) {
    const CctResult real = real_cct(cfg.scenario, rf);
    for (const char* m : {"ray", "trapezoid", "zubov", "atrm"}) {
      const CctResult est = method_cct(cfg, m, rf);
      std::string err;
      if (real.status == CctStatus::kOk && est.status == CctStatus::kOk) {
        err = fmt9(100.0 * (est.value - real.value) / real.value);
      }
      f << fmt9(rf) << ',' << cct_text(real) << ',' << m << ',' << cct_text(est) << ',' << err
        << '\n';
    }
    std::printf("rf = %g ohm done (real CCT %s s)\n", rf, cct_text(real).c_str());
  }
  return 0;
}

int cmd_plot(const Common& c) {
  const RunConfig cfg = make_config(c);
  const SwingParams sp = post_fault_sp(cfg);
  const Window win = default_window(sp);
  std::vector<SvgSeries> series;
  const auto curves = trm_boundary(sp, -2, 1, win);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    series.push_back({i == 0 ? "TRM boundary" : "", "black", curves[i].points});
  }
  const ZubovCertificate z = build_zubov(sp, cfg.zubov);
  AtrmOptions rays;
  rays.r_max = 20.0;
  rays.coarse = 2000;
  std::vector<ReducedState> level = atrm_boundary(z.v, z.c, rays);
  for (ReducedState& p : level) p.delta += z.delta_sep;
  if (!level.empty()) level.push_back(level.front());
  series.push_back({"Zubov level set", "blue", level});
  const CctResult cct = zubov_cct(cfg.scenario, cfg.scenario.params.r_f_ohm, cfg.zubov);
  Scenario sc = cfg.scenario;
  sc.t_clear = sc.t_fault + cct.value;
  sc.t_end = std::max(sc.t_end, sc.t_clear + 3.0);
  SimOptions so;
  so.record_stride = 10;
  const TrajectoryRecord r = simulate(sc, nullptr, so);
  std::vector<ReducedState> traj;
  for (const Sample& s : r.samples) traj.push_back({s.delta, s.omega});
  series.push_back({"trajectory at Zubov CCT", "red", traj});
  auto f = open_out(c, "phase_plane.svg");
  f << emit_svg(series, win, "Stability domain and certificate");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PLL transient stability analysis"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", common.config, "INI configuration file");
    s->add_option("--out", common.out, "Output directory");
    s->add_option("--set", common.sets, "Override section.key=value")->take_all();
    s->add_flag("--seed-free", common.seed_free, "Reserved; all algorithms are deterministic");
  };
  int stride = 10;
  int k_min = -2, k_max = 1;
  std::vector<double> rfs;
  std::string method = "zubov";
  std::string param = "k_i";
  std::vector<double> values;
  double delta = 0.0, omega = 0.0;
  int code = 0;

  auto* eq = app.add_subcommand("equilibria", "Network equivalents and equilibria");
  add_common(eq);
  auto* sim = app.add_subcommand("simulate", "Simulate the fault scenario");
  add_common(sim);
  sim->add_option("--stride", stride, "Record every n-th step");
  auto* occt = app.add_subcommand("oracle-cct", "Critical clearing time by simulation");
  add_common(occt);
  occt->add_option("--rf", rfs, "Fault resistances in ohms");
  auto* trm = app.add_subcommand("sd-trm", "Trace stability-domain boundaries");
  add_common(trm);
  trm->add_option("--k-min", k_min);
  trm->add_option("--k-max", k_max);
  auto* band = app.add_subcommand("sd-band", "Classify the domain form and omega band");
  add_common(band);
  auto* sweep = app.add_subcommand("sweep", "Boundary sweep over a control parameter");
  add_common(sweep);
  sweep->add_option("--param", param, "k_i, k_p or i_cd");
  sweep->add_option("--values", values, "Parameter values")->required()->delimiter(',');
  auto* lb = app.add_subcommand("lyap-build", "Construct a Lyapunov certificate");
  add_common(lb);
  lb->add_option("--method", method, "ablm, zubov or atrm");
  auto* lj = app.add_subcommand("lyap-judge", "Judge one post-fault state");
  add_common(lj);
  lj->add_option("--method", method, "ablm, zubov or atrm");
  lj->add_option("--delta", delta)->required();
  lj->add_option("--omega", omega)->required();
  auto* lc = app.add_subcommand("lyap-cct", "CCT estimate from a certificate");
  add_common(lc);
  lc->add_option("--method", method, "ray, trapezoid, ablm, zubov or atrm");
  lc->add_option("--rf", rfs, "Fault resistances in ohms");
  auto* rd = app.add_subcommand("reset-demo", "Paired runs with and without PLL reset");
  add_common(rd);
  rd->add_option("--stride", stride, "Record every n-th step");
  auto* tb = app.add_subcommand("tables", "Full CCT comparison table");
  add_common(tb);
  auto* pl = app.add_subcommand("plot", "Phase-plane SVG");
  add_common(pl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*eq) code = cmd_equilibria(common);
    else if (*sim) code = cmd_simulate(common, stride);
    else if (*occt) code = cmd_oracle_cct(common, rfs);
    else if (*trm) code = cmd_sd_trm(common, k_min, k_max);
    else if (*band) code = cmd_sd_band(common);
    else if (*sweep) code = cmd_sweep(common, param, values);
    else if (*lb) code = cmd_lyap_build(common, method);
    else if (*lj) code = cmd_lyap_judge(common, method, delta, omega);
    else if (*lc) code = cmd_lyap_cct(common, method, rfs);
    else if (*rd) code = cmd_reset_demo(common, stride);
    else if (*tb) code = cmd_tables(common);
    else if (*pl) code = cmd_plot(common);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return code;
}
