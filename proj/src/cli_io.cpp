#include "pllstab/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "pllstab/errors.hpp"

namespace pllstab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError("not a finite number: '" + v + "'", line);
  }
  return out;
}

int to_int(const std::string& v, int line) {
  const double d = to_double(v, line);
  if (d != std::floor(d)) throw ConfigError("not an integer: '" + v + "'", line);
  return static_cast<int>(d);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Key {
  Setter set;
  Getter get;
};


template <typename F>
Key dbl(F field) {
  return {[field](RunConfig& c, const std::string& v, int line) { field(c) = to_double(v, line); },
          [field](const RunConfig& c) { return g17(field(const_cast<RunConfig&>(c))); }};
}

template <typename F>
Key integer(F field) {
  return {[field](RunConfig& c, const std::string& v, int line) { field(c) = to_int(v, line); },
          [field](const RunConfig& c) {
            return std::to_string(field(const_cast<RunConfig&>(c)));
          }};
}

const std::map<std::string, std::map<std::string, Key>>& schema() {
  static const std::map<std::string, std::map<std::string, Key>> s = [] {
    std::map<std::string, std::map<std::string, Key>> m;
    auto& b = m["base"];
    b["s_base"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.s_base; });
    b["u_base"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.u_base; });
    b["f0"] = dbl([](RunConfig& c) -> double& { return c.f0; });
    auto& ci = m["circuit"];
    ci["r_g"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.r_g; });
    ci["x_g"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.x_g; });
    ci["r_c"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.r_c; });
    ci["x_c"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.x_c; });
    ci["r_l"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.r_l; });
    ci["x_l"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.x_l; });
    ci["r_f_ohm"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.r_f_ohm; });
    ci["u_g"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.u_g; });
    auto& pl = m["pll"];
    pl["k_i"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.k_i; });
    pl["k_p"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.k_p; });
    auto& cv = m["converter"];
    cv["i_c"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.i_c; });
    cv["phi_i"] = dbl([](RunConfig& c) -> double& { return c.scenario.params.phi_i; });
    auto& fa = m["fault"];
    fa["t_fault"] = dbl([](RunConfig& c) -> double& { return c.scenario.t_fault; });
    fa["t_clear"] = dbl([](RunConfig& c) -> double& { return c.scenario.t_clear; });
    auto& si = m["sim"];
    si["dt"] = dbl([](RunConfig& c) -> double& { return c.scenario.dt; });
    si["t_end"] = dbl([](RunConfig& c) -> double& { return c.scenario.t_end; });
    si["divergence_bound"] =
        dbl([](RunConfig& c) -> double& { return c.scenario.omega_divergence_bound; });
    si["settle_tol_delta"] = dbl([](RunConfig& c) -> double& { return c.scenario.settle_tol.delta; });
    si["settle_tol_omega"] = dbl([](RunConfig& c) -> double& { return c.scenario.settle_tol.omega; });
    si["settle_dwell"] = dbl([](RunConfig& c) -> double& { return c.scenario.settle_dwell; });
    si["lvrt_exit_voltage"] =
        dbl([](RunConfig& c) -> double& { return c.scenario.lvrt_exit_voltage; });
    auto& zu = m["zubov"];
    zu["m"] = integer([](RunConfig& c) -> int& { return c.zubov.m; });
    zu["m_t"] = integer([](RunConfig& c) -> int& { return c.zubov.m_t; });
    zu["phi_delta"] = dbl([](RunConfig& c) -> double& { return c.zubov.phi_delta; });
    zu["phi_omega"] = dbl([](RunConfig& c) -> double& { return c.zubov.phi_omega; });
    auto& at = m["atrm"];
    at["k0"] = dbl([](RunConfig& c) -> double& { return c.atrm.k0; });
    at["seed_delta"] = dbl([](RunConfig& c) -> double& { return c.atrm.seed_delta; });
    at["seed_omega"] = dbl([](RunConfig& c) -> double& { return c.atrm.seed_omega; });
    at["dt_p"] = dbl([](RunConfig& c) -> double& { return c.atrm.dt_p; });
    at["eps0"] = dbl([](RunConfig& c) -> double& { return c.atrm.eps0; });
    at["tau"] = dbl([](RunConfig& c) -> double& { return c.atrm.tau; });
    at["schedule"] = Key{
        [](RunConfig& c, const std::string& v, int line) {
          std::vector<int> out;
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item), line));
          if (out.empty()) throw ConfigError("empty schedule", line);
          for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] < 2 || (i > 0 && out[i] <= out[i - 1])) {
              throw ConfigError("schedule must be increasing degrees >= 2", line);
            }
          }
          c.atrm.schedule = out;
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.atrm.schedule.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(c.atrm.schedule[i]);
          }
          return s;
        }};
    m["ablm"]["variant"] = Key{
        [](RunConfig& c, const std::string& v, int line) {
          if (v == "ray") {
            c.ablm = AblmPath::kRay;
          } else if (v == "trapezoid") {
            c.ablm = AblmPath::kTrapezoid;
          } else {
            throw ConfigError("variant must be ray or trapezoid", line);
          }
        },
        [](const RunConfig& c) { return std::string(to_string(c.ablm)); }};
    auto& rs = m["reset"];
    rs["mode"] = Key{
        [](RunConfig& c, const std::string& v, int line) {
          if (v == "none") c.reset.mode = ResetMode::kNone;
          else if (v == "omega_reset") c.reset.mode = ResetMode::kOmegaReset;
          else if (v == "omega_delta_reset") c.reset.mode = ResetMode::kOmegaDeltaReset;
          else throw ConfigError("unknown reset mode '" + v + "'", line);
        },
        [](const RunConfig& c) { return std::string(to_string(c.reset.mode)); }};
    rs["omega_target"] = dbl([](RunConfig& c) -> double& { return c.reset.omega_target; });
    rs["max_resets"] = integer([](RunConfig& c) -> int& { return c.reset.max_resets; });
    rs["judge"] = Key{
        [](RunConfig& c, const std::string& v, int line) {
          if (v == "none") c.reset.judge = ResetJudgeKind::kNone;
          else if (v == "ablm") c.reset.judge = ResetJudgeKind::kAblm;
          else if (v == "zubov") c.reset.judge = ResetJudgeKind::kZubov;
          else if (v == "atrm") c.reset.judge = ResetJudgeKind::kAtrm;
          else throw ConfigError("unknown judge '" + v + "'", line);
        },
        [](const RunConfig& c) {
          switch (c.reset.judge) {
            case ResetJudgeKind::kNone: return std::string("none");
            case ResetJudgeKind::kAblm: return std::string("ablm");
            case ResetJudgeKind::kZubov: return std::string("zubov");
            case ResetJudgeKind::kAtrm: return std::string("atrm");
          }
          return std::string("none");
        }};
    return m;
  }();
  return s;
}

// Validation hook for a key: checks the invariant that key participates in.
void check(const RunConfig& c, const std::string& section, const std::string& key, int line) {
  try {
    const CircuitParams& p = c.scenario.params;
    if (section == "circuit" || section == "pll" || section == "converter" || section == "base") {
      if (!(c.f0 > 0.0)) throw InvalidParameterError("f0 must be positive");
      validate(p, key == "r_f_ohm");
    } else if (section == "sim") {
      Scenario s = c.scenario;
      s.t_fault = 0.0;
      s.t_clear = 0.0;
      s.t_end = std::max(s.t_end, 0.0);
      validate(s);
      if (!(c.scenario.t_end > 0.0)) throw InvalidParameterError("t_end must be positive");
      if (!(c.scenario.lvrt_exit_voltage > 0.0)) {
        throw InvalidParameterError("lvrt_exit_voltage must be positive");
      }
    } else if (section == "fault") {
      if (!(c.scenario.t_fault >= 0.0)) throw InvalidParameterError("t_fault must be >= 0");
      if (key == "t_clear" && !(c.scenario.t_clear >= c.scenario.t_fault)) {
        throw InvalidParameterError("t_clear must not precede t_fault");
      }
    } else if (section == "zubov") {
      if (c.zubov.m < 2 || c.zubov.m_t < 1) throw InvalidParameterError("degrees too small");
      if (!(c.zubov.phi_delta > 0.0 && c.zubov.phi_omega > 0.0)) {
        throw InvalidParameterError("phi weights must be positive");
      }
    } else if (section == "atrm") {
      if (!(c.atrm.k0 > 0.0 && c.atrm.seed_delta > 0.0 && c.atrm.seed_omega > 0.0 &&
            c.atrm.dt_p > 0.0 && c.atrm.eps0 >= 0.0 && c.atrm.tau > -1.0 && c.atrm.tau < 1.0)) {
        throw InvalidParameterError("ATRM settings out of range");
      }
    } else if (section == "reset") {
      if (c.reset.max_resets < 1) throw InvalidParameterError("max_resets must be >= 1");
    }
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what(), line);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.scenario.params.omega0 = 2.0 * std::numbers::pi * cfg.f0;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  int fault_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!schema().count(section)) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key outside any section", line);
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    it->second.set(cfg, value, line);
    if (key == "f0") cfg.scenario.params.omega0 = 2.0 * std::numbers::pi * cfg.f0;
    if (section == "fault") fault_line = line;
    check(cfg, section, key, line);
  }
  // Cross-section checks once everything is known.
  const Scenario& sc = cfg.scenario;
  if (!(sc.t_clear <= sc.t_end)) throw ConfigError("t_clear exceeds t_end", fault_line);
  try {
    validate(sc);
  } catch (const InvalidParameterError& e) {
    throw ConfigError(e.what(), fault_line);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return parse_config("");
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path, 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  static const char* order[] = {"base",  "circuit", "pll",  "converter", "fault",
                                "sim",   "zubov",   "atrm", "ablm",      "reset"};
  std::string out;
  for (const char* sec : order) {
    out += "[" + std::string(sec) + "]\n";
    for (const auto& [key, k] : schema().at(sec)) out += key + " = " + k.get(cfg) + "\n";
    out += "\n";
  }
  return out;
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec, double f0) {
  os << "t,delta,omega,freq_hz,u_cq,u_c_mag,event\n";
  std::size_t e = 0;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const Sample& s = rec.samples[i];
    const double t_next =
        i + 1 < rec.samples.size() ? rec.samples[i + 1].t : std::numeric_limits<double>::infinity();
    std::string ev;
    // Events are attached to the last sample at or before their time.
    while (e < rec.events.size() && rec.events[e].t < t_next - 1e-12) {
      if (!ev.empty()) ev += ';';
      ev += to_string(rec.events[e].kind);
      ++e;
    }
    os << fmt9(s.t) << ',' << fmt9(s.delta) << ',' << fmt9(s.omega) << ','
       << fmt9(f0 + s.omega / (2.0 * std::numbers::pi)) << ',' << fmt9(s.u_cq) << ','
       << fmt9(s.u_c_mag) << ',' << ev << '\n';
  }
}

void write_curves_csv(std::ostream& os, const std::vector<BoundaryCurve>& curves) {
  os << "uep_branch,side,index,delta,omega\n";
  for (const BoundaryCurve& c : curves) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      os << c.uep_branch << ',' << to_string(c.side) << ',' << i << ','
         << fmt9(c.points[i].delta) << ',' << fmt9(c.points[i].omega) << '\n';
    }
  }
}

std::string emit_svg(const std::vector<SvgSeries>& series, const Window& w,
                     const std::string& title) {
  if (!(w.delta_max > w.delta_min && w.omega_max > w.omega_min)) {
    throw WindowTooSmallError("empty plot window");
  }
  const double width = 800.0, height = 600.0, margin = 60.0;
  const double pw = width - 2.0 * margin, ph = height - 2.0 * margin;
  auto px = [&](double d) { return margin + (d - w.delta_min) / (w.delta_max - w.delta_min) * pw; };
  auto py = [&](double o) { return margin + (w.omega_max - o) / (w.omega_max - w.omega_min) * ph; };
  char buf[256];
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
        "viewBox=\"0 0 800 600\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
  }
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                margin, margin, pw, ph);
  os << buf;
  // Five ticks per axis.
  for (int i = 0; i <= 4; ++i) {
    const double d = w.delta_min + (w.delta_max - w.delta_min) * i / 4.0;
    const double o = w.omega_min + (w.omega_max - w.omega_min) * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"11\">%.3g</text>\n",
                  px(d), height - margin, px(d), height - margin + 5.0, px(d),
                  height - margin + 18.0, d);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-size=\"11\">%.3g</text>\n",
                  margin - 5.0, py(o), margin, py(o), margin - 8.0, py(o) + 4.0, o);
    os << buf;
  }
  os << "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-size=\"13\">delta (rad)</text>\n";
  os << "<text x=\"15\" y=\"300\" text-anchor=\"middle\" font-size=\"13\" "
        "transform=\"rotate(-90 15 300)\">omega (rad/s)</text>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << margin << "\" y=\"" << margin
     << "\" width=\"" << pw << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
  for (const SvgSeries& s : series) {
    os << "<polyline clip-path=\"url(#plot)\" fill=\"none\" stroke=\""
       << (s.color.empty() ? "black" : s.color) << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", px(s.points[i].delta),
                    py(s.points[i].omega));
      os << buf;
    }
    os << "\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = margin + 15.0 + 18.0 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                  "stroke-width=\"2\"/><text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">",
                  width - margin - 150.0, y, width - margin - 130.0, y,
                  series[i].color.empty() ? "black" : series[i].color.c_str(),
                  width - margin - 125.0, y + 4.0);
    os << buf << series[i].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace pllstab
