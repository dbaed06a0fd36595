// Copyright 2026 The photocount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "photocount/cli.hpp"

namespace photocount::cli {

namespace {

namespace pt = boost::property_tree;

// How a value scales in absolute-unit mode.
enum class Unit { plain, rate, time };

struct NumericKey {
  std::string section, key;
  Unit unit;
  std::function<double&(RunConfig&)> ref;
};

std::vector<NumericKey> numeric_keys() {
  std::vector<NumericKey> k;
  auto add = [&](std::string s, std::string n, Unit u, std::function<double&(RunConfig&)> r) {
    k.push_back({std::move(s), std::move(n), u, std::move(r)});
  };
  add("protocol", "theta_prep", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.theta_prep; });
  add("protocol", "phi_init", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.phi_init; });
  add("protocol", "phi_prop", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.phi_prop; });
  add("protocol", "phi_prop_late", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.phi_prop_late; });
  add("protocol", "bs_theta", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.bs_theta; });
  add("protocol", "delta", Unit::rate, [](RunConfig& c) -> double& { return c.protocol.delta; });
  add("protocol", "delta_up", Unit::rate, [](RunConfig& c) -> double& { return c.protocol.delta_up; });
  add("protocol", "delta_down", Unit::rate, [](RunConfig& c) -> double& { return c.protocol.delta_down; });
  add("protocol", "max_residual", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.max_residual; });
  for (int e = 0; e < 2; ++e) {
    const std::string s = "emitter" + std::to_string(e + 1);
    auto em = [e](RunConfig& c) -> ThreeLevelParams& { return c.protocol.emitters[e]; };
    add(s, "gamma_up", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_up; });
    add(s, "gamma_down", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_down; });
    add(s, "gamma_nr_up", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_nr_up; });
    add(s, "gamma_nr_down", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_nr_down; });
    add(s, "gamma_s_minus", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_s_minus; });
    add(s, "gamma_s_plus", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_s_plus; });
    add(s, "gamma_star", Unit::rate, [em](RunConfig& c) -> double& { return em(c).gamma_star; });
    add(s, "chi_star", Unit::rate, [em](RunConfig& c) -> double& { return em(c).chi_star; });
    add(s, "omega_up", Unit::rate, [em](RunConfig& c) -> double& { return em(c).omega_up; });
    add(s, "omega_s", Unit::rate, [em](RunConfig& c) -> double& { return em(c).omega_s; });
    const std::string l = "loss" + std::to_string(e + 1);
    add(l, "eta_c", Unit::plain, [e](RunConfig& c) -> double& { return c.protocol.loss[e].eta_c; });
    add(l, "eta_t", Unit::plain, [e](RunConfig& c) -> double& { return c.protocol.loss[e].eta_t; });
    add(l, "eta_d", Unit::plain, [e](RunConfig& c) -> double& { return c.protocol.loss[e].eta_d; });
  }
  add("window", "t_d", Unit::time, [](RunConfig& c) -> double& { return c.protocol.window.t_d; });
  add("window", "T_d", Unit::time, [](RunConfig& c) -> double& { return c.protocol.window.T_d; });
  add("window", "L_d", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.window.L_d; });
  // A speed: length per time, so it scales like a rate.
  add("window", "c", Unit::rate, [](RunConfig& c) -> double& { return c.protocol.window.c; });
  add("detector", "dark_rate", Unit::rate, [](RunConfig& c) -> double& { return c.protocol.dark_rate; });
  add("engine", "degeneracy_tol", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.engine.degeneracy_tol; });
  add("engine", "max_condition", Unit::plain, [](RunConfig& c) -> double& { return c.protocol.engine.max_condition; });
  add("noise", "delta_1", Unit::rate, [](RunConfig& c) -> double& { return c.diffusion.delta_1; });
  add("noise", "delta_2", Unit::rate, [](RunConfig& c) -> double& { return c.diffusion.delta_2; });
  add("noise", "mean_1", Unit::rate, [](RunConfig& c) -> double& { return c.diffusion.mean_1; });
  add("noise", "mean_2", Unit::rate, [](RunConfig& c) -> double& { return c.diffusion.mean_2; });
  add("noise", "sigma_phi", Unit::plain, [](RunConfig& c) -> double& { return c.phase.sigma_phi; });
  add("distance", "eta0", Unit::plain, [](RunConfig& c) -> double& { return c.distance.eta0; });
  add("distance", "L_att_km", Unit::plain, [](RunConfig& c) -> double& { return c.distance.L_att_km; });
  add("distance", "c_m_per_s", Unit::plain, [](RunConfig& c) -> double& { return c.distance.c_m_per_s; });
  add("distance", "gamma_abs_hz", Unit::plain, [](RunConfig& c) -> double& { return c.distance.gamma_abs_hz; });
  add("units", "gamma1_hz", Unit::plain, [](RunConfig& c) -> double& { return c.gamma1_hz; });
  return k;
}

// Keys handled outside the numeric table.
const std::set<std::string> kOtherKeys = {"protocol.name",        "protocol.n_max",   "window.t_f",
                                          "detector.kind",        "engine.max_terms", "engine.force_dense",
                                          "noise.independent_late_phase", "units.absolute", "sweep.axis",
                                          "sweep.grid",           "sweep.workers",    "output.path",
                                          "preset.name"};

int locate_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.size() > 1 && t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
    } else if (current == section) {
      const auto eq = t.find('=');
      if (eq != std::string::npos && trim(t.substr(0, eq)) == key) return number;
    }
  }
  return 0;
}

double parse_double(const std::string& raw, const std::string& where) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) throw ConfigError(where + ": expected a number, got '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& raw, const std::string& where) {
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError(where + ": expected true or false, got '" + raw + "'");
}

int parse_int(const std::string& raw, const std::string& where) {
  const double v = parse_double(raw, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(where + ": expected an integer, got '" + raw + "'");
  return static_cast<int>(v);
}

double unit_scale(Unit u, const RunConfig& c) {
  if (!c.absolute_units) return 1.0;
  if (u == Unit::rate) return 1.0 / c.gamma1_hz;
  if (u == Unit::time) return c.gamma1_hz;
  return 1.0;
}

ThreeLevelParams figure_emitter(Protocol p, double gamma, double gamma_star, double spin, double chi) {
  ThreeLevelParams e = p == Protocol::P ? ThreeLevelParams::lambda_type(0.5 * gamma, 0.5 * gamma, gamma_star)
                                        : ThreeLevelParams::l_type(gamma, gamma_star);
  e.gamma_s_minus = e.gamma_s_plus = spin;
  e.chi_star = chi;
  return e;
}

}  // namespace

const std::vector<std::string>& axis_keys() {
  static const std::vector<std::string> keys = {"t_f",   "T_d",        "eta",   "L",         "sigma_phi",
                                                "delta", "gamma_star", "Delta", "theta_prep"};
  return keys;
}

std::vector<double> Grid::values() const {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
  }
  if (n > 1) v.back() = b;
  return v;
}

std::string Grid::str() const {
  return format_number(a) + ":" + format_number(b) + ":" + std::to_string(n) + (log ? ":log" : "");
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) throw ConfigError("grid '" + text + "': expected a:b:n or a:b:n:log");
  Grid g;
  g.a = parse_double(parts[0], "grid start");
  g.b = parse_double(parts[1], "grid end");
  g.n = parse_int(parts[2], "grid count");
  if (parts.size() == 4) {
    if (parts[3] != "log") throw ConfigError("grid '" + text + "': the fourth field must be 'log'");
    g.log = true;
  }
  if (g.n < 1) throw ConfigError("grid '" + text + "': need at least one point");
  if (g.n > 1 && g.a == g.b) throw ConfigError("grid '" + text + "': not strictly monotone");
  if (g.log && (g.a <= 0.0 || g.b <= 0.0)) throw ConfigError("grid '" + text + "': log grids need positive ends");
  if (!std::isfinite(g.a) || !std::isfinite(g.b)) throw ConfigError("grid '" + text + "': ends must be finite");
  return g;
}

void RunConfig::validate() const {
  protocol.validate();
  diffusion.validate();
  phase.validate();
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(gamma1_hz > 0.0)) throw ConfigError("units.gamma1_hz must be positive");
  if (!axis.empty() && std::find(axis_keys().begin(), axis_keys().end(), axis) == axis_keys().end()) {
    std::string all;
    for (const auto& k : axis_keys()) all += (all.empty() ? "" : ", ") + k;
    throw ConfigError("unknown sweep axis '" + axis + "' (expected one of " + all + ")");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
  return names;
}

RunConfig preset(const std::string& name, std::optional<Protocol> protocol) {
  RunConfig c;
  c.preset = name;
  ProtocolConfig& p = c.protocol;
  if (name == "fig2" || name == "fig3" || name == "fig4") {
    // Time dynamics: window equal to the protocol duration, lossless PNRD.
    p.protocol = protocol.value_or(name == "fig2" ? Protocol::N : name == "fig3" ? Protocol::T : Protocol::P);
    for (auto& e : p.emitters) e = figure_emitter(p.protocol, 1.0, 0.1, 0.001, 0.001);
    p.window.T_d = 10.0;
  } else if (name == "fig5") {
    // Phase errors; no spin decoherence or detector noise.
    p.protocol = protocol.value_or(Protocol::N);
    p.emitters = {figure_emitter(p.protocol, 1.0, 0.002, 0.0, 0.0), figure_emitter(p.protocol, 0.85, 0.002, 0.0, 0.0)};
    p.delta = p.delta_up = p.delta_down = 0.02;
    p.window.T_d = 80.0;
  } else if (name == "fig6") {
    // Loss and distance: bin detectors with 1 - xi_0 = 1e-5 per window.
    p.protocol = protocol.value_or(Protocol::N);
    p.emitters = {figure_emitter(p.protocol, 1.0, 0.002, 0.5e-6, 1e-6),
                  figure_emitter(p.protocol, 0.85, 0.002, 0.5e-6, 1e-6)};
    p.delta = p.delta_up = p.delta_down = 0.02;
    p.window.T_d = 5.0;
    p.theta_prep = kPi / 8;
    p.detector = DetectorKind::bd;
    p.dark_rate = -std::log1p(-1e-5) / p.window.T_d;
    c.distance = DistanceModel{0.999, 22.0, 2e8, 1e8};
  } else if (name == "fig7") {
    // Optical-limit comparison with spectral diffusion.
    p.protocol = protocol.value_or(Protocol::N);
    p.emitters = {figure_emitter(p.protocol, 1.0, 0.002, 0.0, 0.0), figure_emitter(p.protocol, 0.85, 0.002, 0.0, 0.0)};
    p.window.T_d = 80.0;
    c.diffusion = DiffusionSpec{0.02, 0.02, 0.0, 0.0};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fig2 ... fig7)");
  }
  return c;
}

// Drops "; ..." and "# ..." comments that follow a value; line numbers are kept.
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out += line + "\n";
  }
  return out;
}

RunConfig parse_config(const std::string& raw_text, const std::optional<RunConfig>& base) {
  const std::string text = strip_inline_comments(raw_text);
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config:" + std::to_string(e.line()) + ": " + e.message());
  }
  auto where = [&](const std::string& section, const std::string& key) {
    const int line = locate_line(text, section, key);
    return "config:" + (line > 0 ? std::to_string(line) + ": " : std::string()) + section + "." + key;
  };
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto sec = tree.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  };

  const auto table = numeric_keys();
  std::set<std::string> known = kOtherKeys;
  for (const auto& k : table) known.insert(k.section + "." + k.key);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!known.count(section + "." + key)) throw ConfigError(where(section, key) + ": unknown key");
    }
  }

  RunConfig c;
  if (base) {
    c = *base;
  } else if (const auto name = get("preset", "name")) {
    c = preset(*name);
  } else {
    // Without a preset the physical rates must be given explicitly.
    const auto pname = get("protocol", "name");
    const bool lambda = pname && (*pname == "P" || *pname == "p");
    std::vector<std::pair<std::string, std::string>> required = {
        {"emitter1", "gamma_up"}, {"emitter1", "gamma_star"}, {"emitter2", "gamma_up"},
        {"emitter2", "gamma_star"}, {"window", "T_d"}};
    if (lambda) {
      required.push_back({"emitter1", "gamma_down"});
      required.push_back({"emitter2", "gamma_down"});
    }
    for (const auto& [s, k] : required) {
      if (!get(s, k)) throw ConfigError("config: missing required key '" + s + "." + k + "'");
    }
    for (auto& e : c.protocol.emitters) e = ThreeLevelParams{};
  }

  if (const auto v = get("protocol", "name")) {
    try {
      c.protocol.protocol = protocol_from_name(*v);
    } catch (const DomainError& e) {
      throw ConfigError(where("protocol", "name") + ": " + e.what());
    }
  }
  if (const auto v = get("units", "absolute")) c.absolute_units = parse_bool(*v, where("units", "absolute"));
  if (const auto v = get("units", "gamma1_hz")) c.gamma1_hz = parse_double(*v, where("units", "gamma1_hz"));
  if (!(c.gamma1_hz > 0.0)) throw ConfigError(where("units", "gamma1_hz") + ": must be positive");

  for (const auto& k : table) {
    if (k.section == "units") continue;
    if (const auto v = get(k.section, k.key)) {
      k.ref(c) = parse_double(*v, where(k.section, k.key)) * unit_scale(k.unit, c);
    }
  }
  if (const auto v = get("protocol", "n_max")) c.protocol.n_max = parse_int(*v, where("protocol", "n_max"));
  if (const auto v = get("window", "t_f")) {
    if (*v == "auto") {
      c.protocol.t_f.reset();
    } else {
      c.protocol.t_f = parse_double(*v, where("window", "t_f")) * unit_scale(Unit::time, c);
    }
  }
  if (const auto v = get("detector", "kind")) {
    try {
      c.protocol.detector = detector_from_name(*v);
    } catch (const DomainError& e) {
      throw ConfigError(where("detector", "kind") + ": " + e.what());
    }
  }
  if (const auto v = get("engine", "max_terms")) c.protocol.engine.max_terms = parse_int(*v, where("engine", "max_terms"));
  if (const auto v = get("engine", "force_dense")) {
    c.protocol.engine.force_dense = parse_bool(*v, where("engine", "force_dense"));
  }
  if (const auto v = get("noise", "independent_late_phase")) {
    c.phase.independent_late_phase = parse_bool(*v, where("noise", "independent_late_phase"));
  }
  if (const auto v = get("sweep", "axis")) c.axis = *v;
  if (const auto v = get("sweep", "grid")) {
    try {
      c.grid = parse_grid(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(where("sweep", "grid") + ": " + e.what());
    }
  }
  if (const auto v = get("sweep", "workers")) c.workers = parse_int(*v, where("sweep", "workers"));
  if (const auto v = get("output", "path")) c.out = *v;
  if (const auto v = get("preset", "name")) c.preset = *v;

  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: invalid parameters: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path, const std::optional<RunConfig>& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), base);
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.rfind("config", 0) == 0) msg = path + msg.substr(6);
    throw ConfigError(msg);
  }
}

std::string echo_config(const RunConfig& config) {
  RunConfig c = config;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::vector<std::string> order;
  auto put = [&](const std::string& s, const std::string& k, const std::string& v) {
    if (!sections.count(s)) order.push_back(s);
    sections[s].push_back({k, v});
  };
  if (!c.preset.empty()) put("preset", "name", c.preset);
  put("units", "absolute", c.absolute_units ? "true" : "false");
  put("units", "gamma1_hz", format_number(c.gamma1_hz));
  put("protocol", "name", protocol_name(c.protocol.protocol));
  put("protocol", "n_max", std::to_string(c.protocol.n_max));
  for (const auto& k : numeric_keys()) {
    if (k.section == "units") continue;
    put(k.section, k.key, format_number(k.ref(c) / unit_scale(k.unit, c)));
  }
  put("window", "t_f", c.protocol.t_f ? format_number(*c.protocol.t_f / unit_scale(Unit::time, c)) : "auto");
  put("detector", "kind", detector_name(c.protocol.detector));
  put("engine", "max_terms", std::to_string(c.protocol.engine.max_terms));
  put("engine", "force_dense", c.protocol.engine.force_dense ? "true" : "false");
  put("noise", "independent_late_phase", c.phase.independent_late_phase ? "true" : "false");
  if (!c.axis.empty()) put("sweep", "axis", c.axis);
  if (c.grid) put("sweep", "grid", c.grid->str());
  put("sweep", "workers", std::to_string(c.workers));
  if (!c.out.empty()) put("output", "path", c.out);

  std::string text;
  for (const auto& s : order) {
    text += "[" + s + "]\n";
    for (const auto& [k, v] : sections[s]) text += k + " = " + v + "\n";
    text += "\n";
  }
  return text;
}

RunConfig apply_axis(const RunConfig& config, const std::string& axis, double value) {
  RunConfig c = config;
  ProtocolConfig& p = c.protocol;
  const double rate = value * unit_scale(Unit::rate, c), time = value * unit_scale(Unit::time, c);
  if (axis == "t_f") {
    // Window spans the whole protocol: t_f = t_d + N_w T_d + L_d / c.
    p.window.T_d = (time - p.window.t_d - p.window.delay()) / p.windows();
    p.t_f.reset();
  } else if (axis == "T_d") {
    p.window.T_d = time;
  } else if (axis == "eta") {
    for (auto& l : p.loss) l = LossBudget{value, 1.0, 1.0};
  } else if (axis == "L") {
    p = distance_config(p, value, c.distance);
  } else if (axis == "sigma_phi") {
    c.phase.sigma_phi = value;
  } else if (axis == "delta") {
    c.diffusion.delta_1 = c.diffusion.delta_2 = rate;
  } else if (axis == "gamma_star") {
    for (auto& e : p.emitters) e.gamma_star = rate;
  } else if (axis == "Delta") {
    p.delta = p.delta_up = p.delta_down = rate;
  } else if (axis == "theta_prep") {
    p.theta_prep = value;
  } else {
    RunConfig probe = c;
    probe.axis = axis;
    probe.validate();
  }
  return c;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

}  // namespace photocount::cli
