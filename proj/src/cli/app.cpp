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


#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "photocount/cli.hpp"
#include "photocount/verify.hpp"

namespace photocount::cli {

namespace {

struct Overrides {
  std::string config_path;
  std::string preset_name;
  std::string protocol;
  std::optional<double> td, tf, dark_rate;
  std::string detector;
  std::optional<int> nmax, workers;
  std::string axis, grid, out;
  bool oracle_only = false;
};

RunConfig build_config(const Overrides& o) {
  std::optional<Protocol> protocol;
  if (!o.protocol.empty()) {
    try {
      protocol = protocol_from_name(o.protocol);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--protocol: ") + e.what());
    }
  }
  std::optional<RunConfig> base;
  if (!o.preset_name.empty()) base = preset(o.preset_name, protocol);
  RunConfig c;
  if (!o.config_path.empty()) {
    c = load_config(o.config_path, base);
  } else if (base) {
    c = *base;
  } else {
    // Nothing to start from: report the first missing key.
    c = parse_config(o.protocol.empty() ? "" : "[protocol]\nname = " + o.protocol + "\n");
  }
  if (protocol) c.protocol.protocol = *protocol;
  if (o.td) c.protocol.window.T_d = *o.td * (c.absolute_units ? c.gamma1_hz : 1.0);
  if (o.tf) c.protocol.t_f = *o.tf * (c.absolute_units ? c.gamma1_hz : 1.0);
  if (!o.detector.empty()) {
    try {
      c.protocol.detector = detector_from_name(o.detector);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--detector: ") + e.what());
    }
  }
  if (o.dark_rate) c.protocol.dark_rate = *o.dark_rate / (c.absolute_units ? c.gamma1_hz : 1.0);
  if (o.nmax) c.protocol.n_max = *o.nmax;
  if (o.workers) c.workers = *o.workers;
  if (!o.axis.empty()) c.axis = o.axis;
  if (!o.grid.empty()) c.grid = parse_grid(o.grid);
  if (!o.out.empty()) c.out = o.out;
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  return c;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

int run_verify(bool verbose, bool inject, std::ostream& out) {
  VerifyOptions opts;
  opts.flip_c_tilde_sign = inject;
  bool ok = true;
  out << std::scientific << std::setprecision(3);
  for (const auto& suite : run_verification(opts)) {
    out << (suite.pass() ? "PASS " : "FAIL ") << suite.name << "  max_error=" << suite.max_error() << "  checks="
        << suite.checks.size() << "\n";
    if (verbose) {
      for (const auto& c : suite.checks) {
        out << "    " << (c.pass() ? "ok   " : "FAIL ") << c.name << "  error=" << c.error
            << "  tolerance=" << c.tolerance << "\n";
      }
    }
    ok = ok && suite.pass();
  }
  out << std::defaultfloat;
  return ok ? kExitOk : kExitInvariant;
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("config,--config", o.config_path, "INI-style configuration file");
  cmd->add_option("--preset", o.preset_name, "figure preset: fig2 ... fig7");
  cmd->add_option("--protocol", o.protocol, "protocol N, T or P");
  cmd->add_option("--td", o.td, "detection window length T_d");
  cmd->add_option("--tf", o.tf, "final emitter time t_f");
  cmd->add_option("--detector", o.detector, "detector model pnrd or bd");
  cmd->add_option("--dark-rate", o.dark_rate, "dark-count rate per detector");
  cmd->add_option("--nmax", o.nmax, "photon-count truncation per window");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_flag("--oracle-only", o.oracle_only, "closed forms only, no numeric engine");
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-count conditioned simulation of heralded spin entanglement", "photocount"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);
  bool verify_flag = false;
  app.add_flag("--verify", verify_flag, "run the verification suites");

  Overrides sim, sweep;
  auto* simulate_cmd = app.add_subcommand("simulate", "evaluate one parameter point and write a JSON report");
  add_run_options(simulate_cmd, sim);
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a grid along one axis and write CSV");
  add_run_options(sweep_cmd, sweep);
  std::string keys;
  for (const auto& k : axis_keys()) keys += (keys.empty() ? "" : ", ") + k;
  sweep_cmd->add_option("--axis", sweep.axis, "sweep axis: " + keys);
  sweep_cmd->add_option("--grid", sweep.grid, "grid a:b:n or a:b:n:log");
  sweep_cmd->add_option("--workers", sweep.workers, "worker threads");

  bool verbose = false, inject = false;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle, quadrature and bound-chain suites");
  verify_cmd->add_flag("--verbose", verbose, "list every check with its tolerance");
  verify_cmd->add_flag("--inject-sign-error", inject, "negate the coherence factor (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (verify_cmd->parsed() || (verify_flag && !simulate_cmd->parsed() && !sweep_cmd->parsed())) {
      return run_verify(verbose, inject, out);
    }
    if (simulate_cmd->parsed()) {
      const RunConfig c = build_config(sim);
      const SimulateResult r = simulate(c, sim.oracle_only);
      emit(r.json, c.out, out);
      int code = r.invariants_ok ? kExitOk : kExitInvariant;
      if (!r.invariants_ok) err << "error: invariant breach (see diagnostics)\n";
      if (verify_flag && run_verify(false, false, err) != kExitOk) code = kExitInvariant;
      return code;
    }
    if (sweep_cmd->parsed()) {
      const RunConfig c = build_config(sweep);
      if (c.axis.empty()) throw ConfigError("sweep needs --axis (one of " + keys + ")");
      if (!c.grid) throw ConfigError("sweep needs --grid a:b:n");
      emit(sweep_csv(run_sweep(c, sweep.oracle_only)), c.out, out);
      if (verify_flag && run_verify(false, false, err) != kExitOk) return kExitInvariant;
      return kExitOk;
    }
    out << app.help();
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace photocount::cli
