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
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <json.hpp>

#include "photocount/cli.hpp"
#include "photocount/oracles.hpp"

namespace photocount::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPositivityTol = 1e-9;
constexpr double kCompletenessTol = 1e-8;

bool noisy(const RunConfig& c) {
  return c.diffusion.delta_1 > 0.0 || c.diffusion.delta_2 > 0.0 || c.phase.sigma_phi > 0.0;
}

// Mean detuning offsets are folded into emitter frequencies.
ProtocolConfig with_means(const RunConfig& c) {
  ProtocolConfig p = c.protocol;
  p.emitters[0].omega_up += c.diffusion.mean_1;
  p.emitters[1].omega_up += c.diffusion.mean_2;
  return p;
}

bool has_spin_noise(const ProtocolConfig& p) {
  for (const auto& e : p.emitters) {
    if (e.gamma_s_minus > 0.0 || e.gamma_s_plus > 0.0 || e.chi_star > 0.0) return true;
  }
  return false;
}

// The closed forms have no spin decoherence; oracle-only runs and the optical limit drop it.
ProtocolConfig spin_free(ProtocolConfig p) {
  for (auto& e : p.emitters) e.gamma_s_minus = e.gamma_s_plus = e.chi_star = 0.0;
  return p;
}

// Closed forms read the spin state after the emitters have relaxed; photons after the window are not detected.
ProtocolConfig relaxed(ProtocolConfig p) {
  const double slowest = std::min(p.emitters[0].gamma(), p.emitters[1].gamma());
  if (slowest > 0.0) p.t_f = std::max(p.final_time(), p.window.min_final_time(p.windows()) + 40.0 / slowest);
  return p;
}

AveragedMerit closed_merit(const RunConfig& c, bool oracle_only) {
  RunConfig r = c;
  if (oracle_only) r.protocol = relaxed(spin_free(r.protocol));
  if (!noisy(r)) return oracle_merit(with_means(r));
  return averaged_merit(r.protocol, r.diffusion, r.phase, AveragingMode::closed_form);
}

nlohmann::ordered_json number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

SweepRow evaluate_point(const RunConfig& config, const std::string& axis, double value, bool oracle_only) {
  const RunConfig c = axis.empty() ? config : apply_axis(config, axis, value);
  SweepRow row;
  row.axis = axis;
  row.value = value;
  if (oracle_only) {
    const AveragedMerit m = closed_merit(c, true);
    row.eta_gen = m.eta_gen;
    row.F_gen = m.F_gen;
    row.C_gen = m.C_gen;
    row.p0 = row.p1 = row.p2 = row.p11 = row.p3plus = row.residual = kNaN;
    return row;
  }
  // Photon statistics are those of the mean parameter point.
  const ProtocolRun run = run_protocol(with_means(c));
  row.p0 = run.stats.p0;
  row.p1 = run.stats.p1;
  row.p2 = run.stats.p2;
  row.p11 = run.stats.p11;
  row.p3plus = run.stats.p3plus;
  row.residual = run.ensemble.truncation_residual;
  if (noisy(c)) {
    const AveragedMerit m = averaged_merit(c.protocol, c.diffusion, c.phase, AveragingMode::numeric);
    row.eta_gen = m.eta_gen;
    row.F_gen = m.F_gen;
    row.C_gen = m.C_gen;
  } else {
    row.eta_gen = run.merit.eta_gen;
    row.F_gen = run.merit.defined ? run.merit.F_gen : kNaN;
    row.C_gen = run.merit.defined ? run.merit.C_gen : kNaN;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, bool oracle_only) {
  if (config.axis.empty()) throw ConfigError("sweep needs an axis");
  if (!config.grid) throw ConfigError("sweep needs a grid");
  config.validate();
  const std::vector<double> values = config.grid->values();
  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        rows[i] = evaluate_point(config, config.axis, values[i], oracle_only);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(config.workers, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  // The first failing grid point wins regardless of scheduling.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows) {
    out += r.axis;
    for (double v : {r.value, r.eta_gen, r.F_gen, r.C_gen, r.p0, r.p1, r.p2, r.p11, r.p3plus, r.residual}) {
      out += "," + format_number(v);
    }
    out += "\n";
  }
  return out;
}

SimulateResult simulate(const RunConfig& config, bool oracle_only) {
  config.validate();
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["protocol"] = protocol_name(config.protocol.protocol);
  j["config"] = echo_config(config);
  SimulateResult result;

  std::optional<AveragedMerit> oracle;
  std::string oracle_reason;
  try {
    oracle = closed_merit(config, oracle_only);
  } catch (const DomainError& e) {
    oracle_reason = e.what();
  }

  if (oracle_only) {
    if (!oracle) throw DomainError("no closed form at this point: " + oracle_reason);
    j["mode"] = "oracle";
    std::string approx = "emitters relaxed before readout";
    if (has_spin_noise(config.protocol)) approx += "; spin decoherence omitted";
    j["approximation"] = approx;
    j["merit"] = {{"eta_gen", number(oracle->eta_gen)}, {"F_gen", number(oracle->F_gen)},
                  {"C_gen", number(oracle->C_gen)}};
  } else {
    const ProtocolRun run = run_protocol(with_means(config));
    double eta = run.merit.eta_gen, F = run.merit.F_gen, C = run.merit.C_gen;
    bool defined = run.merit.defined;
    if (noisy(config)) {
      const AveragedMerit m = averaged_merit(config.protocol, config.diffusion, config.phase, AveragingMode::numeric);
      eta = m.eta_gen;
      F = m.F_gen;
      C = m.C_gen;
      defined = m.eta_gen > 0.0;
      j["averaging_nodes"] = m.nodes;
    }
    j["mode"] = noisy(config) ? "engine_averaged" : "engine";
    j["merit"] = {{"eta_gen", number(eta)},
                  {"F_gen", defined ? number(F) : nullptr},
                  {"C_gen", defined ? number(C) : nullptr}};
    j["stats"] = {{"p0", run.stats.p0},   {"p1", run.stats.p1},         {"p2", run.stats.p2},
                  {"p11", run.stats.p11}, {"p3plus", run.stats.p3plus}};
    if (oracle) {
      j["oracle"] = {{"available", true},
                     {"delta_eta", std::abs(oracle->eta_gen - eta)},
                     {"delta_F", defined ? number(std::abs(oracle->F_gen - F)) : nullptr},
                     {"delta_C", defined ? number(std::abs(oracle->C_gen - C)) : nullptr}};
    } else {
      j["oracle"] = {{"available", false}, {"reason", oracle_reason}};
    }
    result.invariants_ok = run.min_eigenvalue >= -kPositivityTol && run.completeness_defect <= kCompletenessTol;
    j["diagnostics"] = {{"t_f", run.t_f},
                        {"truncation_residual", run.ensemble.truncation_residual},
                        {"completeness_defect", run.completeness_defect},
                        {"min_eigenvalue", run.min_eigenvalue},
                        {"dense_fallback", run.dense_fallback},
                        {"invariants_ok", result.invariants_ok}};
  }

  // Optical limit of the ideal-detector closed forms, when they apply.
  try {
    // An infinite-window quantity: stretch the window until both emitters have decayed.
    ProtocolConfig p = spin_free(with_means(config));
    const double slowest = std::min(p.emitters[0].gamma(), p.emitters[1].gamma());
    if (slowest > 0.0) p.window.T_d = std::max(p.window.T_d, 40.0 / slowest);
    p.t_f.reset();
    OpticalLimitReport lim;
    switch (p.protocol) {
      case Protocol::N: lim = oracle_N(p).limit; break;
      case Protocol::T: lim = oracle_T(p).limit; break;
      case Protocol::P: lim = oracle_P(p).limit; break;
    }
    j["optical_limit"] = {{"available", true}, {"F_op", lim.F_op}, {"eta_op", lim.eta_op}, {"C_op", lim.C_op}};
  } catch (const DomainError& e) {
    j["optical_limit"] = {{"available", false}, {"reason", e.what()}};
  }

  result.json = j.dump(2) + "\n";
  return result;
}

std::string simulate_report(const RunConfig& config, bool oracle_only) { return simulate(config, oracle_only).json; }

}  // namespace photocount::cli
