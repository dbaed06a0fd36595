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

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "photocount/detection.hpp"
#include "photocount/metrics.hpp"
#include "photocount/polyexp.hpp"
#include "photocount/systems.hpp"

namespace photocount {

struct ProtocolConfig {
  Protocol protocol = Protocol::N;
  std::array<ThreeLevelParams, 2> emitters{};
  std::array<LossBudget, 2> loss{};
  // Detunings are applied to the first emitter: omega_up += delta (N, T); for P
  // omega_up += delta_up and omega_s += delta_up - delta_down.
  double delta = 0.0;
  double delta_up = 0.0;
  double delta_down = 0.0;

  double theta_prep = kPi / 4;  // N only
  double phi_init = 0.0;        // phi_1 - phi_2 of the prepared superposition
  double phi_prop = 0.0;        // propagation phase difference
  double phi_prop_late = 0.0;   // additional phase of the second T window
  double bs_theta = kPi / 4;

  DetectionWindow window{};
  std::optional<double> t_f;  // emitter-time end; defaults to the earliest allowed
  DetectorKind detector = DetectorKind::pnrd;
  double dark_rate = 0.0;
  int n_max = 0;  // per window; 0 selects 2
  double max_residual = 1e-6;  // probability allowed outside the count lattice
  EngineOptions engine{};

  int windows() const { return protocol == Protocol::T ? 2 : 1; }
  int detectors() const { return protocol == Protocol::P ? 4 : 2; }
  int window_n_max() const { return n_max > 0 ? n_max : 2; }
  double final_time() const;
  std::vector<ThreeLevelParams> systems() const;
  InterferenceNetwork network(bool late_window = false) const;
  std::vector<LossBudget> losses() const { return {loss[0], loss[1]}; }
  void validate() const;
};

struct PhotonStatistics {
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;      // two photons on one detector
  double p11 = 0.0;     // two photons on distinct detectors that do not herald
  double p3plus = 0.0;
};

struct ProtocolRun {
  ConditionalEnsemble ensemble;
  MeasuredEnsemble measured;
  MeritReport merit;
  PhotonStatistics stats;
  Matrix rho_full;              // unconditional state at t_f
  double t_f = 0.0;
  double completeness_defect = 0.0;  // max |sum_n rho_n - rho_full|
  double min_eigenvalue = 0.0;       // over all conditional states
  bool dense_fallback = false;
};

PhotonStatistics photon_statistics(const ConditionalEnsemble& ensemble, Protocol protocol);

// Spectral data for one configuration; runs at several window lengths reuse it.
class ProtocolEngine {
 public:
  explicit ProtocolEngine(ProtocolConfig config);

  const ProtocolConfig& config() const { return config_; }
  ProtocolRun run() const;
  // Window length T_d and optional final time override those of the configuration.
  ProtocolRun run(double T_d, std::optional<double> t_f = std::nullopt) const;

 private:
  ProtocolConfig config_;
  std::vector<ThreeLevelParams> systems_;
  std::unique_ptr<ConditionalEngine> early_, late_;
  PolyExpPropagator full_;
  Matrix start_;  // vec(rho) at the start of the first window
  std::optional<ConditionalPropagators> first_window_;
};

ProtocolRun run_protocol(const ProtocolConfig& config);

struct DistanceModel {
  double eta0 = 0.999;
  double L_att_km = 22.0;
  double c_m_per_s = 2e8;
  double gamma_abs_hz = 1e8;  // rate unit; times in the configuration are in 1/gamma_abs

  // Single-photon efficiency after half the link (each photon travels L/2).
  double efficiency(double L_km) const { return eta0 * std::pow(10.0, -L_km / (2.0 * L_att_km)); }
  // One-way delay over L/2 in units of 1/gamma_abs.
  double half_delay(double L_km) const { return 0.5 * L_km * 1e3 / c_m_per_s * gamma_abs_hz; }
};

struct DistanceRow {
  double L_km = 0.0;
  double eta = 0.0;
  double t_f = 0.0;
  MeritReport merit;
  PhotonStatistics stats;
};

// The middle station sits L/2 from each emitter; the window opens when light from t = 0 arrives, and
// t_f = windows * T_d + L / c. Both loss budgets are replaced by (eta0 * attenuation, 1, 1).
ProtocolConfig distance_config(const ProtocolConfig& base, double L_km, const DistanceModel& model);
std::vector<DistanceRow> distance_sweep(const ProtocolConfig& base, const std::vector<double>& L_km,
                                        const DistanceModel& model = {});

}  // namespace photocount
