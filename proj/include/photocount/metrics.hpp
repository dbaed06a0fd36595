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

#include <vector>

#include "photocount/detection.hpp"
#include "photocount/systems.hpp"

namespace photocount {

// (|up,down> +/- |down,up>)/sqrt(2) on two three-level systems.
Vector bell_state(BellLabel label);

struct FidelityResult {
  double fidelity = 0.0;
  double efficiency = 0.0;
  bool defined = false;
};

// <psi|rho|psi> / Tr rho for an unnormalised heralded state.
FidelityResult fidelity(const DensityOperator& rho, const Vector& target);

struct ConcurrenceResult {
  double concurrence = 0.0;
  double ground_weight = 0.0;    // trace of the spin block
  double excited_residue = 0.0;  // trace outside the spin block
  bool defined = false;
};

// 4x4 block on {up,down} x {up,down} of a two three-level state (or the state itself if 4x4).
Matrix spin_block(const Matrix& rho);
// Wootters concurrence of a normalised two-qubit state.
double wootters_concurrence(const Matrix& rho4);
// Concurrence after projecting onto the spin subspace and renormalising within it.
ConcurrenceResult concurrence(const DensityOperator& rho);

struct OutcomeMerit {
  CountVector outcome;
  BellLabel target = BellLabel::psi_plus;
  double efficiency = 0.0;
  double fidelity = 0.0;
  double concurrence = 0.0;
  bool defined = false;
};

struct MeritReport {
  double eta_gen = 0.0;
  double F_gen = 0.0;
  double C_gen = 0.0;
  bool defined = false;
  double residual = 0.0;
  std::vector<OutcomeMerit> outcomes;
};

MeritReport merit_report(const MeasuredEnsemble& measured, const std::vector<HeraldedOutcome>& accepted);

// Single emitter feeding one detected field a = sqrt(eta * gamma_transition) sigma.
struct EmitterSpec {
  ThreeLevelParams params;
  LossBudget loss;
  Level transition = kUp;
  Matrix initial;  // 3x3; empty means |e><e|

  Matrix initial_state() const;
};

// Mean detected photon number over the emitter-time window [t_start, t_end], state prepared at 0.
double brightness(const EmitterSpec& emitter, double t_start, double t_end);

// <a^dag(t + tau) a(t)> for the detected field.
Complex field_correlation(const EmitterSpec& emitter, double t, double tau);

// Mean wave-packet overlap of the detected fields over the window; M_kk when both are equal.
double mean_wavepacket_overlap(const EmitterSpec& a, const EmitterSpec& b, double t_start, double t_end,
                               double tol = 1e-11);

// Time-integrated second-order correlation 2 G2 / beta^2 over the window.
double g2_integrated(const EmitterSpec& emitter, double t_start, double t_end, double tol = 1e-11);

}  // namespace photocount
