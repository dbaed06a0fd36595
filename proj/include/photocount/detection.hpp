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

#include <map>
#include <vector>

#include "photocount/polyexp.hpp"
#include "photocount/systems.hpp"

namespace photocount {

enum class DetectorKind { pnrd, bd };

const char* detector_name(DetectorKind k);
DetectorKind detector_from_name(const std::string& name);

// Detector-clock window [t_d, t_d + T_d] at distance L_d from the emitters.
// Emitter time is retarded by L_d / c; results return after another L_d / c.
struct DetectionWindow {
  double t_d = 0.0;
  double T_d = 10.0;
  double L_d = 0.0;
  double c = 1.0;

  double delay() const { return L_d / c; }
  double emitter_start() const { return t_d - delay(); }
  double emitter_end() const { return emitter_start() + T_d; }
  // Earliest time at which the outcome of `windows` contiguous windows is known at the emitters.
  double min_final_time(int windows = 1) const { return t_d + windows * T_d + delay(); }
  void validate(double t0 = 0.0) const;
};

// Poisson probability of n dark counts in a window of length T_d.
double dark_count_prob(int n, double T_d, double rate);

// Unnormalised states indexed by true photon counts per detector.
struct ConditionalEnsemble {
  int detectors = 0;
  std::map<CountVector, DensityOperator> states;
  double truncation_residual = 0.0;

  double total_trace() const;
  Matrix sum() const;
};

struct MeasuredEnsemble {
  DetectorKind kind = DetectorKind::pnrd;
  std::map<CountVector, DensityOperator> outcomes;
  // Probability not represented in `outcomes` (dark-count tail plus input truncation).
  double residual = 0.0;

  double total_trace() const;
  const DensityOperator* find(const CountVector& m) const;
};

// PNRD outcomes are enumerated up to the largest true count plus `extra_dark` dark counts.
MeasuredEnsemble measure(const ConditionalEnsemble& ensemble, DetectorKind kind, double dark_rate, double T_d,
                         int extra_dark = 3);

enum class BellLabel { psi_plus, psi_minus };

struct HeraldedOutcome {
  CountVector outcome;
  BellLabel target;
};

// Accepted outcomes and the Bell state each heralds. Detector order: N (D1, D2);
// T (late D1, late D2, early D1, early D2); P (L1, L2, R1, R2).
std::vector<HeraldedOutcome> accepted_outcomes(Protocol protocol, DetectorKind kind);

}  // namespace photocount
