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

#include <limits>
#include <optional>

#include "photocount/protocols.hpp"

// Closed-form results for the idealised protocols. They share no code with the
// propagator engine and serve as its reference.
namespace photocount {

inline constexpr double kInfiniteWindow = std::numeric_limits<double>::infinity();

// 4 g1 g2 / (g1 + g2)^2
double overlap_gamma(double gamma1, double gamma2);
// Mean wave-packet overlap of two emitters observed for an unbounded window.
double wavepacket_overlap_closed_form(double gamma1, double gamma2, double Gamma1, double Gamma2, double delta);
// Coherence factor 2 sqrt(g1 g2)/(G1 + G2 + 2 i D) (1 - exp(-T (G1 + G2 + 2 i D)/2)) e^{i phase}.
Complex coherence_factor(double gamma1, double gamma2, double Gamma1, double Gamma2, double delta, double T_d,
                         double phase = 0.0);
// Rate-normalised brightness eta (1 - exp(-gamma T_d)) of an emitter starting in |e>.
double brightness_closed_form(double eta, double gamma, double T_d);

struct OpticalLimitReport {
  double F_op = 0.0;
  double eta_op = 0.0;
  double C_op = 0.0;
};

OpticalLimitReport optical_limit_N(double eta, double theta_prep, Complex c_tilde);
OpticalLimitReport optical_limit_T(double eta1, double eta2, Complex c_tilde);
OpticalLimitReport optical_limit_P(Complex c_up, Complex c_down, Complex m_tilde, double weight_a = 0.5,
                                   double weight_b = 0.5);

struct OracleN {
  Complex c_tilde;
  double beta1 = 0.0, beta2 = 0.0;
  DensityOperator rho0, rho_plus, rho_minus;
  DensityOperator rho_two;  // sum of all two-photon states
  // Individual two-photon states; only for a balanced splitter.
  std::optional<DensityOperator> rho20, rho11, rho02;
  OpticalLimitReport limit;  // valid for equal efficiencies and a balanced splitter
};

// Conditional states of protocol N after the emitters have fully decayed.
// Requires no spin dynamics, L-type emitters and a window opening at t = 0.
OracleN oracle_N(const ProtocolConfig& config);

struct OracleT {
  Complex c_tilde;
  double F_gen = 0.0, eta_gen = 0.0, C_gen = 0.0;
  OpticalLimitReport limit;
};

OracleT oracle_T(const ProtocolConfig& config);

struct OracleP {
  Complex c_up, c_down, m_tilde;
  OpticalLimitReport limit;
};

OracleP oracle_P(const ProtocolConfig& config);

// Protocol N in the long-window limit with dark counts, balanced splitter and equal efficiencies.
struct NoisyMerit {
  double F_gen = 0.0;
  double eta_gen = 0.0;
};

NoisyMerit noisy_N_closed_form(double eta, double theta_prep, double re_c_tilde, double m12, double xi0, double xi1,
                               DetectorKind kind);

// Probability of zero dark counts when the one-count probability is xi1 (small-rate branch).
double xi0_from_xi1(double xi1);

struct ThetaOptimum {
  double estimate = 0.0;
  double numeric = 0.0;
  double F_at_numeric = 0.0;
};

ThetaOptimum optimal_theta_N(double eta, double xi1, DetectorKind kind, double m12,
                             std::optional<double> re_c_tilde = std::nullopt);

// Optical-limit figures of merit of the three protocols for a pair of emitters.
struct ProtocolComparison {
  double M12 = 0.0;
  double F_N = 0.0, F_T = 0.0, F_P = 0.0;
  double C_N = 0.0, C_T = 0.0, C_P = 0.0;
  double upper_bound = 0.0;  // (1 + sqrt(M12)) / 2
};

ProtocolComparison compare_optical_limits(double gamma1, double gamma2, double gamma_star1, double gamma_star2,
                                          double delta);

}  // namespace photocount
