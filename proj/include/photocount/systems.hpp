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

#include <string>

#include "photocount/liouville.hpp"

namespace photocount {

enum class Protocol { N, T, P };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

// Local basis index of each level.
enum Level : int { kUp = 0, kDown = 1, kExcited = 2 };

inline constexpr int kLocalDim = 3;

// Three-level emitter. Rates are in units of a common reference rate.
struct ThreeLevelParams {
  double gamma_up = 1.0;       // |e> -> |up>
  double gamma_down = 0.0;     // |e> -> |down>
  double gamma_nr_up = 0.0;    // non-radiative part of gamma_up
  double gamma_nr_down = 0.0;  // non-radiative part of gamma_down
  double gamma_s_minus = 0.0;  // |down> -> |up>
  double gamma_s_plus = 0.0;   // |up> -> |down>
  double gamma_star = 0.0;     // excited-state pure dephasing
  double chi_star = 0.0;       // spin pure dephasing
  double omega_up = 0.0;       // energy of |e> in the common frame
  double omega_s = 0.0;        // energy of |down> in the common frame

  double gamma() const { return gamma_up + gamma_down; }
  double Gamma() const { return gamma() + 2.0 * gamma_star; }
  void validate() const;

  static ThreeLevelParams l_type(double gamma, double gamma_star = 0.0);
  static ThreeLevelParams lambda_type(double gamma_up, double gamma_down, double gamma_star = 0.0);
};

struct LossBudget {
  double eta_c = 1.0;  // collection
  double eta_t = 1.0;  // transmission
  double eta_d = 1.0;  // detector

  double product() const { return eta_c * eta_t * eta_d; }
  void validate() const;
};

// Overall detection efficiency of one optical transition, including the radiative fraction.
double transition_efficiency(const ThreeLevelParams& p, const LossBudget& loss, Level lower);

// Two-input beam splitter with propagation phases; polarisation-resolved networks carry
// the |up> transitions to the first detector pair and the |down> transitions to the second.
struct InterferenceNetwork {
  double theta = kPi / 4;
  double phi_prop_1 = 0.0;
  double phi_prop_2 = 0.0;
  bool polarization_resolved = false;

  int detectors() const { return polarization_resolved ? 4 : 2; }
  // Row i gives the amplitudes of the two source fields at output i of one polarisation pair.
  Eigen::Matrix2d detector_map() const;
};

Matrix local_operator(int row, int col);
Matrix local_lindbladian_hamiltonian(const ThreeLevelParams& p);
std::vector<Matrix> local_jump_operators(const ThreeLevelParams& p);

// Liouvillian of independent emitters; system 0 is the leftmost tensor factor.
SuperopMatrix build_lindbladian(const std::vector<ThreeLevelParams>& systems);

// Detector fields d_i as Hilbert-space operators, then S_i rho = d_i rho d_i^dag.
std::vector<Matrix> detector_fields(const std::vector<ThreeLevelParams>& systems, const std::vector<LossBudget>& loss,
                                    const InterferenceNetwork& network);
std::vector<SuperopMatrix> build_collapse_channels(const std::vector<ThreeLevelParams>& systems,
                                                   const std::vector<LossBudget>& loss,
                                                   const InterferenceNetwork& network);

// Local unitaries.
Matrix spin_rotation(double theta, double phi);  // |down> -> cos|down> + e^{i phi} sin|up>
Matrix optical_pi();                             // |up> <-> |e>
Matrix spin_flip();                              // |up> <-> |down>
Matrix flip_and_reexcite();                      // spin flip, then optical pi

// Same local unitary on every system, as a channel superoperator.
SuperopMatrix pulse_superop(const Matrix& local, int num_systems);
DensityOperator apply_pulse(const DensityOperator& rho, const Matrix& local, int num_systems);

// Protocol start state: N uses cos(theta)|down> + e^{i phi_k} sin(theta)|e> with phi_1 = phi, phi_2 = 0;
// T uses the same at theta = pi/4; P starts from |ee>.
DensityOperator initial_state(Protocol protocol, double theta, double phi);

// exp(+i sum_k omega_s,k |down><down|_k t), removing the spin-frame phase after time t.
Matrix spin_frame_correction(const std::vector<ThreeLevelParams>& systems, double t);

}  // namespace photocount
