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

#include <functional>
#include <vector>

#include "photocount/oracles.hpp"
#include "photocount/protocols.hpp"

namespace photocount {

// Static Gaussian wander of the two optical frequencies around their means.
struct DiffusionSpec {
  double delta_1 = 0.0;  // standard deviation of omega_up of emitter 1
  double delta_2 = 0.0;
  double mean_1 = 0.0;   // mean offsets added to omega_up
  double mean_2 = 0.0;

  void validate() const;
};

struct PhaseErrorSpec {
  double sigma_phi = 0.0;  // standard deviation of the total propagation phase
  // Protocol T only: draw the late-window phase independently of the early one.
  bool independent_late_phase = false;

  void validate() const;
};

struct QuadratureControl {
  int nodes = 21;       // Gauss-Hermite nodes per noisy dimension
  double tol = 1e-6;    // allowed change between n and (n + 1) / 2 nodes
  int max_nodes = 161;  // escalation stops here
  int workers = 1;
};

struct AverageResult {
  double value = 0.0;
  double change = 0.0;  // |I_n - I_{(n+1)/2}| at acceptance
  int nodes = 0;
};

// Average of f over independent Gaussians; dimensions with zero width are held at their mean.
// Throws InvariantError if escalation to max_nodes does not converge.
AverageResult gaussian_average(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& means, const std::vector<double>& sigmas,
                               const QuadratureControl& control = {});

// Two-dimensional average over (omega_1, omega_2).
AverageResult diffuse_average(const std::function<double(double, double)>& metric, const DiffusionSpec& spec,
                              const QuadratureControl& control = {});
// Metric of the detuning omega_1 - omega_2 only.
AverageResult diffuse_average(const std::function<double(double)>& metric_of_detuning, const DiffusionSpec& spec,
                              const QuadratureControl& control = {});

struct PhaseAveragedN {
  double F = 0.0;
  // False when F_eta differs from one: the expression still holds but the optical-limit reading does not.
  bool unit_F_eta = true;
};

PhaseAveragedN phase_average_N(double F_eta, Complex c_tilde, double sigma_phi);
double phase_average_T(Complex c_tilde, const PhaseErrorSpec& spec);
double phase_average_P(Complex c_up, Complex c_down, Complex m_tilde, const PhaseErrorSpec& spec);

// sigma_phi^2 at which protocol N falls to the level of T (resp. P) in the optical limit.
double sigma2_crossover_T(double gamma1, double gamma2, double Gamma1, double Gamma2);
double sigma2_crossover_P(double gamma1, double gamma2);

enum class AveragingMode { closed_form, numeric };

struct AveragedMerit {
  double eta_gen = 0.0;
  double F_gen = 0.0;
  double C_gen = 0.0;
  int nodes = 0;
};

// Closed-form merits at one parameter point: oracle_N through the measurement map, oracle_T, or the
// optical limit of oracle_P. Throws DomainError outside the oracle domains.
AveragedMerit oracle_merit(const ProtocolConfig& config);

// Ensemble average of the heralded state: eta, eta*F and eta*C are averaged and then divided.
// closed_form wraps the oracles (and the measurement map for N); numeric runs the full pipeline per node.
AveragedMerit averaged_merit(const ProtocolConfig& config, const DiffusionSpec& diffusion, const PhaseErrorSpec& phase,
                             AveragingMode mode = AveragingMode::closed_form, const QuadratureControl& control = {});

}  // namespace photocount
