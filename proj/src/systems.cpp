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

#include "photocount/systems.hpp"

#include <cmath>

namespace photocount {

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::N: return "N";
    case Protocol::T: return "T";
    case Protocol::P: return "P";
  }
  return "?";
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "N" || name == "n") return Protocol::N;
  if (name == "T" || name == "t") return Protocol::T;
  if (name == "P" || name == "p") return Protocol::P;
  throw DomainError("unknown protocol '" + name + "' (expected N, T or P)");
}

void ThreeLevelParams::validate() const {
  const double rates[] = {gamma_up, gamma_down, gamma_nr_up, gamma_nr_down, gamma_s_minus,
                          gamma_s_plus, gamma_star, chi_star};
  for (double r : rates) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("rates must be finite and non-negative");
  }
  if (gamma() <= 0.0) throw DomainError("optical decay rate must be positive");
  if (gamma_nr_up > gamma_up || gamma_nr_down > gamma_down) {
    throw DomainError("non-radiative rate exceeds the total optical rate");
  }
  if (!std::isfinite(omega_up) || !std::isfinite(omega_s)) throw DomainError("level energies must be finite");
}

ThreeLevelParams ThreeLevelParams::l_type(double gamma, double gamma_star) {
  ThreeLevelParams p;
  p.gamma_up = gamma;
  p.gamma_star = gamma_star;
  return p;
}

ThreeLevelParams ThreeLevelParams::lambda_type(double gamma_up, double gamma_down, double gamma_star) {
  ThreeLevelParams p;
  p.gamma_up = gamma_up;
  p.gamma_down = gamma_down;
  p.gamma_star = gamma_star;
  return p;
}

void LossBudget::validate() const {
  for (double e : {eta_c, eta_t, eta_d}) {
    if (!(e >= 0.0 && e <= 1.0)) throw DomainError("efficiencies must lie in [0, 1]");
  }
}

double transition_efficiency(const ThreeLevelParams& p, const LossBudget& loss, Level lower) {
  const double total = lower == kUp ? p.gamma_up : p.gamma_down;
  const double nr = lower == kUp ? p.gamma_nr_up : p.gamma_nr_down;
  if (total <= 0.0) return 0.0;
  return loss.product() * (total - nr) / total;
}

Eigen::Matrix2d InterferenceNetwork::detector_map() const {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Matrix local_operator(int row, int col) {
  Matrix m = Matrix::Zero(kLocalDim, kLocalDim);
  m(row, col) = 1.0;
  return m;
}

Matrix local_lindbladian_hamiltonian(const ThreeLevelParams& p) {
  return p.omega_up * local_operator(kExcited, kExcited) + p.omega_s * local_operator(kDown, kDown);
}

std::vector<Matrix> local_jump_operators(const ThreeLevelParams& p) {
  std::vector<Matrix> jumps;
  auto add = [&](double rate, const Matrix& op) {
    if (rate > 0.0) jumps.push_back(std::sqrt(rate) * op);
  };
  add(p.gamma_up, local_operator(kUp, kExcited));
  add(p.gamma_down, local_operator(kDown, kExcited));
  add(p.gamma_s_minus, local_operator(kUp, kDown));
  add(p.gamma_s_plus, local_operator(kDown, kUp));
  add(2.0 * p.gamma_star, local_operator(kExcited, kExcited));
  add(0.5 * p.chi_star, local_operator(kUp, kUp) - local_operator(kDown, kDown));
  return jumps;
}

SuperopMatrix build_lindbladian(const std::vector<ThreeLevelParams>& systems) {
  if (systems.empty()) throw DimensionError("at least one system is required");
  const HilbertSpec spec{kLocalDim, static_cast<int>(systems.size())};
  const int d = spec.dim();
  Matrix H = Matrix::Zero(d, d);
  SuperopMatrix L{Matrix::Zero(d * d, d * d), SuperopKind::liouvillian};
  for (int k = 0; k < spec.num_systems; ++k) {
    systems[k].validate();
    H += embed_local(local_lindbladian_hamiltonian(systems[k]), k, spec);
    for (const auto& c : local_jump_operators(systems[k])) L.matrix += dissipator(embed_local(c, k, spec)).matrix;
  }
  L.matrix += hamiltonian_superop(H).matrix;
  return L;
}

std::vector<Matrix> detector_fields(const std::vector<ThreeLevelParams>& systems, const std::vector<LossBudget>& loss,
                                    const InterferenceNetwork& network) {
  if (systems.size() != 2 || loss.size() != 2) throw DimensionError("the interference network joins two systems");
  const HilbertSpec spec{kLocalDim, 2};
  const Eigen::Matrix2d R = network.detector_map();
  const double phases[2] = {network.phi_prop_1, network.phi_prop_2};
  std::vector<Matrix> fields;
  const int pairs = network.polarization_resolved ? 2 : 1;
  for (int pol = 0; pol < pairs; ++pol) {
    const Level lower = pol == 0 ? kUp : kDown;
    Matrix source[2];
    for (int k = 0; k < 2; ++k) {
      systems[k].validate();
      loss[k].validate();
      const double total = lower == kUp ? systems[k].gamma_up : systems[k].gamma_down;
      const double amp = std::sqrt(transition_efficiency(systems[k], loss[k], lower) * total);
      source[k] = amp * std::exp(Complex(0.0, phases[k])) * embed_local(local_operator(lower, kExcited), k, spec);
    }
    for (int i = 0; i < 2; ++i) fields.push_back(R(i, 0) * source[0] + R(i, 1) * source[1]);
  }
  return fields;
}

std::vector<SuperopMatrix> build_collapse_channels(const std::vector<ThreeLevelParams>& systems,
                                                   const std::vector<LossBudget>& loss,
                                                   const InterferenceNetwork& network) {
  std::vector<SuperopMatrix> out;
  for (const auto& d : detector_fields(systems, loss, network)) out.push_back(sandwich(d));
  return out;
}

Matrix spin_rotation(double theta, double phi) {
  Matrix u = Matrix::Zero(kLocalDim, kLocalDim);
  const Complex e(std::cos(phi), std::sin(phi));
  u(kDown, kDown) = std::cos(theta);
  u(kUp, kUp) = std::cos(theta);
  u(kUp, kDown) = e * std::sin(theta);
  u(kDown, kUp) = -std::conj(e) * std::sin(theta);
  u(kExcited, kExcited) = 1.0;
  return u;
}

Matrix optical_pi() {
  return local_operator(kExcited, kUp) + local_operator(kUp, kExcited) + local_operator(kDown, kDown);
}

Matrix spin_flip() {
  return local_operator(kUp, kDown) + local_operator(kDown, kUp) + local_operator(kExcited, kExcited);
}

Matrix flip_and_reexcite() { return optical_pi() * spin_flip(); }

SuperopMatrix pulse_superop(const Matrix& local, int num_systems) {
  if (local.rows() != kLocalDim || local.cols() != kLocalDim) throw DimensionError("pulse must act on one 3-level system");
  if ((local.adjoint() * local - Matrix::Identity(kLocalDim, kLocalDim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("pulse matrix is not unitary");
  }
  const HilbertSpec spec{kLocalDim, num_systems};
  Matrix U = Matrix::Identity(spec.dim(), spec.dim());
  for (int k = 0; k < num_systems; ++k) U = embed_local(local, k, spec) * U;
  SuperopMatrix s = superop_from_pair(U, U.adjoint());
  s.kind = SuperopKind::channel;
  return s;
}

DensityOperator apply_pulse(const DensityOperator& rho, const Matrix& local, int num_systems) {
  const SuperopMatrix s = pulse_superop(local, num_systems);
  return DensityOperator(s.apply(rho.matrix()), rho.normalized());
}

DensityOperator initial_state(Protocol protocol, double theta, double phi) {
  Vector ground = Vector::Zero(kLocalDim);
  ground(kDown) = 1.0;
  if (protocol == Protocol::P) {
    Vector e = Vector::Zero(kLocalDim);
    e(kExcited) = 1.0;
    return DensityOperator::pure(kron(e, e));
  }
  if (protocol == Protocol::T) theta = kPi / 4;
  const Vector s1 = optical_pi() * spin_rotation(theta, phi) * ground;
  const Vector s2 = optical_pi() * spin_rotation(theta, 0.0) * ground;
  return DensityOperator::pure(kron(s1, s2));
}

Matrix spin_frame_correction(const std::vector<ThreeLevelParams>& systems, double t) {
  const HilbertSpec spec{kLocalDim, static_cast<int>(systems.size())};
  Matrix U = Matrix::Identity(spec.dim(), spec.dim());
  for (int k = 0; k < spec.num_systems; ++k) {
    Matrix local = Matrix::Identity(kLocalDim, kLocalDim);
    local(kDown, kDown) = std::exp(Complex(0.0, systems[k].omega_s * t));
    U = embed_local(local, k, spec) * U;
  }
  return U;
}

}  // namespace photocount
