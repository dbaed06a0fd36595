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


#include <cmath>
#include <random>

#include "doctest.h"
#include "photocount/polyexp.hpp"
#include "photocount/systems.hpp"
#include "support.hpp"

using namespace photocount;
using testing::max_diff;

namespace {

Vector ket(int level) {
  Vector v = Vector::Zero(kLocalDim);
  v(level) = 1.0;
  return v;
}

Matrix evolve(const SuperopMatrix& L, const Matrix& rho, double t) {
  return devectorize(eig_propagator(L).evaluate(t) * vectorize(rho));
}

Matrix partial_trace_second(const Matrix& rho) {
  Matrix out = Matrix::Zero(kLocalDim, kLocalDim);
  for (int a = 0; a < kLocalDim; ++a)
    for (int b = 0; b < kLocalDim; ++b)
      for (int k = 0; k < kLocalDim; ++k) out(a, b) += rho(a * kLocalDim + k, b * kLocalDim + k);
  return out;
}

double flux(const std::vector<Matrix>& fields, const Matrix& rho) {
  double f = 0.0;
  for (const auto& d : fields) f += (d.adjoint() * d * rho).trace().real();
  return f;
}

ThreeLevelParams noisy(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ThreeLevelParams p = ThreeLevelParams::lambda_type(0.2 + u(rng), 0.2 + u(rng), 0.3 * u(rng));
  p.gamma_s_minus = 0.1 * u(rng);
  p.gamma_s_plus = 0.1 * u(rng);
  p.chi_star = 0.1 * u(rng);
  p.omega_up = u(rng) - 0.5;
  p.omega_s = u(rng) - 0.5;
  return p;
}

}  // namespace

TEST_CASE("pure decay of a single excited emitter") {
  const ThreeLevelParams p = ThreeLevelParams::l_type(1.3);
  const SuperopMatrix L = build_lindbladian({p});
  const Matrix rho0 = local_operator(kExcited, kExcited);
  for (double t : {0.0, 0.4, 1.0, 3.5}) {
    const Matrix rho = evolve(L, rho0, t);
    CHECK(std::abs(rho(kExcited, kExcited).real() - std::exp(-1.3 * t)) < 1e-13);
    CHECK(std::abs(rho(kUp, kUp).real() - (1.0 - std::exp(-1.3 * t))) < 1e-13);
  }
}

TEST_CASE("optical coherence decays at half the total linewidth") {
  ThreeLevelParams p = ThreeLevelParams::l_type(1.0, 0.35);
  p.omega_up = 0.7;
  const SuperopMatrix L = build_lindbladian({p});
  const Vector psi = (ket(kUp) + ket(kExcited)) / std::sqrt(2.0);
  const Matrix rho0 = psi * psi.adjoint();
  for (double t : {0.3, 1.0, 2.2}) {
    const Complex c = evolve(L, rho0, t)(kUp, kExcited);
    // Optical Bloch solution in the lab frame of |e>.
    const Complex expected = 0.5 * std::exp(Complex(-0.5 * p.Gamma() * t, p.omega_up * t));
    CHECK(std::abs(c - expected) < 1e-13);
  }
}

TEST_CASE("independent systems evolve as a product") {
  std::mt19937 rng(3);
  const ThreeLevelParams a = noisy(rng), b = noisy(rng);
  const Matrix r1 = testing::random_state(3, rng), r2 = testing::random_state(3, rng);
  const Matrix joint = evolve(build_lindbladian({a, b}), kron(r1, r2), 1.7);
  const Matrix s1 = evolve(build_lindbladian({a}), r1, 1.7);
  const Matrix s2 = evolve(build_lindbladian({b}), r2, 1.7);
  CHECK(max_diff(joint, kron(s1, s2)) < 1e-12);
  CHECK(max_diff(partial_trace_second(joint), s1) < 1e-12);
}

TEST_CASE("Lindbladian preserves trace") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    CHECK(trace_defect(build_lindbladian({noisy(rng), noisy(rng)})) < 1e-12);
  }
  ThreeLevelParams bad;
  bad.gamma_star = -0.1;
  CHECK_THROWS_AS(build_lindbladian({bad}), DomainError);
}

TEST_CASE("spin decoherence rate matches 1/T2") {
  ThreeLevelParams p = ThreeLevelParams::l_type(1.0);
  p.gamma_s_minus = 0.03;
  p.gamma_s_plus = 0.05;
  p.chi_star = 0.02;
  const Vector psi = (ket(kUp) + ket(kDown)) / std::sqrt(2.0);
  const Complex c = evolve(build_lindbladian({p}), psi * psi.adjoint(), 2.0)(kUp, kDown);
  const double rate = p.chi_star + 0.5 * (p.gamma_s_minus + p.gamma_s_plus);
  CHECK(std::abs(std::abs(c) - 0.5 * std::exp(-rate * 2.0)) < 1e-13);
}

TEST_CASE("unmixed network routes each source to its own detector") {
  const std::vector<ThreeLevelParams> sys{ThreeLevelParams::l_type(1.0), ThreeLevelParams::l_type(0.8)};
  InterferenceNetwork net;
  net.theta = 0.0;
  const auto d = detector_fields(sys, {LossBudget{}, LossBudget{}}, net);
  REQUIRE(d.size() == 2);
  const Matrix excited_first = kron(local_operator(kExcited, kExcited), local_operator(kDown, kDown));
  const Matrix excited_second = kron(local_operator(kDown, kDown), local_operator(kExcited, kExcited));
  CHECK(std::abs((d[0].adjoint() * d[0] * excited_first).trace().real() - 1.0) < 1e-14);
  CHECK(std::abs((d[1].adjoint() * d[1] * excited_first).trace()) < 1e-14);
  CHECK(std::abs((d[1].adjoint() * d[1] * excited_second).trace().real() - 0.8) < 1e-14);
}

TEST_CASE("balanced splitter divides single-source flux evenly") {
  const std::vector<ThreeLevelParams> sys{ThreeLevelParams::l_type(1.0), ThreeLevelParams::l_type(1.0)};
  const std::vector<LossBudget> loss{LossBudget{0.7, 0.9, 0.8}, LossBudget{0.7, 0.9, 0.8}};
  const auto S = build_collapse_channels(sys, loss, InterferenceNetwork{});
  const Vector psi = kron(ket(kExcited), ket(kDown));
  const Matrix rho = psi * psi.adjoint();
  const double a = S[0].apply(rho).trace().real(), b = S[1].apply(rho).trace().real();
  CHECK(std::abs(a - b) < 1e-15);
  CHECK(std::abs(a + b - 0.7 * 0.9 * 0.8) < 1e-14);

  // Symmetric states without optical coherence give balanced channels; coherent ones interfere.
  std::mt19937 rng(8);
  const Matrix r = testing::random_state(3, rng);
  const Matrix diag = Matrix(r.diagonal().asDiagonal());
  const Matrix sym = kron(diag, diag);
  CHECK(std::abs(S[0].apply(sym).trace() - S[1].apply(sym).trace()) < 1e-14);
  const Matrix coherent = kron(r, r);
  const Complex a_mean = r(kExcited, kUp);  // <sigma> = Tr[|up><e| r]
  const double interference = 0.7 * 0.9 * 0.8 * 2.0 * std::norm(a_mean);
  CHECK(std::abs(S[1].apply(coherent).trace().real() - S[0].apply(coherent).trace().real() - interference) < 1e-14);
}

TEST_CASE("flux is conserved for any splitter angle and state") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ThreeLevelParams> sys{noisy(rng), noisy(rng)};
    sys[0].gamma_nr_up = 0.5 * u(rng) * sys[0].gamma_up;
    const std::vector<LossBudget> loss{LossBudget{u(rng), u(rng), u(rng)}, LossBudget{u(rng), u(rng), u(rng)}};
    InterferenceNetwork net;
    net.theta = 0.5 * kPi * u(rng);
    net.phi_prop_1 = 6.0 * u(rng);
    net.polarization_resolved = trial % 2 == 0;
    const Matrix rho = testing::random_state(9, rng);
    const HilbertSpec spec{3, 2};
    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double pop = (embed_local(local_operator(kExcited, kExcited), k, spec) * rho).trace().real();
      double rate = transition_efficiency(sys[k], loss[k], kUp) * sys[k].gamma_up;
      if (net.polarization_resolved) rate += transition_efficiency(sys[k], loss[k], kDown) * sys[k].gamma_down;
      expected += rate * pop;
    }
    CHECK(std::abs(flux(detector_fields(sys, loss, net), rho) - expected) < 1e-13);
  }
}

TEST_CASE("polarization-resolved network has four channels") {
  const ThreeLevelParams p = ThreeLevelParams::lambda_type(0.5, 0.5);
  InterferenceNetwork net;
  net.polarization_resolved = true;
  const auto S = build_collapse_channels({p, p}, {LossBudget{}, LossBudget{}}, net);
  CHECK(S.size() == 4);
  CHECK(net.detectors() == 4);
  CHECK_THROWS_AS(detector_fields({p}, {LossBudget{}}, net), DimensionError);
}

TEST_CASE("pulses act as documented") {
  const Vector r = spin_rotation(kPi / 4, 0.0) * ket(kDown);
  CHECK((r - (ket(kDown) + ket(kUp)) / std::sqrt(2.0)).norm() < 1e-15);
  CHECK((optical_pi() * ket(kUp) - ket(kExcited)).norm() == 0.0);
  // Flip then re-excite: |down> -> |up> -> |e>, |up> -> |down>.
  CHECK((flip_and_reexcite() * ket(kDown) - ket(kExcited)).norm() == 0.0);
  CHECK((flip_and_reexcite() * ket(kUp) - ket(kDown)).norm() == 0.0);
  const DensityOperator dd = DensityOperator::pure(kron(ket(kDown), ket(kDown)));
  const DensityOperator ee = apply_pulse(dd, flip_and_reexcite(), 2);
  const Vector target = kron(ket(kExcited), ket(kExcited));
  CHECK(std::abs((target.adjoint() * ee.matrix() * target)(0, 0) - 1.0) < 1e-15);
  for (const Matrix& u : {spin_rotation(0.3, 1.1), optical_pi(), spin_flip(), flip_and_reexcite()}) {
    CHECK(max_diff(u.adjoint() * u, Matrix::Identity(3, 3)) < 1e-15);
  }
  std::mt19937 rng(2);
  const DensityOperator rho(testing::random_state(9, rng));
  CHECK(std::abs(apply_pulse(rho, spin_rotation(0.9, 0.2), 2).trace() - 1.0) < 1e-14);
  CHECK_THROWS_AS(apply_pulse(rho, 2.0 * optical_pi(), 2), DomainError);
}

TEST_CASE("initial states of the three protocols") {
  const Vector half = (ket(kDown) + ket(kExcited)) / std::sqrt(2.0);
  const Vector expected = kron(half, half);
  const DensityOperator n = initial_state(Protocol::N, kPi / 4, 0.0);
  CHECK(max_diff(n.matrix(), expected * expected.adjoint()) < 1e-15);
  CHECK(max_diff(initial_state(Protocol::T, 0.1, 0.0).matrix(), n.matrix()) < 1e-15);
  const Vector ee = kron(ket(kExcited), ket(kExcited));
  CHECK(max_diff(initial_state(Protocol::P, 0.3, 0.0).matrix(), ee * ee.adjoint()) == 0.0);

  // Preparation phase sits on the first emitter.
  const DensityOperator ph = initial_state(Protocol::N, kPi / 4, 0.8);
  const int de = kDown * 3 + kExcited, ed = kExcited * 3 + kDown;
  CHECK(std::abs(ph.matrix()(ed, de) - 0.25 * std::exp(Complex(0.0, 0.8))) < 1e-15);
}

TEST_CASE("protocol names round-trip") {
  for (Protocol p : {Protocol::N, Protocol::T, Protocol::P}) CHECK(protocol_from_name(protocol_name(p)) == p);
  CHECK_THROWS_AS(protocol_from_name("X"), DomainError);
}
