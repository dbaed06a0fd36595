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

#include "doctest.h"
#include "photocount/imperfections.hpp"

using namespace photocount;

namespace {

double F_T_of_detuning(double delta) {
  return 0.5 * (1.0 + std::norm(coherence_factor(1.0, 1.0, 1.2, 1.2, delta, kInfiniteWindow)));
}

// Trapezoid over +-6 sigma of the detuning distribution.
double trapezoid_detuning(const std::function<double(double)>& f, double mean, double sigma, int n = 20001) {
  const double a = mean - 6.0 * sigma, h = 12.0 * sigma / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a + i * h;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    s += w * f(x) * std::exp(-0.5 * (x - mean) * (x - mean) / (sigma * sigma));
  }
  return s * h / (sigma * std::sqrt(2.0 * kPi));
}

ProtocolConfig fig5(Protocol p) {
  ProtocolConfig c;
  c.protocol = p;
  if (p == Protocol::P) {
    c.emitters = {ThreeLevelParams::lambda_type(0.5, 0.5, 0.002), ThreeLevelParams::lambda_type(0.425, 0.425, 0.002)};
    c.delta_up = c.delta_down = 0.02;
  } else {
    c.emitters = {ThreeLevelParams::l_type(1.0, 0.002), ThreeLevelParams::l_type(0.85, 0.002)};
    c.delta = 0.02;
  }
  c.window.T_d = 80.0;
  return c;
}

double bisect(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double m = 0.5 * (a + b), gm = g(m);
    if ((gm > 0) == (ga > 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("zero width returns the metric at the mean") {
  auto f = [](double w1, double w2) { return std::sin(w1) + w2 * w2; };
  const AverageResult r = diffuse_average(f, DiffusionSpec{0.0, 0.0, 0.3, -0.2});
  CHECK(r.value == f(0.3, -0.2));
  CHECK(r.nodes == 1);
}

TEST_CASE("average of a constant is the constant") {
  const AverageResult r = diffuse_average([](double, double) { return 0.731; }, DiffusionSpec{0.4, 0.1, 0.0, 0.0});
  CHECK(std::abs(r.value - 0.731) < 1e-12);
}

TEST_CASE("Gauss-Hermite matches a dense trapezoid") {
  for (double d : {0.02, 0.1, 0.3}) {
    const DiffusionSpec spec{d, 0.5 * d, 0.03, 0.0};
    const double gh = diffuse_average(F_T_of_detuning, spec).value;
    const double trap = trapezoid_detuning(F_T_of_detuning, 0.03, std::sqrt(1.25) * d);
    CHECK(std::abs(gh - trap) < 1e-6);
  }
}

TEST_CASE("spectral diffusion lowers the time-bin fidelity monotonically") {
  double last = 1.0;
  for (double d : {0.0, 0.01, 0.03, 0.1, 0.2, 0.4}) {
    const double f = diffuse_average(F_T_of_detuning, DiffusionSpec{d, d, 0.0, 0.0}).value;
    CHECK(f < last);
    last = f;
  }
}

TEST_CASE("symmetric metrics ignore the sign of the mean detuning") {
  const double a = diffuse_average(F_T_of_detuning, DiffusionSpec{0.1, 0.1, 0.05, 0.0}).value;
  const double b = diffuse_average(F_T_of_detuning, DiffusionSpec{0.1, 0.1, 0.0, 0.05}).value;
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("non-convergent averages escalate and then fail") {
  QuadratureControl ctl;
  ctl.tol = 1e-12;
  ctl.max_nodes = 41;
  CHECK_THROWS_AS(diffuse_average([](double x) { return std::abs(x); }, DiffusionSpec{1.0, 0.0, 0.0, 0.0}, ctl),
                  InvariantError);
  ctl.tol = 1e-6;
  ctl.max_nodes = 321;
  const AverageResult smooth = diffuse_average([](double x) { return std::cos(3.0 * x); }, DiffusionSpec{1.0, 0.0}, ctl);
  CHECK(smooth.nodes > 21);
  CHECK(std::abs(smooth.value - std::exp(-4.5)) < 1e-6);
}

TEST_CASE("worker count does not change the result") {
  QuadratureControl one, many;
  many.workers = 4;
  const DiffusionSpec spec{0.2, 0.1, 0.01, 0.0};
  CHECK(diffuse_average(F_T_of_detuning, spec, one).value == diffuse_average(F_T_of_detuning, spec, many).value);
}

TEST_CASE("phase-averaged protocol N fidelity") {
  const Complex c = coherence_factor(1.0, 0.85, 1.004, 0.854, 0.02, kInfiniteWindow);
  CHECK(std::abs(phase_average_N(1.0, c, 0.0).F - 0.5 * (1.0 + c.real())) < 1e-15);
  CHECK(std::abs(phase_average_N(1.0, c, 40.0).F - 0.5) < 1e-15);
  CHECK(phase_average_N(1.0, c, 0.3).unit_F_eta);
  CHECK_FALSE(phase_average_N(0.9, c, 0.3).unit_F_eta);
  // Direct Gaussian average over the phase.
  for (double sigma : {0.1, 0.5, 1.2}) {
    const double direct =
        gaussian_average([&](const std::vector<double>& x) { return 0.5 * (1.0 + (c * std::polar(1.0, x[0])).real()); },
                         {0.0}, {sigma})
            .value;
    CHECK(std::abs(direct - phase_average_N(1.0, c, sigma).F) < 1e-9);
  }
}

TEST_CASE("pipeline phase average matches the closed form") {
  ProtocolConfig c = fig5(Protocol::N);
  const OracleN o = oracle_N(c);
  for (double sigma : {0.2, 0.7}) {
    const AveragedMerit m = averaged_merit(c, {}, PhaseErrorSpec{sigma});
    CHECK(std::abs(m.F_gen - phase_average_N(1.0, o.c_tilde, sigma).F) < 1e-9);
  }
}

TEST_CASE("crossover variances at the phase-error parameters") {
  const double g1 = 1.0, g2 = 0.85, G1 = 1.004, G2 = 0.854, d = 0.02;
  const Complex c = coherence_factor(g1, g2, G1, G2, d, kInfiniteWindow);
  const double F_T = phase_average_T(c, {});
  const double s2 = bisect([&](double v) { return phase_average_N(1.0, c, std::sqrt(v)).F - F_T; }, 0.0, 1.0);
  CHECK(std::abs(s2 - sigma2_crossover_T(g1, g2, G1, G2)) < 1e-6);

  const Complex cp = 2.0 * std::sqrt(g1 * g2) / Complex(G1 + G2, 2.0 * d);
  const double F_P = phase_average_P(cp, cp, Complex(g1 + g2) / Complex(G1 + G2), {});
  const double s2p = bisect([&](double v) { return phase_average_N(1.0, c, std::sqrt(v)).F - F_P; }, 0.0, 1.0);
  CHECK(std::abs(s2p - sigma2_crossover_P(g1, g2)) < 1e-6);
  CHECK(sigma2_crossover_P(g1, g2) < sigma2_crossover_T(g1, g2, G1, G2));
}

TEST_CASE("time-bin and polarization paths ignore a common phase error") {
  const Complex c(0.7, 0.2);
  const Complex m(0.9, 0.05);
  const double t0 = phase_average_T(c, {}), p0 = phase_average_P(c, 0.9 * c, m, {});
  for (double sigma : {0.1, 1.0, 5.0}) {
    CHECK(phase_average_T(c, PhaseErrorSpec{sigma}) == t0);
    CHECK(phase_average_P(c, 0.9 * c, m, PhaseErrorSpec{sigma}) == p0);
  }
  for (Protocol p : {Protocol::T, Protocol::P}) {
    const ProtocolConfig cfg = fig5(p);
    const AveragedMerit still = averaged_merit(cfg, {}, {});
    const AveragedMerit noisy = averaged_merit(cfg, {}, PhaseErrorSpec{0.8});
    CHECK(noisy.F_gen == still.F_gen);
    CHECK(noisy.eta_gen == still.eta_gen);
  }
  // The engine agrees: shifting the link phase leaves both protocols untouched.
  for (Protocol p : {Protocol::T, Protocol::P}) {
    ProtocolConfig cfg = fig5(p);
    cfg.window.T_d = 20.0;
    const double f0 = run_protocol(cfg).merit.F_gen;
    cfg.phi_prop = 1.3;
    CHECK(std::abs(run_protocol(cfg).merit.F_gen - f0) < 1e-12);
  }
}

TEST_CASE("independent late-window phase dephases protocol T") {
  ProtocolConfig cfg = fig5(Protocol::T);
  cfg.window.T_d = 30.0;
  const PhaseErrorSpec spec{0.4, true};
  const AveragedMerit closed = averaged_merit(cfg, {}, spec);
  const OracleT o = oracle_T(cfg);
  CHECK(std::abs(closed.F_gen - 0.5 * (1.0 + o.C_gen * std::exp(-0.16))) < 1e-9);
  QuadratureControl ctl;
  ctl.nodes = 9;
  ctl.tol = 1e-7;
  const AveragedMerit numeric = averaged_merit(cfg, {}, spec, AveragingMode::numeric, ctl);
  CHECK(std::abs(numeric.F_gen - closed.F_gen) < 1e-7);
  // The averaged state keeps the X form: concurrence follows the dephased coherence.
  CHECK(std::abs(closed.C_gen - o.C_gen * std::exp(-0.16)) < 1e-9);
  CHECK(std::abs(numeric.C_gen - closed.C_gen) < 1e-7);
}

TEST_CASE("phase noise lowers the concurrence of the averaged N state") {
  ProtocolConfig cfg = fig5(Protocol::N);
  cfg.window.T_d = 40.0;
  cfg.t_f = 40.0;
  const AveragedMerit clean = averaged_merit(cfg, {}, {});
  const AveragedMerit noisy = averaged_merit(cfg, {}, PhaseErrorSpec{0.5, false});
  CHECK(noisy.C_gen < clean.C_gen - 0.05);
  QuadratureControl ctl;
  ctl.nodes = 9;
  ctl.tol = 1e-8;
  const AveragedMerit numeric = averaged_merit(cfg, {}, PhaseErrorSpec{0.5, false}, AveragingMode::numeric, ctl);
  CHECK(std::abs(numeric.F_gen - noisy.F_gen) < 1e-8);
  CHECK(std::abs(numeric.C_gen - noisy.C_gen) < 1e-8);
}

TEST_CASE("numeric and closed-form diffusion averages agree") {
  ProtocolConfig cfg = fig5(Protocol::N);
  cfg.window.T_d = 40.0;
  cfg.t_f = 40.0;
  QuadratureControl ctl;
  ctl.nodes = 7;
  ctl.tol = 1e-5;
  ctl.workers = 4;
  const DiffusionSpec spec{0.05, 0.03, 0.0, 0.0};
  const AveragedMerit a = averaged_merit(cfg, spec, {}, AveragingMode::closed_form, ctl);
  const AveragedMerit b = averaged_merit(cfg, spec, {}, AveragingMode::numeric, ctl);
  CHECK(std::abs(a.F_gen - b.F_gen) < 1e-8);
  CHECK(std::abs(a.eta_gen - b.eta_gen) < 1e-8);
  CHECK(a.F_gen < averaged_merit(cfg, {}, {}).F_gen);
}

TEST_CASE("invalid noise widths are rejected") {
  CHECK_THROWS_AS(DiffusionSpec({-0.1, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(phase_average_N(1.0, Complex(0.5), -1.0), DomainError);
}
