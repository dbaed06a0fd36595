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


#include "photocount/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "photocount/metrics.hpp"
#include "photocount/oracles.hpp"
#include "photocount/reference.hpp"

namespace photocount {

double SuiteResult::max_error() const {
  double e = 0.0;
  for (const auto& c : checks) e = std::max(e, c.error);
  return e;
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
}

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

ProtocolConfig reference_config(Protocol p) {
  ProtocolConfig c;
  c.protocol = p;
  if (p == Protocol::P) {
    c.emitters = {ThreeLevelParams::lambda_type(0.5, 0.5, 0.1), ThreeLevelParams::lambda_type(0.5, 0.5, 0.1)};
  } else {
    c.emitters = {ThreeLevelParams::l_type(1.0, 0.1), ThreeLevelParams::l_type(1.0, 0.1)};
  }
  return c;
}

std::string fmt(const char* label, double v) { return std::string(label) + "=" + std::to_string(v); }

}  // namespace

SuiteResult verify_oracle_vs_engine(const VerifyOptions& opts) {
  SuiteResult s{"oracle-vs-engine", {}};
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 3; ++draw) {
    ProtocolConfig c = reference_config(Protocol::N);
    c.emitters[0].gamma_star = 0.3 * u(rng);
    c.emitters[1] = ThreeLevelParams::l_type(0.6 + 0.6 * u(rng), 0.3 * u(rng));
    c.delta = 0.5 * (u(rng) - 0.5);
    c.theta_prep = 0.2 + 1.2 * u(rng);
    c.phi_prop = 6.0 * u(rng);
    const ProtocolEngine engine(c);
    for (double T : {0.2, 1.0, 2.0, 5.0, 20.0}) {
      ProtocolConfig cT = c;
      cT.window.T_d = T;
      cT.t_f = T + 60.0;
      const OracleN o = oracle_N(cT);
      const ProtocolRun r = engine.run(T, T + 60.0);
      auto at = [&](std::vector<int> n) { return r.ensemble.states.at(CountVector(n)).matrix(); };
      double e = std::max({max_diff(at({0, 0}), o.rho0.matrix()), max_diff(at({0, 1}), o.rho_plus.matrix()),
                           max_diff(at({1, 0}), o.rho_minus.matrix()), max_diff(at({2, 0}), o.rho20->matrix()),
                           max_diff(at({1, 1}), o.rho11->matrix()), max_diff(at({0, 2}), o.rho02->matrix())});
      s.checks.push_back({"N states draw " + std::to_string(draw) + " " + fmt("T_d", T), e, 1e-8});
    }
  }
  for (double T : {1.0, 5.0, 20.0}) {
    ProtocolConfig c = reference_config(Protocol::T);
    c.emitters[1] = ThreeLevelParams::l_type(0.85, 0.05);
    c.delta = 0.07;
    c.window.T_d = T;
    const OracleT o = oracle_T(c);
    const MeritReport m = run_protocol(c).merit;
    const double e = std::max({std::abs(m.F_gen - o.F_gen), std::abs(m.eta_gen - o.eta_gen),
                               std::abs(m.C_gen - o.C_gen)});
    s.checks.push_back({"T merits " + fmt("T_d", T), e, 1e-8});
  }
  for (double skew : {0.5, 0.8}) {
    ProtocolConfig c = reference_config(Protocol::P);
    c.emitters = {ThreeLevelParams::lambda_type(skew, 1.0 - skew, 0.1), ThreeLevelParams::lambda_type(0.5, 0.5, 0.1)};
    c.window.T_d = 30.0;
    const OracleP o = oracle_P(c);
    const MeritReport m = run_protocol(c).merit;
    const double e = std::max({std::abs(m.F_gen - o.limit.F_op), std::abs(m.eta_gen - o.limit.eta_op),
                               std::abs(m.C_gen - o.limit.C_op)});
    s.checks.push_back({"P limits " + fmt("branch", skew), e, 1e-6});
  }
  return s;
}

SuiteResult verify_quadrature_vs_symbolic(const VerifyOptions& opts) {
  SuiteResult s{"quadrature-vs-symbolic", {}};
  for (int i = 0; i < opts.random_liouvillians; ++i) {
    const int d = 2 + i % 2;
    const auto r = reference::random_lindbladian(d, 3, 2, opts.seed + static_cast<unsigned>(i));
    const auto props = conditional_propagators(r.L, r.collapses, 2);
    Matrix L0 = r.L.matrix;
    std::vector<Matrix> S;
    for (const auto& c : r.collapses) {
      L0 -= c.matrix;
      S.push_back(c.matrix);
    }
    const double t = 1.1;
    double e = 0.0;
    for (const auto& n : enumerate_counts(2, 2)) {
      e = std::max(e, max_diff(props.at(n).evaluate(t), reference::nested_quadrature(L0, S, n, t)));
    }
    s.checks.push_back({"random Liouvillian " + std::to_string(i) + " d=" + std::to_string(d), e, 1e-7});
  }
  EmitterSpec a, b;
  a.params = ThreeLevelParams::l_type(1.0, 0.1);
  b.params = ThreeLevelParams::l_type(0.85, 0.05);
  b.params.omega_up = -0.1;
  s.checks.push_back({"brightness T_d=5",
                      std::abs(brightness(a, 0.0, 5.0) - brightness_closed_form(1.0, 1.0, 5.0)), 1e-12});
  s.checks.push_back({"M12 integral vs closed form",
                      std::abs(mean_wavepacket_overlap(a, b, 0.0, 60.0) -
                               wavepacket_overlap_closed_form(1.0, 0.85, 1.2, 0.95, 0.1)),
                      1e-6});
  s.checks.push_back({"g2 single excitation", std::abs(g2_integrated(a, 0.0, 20.0)), 1e-10});
  return s;
}

SuiteResult verify_bound_chain(const VerifyOptions& opts) {
  SuiteResult s{"bound-chain", {}};
  std::mt19937 rng(opts.seed + 17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst[7] = {0, 0, 0, 0, 0, 0, 0};
  for (int i = 0; i < opts.bound_draws; ++i) {
    const double g1 = 1.0, g2 = 0.5 + 0.5 * u(rng);
    const double G1 = g1 + 2.0 * 0.3 * u(rng), G2 = g2 + 2.0 * 0.3 * u(rng);
    const double delta = 0.5 * u(rng);
    Complex c = coherence_factor(g1, g2, G1, G2, delta, kInfiniteWindow);
    if (opts.flip_c_tilde_sign) c = -c;
    const double m12 = wavepacket_overlap_closed_form(g1, g2, G1, G2, delta);
    const OpticalLimitReport n = optical_limit_N(0.0, 0.0, c);
    const OpticalLimitReport t = optical_limit_T(1.0, 1.0, c);
    const OpticalLimitReport p = optical_limit_P(c, c, Complex(g1 + g2) / Complex(G1 + G2));
    const double violations[7] = {t.F_op - p.F_op,        p.F_op - n.F_op,
                                  t.C_op - p.C_op,        p.C_op - n.C_op,
                                  m12 - t.F_op,           t.F_op - 0.5 * (1.0 + m12),
                                  n.F_op - 0.5 * (1.0 + std::sqrt(m12))};
    for (int k = 0; k < 7; ++k) worst[k] = std::max(worst[k], violations[k]);
  }
  const char* names[7] = {"F_T <= F_P", "F_P <= F_N", "C_T <= C_P", "C_P <= C_N",
                          "M12 <= F_T", "F_T <= (1+M12)/2", "F_N <= (1+sqrt M12)/2"};
  for (int k = 0; k < 7; ++k) s.checks.push_back({names[k], std::max(worst[k], 0.0), 1e-10});
  return s;
}

std::vector<SuiteResult> run_verification(const VerifyOptions& opts) {
  return {verify_oracle_vs_engine(opts), verify_quadrature_vs_symbolic(opts), verify_bound_chain(opts)};
}

}  // namespace photocount
