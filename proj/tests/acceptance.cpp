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


// Acceptance run: one PASS/FAIL line per criterion at the stated tolerances. Exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "photocount/cli.hpp"
#include "photocount/imperfections.hpp"
#include "photocount/metrics.hpp"
#include "photocount/oracles.hpp"
#include "photocount/protocols.hpp"
#include "photocount/verify.hpp"

using namespace photocount;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  if (!pass) ++failures;
}

void note(const std::string& text) { std::printf("       info  %s\n", text.c_str()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

ProtocolConfig figure(Protocol p) {
  return cli::preset(p == Protocol::N ? "fig2" : p == Protocol::T ? "fig3" : "fig4").protocol;
}

ProtocolConfig without_spin_noise(ProtocolConfig c) {
  for (auto& e : c.emitters) e.gamma_s_minus = e.gamma_s_plus = e.chi_star = 0.0;
  return c;
}

// Wrap the check so a thrown error counts as a failure rather than aborting the run.
void guarded(int id, const char* title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("error: ") + e.what());
  }
}

double max_error_of(const SuiteResult& s, const std::string& prefix, int* count = nullptr) {
  double m = 0.0;
  int n = 0;
  for (const auto& c : s.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    m = std::max(m, c.error);
    ++n;
  }
  if (count) *count = n;
  return n > 0 ? m : INFINITY;
}

void criterion1() {
  guarded(1, "completeness and positivity", [] {
    double worst_trace = 0.0, worst_matrix = 0.0, min_eig = INFINITY;
    int runs = 0;
    for (Protocol p : {Protocol::N, Protocol::T, Protocol::P}) {
      const ProtocolConfig c = figure(p);
      const ProtocolEngine engine(c);
      for (int i = 0; i < 20; ++i) {
        const double t_f = 0.5 + 2.0 * i;  // whole-protocol duration
        const ProtocolRun r = engine.run(t_f / c.windows(), t_f);
        worst_trace = std::max(worst_trace, std::abs(r.ensemble.total_trace() + r.ensemble.truncation_residual - 1.0));
        worst_matrix = std::max(worst_matrix, r.completeness_defect);
        min_eig = std::min(min_eig, r.min_eigenvalue);
        ++runs;
      }
    }
    const bool pass = worst_trace <= 1e-9 && worst_matrix <= 1e-9 && min_eig >= -1e-9;
    report(1, "completeness and positivity", pass,
           fmt("max |sum Tr + residual - 1| = %.2e, min eigenvalue = %.2e", worst_trace, min_eig) + " over " +
               std::to_string(runs) + " runs");
  });
}

void criterion2(const SuiteResult& oracle_suite) {
  int n = 0;
  const double err = max_error_of(oracle_suite, "N states", &n);
  report(2, "protocol N closed-form states", n == 15 && err <= 1e-8,
         fmt("max entrywise error %.2e on %g grid points", err, n) + " (tol 1e-8)");
}

void criterion3() {
  guarded(3, "optical-limit values", [] {
    const ProtocolComparison cmp = compare_optical_limits(1.0, 1.0, 0.1, 0.1, 0.0);
    ProtocolConfig n = without_spin_noise(figure(Protocol::N));
    n.window.T_d = 60.0;
    ProtocolConfig t = without_spin_noise(figure(Protocol::T));
    t.window.T_d = 60.0;
    const double eta_N = oracle_N(n).limit.eta_op, eta_T = oracle_T(t).limit.eta_op;
    const double closed_err = std::max({std::abs(cmp.F_N - 0.916667), std::abs(cmp.C_N - 0.833333),
                                        std::abs(eta_N - 0.5), std::abs(cmp.F_T - 0.847222), std::abs(eta_T - 0.5),
                                        std::abs(cmp.F_P - 0.916667)});

    // Numeric engine at T_d = 10 with the figure spin rates.
    struct Target {
      Protocol p;
      double F, eta;
    };
    double engine_err = 0.0, clean_err = 0.0;
    std::string values;
    for (const Target& tg : {Target{Protocol::N, cmp.F_N, 0.5}, Target{Protocol::T, cmp.F_T, 0.5},
                             Target{Protocol::P, cmp.F_P, 0.5}}) {
      ProtocolConfig c = figure(tg.p);
      c.window.T_d = 10.0;
      const MeritReport m = run_protocol(c).merit;
      engine_err = std::max({engine_err, std::abs(m.F_gen - tg.F), std::abs(m.eta_gen - tg.eta)});
      values += std::string(" F_") + protocol_name(tg.p) + "=" + fmt("%.4f", m.F_gen);
      const MeritReport clean = run_protocol(without_spin_noise(c)).merit;
      clean_err = std::max({clean_err, std::abs(clean.F_gen - tg.F), std::abs(clean.eta_gen - tg.eta)});
    }
    report(3, "optical-limit values", closed_err <= 1e-6 && engine_err <= 2e-3,
           fmt("closed forms off by %.1e (tol 1e-6); engine at T_d=10 off by %.2e (tol 2e-3):", closed_err,
               engine_err) +
               values);
    note(fmt("same engine runs with spin rates set to zero: max deviation %.2e (tol 2e-3)", clean_err));
  });
}

void criterion4(const SuiteResult& bounds) {
  report(4, "bound chains", bounds.pass() && bounds.max_error() <= 1e-10,
         fmt("largest violation %.2e over %g randomized draws", bounds.max_error(), VerifyOptions{}.bound_draws) +
             " (slack 1e-10)");
}

void criterion5() {
  guarded(5, "M12 three routes", [] {
    double worst = 0.0;
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int draw = 0; draw < 4; ++draw) {
      ProtocolConfig c;
      c.protocol = Protocol::N;
      const double g2 = 0.6 + 0.5 * u(rng), s1 = 0.2 * u(rng), s2 = 0.2 * u(rng), d = 0.3 * u(rng);
      c.emitters = {ThreeLevelParams::l_type(1.0, s1), ThreeLevelParams::l_type(g2, s2)};
      c.delta = d;
      c.window.T_d = 60.0;
      const ProtocolRun r = run_protocol(c);
      auto tr = [&](std::vector<int> n) { return r.ensemble.states.at(CountVector(n)).trace(); };
      const double p2 = tr({2, 0}) + tr({0, 2}), p11 = tr({1, 1});
      const double inversion = (p2 - p11) / (p2 + p11);
      const double closed = wavepacket_overlap_closed_form(1.0, g2, 1.0 + 2 * s1, g2 + 2 * s2, d);
      EmitterSpec a, b;
      a.params = c.systems()[0];
      b.params = c.systems()[1];
      const double integral = mean_wavepacket_overlap(a, b, 0.0, 60.0);
      worst = std::max({worst, std::abs(inversion - closed), std::abs(integral - closed),
                        std::abs(integral - inversion)});
    }
    ProtocolConfig hom;
    hom.emitters = {ThreeLevelParams::l_type(1.0), ThreeLevelParams::l_type(1.0)};
    hom.window.T_d = 60.0;
    const double m12 = wavepacket_overlap_closed_form(1.0, 1.0, 1.0, 1.0, 0.0);
    const double p11 = run_protocol(hom).ensemble.states.at(CountVector({1, 1})).trace();
    report(5, "M12 three routes", worst <= 1e-6 && std::abs(m12 - 1.0) < 1e-12 && p11 < 1e-12,
           fmt("max pairwise difference %.2e (tol 1e-6); HOM point p11 = %.1e", worst, p11));
  });
}

void criterion6() {
  guarded(6, "detector noise", [] {
    double worst = 0.0;
    for (DetectorKind kind : {DetectorKind::pnrd, DetectorKind::bd}) {
      for (double lt : {0.0, 1e-5, 1e-3}) {
        ProtocolConfig c = without_spin_noise(figure(Protocol::N));
        c.window.T_d = 60.0;
        c.theta_prep = 0.4;
        for (auto& l : c.loss) l.eta_t = 0.6;
        c.detector = kind;
        c.dark_rate = lt / c.window.T_d;
        const OracleN o = oracle_N(c);
        const double m12 = wavepacket_overlap_closed_form(1.0, 1.0, 1.2, 1.2, 0.0);
        const NoisyMerit f =
            noisy_N_closed_form(0.6, 0.4, o.c_tilde.real(), m12, dark_count_prob(0, c.window.T_d, c.dark_rate),
                                dark_count_prob(1, c.window.T_d, c.dark_rate), kind);
        const MeritReport r = run_protocol(c).merit;
        worst = std::max(worst, std::abs(r.F_gen - f.F_gen));
      }
    }
    double theta_err = 0.0;
    for (DetectorKind kind : {DetectorKind::pnrd, DetectorKind::bd}) {
      for (double eta : {0.05, 0.3, 0.9}) {
        const ThetaOptimum t = optimal_theta_N(eta, 1e-6, kind, 1.0);
        theta_err = std::max(theta_err, std::abs(t.numeric - t.estimate) / t.estimate);
      }
    }
    report(6, "detector noise", worst <= 1e-9 && theta_err <= 0.1,
           fmt("fidelity closed form vs pipeline %.2e (tol 1e-9); optimal angle within %.1f%%", worst,
               100.0 * theta_err));
  });
}

void criterion7() {
  guarded(7, "phase errors", [] {
    const cli::RunConfig base = cli::preset("fig5");
    ProtocolConfig n = base.protocol;
    n.window.T_d = 80.0;
    const OracleN o = oracle_N(n);
    QuadratureControl tight;
    tight.nodes = 21;
    tight.tol = 1e-12;
    double f_err = 0.0;
    for (double sigma : {0.1, 0.5, 1.0, 2.0}) {
      const AveragedMerit m = averaged_merit(n, {}, PhaseErrorSpec{sigma, false}, AveragingMode::numeric, tight);
      f_err = std::max(f_err, std::abs(m.F_gen - 0.5 * (1.0 + o.c_tilde.real() * std::exp(-0.5 * sigma * sigma))));
    }

    // Crossover of the phase-averaged N fidelity with the time-bin fidelity.
    ProtocolConfig t = n;
    t.protocol = Protocol::T;
    const double F_T = oracle_T(t).F_gen;
    auto gap = [&](double s2) { return phase_average_N(1.0, o.c_tilde, std::sqrt(s2)).F - F_T; };
    double lo = 0.0, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    const auto& e = n.emitters;
    const double expected = std::log(std::pow(e[0].Gamma() + e[1].Gamma(), 2) / (4.0 * e[0].gamma() * e[1].gamma()));
    const double cross_err = std::abs(0.5 * (lo + hi) - expected);

    // T and P never integrate over the phase, and their engines ignore a common phase.
    bool invariant = true;
    for (Protocol p : {Protocol::T, Protocol::P}) {
      const ProtocolConfig c = cli::preset("fig5", p).protocol;
      const AveragedMerit ref = averaged_merit(c, {}, {});
      for (double sigma : {0.3, 1.0, 3.0}) {
        const AveragedMerit m = averaged_merit(c, {}, PhaseErrorSpec{sigma, false});
        invariant = invariant && m.F_gen == ref.F_gen && m.C_gen == ref.C_gen && m.eta_gen == ref.eta_gen;
      }
      ProtocolConfig shifted = c;
      shifted.phi_prop = 1.234;
      const MeritReport a = run_protocol(c).merit, b = run_protocol(shifted).merit;
      invariant = invariant && std::abs(a.F_gen - b.F_gen) < 1e-12;
    }
    report(7, "phase errors", f_err <= 1e-9 && cross_err <= 1e-6 && invariant,
           fmt("F_N(sigma) error %.2e (tol 1e-9); crossover off by %.2e (tol 1e-6)", f_err, cross_err) +
               (invariant ? "; T and P sigma-invariant" : "; T or P varies with sigma"));
  });
}

void criterion8() {
  guarded(8, "time-dynamics shapes", [] {
    std::vector<double> grid;
    for (double T = 0.25; T <= 60.0; T *= 1.15) grid.push_back(T);

    // N: rises to one interior maximum, then decays monotonically.
    const ProtocolEngine n(figure(Protocol::N));
    std::vector<double> F;
    for (double T : grid) F.push_back(n.run(T).merit.F_gen);
    const auto peak = std::max_element(F.begin(), F.end()) - F.begin();
    bool n_ok = peak > 0 && peak + 1 < static_cast<long>(F.size());
    for (std::size_t i = 1; i < F.size(); ++i) {
      if (static_cast<long>(i) <= peak) n_ok = n_ok && F[i] > F[i - 1];
      else n_ok = n_ok && F[i] < F[i - 1];
    }

    // T: above its optical limit early, thermal 1/4 late.
    const ProtocolConfig tc = figure(Protocol::T);
    const ProtocolEngine t(tc);
    ProtocolConfig tl = without_spin_noise(tc);
    tl.window.T_d = 60.0;
    const double limit_T = oracle_T(tl).limit.F_op;
    const double early = t.run(0.3).merit.F_gen, late = t.run(5000.0).merit.F_gen;
    bool t_ok = early > limit_T && std::abs(late - 0.25) < 1e-3;
    double prev = INFINITY;
    for (double T : {20.0, 50.0, 100.0, 300.0, 1000.0, 3000.0}) {
      const double f = t.run(T).merit.F_gen;
      t_ok = t_ok && f < prev;
      prev = f;
    }

    // P: efficiency never decreases with the window.
    const ProtocolEngine p(figure(Protocol::P));
    bool p_ok = true;
    double last = -1.0;
    for (double T : grid) {
      const double e = p.run(T).merit.eta_gen;
      p_ok = p_ok && e >= last - 1e-15;
      last = e;
    }
    report(8, "time-dynamics shapes", n_ok && t_ok && p_ok,
           std::string("N single peak ") + (n_ok ? "yes" : "no") + fmt(" at T_d=%.2f;", grid[peak]) +
               fmt(" T early %.4f vs limit %.4f,", early, limit_T) + fmt(" %.5f at T_d=5000;", late) +
               " P eta monotone " + (p_ok ? "yes" : "no"));
  });
}

// Least-squares slope of log10(eta) against L.
double fitted_slope(const std::vector<DistanceRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double y = std::log10(r.merit.eta_gen);
    sx += r.L_km;
    sy += y;
    sxx += r.L_km * r.L_km;
    sxy += r.L_km * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void criterion9() {
  guarded(9, "distance scaling", [] {
    std::vector<double> L;
    for (double x = 50.0; x <= 150.0 + 1e-9; x += 10.0) L.push_back(x);
    double worst = 0.0;
    std::string detail;
    for (Protocol p : {Protocol::N, Protocol::T, Protocol::P}) {
      cli::RunConfig rc = cli::preset("fig6", p);
      rc.protocol.dark_rate = 0.0;  // pure loss scaling
      const double slope = fitted_slope(distance_sweep(rc.protocol, L, rc.distance));
      const double expected = (p == Protocol::N ? -0.5 : -1.0) / rc.distance.L_att_km;
      const double rel = std::abs(slope / expected - 1.0);
      worst = std::max(worst, rel);
      detail += std::string(" ") + protocol_name(p) + fmt(" %.3f%%", 100.0 * rel);
    }
    report(9, "distance scaling", worst <= 0.02, "slope deviation over 50-150 km:" + detail + " (tol 2%)");
  });
}

void criterion10(const SuiteResult& quad) {
  int n = 0;
  const double err = max_error_of(quad, "random Liouvillian", &n);
  report(10, "engine vs nested quadrature", n == 10 && err <= 1e-7,
         fmt("max error %.2e on %g random Liouvillians (tol 1e-7)", err, n));
}

}  // namespace

int main() {
  const VerifyOptions opts;
  criterion1();
  criterion2(verify_oracle_vs_engine(opts));
  criterion3();
  criterion4(verify_bound_chain(opts));
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10(verify_quadrature_vs_symbolic(opts));
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
