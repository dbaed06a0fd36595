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

#include "photocount/oracles.hpp"

#include <cmath>

#include <boost/math/special_functions/lambert_w.hpp>

namespace photocount {

double overlap_gamma(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw DomainError("decay rates must be positive");
  return 4.0 * gamma1 * gamma2 / ((gamma1 + gamma2) * (gamma1 + gamma2));
}

double wavepacket_overlap_closed_form(double gamma1, double gamma2, double Gamma1, double Gamma2, double delta) {
  const double G = Gamma1 + Gamma2;
  return overlap_gamma(gamma1, gamma2) * G * (gamma1 + gamma2) / (G * G + 4.0 * delta * delta);
}

Complex coherence_factor(double gamma1, double gamma2, double Gamma1, double Gamma2, double delta, double T_d,
                         double phase) {
  if (!(T_d > 0.0)) throw DomainError("window length must be positive");
  const Complex z(Gamma1 + Gamma2, 2.0 * delta);
  Complex c = 2.0 * std::sqrt(gamma1 * gamma2) / z;
  if (std::isfinite(T_d)) c *= 1.0 - std::exp(-0.5 * T_d * z);
  return c * std::exp(Complex(0.0, phase));
}

double brightness_closed_form(double eta, double gamma, double T_d) {
  if (!std::isfinite(T_d)) return eta;
  return eta * (1.0 - std::exp(-T_d * gamma));
}

OpticalLimitReport optical_limit_N(double eta, double theta_prep, Complex c_tilde) {
  const double s2 = std::sin(theta_prep) * std::sin(theta_prep);
  const double c2 = std::cos(theta_prep) * std::cos(theta_prep);
  const double F_eta = c2 / (1.0 - eta * s2);
  const double sin2 = std::sin(2.0 * theta_prep);
  OpticalLimitReport r;
  r.F_op = 0.5 * (1.0 + c_tilde.real()) * F_eta;
  r.eta_op = 0.5 * eta * sin2 * sin2 / F_eta;
  r.C_op = std::abs(c_tilde) * F_eta;
  return r;
}

OpticalLimitReport optical_limit_T(double eta1, double eta2, Complex c_tilde) {
  const double c2 = std::norm(c_tilde);
  return {0.5 * (1.0 + c2), 0.5 * eta1 * eta2, c2};
}

OpticalLimitReport optical_limit_P(Complex c_up, Complex c_down, Complex m_tilde, double weight_a, double weight_b) {
  const Complex k = std::conj(c_up) * c_down / m_tilde;
  const double balance = 2.0 * std::sqrt(weight_a * weight_b) / (weight_a + weight_b);
  return {0.5 * (1.0 + balance * k.real()), weight_a + weight_b, balance * std::abs(k)};
}

namespace {

bool no_spin_dynamics(const ThreeLevelParams& p) {
  return p.gamma_s_minus == 0.0 && p.gamma_s_plus == 0.0 && p.chi_star == 0.0;
}

int idx(int a, int b) { return a * kLocalDim + b; }

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("oracle outside its domain: ") + what);
}

}  // namespace

OracleN oracle_N(const ProtocolConfig& config) {
  config.validate();
  require(config.protocol == Protocol::N, "protocol N expected");
  const auto sys = config.systems();
  for (const auto& s : sys) {
    require(no_spin_dynamics(s), "spin relaxation and dephasing must vanish");
    require(s.gamma_down == 0.0 && s.omega_s == 0.0, "L-type emitters expected");
  }
  require(std::abs(config.window.emitter_start()) < 1e-12, "window must open at t = 0");
  const double T = config.window.T_d;
  require(std::exp(-std::min(sys[0].gamma(), sys[1].gamma()) * config.final_time()) < 1e-13,
          "emitters must have decayed before t_f");

  OracleN o;
  const double eta1 = transition_efficiency(sys[0], config.loss[0], kUp);
  const double eta2 = transition_efficiency(sys[1], config.loss[1], kUp);
  const double b1 = brightness_closed_form(eta1, sys[0].gamma(), T);
  const double b2 = brightness_closed_form(eta2, sys[1].gamma(), T);
  const double delta = sys[0].omega_up - sys[1].omega_up;
  o.beta1 = b1;
  o.beta2 = b2;
  o.c_tilde = coherence_factor(sys[0].gamma(), sys[1].gamma(), sys[0].Gamma(), sys[1].Gamma(), delta, T,
                               config.phi_init + config.phi_prop);

  const double th = config.theta_prep;
  const double S = std::pow(std::sin(2.0 * th), 2);
  const double s4 = std::pow(std::sin(th), 4), c4 = std::pow(std::cos(th), 4);
  const double c2 = std::cos(2.0 * config.bs_theta), s2 = std::sin(2.0 * config.bs_theta);
  const int ud = idx(kUp, kDown), du = idx(kDown, kUp), uu = idx(kUp, kUp), dd = idx(kDown, kDown);

  Matrix r0 = Matrix::Zero(9, 9);
  r0(ud, ud) = 0.25 * S * (1.0 - b1);
  r0(du, du) = 0.25 * S * (1.0 - b2);
  r0(uu, uu) = (1.0 - b1) * (1.0 - b2) * s4;
  r0(dd, dd) = c4;
  o.rho0 = DensityOperator(r0, false);

  auto heralded = [&](double sign) {
    Matrix r = Matrix::Zero(9, 9);
    r(ud, ud) = b1 / 8.0 * (1.0 - sign * c2) * S;
    r(du, du) = b2 / 8.0 * (1.0 + sign * c2) * S;
    r(uu, uu) = 0.5 * (b1 + b2 - 2.0 * b1 * b2 - sign * (b1 - b2) * c2) * s4;
    r(ud, du) = sign * o.c_tilde / 8.0 * std::sqrt(eta1 * eta2) * s2 * S;
    r(du, ud) = std::conj(r(ud, du));
    return DensityOperator(r, false);
  };
  o.rho_plus = heralded(+1.0);
  o.rho_minus = heralded(-1.0);

  Matrix r2 = Matrix::Zero(9, 9);
  r2(uu, uu) = b1 * b2 * s4;
  o.rho_two = DensityOperator(r2, false);

  if (std::abs(config.bs_theta - kPi / 4) < 1e-12) {
    // Finite-window two-photon interference term.
    const double a = sys[0].gamma() + sys[1].gamma();
    const Complex b(0.5 * (sys[0].Gamma() + sys[1].Gamma()), delta);
    const Complex diff = b - a;
    const Complex inner = std::abs(diff) * T < 1e-8 ? Complex(T) : (std::exp(diff * T) - 1.0) / diff;
    const Complex I = ((1.0 - std::exp(-a * T)) / a - std::exp(-b * T) * inner) / b;
    const double J = 2.0 * eta1 * eta2 * sys[0].gamma() * sys[1].gamma() * I.real();
    Matrix m = Matrix::Zero(9, 9);
    m(uu, uu) = 0.25 * (b1 * b2 + J) * s4;
    o.rho20 = DensityOperator(m, false);
    o.rho02 = DensityOperator(m, false);
    m(uu, uu) = 0.5 * (b1 * b2 - J) * s4;
    o.rho11 = DensityOperator(m, false);
    if (std::abs(eta1 - eta2) < 1e-12) {
      const Complex c_inf = coherence_factor(sys[0].gamma(), sys[1].gamma(), sys[0].Gamma(), sys[1].Gamma(), delta,
                                             kInfiniteWindow, config.phi_init + config.phi_prop);
      o.limit = optical_limit_N(eta1, th, c_inf);
    }
  }
  return o;
}

OracleT oracle_T(const ProtocolConfig& config) {
  config.validate();
  require(config.protocol == Protocol::T, "protocol T expected");
  const auto sys = config.systems();
  for (const auto& s : sys) {
    require(no_spin_dynamics(s), "spin relaxation and dephasing must vanish");
    require(s.gamma_down == 0.0 && s.omega_s == 0.0, "L-type emitters expected");
  }
  require(std::abs(config.bs_theta - kPi / 4) < 1e-12, "balanced beam splitter expected");
  require(config.dark_rate == 0.0, "dark counts must vanish");
  require(std::abs(config.window.emitter_start()) < 1e-12, "window must open at t = 0");

  OracleT o;
  const double T = config.window.T_d;
  const double eta1 = transition_efficiency(sys[0], config.loss[0], kUp);
  const double eta2 = transition_efficiency(sys[1], config.loss[1], kUp);
  const double b1 = brightness_closed_form(eta1, sys[0].gamma(), T);
  const double b2 = brightness_closed_form(eta2, sys[1].gamma(), T);
  const double delta = sys[0].omega_up - sys[1].omega_up;
  o.c_tilde = coherence_factor(sys[0].gamma(), sys[1].gamma(), sys[0].Gamma(), sys[1].Gamma(), delta, T,
                               config.phi_init + config.phi_prop);
  o.eta_gen = 0.5 * b1 * b2;
  const double x = eta1 * eta2 * std::norm(o.c_tilde) / (2.0 * o.eta_gen);
  // The preparation phase and the late-window phase leave a local phase on the heralded state.
  o.F_gen = 0.5 * (1.0 + x * std::cos(config.phi_prop_late - config.phi_init));
  o.C_gen = x;
  const Complex c_inf = coherence_factor(sys[0].gamma(), sys[1].gamma(), sys[0].Gamma(), sys[1].Gamma(), delta,
                                         kInfiniteWindow);
  o.limit = optical_limit_T(eta1, eta2, c_inf);
  return o;
}

OracleP oracle_P(const ProtocolConfig& config) {
  config.validate();
  require(config.protocol == Protocol::P, "protocol P expected");
  const auto sys = config.systems();
  for (const auto& s : sys) require(no_spin_dynamics(s), "spin relaxation and dephasing must vanish");
  require(std::abs(config.bs_theta - kPi / 4) < 1e-12, "balanced beam splitter expected");
  require(config.dark_rate == 0.0, "dark counts must vanish");

  const double g1 = sys[0].gamma(), g2 = sys[1].gamma();
  const double G = sys[0].Gamma() + sys[1].Gamma();
  const double d_up = sys[0].omega_up - sys[1].omega_up;
  const double d_down = (sys[0].omega_up - sys[0].omega_s) - (sys[1].omega_up - sys[1].omega_s);
  OracleP o;
  o.c_up = 2.0 * std::sqrt(g1 * g2) / Complex(G, 2.0 * d_up);
  o.c_down = 2.0 * std::sqrt(g1 * g2) / Complex(G, 2.0 * d_down);
  o.m_tilde = Complex(g1 + g2, -(d_up - d_down)) / Complex(G, -(d_up - d_down));
  // Probabilities of the two which-emitter branches of an accepted coincidence.
  auto detected = [&](int k, Level lower) {
    const double rate = lower == kUp ? sys[k].gamma_up : sys[k].gamma_down;
    return transition_efficiency(sys[k], config.loss[k], lower) * rate / sys[k].gamma();
  };
  const double wa = detected(0, kUp) * detected(1, kDown);
  const double wb = detected(0, kDown) * detected(1, kUp);
  o.limit = optical_limit_P(o.c_up, o.c_down, o.m_tilde, wa, wb);
  return o;
}

NoisyMerit noisy_N_closed_form(double eta, double theta_prep, double re_c_tilde, double m12, double xi0, double xi1,
                               DetectorKind kind) {
  const OpticalLimitReport op = optical_limit_N(eta, theta_prep, re_c_tilde);
  const double s2 = std::pow(std::sin(theta_prep), 2);
  const double S = std::pow(std::sin(2.0 * theta_prep), 2);
  const double vacuum = std::pow(1.0 - eta * s2, 2);
  NoisyMerit r;
  double numerator;
  if (kind == DetectorKind::pnrd) {
    r.eta_gen = xi0 * xi0 * op.eta_op + 2.0 * xi0 * xi1 * vacuum;
    numerator = xi0 * xi0 * op.F_op * op.eta_op + 0.5 * xi0 * xi1 * (1.0 - eta) * S;
  } else {
    const double bunched = 0.5 * (1.0 + m12) * eta * eta * s2 * s2;
    r.eta_gen = xi0 * (op.eta_op + bunched) + 2.0 * xi0 * (1.0 - xi0) * vacuum;
    numerator = xi0 * op.F_op * op.eta_op + 0.5 * xi0 * (1.0 - xi0) * (1.0 - eta) * S;
  }
  r.F_gen = numerator / r.eta_gen;
  return r;
}

double xi0_from_xi1(double xi1) {
  if (!(xi1 >= 0.0) || xi1 > std::exp(-1.0)) throw DomainError("single dark-count probability must lie in [0, 1/e]");
  const double mu = -boost::math::lambert_w0(-xi1);
  return std::exp(-mu);
}

ThetaOptimum optimal_theta_N(double eta, double xi1, DetectorKind kind, double m12, std::optional<double> re_c_tilde) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("efficiency must lie in (0, 1]");
  if (!(xi1 > 0.0)) throw DomainError("dark-count probability must be positive");
  const double re_c = re_c_tilde.value_or(m12);
  const double xi0 = xi0_from_xi1(xi1);
  ThetaOptimum r;
  // Small-angle estimate, capped at the balanced preparation (PNRD at eta = 1 gives infinity).
  r.estimate = std::min(kPi / 4, kind == DetectorKind::pnrd ? std::pow(xi1 / (eta * (1.0 - eta)), 0.25)
                                                             : std::pow(2.0 * xi1 / (eta * (2.0 - eta)), 0.25));
  auto F = [&](double th) { return noisy_N_closed_form(eta, th, re_c, m12, xi0, xi1, kind).F_gen; };
  // Golden-section search for the maximum on (0, pi/4].
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 1e-6, b = kPi / 4;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = F(x1), f2 = F(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = F(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = F(x1);
    }
  }
  r.numeric = 0.5 * (a + b);
  r.F_at_numeric = F(r.numeric);
  return r;
}

ProtocolComparison compare_optical_limits(double gamma1, double gamma2, double gamma_star1, double gamma_star2,
                                          double delta) {
  const double G1 = gamma1 + 2.0 * gamma_star1, G2 = gamma2 + 2.0 * gamma_star2;
  const Complex c = coherence_factor(gamma1, gamma2, G1, G2, delta, kInfiniteWindow);
  const Complex m_tilde = Complex(gamma1 + gamma2) / Complex(G1 + G2);
  ProtocolComparison r;
  r.M12 = wavepacket_overlap_closed_form(gamma1, gamma2, G1, G2, delta);
  const OpticalLimitReport n = optical_limit_N(0.0, 0.0, c);
  const OpticalLimitReport t = optical_limit_T(1.0, 1.0, c);
  const OpticalLimitReport p = optical_limit_P(c, c, m_tilde);
  r.F_N = n.F_op;
  r.C_N = n.C_op;
  r.F_T = t.F_op;
  r.C_T = t.C_op;
  r.F_P = p.F_op;
  r.C_P = p.C_op;
  r.upper_bound = 0.5 * (1.0 + std::sqrt(r.M12));
  return r;
}

}  // namespace photocount
