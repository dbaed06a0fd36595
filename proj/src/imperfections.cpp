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


#include "photocount/imperfections.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "photocount/quadrature.hpp"

namespace photocount {

void DiffusionSpec::validate() const {
  for (double d : {delta_1, delta_2})
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("diffusion widths must be non-negative");
  if (!std::isfinite(mean_1) || !std::isfinite(mean_2)) throw DomainError("mean detunings must be finite");
}

void PhaseErrorSpec::validate() const {
  if (!(sigma_phi >= 0.0) || !std::isfinite(sigma_phi)) throw DomainError("phase error width must be non-negative");
}

namespace {

// Neumaier compensated sum.
struct Accumulator {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

using Values = std::vector<double>;
using ValueFn = std::function<Values(const std::vector<double>&)>;

Values tensor_rule(const ValueFn& f, const std::vector<double>& means,
                      const std::vector<double>& sigmas, int n, int workers) {
  std::vector<std::size_t> active;
  for (std::size_t d = 0; d < sigmas.size(); ++d)
    if (sigmas[d] > 0.0) active.push_back(d);
  const QuadratureRule rule = gauss_hermite(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < active.size(); ++i) total *= static_cast<std::size_t>(n);

  std::vector<Values> vals(total);
  std::vector<double> weights(total);
  auto node = [&](std::size_t index) {
    std::vector<double> x = means;
    double w = 1.0;
    for (std::size_t d : active) {
      const std::size_t j = index % static_cast<std::size_t>(n);
      index /= static_cast<std::size_t>(n);
      x[d] += std::sqrt(2.0) * sigmas[d] * rule.nodes[j];
      w *= rule.weights[j] / std::sqrt(kPi);
    }
    return std::make_pair(x, w);
  };

  std::exception_ptr failure;
  std::mutex guard;
  auto work = [&](std::size_t begin, std::size_t stride) {
    try {
      for (std::size_t i = begin; i < total; i += stride) {
        auto [x, w] = node(i);
        weights[i] = w;
        vals[i] = f(x);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), total);
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Fixed summation order keeps the result independent of the worker count.
  const std::size_t K = vals[0].size();
  for (const auto& v : vals)
    if (v.size() != K) throw DimensionError("integrand changed its output length between nodes");
  Values out(K);
  for (std::size_t k = 0; k < K; ++k) {
    Accumulator acc;
    for (std::size_t i = 0; i < total; ++i) acc.add(weights[i] * vals[i][k]);
    out[k] = acc.value();
  }
  return out;
}

std::pair<Values, AverageResult> average(const ValueFn& f,
                                            const std::vector<double>& means, const std::vector<double>& sigmas,
                                            const QuadratureControl& control) {
  if (means.size() != sigmas.size()) throw DimensionError("means and widths differ in length");
  for (double s : sigmas)
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("Gaussian widths must be non-negative");
  if (control.nodes < 2 || control.max_nodes < control.nodes) throw DomainError("invalid node counts");

  AverageResult info;
  bool noisy = false;
  for (double s : sigmas) noisy = noisy || s > 0.0;
  if (!noisy) {
    info.nodes = 1;
    return {f(means), info};
  }
  int n = control.nodes;
  Values coarse = tensor_rule(f, means, sigmas, (n + 1) / 2, control.workers);
  while (true) {
    const Values fine = tensor_rule(f, means, sigmas, n, control.workers);
    double change = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) change = std::max(change, std::abs(fine[k] - coarse[k]));
    if (change <= control.tol) {
      info.change = change;
      info.nodes = n;
      return {fine, info};
    }
    if (2 * n - 1 > control.max_nodes) {
      throw InvariantError("Gaussian average did not converge: change " + std::to_string(change) + " at " +
                           std::to_string(n) + " nodes");
    }
    coarse = fine;
    n = 2 * n - 1;
  }
}

}  // namespace

AverageResult gaussian_average(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& means, const std::vector<double>& sigmas,
                               const QuadratureControl& control) {
  auto [v, info] = average([&](const std::vector<double>& x) { return Values{f(x)}; }, means, sigmas, control);
  info.value = v[0];
  return info;
}

AverageResult diffuse_average(const std::function<double(double, double)>& metric, const DiffusionSpec& spec,
                              const QuadratureControl& control) {
  spec.validate();
  return gaussian_average([&](const std::vector<double>& w) { return metric(w[0], w[1]); },
                          {spec.mean_1, spec.mean_2}, {spec.delta_1, spec.delta_2}, control);
}

AverageResult diffuse_average(const std::function<double(double)>& metric_of_detuning, const DiffusionSpec& spec,
                              const QuadratureControl& control) {
  return diffuse_average([&](double w1, double w2) { return metric_of_detuning(w1 - w2); }, spec, control);
}

PhaseAveragedN phase_average_N(double F_eta, Complex c_tilde, double sigma_phi) {
  PhaseErrorSpec{sigma_phi}.validate();
  PhaseAveragedN r;
  r.F = 0.5 * (1.0 + c_tilde.real() * std::exp(-0.5 * sigma_phi * sigma_phi)) * F_eta;
  r.unit_F_eta = std::abs(F_eta - 1.0) < 1e-12;
  return r;
}

double phase_average_T(Complex c_tilde, const PhaseErrorSpec& spec) {
  spec.validate();
  // A common phase cancels between the windows; only independent draws leave a phase difference.
  if (!spec.independent_late_phase) return 0.5 * (1.0 + std::norm(c_tilde));
  return 0.5 * (1.0 + std::norm(c_tilde) * std::exp(-spec.sigma_phi * spec.sigma_phi));
}

double phase_average_P(Complex c_up, Complex c_down, Complex m_tilde, const PhaseErrorSpec& spec) {
  spec.validate();
  // Both photons of a coincidence share the link phases, so the heralded state does not see them.
  return optical_limit_P(c_up, c_down, m_tilde).F_op;
}

double sigma2_crossover_T(double gamma1, double gamma2, double Gamma1, double Gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw DomainError("decay rates must be positive");
  return std::log((Gamma1 + Gamma2) * (Gamma1 + Gamma2) / (4.0 * gamma1 * gamma2));
}

double sigma2_crossover_P(double gamma1, double gamma2) { return sigma2_crossover_T(gamma1, gamma2, gamma1, gamma2); }

namespace {

ConditionalEnsemble oracle_ensemble_N(const ProtocolConfig& cfg) {
  const OracleN o = oracle_N(cfg);
  ConditionalEnsemble e;
  e.detectors = 2;
  e.states.emplace(CountVector({0, 0}), o.rho0);
  e.states.emplace(CountVector({0, 1}), o.rho_plus);
  e.states.emplace(CountVector({1, 0}), o.rho_minus);
  if (o.rho11) {
    e.states.emplace(CountVector({2, 0}), *o.rho20);
    e.states.emplace(CountVector({1, 1}), *o.rho11);
    e.states.emplace(CountVector({0, 2}), *o.rho02);
  } else if (cfg.detector == DetectorKind::bd || cfg.dark_rate > 0.0) {
    throw DomainError("closed-form N with noisy or bin detectors needs a balanced splitter");
  }
  return e;
}

MeasuredEnsemble oracle_measured_N(const ProtocolConfig& cfg) {
  return measure(oracle_ensemble_N(cfg), cfg.detector, cfg.dark_rate, cfg.window.T_d);
}

// Unnormalised heralded states of the accepted outcomes, flattened as (re, im) pairs.
Values flatten_heralded(const MeasuredEnsemble& measured, const std::vector<HeraldedOutcome>& accepted, int dim) {
  Values out;
  out.reserve(accepted.size() * 2 * dim * dim);
  for (const auto& a : accepted) {
    const DensityOperator* rho = measured.find(a.outcome);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const Complex z = rho ? rho->matrix()(i, j) : Complex(0.0);
        out.push_back(z.real());
        out.push_back(z.imag());
      }
    }
  }
  return out;
}

MeritReport merit_of_flat(const Values& flat, const std::vector<HeraldedOutcome>& accepted, int dim, DetectorKind kind) {
  MeasuredEnsemble m;
  m.kind = kind;
  std::size_t k = 0;
  for (const auto& a : accepted) {
    Matrix rho(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j, k += 2) rho(i, j) = Complex(flat[k], flat[k + 1]);
    }
    m.outcomes.emplace(a.outcome, DensityOperator(rho, false));
  }
  return merit_report(m, accepted);
}

AveragedMerit closed_form_merit(const ProtocolConfig& cfg) {
  switch (cfg.protocol) {
    case Protocol::N: {
      const MeritReport m = merit_report(oracle_measured_N(cfg), accepted_outcomes(Protocol::N, cfg.detector));
      return {m.eta_gen, m.F_gen, m.C_gen, 1};
    }
    case Protocol::T: {
      const OracleT o = oracle_T(cfg);
      return {o.eta_gen, o.F_gen, o.C_gen, 1};
    }
    case Protocol::P: {
      const OracleP o = oracle_P(cfg);
      return {o.limit.eta_op, o.limit.F_op, o.limit.C_op, 1};
    }
  }
  return {};
}

}  // namespace

AveragedMerit oracle_merit(const ProtocolConfig& config) { return closed_form_merit(config); }

AveragedMerit averaged_merit(const ProtocolConfig& config, const DiffusionSpec& diffusion, const PhaseErrorSpec& phase,
                             AveragingMode mode, const QuadratureControl& control) {
  config.validate();
  diffusion.validate();
  phase.validate();
  // Noise axes: omega_up of each emitter, the link phase, and (T only) the late-minus-early phase.
  std::vector<double> means{diffusion.mean_1, diffusion.mean_2, 0.0, 0.0};
  std::vector<double> sigmas{diffusion.delta_1, diffusion.delta_2, 0.0, 0.0};
  // T sees only the late-minus-early phase and P none at all, so those paths never integrate over a phase.
  if (config.protocol == Protocol::N) sigmas[2] = phase.sigma_phi;
  if (config.protocol == Protocol::T && phase.independent_late_phase) sigmas[3] = std::sqrt(2.0) * phase.sigma_phi;
  auto perturbed = [&](const std::vector<double>& x) {
    ProtocolConfig cfg = config;
    cfg.emitters[0].omega_up += x[0];
    cfg.emitters[1].omega_up += x[1];
    cfg.phi_prop += x[2];
    cfg.phi_prop_late += x[3];
    return cfg;
  };
  const auto accepted = accepted_outcomes(config.protocol, config.detector);
  const int dim = kLocalDim * kLocalDim;
  AveragedMerit out;

  // Fidelity is linear in the state but concurrence is not, so the heralded states themselves are averaged.
  if (mode == AveragingMode::numeric || config.protocol == Protocol::N) {
    auto f = [&](const std::vector<double>& x) {
      const ProtocolConfig cfg = perturbed(x);
      const MeasuredEnsemble m = mode == AveragingMode::numeric ? run_protocol(cfg).measured : oracle_measured_N(cfg);
      return flatten_heralded(m, accepted, dim);
    };
    auto [v, info] = average(f, means, sigmas, control);
    const MeritReport r = merit_of_flat(v, accepted, dim, config.detector);
    out.eta_gen = r.eta_gen;
    out.F_gen = r.defined ? r.F_gen : std::nan("");
    out.C_gen = r.defined ? r.C_gen : std::nan("");
    out.nodes = info.nodes;
    return out;
  }

  if (config.protocol == Protocol::T) {
    // The heralded T state has coherence x exp(i (phi_prop_late - phi_init)) with F = (1 + Re c) / 2 and C = |c|.
    auto f = [&](const std::vector<double>& x) {
      const ProtocolConfig cfg = perturbed(x);
      const OracleT o = oracle_T(cfg);
      const double phase = cfg.phi_prop_late - cfg.phi_init;
      return Values{o.eta_gen, o.eta_gen * o.F_gen, o.eta_gen * o.C_gen * std::cos(phase),
                    o.eta_gen * o.C_gen * std::sin(phase)};
    };
    auto [v, info] = average(f, means, sigmas, control);
    out.eta_gen = v[0];
    out.F_gen = v[0] > 0.0 ? v[1] / v[0] : std::nan("");
    out.C_gen = v[0] > 0.0 ? std::hypot(v[2], v[3]) / v[0] : std::nan("");
    out.nodes = info.nodes;
    return out;
  }

  // P: eta, eta F and eta C per realisation.
  auto f = [&](const std::vector<double>& x) {
    const AveragedMerit m = closed_form_merit(perturbed(x));
    return Values{m.eta_gen, m.eta_gen * m.F_gen, m.eta_gen * m.C_gen};
  };
  auto [v, info] = average(f, means, sigmas, control);
  out.eta_gen = v[0];
  out.F_gen = v[0] > 0.0 ? v[1] / v[0] : std::nan("");
  out.C_gen = v[0] > 0.0 ? v[2] / v[0] : std::nan("");
  out.nodes = info.nodes;
  return out;
}

}  // namespace photocount
