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

#include "photocount/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace photocount {

double ProtocolConfig::final_time() const {
  return t_f.has_value() ? *t_f : window.min_final_time(windows());
}

std::vector<ThreeLevelParams> ProtocolConfig::systems() const {
  std::vector<ThreeLevelParams> out{emitters[0], emitters[1]};
  if (protocol == Protocol::P) {
    out[0].omega_up += delta_up;
    out[0].omega_s += delta_up - delta_down;
  } else {
    out[0].omega_up += delta;
  }
  return out;
}

InterferenceNetwork ProtocolConfig::network(bool late_window) const {
  InterferenceNetwork net;
  net.theta = bs_theta;
  net.phi_prop_1 = phi_prop + (late_window ? phi_prop_late : 0.0);
  net.phi_prop_2 = 0.0;
  net.polarization_resolved = protocol == Protocol::P;
  return net;
}

void ProtocolConfig::validate() const {
  for (const auto& e : emitters) e.validate();
  for (const auto& l : loss) l.validate();
  window.validate(0.0);
  if (protocol == Protocol::P) {
    for (const auto& e : emitters)
      if (e.gamma_down <= 0.0) throw DomainError("protocol P needs both optical transitions (gamma_down > 0)");
  }
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) throw DomainError("dark-count rate must be non-negative");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  if (!(max_residual > 0.0)) throw DomainError("max_residual must be positive");
  for (double v : {delta, delta_up, delta_down, theta_prep, phi_init, phi_prop, phi_prop_late, bs_theta}) {
    if (!std::isfinite(v)) throw DomainError("protocol angles and detunings must be finite");
  }
  if (t_f.has_value() && *t_f < window.min_final_time(windows()) - 1e-12) {
    throw DomainError("t_f precedes the return of the last detection result");
  }
}

PhotonStatistics photon_statistics(const ConditionalEnsemble& ensemble, Protocol protocol) {
  PhotonStatistics s;
  const auto accepted = accepted_outcomes(protocol, DetectorKind::pnrd);
  for (const auto& [n, rho] : ensemble.states) {
    const double p = rho.trace();
    const int total = n.total();
    if (total == 0) {
      s.p0 += p;
    } else if (total == 1) {
      s.p1 += p;
    } else if (total == 2) {
      const auto& c = n.counts();
      if (*std::max_element(c.begin(), c.end()) == 2) {
        s.p2 += p;
      } else {
        const bool heralds = std::any_of(accepted.begin(), accepted.end(),
                                         [&](const HeraldedOutcome& h) { return h.outcome == n; });
        if (!heralds) s.p11 += p;
      }
    } else {
      s.p3plus += p;
    }
  }
  return s;
}

ProtocolEngine::ProtocolEngine(ProtocolConfig config) : config_(std::move(config)) {
  config_.validate();
  systems_ = config_.systems();
  const SuperopMatrix L = build_lindbladian(systems_);
  const auto losses = config_.losses();
  early_ = std::make_unique<ConditionalEngine>(L, build_collapse_channels(systems_, losses, config_.network(false)),
                                               config_.engine);
  if (config_.protocol == Protocol::T && config_.phi_prop_late != 0.0) {
    late_ = std::make_unique<ConditionalEngine>(L, build_collapse_channels(systems_, losses, config_.network(true)),
                                                config_.engine);
  }
  full_ = early_->full();
  const DensityOperator rho0 = initial_state(config_.protocol, config_.theta_prep, config_.phi_init);
  start_ = full_.evaluate(config_.window.emitter_start()) * vectorize(rho0);
  first_window_ = early_->propagators(config_.window_n_max(), start_);
}

ProtocolRun ProtocolEngine::run() const { return run(config_.window.T_d, config_.t_f); }

ProtocolRun ProtocolEngine::run(double T_d, std::optional<double> t_f) const {
  ProtocolConfig cfg = config_;
  cfg.window.T_d = T_d;
  cfg.t_f = t_f;
  cfg.validate();

  ProtocolRun out;
  out.t_f = cfg.final_time();
  const double start = cfg.window.emitter_start();
  const double end = start + cfg.windows() * T_d;
  const Matrix tail = full_.evaluate(out.t_f - end);
  const Matrix frame = spin_frame_correction(systems_, out.t_f);
  auto finish = [&](const Vector& v) {
    const Matrix rho = devectorize(tail * v);
    return Matrix(frame * rho * frame.adjoint());
  };

  out.ensemble.detectors = cfg.detectors() * cfg.windows();
  out.dense_fallback = first_window_->dense_fallback();
  Vector unconditional;

  if (cfg.protocol != Protocol::T) {
    for (const auto& [n, prop] : first_window_->all()) {
      out.ensemble.states.emplace(n, DensityOperator(finish(prop.evaluate(T_d).col(0)), false));
    }
    unconditional = full_.evaluate(T_d) * start_;
  } else {
    const Matrix X = pulse_superop(flip_and_reexcite(), 2).matrix;
    std::vector<CountVector> early_counts;
    Matrix seeds(start_.rows(), static_cast<Eigen::Index>(first_window_->all().size()));
    for (const auto& [n, prop] : first_window_->all()) {
      seeds.col(static_cast<Eigen::Index>(early_counts.size())) = X * prop.evaluate(T_d).col(0);
      early_counts.push_back(n);
    }
    const ConditionalEngine& second = late_ ? *late_ : *early_;
    const auto late = second.propagators(cfg.window_n_max(), seeds);
    out.dense_fallback = out.dense_fallback || late.dense_fallback();
    for (const auto& [n_late, prop] : late.all()) {
      const Matrix block = prop.evaluate(T_d);
      for (std::size_t j = 0; j < early_counts.size(); ++j) {
        out.ensemble.states.emplace(n_late.concat(early_counts[j]),
                                    DensityOperator(finish(block.col(static_cast<Eigen::Index>(j))), false));
      }
    }
    const Matrix U_late = late_ ? late_->full().evaluate(T_d) : full_.evaluate(T_d);
    unconditional = U_late * X * full_.evaluate(T_d) * start_;
  }

  out.rho_full = finish(unconditional);
  const Matrix sum = out.ensemble.sum();
  out.completeness_defect = (sum - out.rho_full).cwiseAbs().maxCoeff();
  out.ensemble.truncation_residual = out.rho_full.trace().real() - sum.trace().real();
  if (std::abs(out.ensemble.truncation_residual) > cfg.max_residual) {
    throw TermOverflowError("truncation residual " + std::to_string(out.ensemble.truncation_residual) +
                            " exceeds max_residual; rerun with n_max >= " + std::to_string(cfg.window_n_max() + 1));
  }
  out.min_eigenvalue = 0.0;
  for (const auto& [n, rho] : out.ensemble.states) out.min_eigenvalue = std::min(out.min_eigenvalue, rho.min_eigenvalue());

  out.measured = measure(out.ensemble, cfg.detector, cfg.dark_rate, T_d);
  out.merit = merit_report(out.measured, accepted_outcomes(cfg.protocol, cfg.detector));
  out.stats = photon_statistics(out.ensemble, cfg.protocol);
  return out;
}

ProtocolRun run_protocol(const ProtocolConfig& config) { return ProtocolEngine(config).run(); }

ProtocolConfig distance_config(const ProtocolConfig& base, double L_km, const DistanceModel& model) {
  if (!(L_km >= 0.0) || !std::isfinite(L_km)) throw DomainError("distance must be non-negative");
  ProtocolConfig cfg = base;
  const double eta = model.efficiency(L_km);
  for (auto& l : cfg.loss) l = LossBudget{eta, 1.0, 1.0};
  cfg.window.c = 1.0;
  cfg.window.L_d = model.half_delay(L_km);
  cfg.window.t_d = cfg.window.L_d;
  cfg.t_f.reset();
  return cfg;
}

std::vector<DistanceRow> distance_sweep(const ProtocolConfig& base, const std::vector<double>& L_km,
                                        const DistanceModel& model) {
  std::vector<DistanceRow> rows;
  for (double L : L_km) {
    const ProtocolConfig cfg = distance_config(base, L, model);
    const ProtocolRun run = run_protocol(cfg);
    rows.push_back({L, model.efficiency(L), run.t_f, run.merit, run.stats});
  }
  return rows;
}

}  // namespace photocount
