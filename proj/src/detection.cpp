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

#include "photocount/detection.hpp"

#include <cmath>

namespace photocount {

const char* detector_name(DetectorKind k) { return k == DetectorKind::pnrd ? "pnrd" : "bd"; }

DetectorKind detector_from_name(const std::string& name) {
  if (name == "pnrd" || name == "PNRD") return DetectorKind::pnrd;
  if (name == "bd" || name == "BD") return DetectorKind::bd;
  throw DomainError("unknown detector '" + name + "' (expected pnrd or bd)");
}

void DetectionWindow::validate(double t0) const {
  if (!(T_d > 0.0) || !std::isfinite(T_d)) throw DomainError("window duration T_d must be positive");
  if (!(L_d >= 0.0) || !(c > 0.0)) throw DomainError("distance must be non-negative and signal speed positive");
  if (emitter_start() < t0 - 1e-12) throw DomainError("retarded window start precedes the protocol start");
}

double dark_count_prob(int n, double T_d, double rate) {
  if (n < 0) throw DomainError("dark-count number must be non-negative");
  if (!(T_d >= 0.0) || !(rate >= 0.0)) throw DomainError("dark-count rate and window must be non-negative");
  const double mu = rate * T_d;
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double ConditionalEnsemble::total_trace() const {
  double t = 0.0;
  for (const auto& [n, rho] : states) t += rho.trace();
  return t;
}

Matrix ConditionalEnsemble::sum() const {
  Matrix acc;
  for (const auto& [n, rho] : states) {
    if (acc.size() == 0) acc = rho.matrix(); else acc += rho.matrix();
  }
  return acc;
}

double MeasuredEnsemble::total_trace() const {
  double t = 0.0;
  for (const auto& [m, rho] : outcomes) t += rho.trace();
  return t;
}

const DensityOperator* MeasuredEnsemble::find(const CountVector& m) const {
  auto it = outcomes.find(m);
  return it == outcomes.end() ? nullptr : &it->second;
}

MeasuredEnsemble measure(const ConditionalEnsemble& ensemble, DetectorKind kind, double dark_rate, double T_d,
                         int extra_dark) {
  if (ensemble.states.empty()) throw DomainError("cannot measure an empty ensemble");
  if (extra_dark < 0) throw DomainError("extra_dark must be non-negative");
  const int N = ensemble.detectors;
  const int dim = ensemble.states.begin()->second.dim();
  MeasuredEnsemble out;
  out.kind = kind;

  std::vector<double> xi;
  int max_true = 0;
  for (const auto& [n, rho] : ensemble.states) max_true = std::max(max_true, n.total());
  const int horizon = max_true + extra_dark;
  for (int k = 0; k <= horizon; ++k) xi.push_back(dark_count_prob(k, T_d, dark_rate));

  if (kind == DetectorKind::pnrd) {
    for (const auto& m : enumerate_counts(N, horizon)) {
      Matrix acc = Matrix::Zero(dim, dim);
      bool any = false;
      for (const auto& [n, rho] : ensemble.states) {
        double w = 1.0;
        for (int i = 0; i < N && w != 0.0; ++i) w *= m[i] >= n[i] ? xi[m[i] - n[i]] : 0.0;
        if (w == 0.0) continue;
        acc += w * rho.matrix();
        any = true;
      }
      if (any) out.outcomes.emplace(m, DensityOperator(acc, false));
    }
  } else {
    const double xi0 = xi[0];
    for (int mask = 0; mask < (1 << N); ++mask) {
      std::vector<int> bits(N);
      for (int i = 0; i < N; ++i) bits[i] = (mask >> (N - 1 - i)) & 1;
      const CountVector m(bits);
      Matrix acc = Matrix::Zero(dim, dim);
      for (const auto& [n, rho] : ensemble.states) {
        double w = 1.0;
        for (int i = 0; i < N && w != 0.0; ++i) {
          if (n[i] > 0) w *= m[i] == 1 ? 1.0 : 0.0;
          else w *= m[i] == 1 ? 1.0 - xi0 : xi0;
        }
        if (w != 0.0) acc += w * rho.matrix();
      }
      out.outcomes.emplace(m, DensityOperator(acc, false));
    }
  }
  out.residual = ensemble.total_trace() + ensemble.truncation_residual - out.total_trace();
  return out;
}

std::vector<HeraldedOutcome> accepted_outcomes(Protocol protocol, DetectorKind) {
  const auto plus = BellLabel::psi_plus, minus = BellLabel::psi_minus;
  switch (protocol) {
    case Protocol::N:
      return {{CountVector({1, 0}), minus}, {CountVector({0, 1}), plus}};
    case Protocol::T:
    case Protocol::P:
      return {{CountVector({1, 0, 1, 0}), plus},
              {CountVector({1, 0, 0, 1}), minus},
              {CountVector({0, 1, 1, 0}), minus},
              {CountVector({0, 1, 0, 1}), plus}};
  }
  return {};
}

}  // namespace photocount
