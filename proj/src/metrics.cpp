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

#include "photocount/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "photocount/quadrature.hpp"

namespace photocount {

Vector bell_state(BellLabel label) {
  Vector psi = Vector::Zero(kLocalDim * kLocalDim);
  const double s = label == BellLabel::psi_plus ? 1.0 : -1.0;
  psi(kUp * kLocalDim + kDown) = 1.0 / std::sqrt(2.0);
  psi(kDown * kLocalDim + kUp) = s / std::sqrt(2.0);
  return psi;
}

FidelityResult fidelity(const DensityOperator& rho, const Vector& target) {
  if (target.size() != rho.dim()) throw DimensionError("target state dimension mismatch");
  FidelityResult r;
  r.efficiency = rho.trace();
  if (!(r.efficiency > 0.0)) {
    r.fidelity = std::nan("");
    return r;
  }
  const Vector psi = target / target.norm();
  r.fidelity = (psi.adjoint() * rho.matrix() * psi)(0, 0).real() / r.efficiency;
  r.defined = true;
  return r;
}

Matrix spin_block(const Matrix& rho) {
  if (rho.rows() == 4 && rho.cols() == 4) return rho;
  if (rho.rows() != kLocalDim * kLocalDim || rho.cols() != rho.rows()) {
    throw DimensionError("spin_block expects a 9x9 or 4x4 two-system state");
  }
  const int idx[4] = {kUp * 3 + kUp, kUp * 3 + kDown, kDown * 3 + kUp, kDown * 3 + kDown};
  Matrix out(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = rho(idx[i], idx[j]);
  return out;
}

double wootters_concurrence(const Matrix& rho4) {
  if (rho4.rows() != 4 || rho4.cols() != 4) throw DimensionError("concurrence needs a two-qubit state");
  const Matrix h = 0.5 * (rho4 + rho4.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Matrix sqrt_rho = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Matrix tilde = yy * h.conjugate() * yy;
  const Matrix R = sqrt_rho * tilde * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<Matrix> es2(0.5 * (R + R.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> s;
  for (Eigen::Index i = 0; i < 4; ++i) s.push_back(std::sqrt(std::max(es2.eigenvalues()(i), 0.0)));
  std::sort(s.begin(), s.end(), std::greater<>());
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

ConcurrenceResult concurrence(const DensityOperator& rho) {
  ConcurrenceResult r;
  const Matrix block = spin_block(rho.matrix());
  r.ground_weight = block.trace().real();
  r.excited_residue = rho.trace() - r.ground_weight;
  if (!(r.ground_weight > 0.0)) {
    r.concurrence = std::nan("");
    return r;
  }
  r.concurrence = wootters_concurrence(block / r.ground_weight);
  r.defined = true;
  return r;
}

MeritReport merit_report(const MeasuredEnsemble& measured, const std::vector<HeraldedOutcome>& accepted) {
  MeritReport rep;
  rep.residual = measured.residual;
  double f_acc = 0.0, c_acc = 0.0;
  for (const auto& h : accepted) {
    OutcomeMerit om;
    om.outcome = h.outcome;
    om.target = h.target;
    if (const DensityOperator* rho = measured.find(h.outcome)) {
      const FidelityResult f = fidelity(*rho, bell_state(h.target));
      om.efficiency = f.efficiency;
      if (f.defined) {
        om.fidelity = f.fidelity;
        const ConcurrenceResult c = concurrence(*rho);
        om.concurrence = c.defined ? c.concurrence : 0.0;
        om.defined = true;
        f_acc += om.efficiency * om.fidelity;
        c_acc += om.efficiency * om.concurrence;
      } else {
        om.fidelity = om.concurrence = std::nan("");
      }
    }
    rep.eta_gen += std::max(om.efficiency, 0.0);
    rep.outcomes.push_back(om);
  }
  if (rep.eta_gen > 0.0) {
    rep.F_gen = f_acc / rep.eta_gen;
    rep.C_gen = c_acc / rep.eta_gen;
    rep.defined = true;
  } else {
    rep.F_gen = rep.C_gen = std::nan("");
  }
  return rep;
}

Matrix EmitterSpec::initial_state() const {
  if (initial.size() == 0) return local_operator(kExcited, kExcited);
  if (initial.rows() != kLocalDim || initial.cols() != kLocalDim) throw DimensionError("emitter state must be 3x3");
  return initial;
}

namespace {

struct EmitterDynamics {
  PolyExpPropagator U;
  Matrix field;
  Vector rho0;
  int d = kLocalDim;

  explicit EmitterDynamics(const EmitterSpec& e) {
    const SuperopMatrix L = build_lindbladian({e.params});
    U = eig_propagator(L);
    const double rate = e.transition == kUp ? e.params.gamma_up : e.params.gamma_down;
    field = std::sqrt(transition_efficiency(e.params, e.loss, e.transition) * rate) *
            local_operator(e.transition, kExcited);
    rho0 = vectorize(e.initial_state());
  }

  Matrix state(double t) const { return devectorize(U.evaluate(t) * rho0); }

  Vector lowered(double t) const { return vectorize(Matrix(field * state(t))); }

  Complex raise_after(const Vector& x, double tau) const {
    return (field.adjoint() * devectorize(U.evaluate(tau) * x)).trace();
  }

  Complex correlation(double t, double tau) const { return raise_after(lowered(t), tau); }

};

void check_window(double t_start, double t_end) {
  if (!(t_start >= 0.0) || !(t_end > t_start)) throw DomainError("window must satisfy 0 <= t_start < t_end");
}

}  // namespace

double brightness(const EmitterSpec& emitter, double t_start, double t_end) {
  check_window(t_start, t_end);
  const EmitterDynamics e(emitter);
  const Matrix integral = devectorize(e.U.integrate(t_start, t_end) * e.rho0);
  return (e.field.adjoint() * e.field * integral).trace().real();
}

Complex field_correlation(const EmitterSpec& emitter, double t, double tau) {
  if (t < 0.0 || tau < 0.0) throw DomainError("correlation times must be non-negative");
  return EmitterDynamics(emitter).correlation(t, tau);
}

double mean_wavepacket_overlap(const EmitterSpec& a, const EmitterSpec& b, double t_start, double t_end, double tol) {
  check_window(t_start, t_end);
  const EmitterDynamics ea(a), eb(b);
  const double ba = brightness(a, t_start, t_end), bb = brightness(b, t_start, t_end);
  if (!(ba > 0.0) || !(bb > 0.0)) throw DomainError("overlap undefined for a dark emitter");
  const double inner_tol = 0.1 * tol;
  auto outer = [&](double t) {
    const Vector xa = ea.lowered(t), xb = eb.lowered(t);
    return integrate_adaptive(
        [&](double tau) { return (std::conj(ea.raise_after(xa, tau)) * eb.raise_after(xb, tau)).real(); }, 0.0,
        t_end - t, inner_tol, 24);
  };
  return 2.0 * integrate_adaptive(outer, t_start, t_end, tol, 24) / (ba * bb);
}

double g2_integrated(const EmitterSpec& emitter, double t_start, double t_end, double tol) {
  check_window(t_start, t_end);
  const EmitterDynamics e(emitter);
  const double beta = brightness(emitter, t_start, t_end);
  if (!(beta > 0.0)) throw DomainError("g2 undefined for a dark emitter");
  const Matrix n_op = e.field.adjoint() * e.field;
  auto outer = [&](double t) {
    const Matrix x = e.field * e.state(t) * e.field.adjoint();
    const Vector vx = vectorize(x);
    return integrate_adaptive(
        [&](double tau) { return (n_op * devectorize(e.U.evaluate(tau) * vx)).trace().real(); }, 0.0, t_end - t,
        0.1 * tol, 24);
  };
  return 2.0 * integrate_adaptive(outer, t_start, t_end, tol, 24) / (beta * beta);
}

}  // namespace photocount
