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

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "photocount/liouville.hpp"

namespace photocount {

struct EngineOptions {
  // Eigenvalues closer than this (relative to the spectral radius) share one rate.
  double degeneracy_tol = 1e-9;
  // Above this estimated condition number of the block-diagonalising basis the
  // dense lattice fallback is used.
  double max_condition = 1e9;
  // Upper bound on symbolic terms per propagator.
  std::size_t max_terms = 50000;
  bool force_dense = false;
};

// Block-diagonal form A = W diag(lambda_c I + N_c) W^{-1} with strictly upper N_c.
class SpectralBasis {
 public:
  static std::shared_ptr<const SpectralBasis> compute(const Matrix& generator,
                                                      const EngineOptions& options = {});

  int dim() const { return static_cast<int>(generator_.rows()); }
  int cluster_count() const { return static_cast<int>(rates_.size()); }
  Complex rate(int c) const { return rates_[c]; }
  int begin(int c) const { return begin_[c]; }
  int size(int c) const { return size_[c]; }
  // N_c^j / j! for j = 1..; empty for diagonalisable clusters.
  const std::vector<Matrix>& nilpotent_powers(int c) const { return powers_[c]; }

  const Matrix& generator() const { return generator_; }
  const Matrix& W() const { return W_; }
  const Matrix& W_inv() const { return W_inv_; }
  double condition() const { return condition_; }
  double reconstruction_error() const { return reconstruction_error_; }
  bool usable() const { return usable_; }

 private:
  Matrix generator_, W_, W_inv_;
  std::vector<Complex> rates_;
  std::vector<int> begin_, size_;
  std::vector<std::vector<Matrix>> powers_;
  double condition_ = 0.0;
  double reconstruction_error_ = 0.0;
  bool usable_ = false;
};

// Count lattice realised as a single block generator (Van Loan construction).
struct DenseLattice {
  Matrix generator;
  Matrix seed;
  int block_dim = 0;
};

// One symbolic term t^power exp(rate_of(cluster) t) coeff, in spectral coordinates.
struct PolyExpTerm {
  int cluster = 0;
  int power = 0;
  Matrix coeff;
};

// Matrix-valued function of elapsed time  W * sum_j t^k_j exp(lambda_j t) C_j.
class PolyExpPropagator {
 public:
  PolyExpPropagator() = default;
  PolyExpPropagator(std::shared_ptr<const SpectralBasis> basis, std::vector<PolyExpTerm> terms,
                    Eigen::Index cols, double t_ref = 0.0);
  PolyExpPropagator(std::shared_ptr<const DenseLattice> lattice, int block, double t_ref = 0.0);

  Matrix evaluate(double t) const;
  // Integral of evaluate(s) over s in [t_a, t_b].
  Matrix integrate(double t_a, double t_b) const;

  Eigen::Index rows() const;
  Eigen::Index cols() const { return cols_; }
  double t_ref() const { return t_ref_; }
  bool is_dense_fallback() const { return lattice_ != nullptr; }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<PolyExpTerm>& terms() const { return terms_; }
  const std::shared_ptr<const SpectralBasis>& basis() const { return basis_; }
  std::vector<Complex> distinct_rates() const;
  // Sum of the power-zero coefficient matrices in the original basis.
  Matrix zero_power_sum() const;

 private:
  std::shared_ptr<const SpectralBasis> basis_;
  std::vector<PolyExpTerm> terms_;
  std::shared_ptr<const DenseLattice> lattice_;
  int block_ = 0;
  Eigen::Index cols_ = 0;
  double t_ref_ = 0.0;
};

class CountVector {
 public:
  CountVector() = default;
  explicit CountVector(std::vector<int> counts);
  static CountVector zeros(int detectors);
  static CountVector unit(int detectors, int i);

  int size() const { return static_cast<int>(n_.size()); }
  int total() const;
  int operator[](int i) const { return n_[i]; }
  const std::vector<int>& counts() const { return n_; }
  CountVector concat(const CountVector& other) const;
  std::string str() const;

  auto operator<=>(const CountVector&) const = default;

 private:
  std::vector<int> n_;
};

// All count vectors with non-negative entries and total at most n_max, graded order.
std::vector<CountVector> enumerate_counts(int detectors, int n_max);

class ConditionalPropagators {
 public:
  // Null for count vectors outside the computed lattice (those propagators vanish).
  const PolyExpPropagator* find(const CountVector& n) const;
  const PolyExpPropagator& at(const CountVector& n) const;
  const std::map<CountVector, PolyExpPropagator>& all() const { return props_; }
  int detectors() const { return detectors_; }
  int n_max() const { return n_max_; }
  bool dense_fallback() const { return dense_; }

 private:
  friend class ConditionalEngine;
  std::map<CountVector, PolyExpPropagator> props_;
  int detectors_ = 0;
  int n_max_ = 0;
  bool dense_ = false;
};

// Spectral data of a generator split into collapse channels and no-jump part.
class ConditionalEngine {
 public:
  ConditionalEngine(const SuperopMatrix& L, std::vector<SuperopMatrix> collapses,
                    const EngineOptions& options = {});

  // Superoperator-valued U_n(t).
  ConditionalPropagators propagators(int n_max) const;
  // U_n(t) applied to the columns of `seed` (vectorised states).
  ConditionalPropagators propagators(int n_max, const Matrix& seed) const;

  // Full propagator exp(L t), optionally applied to a seed.
  PolyExpPropagator full() const;
  PolyExpPropagator full(const Matrix& seed) const;
  PolyExpPropagator no_jump(const Matrix& seed) const;

  const SuperopMatrix& liouvillian() const { return L_; }
  const SuperopMatrix& no_jump_generator() const { return L0_; }
  const std::vector<SuperopMatrix>& collapses() const { return collapses_; }
  bool dense_fallback() const { return !basis0_->usable() || options_.force_dense; }

 private:
  ConditionalPropagators build(int n_max, const Matrix& seed) const;
  ConditionalPropagators build_dense(int n_max, const Matrix& seed) const;

  SuperopMatrix L_, L0_;
  std::vector<SuperopMatrix> collapses_;
  EngineOptions options_;
  std::shared_ptr<const SpectralBasis> basis0_, basis_full_;
  std::vector<Matrix> collapses_spectral_;
};

PolyExpPropagator eig_propagator(const SuperopMatrix& generator, const EngineOptions& options = {});

ConditionalPropagators conditional_propagators(const SuperopMatrix& L,
                                               const std::vector<SuperopMatrix>& collapses,
                                               int n_max, const EngineOptions& options = {});

// U(t_f, t') U_n(t', t) U(t, t0), all generators time independent.
SuperopMatrix window_propagator(const PolyExpPropagator& full, const PolyExpPropagator& counted,
                                double t0, double t, double t_prime, double t_f);

// <A(t + tau) B(t)> = Tr[A exp(L tau)(B rho_t)] for every tau in `taus`.
std::vector<Complex> two_time_correlator(const SuperopMatrix& L, const Matrix& A, const Matrix& B,
                                         const Matrix& rho_t, const std::vector<double>& taus,
                                         const EngineOptions& options = {});

}  // namespace photocount
