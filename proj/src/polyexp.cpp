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

#include "photocount/polyexp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace photocount {

namespace {

// Plane rotation with real cosine c and complex sine s annihilating g in (f, g).
void lartg(Complex f, Complex g, double& c, Complex& s) {
  if (g == Complex(0.0)) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (f == Complex(0.0)) {
    c = 0.0;
    s = std::conj(g) / std::abs(g);
    return;
  }
  const double nf = std::abs(f), ng = std::abs(g);
  const double norm = std::hypot(nf, ng);
  c = nf / norm;
  s = (f / nf) * std::conj(g) / norm;
}

void rot(Complex& x, Complex& y, double c, Complex s) {
  const Complex tmp = c * x + s * y;
  y = c * y - std::conj(s) * x;
  x = tmp;
}

// Exchange diagonal entries k and k+1 of the triangular factor, updating Z.
void swap_adjacent(Matrix& T, Matrix& Z, Eigen::Index k) {
  const Eigen::Index n = T.rows();
  const Complex t11 = T(k, k), t22 = T(k + 1, k + 1);
  double c;
  Complex s;
  lartg(T(k, k + 1), t22 - t11, c, s);
  for (Eigen::Index j = k + 2; j < n; ++j) rot(T(k, j), T(k + 1, j), c, s);
  for (Eigen::Index i = 0; i < k; ++i) rot(T(i, k), T(i, k + 1), c, std::conj(s));
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < n; ++i) rot(Z(i, k), Z(i, k + 1), c, std::conj(s));
}

// Solve A Y - Y B = C for upper triangular A, B with disjoint spectra.
Matrix triangular_sylvester(const Matrix& A, const Matrix& B, const Matrix& C) {
  const Eigen::Index p = A.rows(), q = B.rows();
  Matrix Y = Matrix::Zero(p, q);
  for (Eigen::Index i = p - 1; i >= 0; --i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      Complex s = C(i, j);
      for (Eigen::Index l = i + 1; l < p; ++l) s -= A(i, l) * Y(l, j);
      for (Eigen::Index l = 0; l < j; ++l) s += Y(i, l) * B(l, j);
      Y(i, j) = s / (A(i, i) - B(j, j));
    }
  }
  return Y;
}

double one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Integral of s^k exp(lambda s) over [a, b].
Complex power_exp_integral(int k, Complex lambda, double a, double b) {
  const double reach = std::abs(lambda) * std::max(std::abs(a), std::abs(b));
  if (reach < 0.5) {
    Complex sum = 0.0, coef = 1.0;
    for (int n = 0; n < 60; ++n) {
      const int p = k + n + 1;
      const Complex term = coef * (std::pow(b, p) - std::pow(a, p)) / static_cast<double>(p);
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      coef *= lambda / static_cast<double>(n + 1);
    }
    return sum;
  }
  auto antiderivative = [&](double s) {
    Complex acc = 0.0;
    for (int q = 0; q <= k; ++q) {
      const double sign = ((k - q) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * (factorial(k) / factorial(q)) * std::pow(s, q) / std::pow(lambda, k - q + 1);
    }
    return std::exp(lambda * s) * acc;
  };
  return antiderivative(b) - antiderivative(a);
}

struct IntegralTerm {
  bool parent_rate;
  int power;
  Complex alpha;
};

// Coefficients of int_0^t (t-s)^j s^k exp(lc (t-s) + lb s) ds as sums of t^q exp(l t).
void convolution_terms(int j, int k, Complex lc, Complex lb, bool same, std::vector<IntegralTerm>& out) {
  out.clear();
  if (same) {
    out.push_back({false, j + k + 1, factorial(j) * factorial(k) / factorial(j + k + 1)});
    return;
  }
  const Complex mu = lb - lc;
  for (int m = 0; m <= j; ++m) {
    const double pre = binomial(j, m) * ((m % 2 == 0) ? 1.0 : -1.0);
    const int p = k + m;
    for (int q = 0; q <= p; ++q) {
      const double sign = ((p - q) % 2 == 0) ? 1.0 : -1.0;
      out.push_back({true, j - m + q, pre * sign * (factorial(p) / factorial(q)) / std::pow(mu, p - q + 1)});
    }
    const double sign_p = (p % 2 == 0) ? 1.0 : -1.0;
    out.push_back({false, j - m, -pre * sign_p * factorial(p) / std::pow(mu, p + 1)});
  }
}

using TermMap = std::map<std::pair<int, int>, Matrix>;

std::vector<PolyExpTerm> to_terms(TermMap&& map) {
  double biggest = 0.0;
  for (const auto& [key, m] : map) biggest = std::max(biggest, m.cwiseAbs().maxCoeff());
  std::vector<PolyExpTerm> terms;
  for (auto& [key, m] : map) {
    const double size = m.cwiseAbs().maxCoeff();
    if (size == 0.0 || size < 1e-22 * biggest) continue;
    terms.push_back({key.first, key.second, std::move(m)});
  }
  return terms;
}

// exp(A t) applied to seed, with seed already mapped to spectral coordinates.
std::vector<PolyExpTerm> free_terms(const SpectralBasis& basis, const Matrix& seed_spectral) {
  TermMap map;
  const Eigen::Index D = basis.dim(), m = seed_spectral.cols();
  for (int c = 0; c < basis.cluster_count(); ++c) {
    const int b = basis.begin(c), s = basis.size(c);
    const Matrix rows = seed_spectral.middleRows(b, s);
    if (rows.cwiseAbs().maxCoeff() == 0.0) continue;
    Matrix coeff = Matrix::Zero(D, m);
    coeff.middleRows(b, s) = rows;
    map[{c, 0}] = coeff;
    const auto& powers = basis.nilpotent_powers(c);
    for (std::size_t j = 0; j < powers.size(); ++j) {
      Matrix cj = Matrix::Zero(D, m);
      cj.middleRows(b, s) = powers[j] * rows;
      map[{c, static_cast<int>(j + 1)}] = cj;
    }
  }
  return to_terms(std::move(map));
}

}  // namespace

std::shared_ptr<const SpectralBasis> SpectralBasis::compute(const Matrix& A, const EngineOptions& options) {
  if (A.rows() != A.cols() || A.rows() == 0) throw DimensionError("generator must be square and non-empty");
  auto out = std::shared_ptr<SpectralBasis>(new SpectralBasis());
  out->generator_ = A;
  const Eigen::Index n = A.rows();

  Eigen::ComplexSchur<Matrix> schur(A);
  if (schur.info() != Eigen::Success) return out;
  Matrix T = schur.matrixT().triangularView<Eigen::Upper>();
  Matrix Z = schur.matrixU();

  double radius = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) radius = std::max(radius, std::abs(T(i, i)));
  const double scale = radius > 0.0 ? radius : 1.0;
  const double tol = options.degeneracy_tol * scale;

  // Single-linkage clusters of the eigenvalues.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(T(i, i) - T(j, j)) < tol) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
  std::vector<int> key(n), order_of_root(n, -1);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int r = find(static_cast<int>(i));
    if (order_of_root[r] < 0) order_of_root[r] = next++;
    key[i] = order_of_root[r];
  }

  // Make clusters contiguous with adjacent swaps.
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (key[k] > key[k + 1]) {
        swap_adjacent(T, Z, k);
        std::swap(key[k], key[k + 1]);
        swapped = true;
      }
    }
  }

  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j < n && key[j] == key[i]) ++j;
    out->begin_.push_back(static_cast<int>(i));
    out->size_.push_back(static_cast<int>(j - i));
    i = j;
  }
  const int m = static_cast<int>(out->begin_.size());

  // Block-diagonalise T with a unit block upper triangular X: T X = X blockdiag(T_cc).
  Matrix X = Matrix::Identity(n, n);
  for (int cp = 1; cp < m; ++cp) {
    const int bq = out->begin_[cp], q = out->size_[cp];
    for (int c = cp - 1; c >= 0; --c) {
      const int bp = out->begin_[c], p = out->size_[c];
      Matrix rhs = Matrix::Zero(p, q);
      for (int l = c + 1; l <= cp; ++l) {
        const int bl = out->begin_[l], sl = out->size_[l];
        rhs -= T.block(bp, bl, p, sl) * X.block(bl, bq, sl, q);
      }
      X.block(bp, bq, p, q) = triangular_sylvester(T.block(bp, bp, p, p), T.block(bq, bq, q, q), rhs);
    }
  }
  const Matrix X_inv = X.triangularView<Eigen::UnitUpper>().solve(Matrix::Identity(n, n));
  out->W_ = Z * X;
  out->W_inv_ = X_inv * Z.adjoint();
  out->condition_ = one_norm(X) * one_norm(X_inv);

  double norm_a = A.cwiseAbs().maxCoeff();
  if (norm_a == 0.0) norm_a = 1.0;
  Matrix D = Matrix::Zero(n, n);
  for (int c = 0; c < m; ++c) {
    const int b = out->begin_[c], s = out->size_[c];
    const Matrix block = T.block(b, b, s, s);
    const Complex lambda = block.diagonal().mean();
    out->rates_.push_back(lambda);
    Matrix N = block.triangularView<Eigen::StrictlyUpper>();
    std::vector<Matrix> powers;
    Matrix P = N;
    for (int j = 1; j < s; ++j) {
      const Matrix term = P / factorial(j);
      if (term.cwiseAbs().maxCoeff() <= 1e-13 * std::pow(norm_a, j)) break;
      powers.push_back(term);
      P = P * N;
    }
    out->powers_.push_back(std::move(powers));
    D.block(b, b, s, s) = lambda * Matrix::Identity(s, s);
    if (!out->powers_.back().empty()) D.block(b, b, s, s) += N;
  }
  out->reconstruction_error_ = (out->W_ * D * out->W_inv_ - A).cwiseAbs().maxCoeff() / norm_a;
  out->usable_ = std::isfinite(out->condition_) && out->condition_ <= options.max_condition &&
                 out->reconstruction_error_ <= 1e-8;
  return out;
}

PolyExpPropagator::PolyExpPropagator(std::shared_ptr<const SpectralBasis> basis, std::vector<PolyExpTerm> terms,
                                     Eigen::Index cols, double t_ref)
    : basis_(std::move(basis)), terms_(std::move(terms)), cols_(cols), t_ref_(t_ref) {}

PolyExpPropagator::PolyExpPropagator(std::shared_ptr<const DenseLattice> lattice, int block, double t_ref)
    : lattice_(std::move(lattice)), block_(block), t_ref_(t_ref) {
  cols_ = lattice_->seed.cols();
}

Eigen::Index PolyExpPropagator::rows() const {
  if (lattice_) return lattice_->block_dim;
  return basis_ ? basis_->dim() : 0;
}

Matrix PolyExpPropagator::evaluate(double t) const {
  const double tau = t - t_ref_;
  if (tau < -1e-12 * std::max(1.0, std::abs(t_ref_))) throw DomainError("propagator evaluated before its reference time");
  if (lattice_) {
    const int D = lattice_->block_dim;
    const Matrix E = (std::max(tau, 0.0) * lattice_->generator).exp();
    return E.block(static_cast<Eigen::Index>(block_) * D, 0, D, D) * lattice_->seed;
  }
  const Eigen::Index D = rows();
  Matrix acc = Matrix::Zero(D, cols_);
  for (const auto& term : terms_) {
    const Complex f = std::pow(tau, term.power) * std::exp(basis_->rate(term.cluster) * tau);
    acc.noalias() += f * term.coeff;
  }
  return basis_->W() * acc;
}

Matrix PolyExpPropagator::integrate(double t_a, double t_b) const {
  if (t_b < t_a) throw DomainError("integration bounds are reversed");
  const double a = t_a - t_ref_, b = t_b - t_ref_;
  if (a < -1e-12) throw DomainError("integration starts before the reference time");
  if (lattice_) {
    const int D = lattice_->block_dim;
    const Eigen::Index big = lattice_->generator.rows(), m = cols_;
    Matrix aug = Matrix::Zero(big + m, big + m);
    aug.topLeftCorner(big, big) = lattice_->generator;
    aug.block(0, big, D, m) = lattice_->seed;
    const Matrix E = ((b - a) * aug).exp();
    const Matrix head = (a * lattice_->generator).exp();
    const Matrix integral = head * E.topRightCorner(big, m);
    return integral.middleRows(static_cast<Eigen::Index>(block_) * D, D);
  }
  Matrix acc = Matrix::Zero(rows(), cols_);
  for (const auto& term : terms_) {
    acc.noalias() += power_exp_integral(term.power, basis_->rate(term.cluster), a, b) * term.coeff;
  }
  return basis_->W() * acc;
}

std::vector<Complex> PolyExpPropagator::distinct_rates() const {
  std::vector<int> clusters;
  for (const auto& term : terms_) clusters.push_back(term.cluster);
  std::sort(clusters.begin(), clusters.end());
  clusters.erase(std::unique(clusters.begin(), clusters.end()), clusters.end());
  std::vector<Complex> rates;
  for (int c : clusters) rates.push_back(basis_->rate(c));
  return rates;
}

Matrix PolyExpPropagator::zero_power_sum() const {
  if (lattice_) return evaluate(t_ref_);
  Matrix acc = Matrix::Zero(rows(), cols_);
  for (const auto& term : terms_)
    if (term.power == 0) acc += term.coeff;
  return basis_->W() * acc;
}

CountVector::CountVector(std::vector<int> counts) : n_(std::move(counts)) {
  for (int v : n_)
    if (v < 0) throw DomainError("photon counts must be non-negative");
}

CountVector CountVector::zeros(int detectors) { return CountVector(std::vector<int>(detectors, 0)); }

CountVector CountVector::unit(int detectors, int i) {
  std::vector<int> v(detectors, 0);
  v.at(i) = 1;
  return CountVector(std::move(v));
}

int CountVector::total() const { return std::accumulate(n_.begin(), n_.end(), 0); }

CountVector CountVector::concat(const CountVector& other) const {
  std::vector<int> v = n_;
  v.insert(v.end(), other.n_.begin(), other.n_.end());
  return CountVector(std::move(v));
}

std::string CountVector::str() const {
  std::string s;
  for (int v : n_) s += std::to_string(v);
  return s;
}

std::vector<CountVector> enumerate_counts(int detectors, int n_max) {
  if (detectors < 1) throw DomainError("at least one detector is required");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  std::vector<CountVector> out;
  std::vector<int> cur(detectors, 0);
  for (int total = 0; total <= n_max; ++total) {
    // Compositions of `total` into `detectors` parts, lexicographically descending.
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == detectors - 1) {
        cur[pos] = left;
        out.emplace_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[pos] = v;
        rec(pos + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

const PolyExpPropagator* ConditionalPropagators::find(const CountVector& n) const {
  auto it = props_.find(n);
  return it == props_.end() ? nullptr : &it->second;
}

const PolyExpPropagator& ConditionalPropagators::at(const CountVector& n) const {
  const auto* p = find(n);
  if (!p) throw DomainError("count vector " + n.str() + " is outside the computed lattice");
  return *p;
}

ConditionalEngine::ConditionalEngine(const SuperopMatrix& L, std::vector<SuperopMatrix> collapses,
                                     const EngineOptions& options)
    : L_(L), collapses_(std::move(collapses)), options_(options) {
  L_.hilbert_dim();
  if (collapses_.empty()) throw DomainError("at least one collapse channel is required");
  L0_ = L_;
  for (const auto& S : collapses_) {
    if (S.matrix.rows() != L_.matrix.rows()) throw DimensionError("collapse channel dimension mismatch");
    L0_.matrix -= S.matrix;
  }
  L0_.kind = SuperopKind::general;
  basis0_ = SpectralBasis::compute(L0_.matrix, options_);
  basis_full_ = SpectralBasis::compute(L_.matrix, options_);
  if (basis0_->usable()) {
    for (const auto& S : collapses_) collapses_spectral_.push_back(basis0_->W_inv() * S.matrix * basis0_->W());
  }
}

ConditionalPropagators ConditionalEngine::propagators(int n_max) const {
  const Eigen::Index D = L_.matrix.rows();
  return propagators(n_max, Matrix::Identity(D, D));
}

ConditionalPropagators ConditionalEngine::propagators(int n_max, const Matrix& seed) const {
  if (seed.rows() != L_.matrix.rows()) throw DimensionError("seed does not match the Liouville dimension");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  if (dense_fallback()) return build_dense(n_max, seed);
  return build(n_max, seed);
}

ConditionalPropagators ConditionalEngine::build(int n_max, const Matrix& seed) const {
  const SpectralBasis& basis = *basis0_;
  const int detectors = static_cast<int>(collapses_.size());
  const auto lattice = enumerate_counts(detectors, n_max);
  std::map<CountVector, std::vector<PolyExpTerm>> terms;
  terms[lattice.front()] = free_terms(basis, basis.W_inv() * seed);

  std::vector<IntegralTerm> kernel;
  for (std::size_t idx = 1; idx < lattice.size(); ++idx) {
    const CountVector& n = lattice[idx];
    TermMap acc;
    for (int i = 0; i < detectors; ++i) {
      if (n[i] == 0) continue;
      std::vector<int> prev = n.counts();
      --prev[i];
      const auto& parent = terms.at(CountVector(prev));
      for (const auto& pt : parent) {
        const Matrix Y = collapses_spectral_[i] * pt.coeff;
        const Complex lb = basis.rate(pt.cluster);
        for (int c = 0; c < basis.cluster_count(); ++c) {
          const int b = basis.begin(c), s = basis.size(c);
          const Matrix Yc = Y.middleRows(b, s);
          if (Yc.cwiseAbs().maxCoeff() == 0.0) continue;
          const auto& powers = basis.nilpotent_powers(c);
          for (std::size_t j = 0; j <= powers.size(); ++j) {
            const Matrix Z = j == 0 ? Yc : Matrix(powers[j - 1] * Yc);
            convolution_terms(static_cast<int>(j), pt.power, basis.rate(c), lb, c == pt.cluster, kernel);
            for (const auto& kt : kernel) {
              const int cluster = kt.parent_rate ? pt.cluster : c;
              auto [it, fresh] = acc.try_emplace({cluster, kt.power});
              if (fresh) it->second = Matrix::Zero(seed.rows(), seed.cols());
              it->second.middleRows(b, s) += kt.alpha * Z;
            }
          }
        }
      }
    }
    auto list = to_terms(std::move(acc));
    if (list.size() > options_.max_terms) {
      std::ostringstream msg;
      msg << "symbolic expansion for counts " << n.str() << " needs " << list.size()
          << " terms (limit " << options_.max_terms << "); reduce n_max below " << n.total();
      throw TermOverflowError(msg.str());
    }
    terms[n] = std::move(list);
  }

  ConditionalPropagators out;
  out.detectors_ = detectors;
  out.n_max_ = n_max;
  for (auto& [n, list] : terms) out.props_.emplace(n, PolyExpPropagator(basis0_, std::move(list), seed.cols()));
  return out;
}

ConditionalPropagators ConditionalEngine::build_dense(int n_max, const Matrix& seed) const {
  const int detectors = static_cast<int>(collapses_.size());
  const auto lattice = enumerate_counts(detectors, n_max);
  const Eigen::Index D = L_.matrix.rows();
  const auto V = static_cast<Eigen::Index>(lattice.size());
  std::map<CountVector, int> index;
  for (std::size_t i = 0; i < lattice.size(); ++i) index[lattice[i]] = static_cast<int>(i);

  auto dense = std::make_shared<DenseLattice>();
  dense->block_dim = static_cast<int>(D);
  dense->seed = seed;
  dense->generator = Matrix::Zero(D * V, D * V);
  for (std::size_t a = 0; a < lattice.size(); ++a) {
    dense->generator.block(a * D, a * D, D, D) = L0_.matrix;
    for (int i = 0; i < detectors; ++i) {
      if (lattice[a][i] == 0) continue;
      std::vector<int> prev = lattice[a].counts();
      --prev[i];
      dense->generator.block(a * D, index.at(CountVector(prev)) * D, D, D) = collapses_[i].matrix;
    }
  }
  ConditionalPropagators out;
  out.detectors_ = detectors;
  out.n_max_ = n_max;
  out.dense_ = true;
  for (const auto& [n, i] : index) out.props_.emplace(n, PolyExpPropagator(dense, i));
  return out;
}

namespace {
PolyExpPropagator free_propagator(const std::shared_ptr<const SpectralBasis>& basis, const Matrix& generator,
                                  const Matrix& seed, bool force_dense) {
  if (basis->usable() && !force_dense) {
    return PolyExpPropagator(basis, free_terms(*basis, basis->W_inv() * seed), seed.cols());
  }
  auto dense = std::make_shared<DenseLattice>();
  dense->block_dim = static_cast<int>(generator.rows());
  dense->generator = generator;
  dense->seed = seed;
  return PolyExpPropagator(dense, 0);
}
}  // namespace

PolyExpPropagator ConditionalEngine::full() const {
  const Eigen::Index D = L_.matrix.rows();
  return full(Matrix::Identity(D, D));
}

PolyExpPropagator ConditionalEngine::full(const Matrix& seed) const {
  if (seed.rows() != L_.matrix.rows()) throw DimensionError("seed does not match the Liouville dimension");
  return free_propagator(basis_full_, L_.matrix, seed, options_.force_dense);
}

PolyExpPropagator ConditionalEngine::no_jump(const Matrix& seed) const {
  if (seed.rows() != L_.matrix.rows()) throw DimensionError("seed does not match the Liouville dimension");
  return free_propagator(basis0_, L0_.matrix, seed, options_.force_dense);
}

PolyExpPropagator eig_propagator(const SuperopMatrix& generator, const EngineOptions& options) {
  generator.hilbert_dim();
  const auto basis = SpectralBasis::compute(generator.matrix, options);
  const Eigen::Index D = generator.matrix.rows();
  return free_propagator(basis, generator.matrix, Matrix::Identity(D, D), options.force_dense);
}

ConditionalPropagators conditional_propagators(const SuperopMatrix& L, const std::vector<SuperopMatrix>& collapses,
                                               int n_max, const EngineOptions& options) {
  return ConditionalEngine(L, collapses, options).propagators(n_max);
}

SuperopMatrix window_propagator(const PolyExpPropagator& full, const PolyExpPropagator& counted, double t0, double t,
                                double t_prime, double t_f) {
  if (!(t0 <= t && t <= t_prime && t_prime <= t_f)) throw DomainError("window times must satisfy t0 <= t <= t' <= t_f");
  if (full.cols() != full.rows() || counted.cols() != counted.rows()) {
    throw DimensionError("window_propagator needs superoperator-valued propagators");
  }
  return {full.evaluate(t_f - t_prime) * counted.evaluate(t_prime - t) * full.evaluate(t - t0), SuperopKind::general};
}

std::vector<Complex> two_time_correlator(const SuperopMatrix& L, const Matrix& A, const Matrix& B, const Matrix& rho_t,
                                         const std::vector<double>& taus, const EngineOptions& options) {
  const int d = L.hilbert_dim();
  if (A.rows() != d || B.rows() != d || rho_t.rows() != d) throw DimensionError("correlator operand mismatch");
  const auto basis = SpectralBasis::compute(L.matrix, options);
  const Matrix x = vectorize(Matrix(B * rho_t));
  const PolyExpPropagator prop = free_propagator(basis, L.matrix, x, options.force_dense);
  RowVector functional(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) functional(i * d + j) = A(j, i);
  std::vector<Complex> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    if (tau < 0.0) throw DomainError("correlator delays must be non-negative");
    out.push_back((functional * prop.evaluate(tau))(0, 0));
  }
  return out;
}

}  // namespace photocount
