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

#include "photocount/liouville.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace photocount {

int HilbertSpec::dim() const {
  int d = 1;
  for (int k = 0; k < num_systems; ++k) d *= per_system_dim;
  return d;
}

int HilbertSpec::liouville_dim() const { return dim() * dim(); }

void HilbertSpec::validate() const {
  if (per_system_dim < 1 || num_systems < 1) {
    throw DimensionError("HilbertSpec needs positive local dimension and system count");
  }
}

DensityOperator::DensityOperator(Matrix m, bool normalized) : m_(std::move(m)), normalized_(normalized) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DimensionError("density operator must be a non-empty square matrix");
  }
}

DensityOperator DensityOperator::pure(const Vector& psi) {
  const double n = psi.squaredNorm();
  if (n <= 0.0) throw DomainError("cannot build a state from the zero vector");
  return DensityOperator(psi * psi.adjoint() / n, true);
}

double DensityOperator::trace() const { return m_.trace().real(); }

double DensityOperator::hermiticity_defect() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityOperator::min_eigenvalue() const {
  Matrix h = 0.5 * (m_ + m_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityOperator::validate(double tol) const {
  std::ostringstream msg;
  if (hermiticity_defect() > tol) {
    msg << "state is not Hermitian (defect " << hermiticity_defect() << ")";
    throw InvariantError(msg.str());
  }
  if (min_eigenvalue() < -tol) {
    msg << "state has negative eigenvalue " << min_eigenvalue();
    throw InvariantError(msg.str());
  }
  const double tr = trace();
  if (normalized_ ? std::abs(tr - 1.0) > tol : tr > 1.0 + tol) {
    msg << "state trace " << tr << " out of range";
    throw InvariantError(msg.str());
  }
}

Vector vectorize(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("vectorize expects a square matrix");
  const Eigen::Index d = rho.rows();
  Vector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

Vector vectorize(const DensityOperator& rho) { return vectorize(rho.matrix()); }

Matrix devectorize(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw DimensionError("vector length is not a perfect square");
  Matrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

RowVector trace_row(int d) {
  RowVector r = RowVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) r(i * d + i) = 1.0;
  return r;
}

int SuperopMatrix::hilbert_dim() const {
  const auto d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(matrix.rows()))));
  if (d * d != matrix.rows() || matrix.rows() != matrix.cols()) {
    throw DimensionError("superoperator is not square over a Liouville space");
  }
  return d;
}

Matrix SuperopMatrix::apply(const Matrix& rho) const {
  if (rho.rows() * rho.cols() != matrix.cols()) throw DimensionError("superoperator/state mismatch");
  return devectorize(matrix * vectorize(rho));
}

SuperopMatrix operator+(const SuperopMatrix& a, const SuperopMatrix& b) {
  if (a.matrix.rows() != b.matrix.rows()) throw DimensionError("superoperator sum mismatch");
  return {a.matrix + b.matrix, a.kind == b.kind ? a.kind : SuperopKind::general};
}

SuperopMatrix operator-(const SuperopMatrix& a, const SuperopMatrix& b) {
  if (a.matrix.rows() != b.matrix.rows()) throw DimensionError("superoperator difference mismatch");
  return {a.matrix - b.matrix, SuperopKind::general};
}

SuperopMatrix operator*(double s, const SuperopMatrix& a) { return {s * a.matrix, a.kind}; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SuperopMatrix superop_from_pair(const Matrix& A, const Matrix& B, SuperopKind kind) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw DimensionError("superop_from_pair expects equal square operators");
  }
  return {kron(A, B.transpose()), kind};
}

SuperopMatrix hamiltonian_superop(const Matrix& H) {
  const Matrix I = Matrix::Identity(H.rows(), H.cols());
  const Complex mi(0.0, -1.0);
  return {mi * (kron(H, I) - kron(I, H.transpose())), SuperopKind::liouvillian};
}

SuperopMatrix dissipator(const Matrix& c) {
  if (c.rows() != c.cols()) throw DimensionError("jump operator must be square");
  const Matrix I = Matrix::Identity(c.rows(), c.cols());
  const Matrix cdc = c.adjoint() * c;
  return {kron(c, c.conjugate()) - 0.5 * kron(cdc, I) - 0.5 * kron(I, cdc.transpose()),
          SuperopKind::liouvillian};
}

SuperopMatrix sandwich(const Matrix& c, SuperopKind kind) {
  if (c.rows() != c.cols()) throw DimensionError("jump operator must be square");
  return {kron(c, c.conjugate()), kind};
}

SuperopMatrix identity_superop(int d) {
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  return {Matrix::Identity(n, n), SuperopKind::channel};
}

double trace_defect(const SuperopMatrix& generator) {
  const RowVector tr = trace_row(generator.hilbert_dim());
  return (tr * generator.matrix).cwiseAbs().maxCoeff();
}

Matrix embed_local(const Matrix& op, int k, const HilbertSpec& spec) {
  spec.validate();
  if (op.rows() != spec.per_system_dim || op.cols() != spec.per_system_dim) {
    throw DimensionError("local operator does not match the local dimension");
  }
  if (k < 0 || k >= spec.num_systems) throw DimensionError("system index out of range");
  Matrix out = Matrix::Identity(1, 1);
  const Matrix I = Matrix::Identity(spec.per_system_dim, spec.per_system_dim);
  for (int j = 0; j < spec.num_systems; ++j) out = kron(out, j == k ? op : I);
  return out;
}

}  // namespace photocount
