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

#include <vector>

#include "photocount/types.hpp"

namespace photocount {

// Composite space of identical local systems.
struct HilbertSpec {
  int per_system_dim = 3;
  int num_systems = 2;

  int dim() const;
  int liouville_dim() const;
  void validate() const;
};

class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(Matrix m, bool normalized = true);

  static DensityOperator pure(const Vector& psi);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  bool normalized() const { return normalized_; }
  double trace() const;

  // Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;
  double hermiticity_defect() const;
  // Throws InvariantError if the operator is not a (sub)normalized state within tol.
  void validate(double tol = 1e-9) const;

 private:
  Matrix m_;
  bool normalized_ = true;
};

// Row stacking: vec(rho)[i*d + j] = rho(i, j), so vec(A rho B) = (A kron B^T) vec(rho).
Vector vectorize(const Matrix& rho);
Vector vectorize(const DensityOperator& rho);
Matrix devectorize(const Vector& v);
// Linear functional v -> Tr[devectorize(v)].
RowVector trace_row(int d);

enum class SuperopKind { general, liouvillian, collapse, channel };

struct SuperopMatrix {
  Matrix matrix;
  SuperopKind kind = SuperopKind::general;

  int liouville_dim() const { return static_cast<int>(matrix.rows()); }
  int hilbert_dim() const;
  Vector apply(const Vector& v) const { return matrix * v; }
  Matrix apply(const Matrix& rho) const;
};

SuperopMatrix operator+(const SuperopMatrix& a, const SuperopMatrix& b);
SuperopMatrix operator-(const SuperopMatrix& a, const SuperopMatrix& b);
SuperopMatrix operator*(double s, const SuperopMatrix& a);

// rho -> A rho B
SuperopMatrix superop_from_pair(const Matrix& A, const Matrix& B,
                                SuperopKind kind = SuperopKind::general);
// rho -> -i[H, rho]
SuperopMatrix hamiltonian_superop(const Matrix& H);
// rho -> c rho c^dag - {c^dag c, rho}/2
SuperopMatrix dissipator(const Matrix& c);
// rho -> c rho c^dag
SuperopMatrix sandwich(const Matrix& c, SuperopKind kind = SuperopKind::collapse);
SuperopMatrix identity_superop(int d);

// Largest |Tr[S rho]| column defect, zero for a trace-annihilating generator.
double trace_defect(const SuperopMatrix& generator);

Matrix kron(const Matrix& a, const Matrix& b);
// Operator acting as `op` on system `k` of `spec`, identity elsewhere.
Matrix embed_local(const Matrix& op, int k, const HilbertSpec& spec);

}  // namespace photocount
