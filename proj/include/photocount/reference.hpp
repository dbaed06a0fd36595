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

#include "photocount/polyexp.hpp"

// Reference computations that share no code with the symbolic engine.
namespace photocount::reference {

Matrix expm(const Matrix& generator, double t);

// U_n(t) from the jump recursion by nested adaptive Gauss-Legendre quadrature,
// with exp(L0 s) from scaling and squaring.
Matrix nested_quadrature(const Matrix& L0, const std::vector<Matrix>& collapses, const CountVector& n, double t,
                         double tol = 1e-11);

// exp(G t) x0 by adaptive Dormand-Prince integration.
Matrix ode_propagate(const Matrix& generator, const Matrix& x0, double t, double tol = 1e-12);

// Random Lindblad generator on dimension d with `jumps` random jump operators;
// the first `detected` jumps are returned as collapse superoperators.
struct RandomLindbladian {
  SuperopMatrix L;
  std::vector<SuperopMatrix> collapses;
};
RandomLindbladian random_lindbladian(int d, int jumps, int detected, unsigned seed);

}  // namespace photocount::reference
