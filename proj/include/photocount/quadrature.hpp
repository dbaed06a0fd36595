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

#include <functional>
#include <vector>

namespace photocount {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);
// n-point Gauss-Hermite rule for the weight exp(-x^2).
QuadratureRule gauss_hermite(int n);

// Composite Gauss-Legendre on [a, b]; panels doubled until two passes agree to tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                          int order = 32, int max_panels = 4096);

}  // namespace photocount
