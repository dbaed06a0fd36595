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

#include <random>

#include "photocount/types.hpp"

namespace testing {

inline double max_abs(const photocount::Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double max_diff(const photocount::Matrix& a, const photocount::Matrix& b) { return max_abs(a - b); }

inline photocount::Matrix random_matrix(int r, int c, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  photocount::Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = photocount::Complex(g(rng), g(rng));
  return m;
}

inline photocount::Matrix random_state(int d, std::mt19937& rng) {
  const photocount::Matrix a = random_matrix(d, d, rng);
  photocount::Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace testing
