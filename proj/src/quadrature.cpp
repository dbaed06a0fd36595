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

#include "photocount/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "photocount/types.hpp"

namespace photocount {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights from first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
  const Eigen::Index n = offdiag.size() + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v * v);
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
  if (n == 1) return {{0.0}, {2.0}};
  Eigen::VectorXd b(n - 1);
  for (int k = 1; k < n; ++k) b(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(b, 2.0);
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
  if (n == 1) return {{0.0}, {std::sqrt(kPi)}};
  Eigen::VectorXd b(n - 1);
  for (int k = 1; k < n; ++k) b(k - 1) = std::sqrt(k / 2.0);
  return golub_welsch(b, std::sqrt(kPi));
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol, int order,
                          int max_panels) {
  if (b < a) throw DomainError("integration bounds are reversed");
  if (b == a) return 0.0;
  const QuadratureRule rule = gauss_legendre(order);
  auto pass = [&](int panels) {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    return 0.5 * h * sum;
  };
  double prev = pass(1);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const double cur = pass(panels);
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw DomainError("adaptive quadrature did not converge");
}

}  // namespace photocount
