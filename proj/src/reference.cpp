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

#include "photocount/reference.hpp"

#include <cmath>
#include <random>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "photocount/quadrature.hpp"

namespace photocount::reference {

Matrix expm(const Matrix& generator, double t) { return (t * generator).exp(); }

namespace {

template <class F>
Matrix integrate_matrix(F&& f, double t, double tol) {
  const QuadratureRule rule = gauss_legendre(20);
  auto pass = [&](int panels) {
    const double h = t / panels;
    Matrix sum;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        Matrix v = rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
        if (sum.size() == 0) sum = v; else sum += v;
      }
    }
    return Matrix(0.5 * h * sum);
  };
  Matrix prev = pass(1);
  for (int panels = 2; panels <= 256; panels *= 2) {
    Matrix cur = pass(panels);
    const double scale = std::max(1.0, cur.cwiseAbs().maxCoeff());
    if ((cur - prev).cwiseAbs().maxCoeff() <= tol * scale) return cur;
    prev = std::move(cur);
  }
  throw DomainError("nested quadrature did not converge");
}

}  // namespace

Matrix nested_quadrature(const Matrix& L0, const std::vector<Matrix>& collapses, const CountVector& n, double t,
                         double tol) {
  if (n.size() != static_cast<int>(collapses.size())) throw DimensionError("count vector length mismatch");
  if (n.total() == 0) return expm(L0, t);
  if (t == 0.0) return Matrix::Zero(L0.rows(), L0.cols());
  Matrix total = Matrix::Zero(L0.rows(), L0.cols());
  for (int i = 0; i < n.size(); ++i) {
    if (n[i] == 0) continue;
    std::vector<int> prev = n.counts();
    --prev[i];
    const CountVector parent(prev);
    total += integrate_matrix(
        [&](double s) { return Matrix(expm(L0, t - s) * collapses[i] * nested_quadrature(L0, collapses, parent, s, tol)); },
        t, tol);
  }
  return total;
}

Matrix ode_propagate(const Matrix& generator, const Matrix& x0, double t, double tol) {
  using State = std::vector<Complex>;
  namespace ode = boost::numeric::odeint;
  const Eigen::Index D = generator.rows();
  Matrix out(D, x0.cols());
  for (Eigen::Index c = 0; c < x0.cols(); ++c) {
    State x(x0.col(c).data(), x0.col(c).data() + D);
    auto rhs = [&](const State& y, State& dy, double) {
      Eigen::Map<const Vector> ym(y.data(), D);
      Eigen::Map<Vector> dym(dy.data(), D);
      dym = generator * ym;
    };
    ode::integrate_adaptive(ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>()), rhs, x, 0.0, t,
                            t / 100.0);
    out.col(c) = Eigen::Map<Vector>(x.data(), D);
  }
  return out;
}

RandomLindbladian random_lindbladian(int d, int jumps, int detected, unsigned seed) {
  if (detected > jumps || detected < 1) throw DomainError("need 1 <= detected <= jumps");
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_matrix = [&](double scale) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = scale * Complex(g(rng), g(rng));
    return m;
  };
  const Matrix A = random_matrix(0.5);
  RandomLindbladian out;
  out.L = hamiltonian_superop(0.5 * (A + A.adjoint()));
  for (int j = 0; j < jumps; ++j) {
    const Matrix c = random_matrix(0.4);
    out.L = out.L + dissipator(c);
    if (j < detected) out.collapses.push_back(sandwich(c));
  }
  out.L.kind = SuperopKind::liouvillian;
  return out;
}

}  // namespace photocount::reference
