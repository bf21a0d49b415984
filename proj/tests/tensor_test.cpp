// Copyright 2026 The gatesim Authors
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

#include <gatesim/tensor.hpp>

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace gatesim;

namespace {

Matrix random_matrix(Index n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

Matrix random_hermitian(Index n, std::mt19937& rng) {
  Matrix m = random_matrix(n, rng);
  return (m + m.adjoint()) * 0.5;
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("layout flat index is row-major over factors") {
  const SpaceLayout layout{3, 3, 15};
  CHECK(layout.total() == 135);
  const StateVector v = StateVector::basis(layout, {1, 2, 7});
  CHECK(v((1 * 3 + 2) * 15 + 7) == Complex(1.0));
  CHECK_THROWS_AS(StateVector::basis(layout, {3, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(SpaceLayout({3, 1}), std::invalid_argument);
}

TEST_CASE("kron matches the Eigen Kronecker product") {
  std::mt19937 rng(7);
  const Operator a(SpaceLayout{3}, random_matrix(3, rng));
  const Operator b(SpaceLayout{4}, random_matrix(4, rng));
  const Matrix ref = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  CHECK((kron(a, b).matrix() - ref).cwiseAbs().maxCoeff() < 1e-14);

  const SpaceLayout layout{3, 4};
  const Operator ab = kron(layout, {a, b});
  CHECK(ab.layout() == layout);
  CHECK((ab.matrix() - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("embed places a local operator on one factor") {
  const SpaceLayout layout{3, 3, 4};
  const Operator a = annihilator(4);
  const Operator full = embed(layout, 2, a);
  const StateVector v = StateVector::basis(layout, {2, 1, 3});
  const StateVector w = full * v;
  CHECK(std::abs(w((2 * 3 + 1) * 4 + 2) - std::sqrt(3.0)) < 1e-14);
  CHECK(std::abs(w.norm() - std::sqrt(3.0)) < 1e-14);
}

TEST_CASE("truncated annihilator") {
  const Index n = 8;
  const Operator a = annihilator(n);
  for (Index k = 1; k < n; ++k) CHECK(std::abs(a(k - 1, k) - std::sqrt(double(k))) < 1e-15);
  const Matrix comm = a.matrix() * a.matrix().adjoint() - a.matrix().adjoint() * a.matrix();
  for (Index k = 0; k + 1 < n; ++k) CHECK(std::abs(comm(k, k) - 1.0) < 1e-14);
  // The ceiling entry is where truncation shows.
  CHECK(std::abs(comm(n - 1, n - 1) - Complex(1.0 - n)) < 1e-13);
  const Matrix number = a.matrix().adjoint() * a.matrix();
  for (Index k = 0; k < n; ++k) CHECK(std::abs(number(k, k) - double(k)) < 1e-14);
}

TEST_CASE("partial trace of a product state returns the factors") {
  std::mt19937 rng(3);
  const SpaceLayout la{3};
  const SpaceLayout lb{5};
  Vector va = random_matrix(3, rng).col(0).normalized();
  Vector vb = random_matrix(5, rng).col(0).normalized();
  const StateVector psi = kron(StateVector(la, va), StateVector(lb, vb));
  const DensityMatrix ra = partial_trace(psi, {0});
  const DensityMatrix rb = partial_trace(psi, {1});
  CHECK((ra.matrix() - va * va.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rb.matrix() - vb * vb.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

  // The vector and density-matrix paths agree.
  const DensityMatrix rho = psi.projector();
  CHECK((partial_trace(rho, {1}).matrix() - rb.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace of a maximally entangled pair is maximally mixed") {
  const SpaceLayout layout{2, 2};
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix r = partial_trace(StateVector(layout, v), {0});
  CHECK((r.matrix() - Matrix::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(r.trace() - 1.0) < 1e-15);
}

TEST_CASE("partial trace over a middle factor keeps the outer ones in order") {
  std::mt19937 rng(11);
  const SpaceLayout layout{2, 3, 2};
  Matrix m = random_matrix(12, rng);
  m = m * m.adjoint();
  m /= m.trace();
  const DensityMatrix rho(layout, m);
  const DensityMatrix r = partial_trace(rho, {0, 2});
  // Direct sum over the middle index.
  Matrix ref = Matrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i)
    for (Index k = 0; k < 2; ++k)
      for (Index j = 0; j < 2; ++j)
        for (Index l = 0; l < 2; ++l)
          for (Index b = 0; b < 3; ++b) ref(i * 2 + k, j * 2 + l) += m((i * 3 + b) * 2 + k, (j * 3 + b) * 2 + l);
  CHECK((r.matrix() - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("expm agrees with the Eigen matrix function module") {
  std::mt19937 rng(5);
  for (double scale : {0.01, 1.0, 30.0}) {
    const Matrix h = random_hermitian(6, rng);
    const Matrix ours = expm(h, Complex(0.0, -scale));
    const Matrix ref = (Complex(0.0, -scale) * h).exp();
    CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, scale));
    // Unitary for anti-Hermitian arguments.
    CHECK((ours * ours.adjoint() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-11);
  }
  const Matrix g = random_matrix(5, rng);
  CHECK((expm(g, Complex(1.0)) - g.exp()).cwiseAbs().maxCoeff() < 1e-11 * g.exp().cwiseAbs().maxCoeff());
}

TEST_CASE("displaced vacuum has <a> = beta up to truncation") {
  const Index n = 40;
  const Operator a = annihilator(n);
  const Complex beta(0.6, -0.3);
  const Operator gen = beta * a.adjoint() - std::conj(beta) * a;
  const StateVector vac = StateVector::basis(SpaceLayout{n}, {0});
  const StateVector coh = expm(gen, Complex(1.0)) * vac;
  CHECK(std::abs(expectation(a, coh) - beta) < 1e-12);
  CHECK(std::abs(expectation(Operator(a.adjoint() * a), coh).real() - std::norm(beta)) < 1e-12);
}

TEST_CASE("expectation on a density matrix equals the trace formula") {
  std::mt19937 rng(2);
  const SpaceLayout layout{3, 2};
  Matrix m = random_matrix(6, rng);
  m = m * m.adjoint();
  m /= m.trace();
  const Operator op(layout, random_hermitian(6, rng));
  const Complex ref = (op.matrix() * m).trace();
  CHECK(std::abs(expectation(op, DensityMatrix(layout, m)) - ref) < 1e-14);
}

TEST_CASE("layout mismatches are rejected") {
  const Operator a = Operator::identity(SpaceLayout{2, 3});
  const Operator b = Operator::identity(SpaceLayout{3, 2});
  CHECK_THROWS_AS(a * b, std::invalid_argument);
  CHECK_THROWS_AS(Operator(SpaceLayout{2}, Matrix::Identity(3, 3)), std::invalid_argument);
}

}  // TEST_SUITE
