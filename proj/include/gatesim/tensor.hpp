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

#pragma once

// Dense complex linear algebra over tensor-product Hilbert spaces.
//
// Every matrix carries a SpaceLayout naming the dimensions of its tensor
// factors, so that partial traces and embeddings can be checked against the
// space the matrix actually lives on. Storage is plain Eigen; the wrappers
// only add the layout tag and the checks.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gatesim {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Ordered tensor-factor dimensions, e.g. {3, 3, n_fock}.
class SpaceLayout {
 public:
  explicit SpaceLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("SpaceLayout: no factors");
    for (Index d : dims_) {
      if (d < 2) throw std::invalid_argument("SpaceLayout: factor dimension must be >= 2");
    }
  }
  SpaceLayout(std::initializer_list<Index> dims) : SpaceLayout(std::vector<Index>(dims)) {}

  const std::vector<Index>& dims() const { return dims_; }
  std::size_t factors() const { return dims_.size(); }
  Index factor(std::size_t i) const { return dims_.at(i); }
  Index total() const {
    return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
  }

  /// Layout of the listed factors, in the order given.
  SpaceLayout subset(std::span<const std::size_t> keep) const {
    std::vector<Index> out;
    for (std::size_t k : keep) {
      if (k >= dims_.size()) throw std::invalid_argument("SpaceLayout: factor index out of range");
      out.push_back(dims_[k]);
    }
    return SpaceLayout(std::move(out));
  }

  SpaceLayout concat(const SpaceLayout& other) const {
    std::vector<Index> out = dims_;
    out.insert(out.end(), other.dims_.begin(), other.dims_.end());
    return SpaceLayout(std::move(out));
  }

  bool operator==(const SpaceLayout&) const = default;

 private:
  std::vector<Index> dims_;
};

namespace detail {

inline void require_same(const SpaceLayout& a, const SpaceLayout& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": layout mismatch");
}

}  // namespace detail

template <typename Scalar>
class BasicStateVector;

/// Square matrix acting on a tagged space. Not required to be Hermitian.
template <typename Scalar>
class BasicOperator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;

  BasicOperator(SpaceLayout layout, Matrix entries)
      : layout_(std::move(layout)), entries_(std::move(entries)) {
    if (entries_.rows() != layout_.total() || entries_.cols() != layout_.total()) {
      throw std::invalid_argument("Operator: matrix shape does not match layout");
    }
  }

  static BasicOperator identity(const SpaceLayout& layout) {
    return BasicOperator(layout, Matrix::Identity(layout.total(), layout.total()));
  }
  static BasicOperator zero(const SpaceLayout& layout) {
    return BasicOperator(layout, Matrix::Zero(layout.total(), layout.total()));
  }

  const SpaceLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }
  Scalar operator()(Index r, Index c) const { return entries_(r, c); }

  BasicOperator adjoint() const { return BasicOperator(layout_, entries_.adjoint()); }

  /// Largest |A - A^dagger| entry.
  RealScalar hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(RealScalar tol) const { return hermiticity_error() <= tol; }

  BasicOperator& operator+=(const BasicOperator& o) {
    detail::require_same(layout_, o.layout_, "Operator +=");
    entries_ += o.entries_;
    return *this;
  }
  BasicOperator& operator-=(const BasicOperator& o) {
    detail::require_same(layout_, o.layout_, "Operator -=");
    entries_ -= o.entries_;
    return *this;
  }
  BasicOperator& operator*=(Scalar s) {
    entries_ *= s;
    return *this;
  }

  friend BasicOperator operator+(BasicOperator a, const BasicOperator& b) { return a += b; }
  friend BasicOperator operator-(BasicOperator a, const BasicOperator& b) { return a -= b; }
  friend BasicOperator operator*(BasicOperator a, Scalar s) { return a *= s; }
  friend BasicOperator operator*(Scalar s, BasicOperator a) { return a *= s; }
  friend BasicOperator operator*(const BasicOperator& a, const BasicOperator& b) {
    detail::require_same(a.layout_, b.layout_, "Operator *");
    return BasicOperator(a.layout_, a.entries_ * b.entries_);
  }

 private:
  SpaceLayout layout_;
  Matrix entries_;
};

template <typename Scalar>
class BasicDensityMatrix;

template <typename Scalar>
class BasicStateVector {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;

  BasicStateVector(SpaceLayout layout, Vector amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != layout_.total()) {
      throw std::invalid_argument("StateVector: length does not match layout");
    }
  }

  /// Computational basis ket with one index per factor.
  static BasicStateVector basis(const SpaceLayout& layout, std::span<const Index> digits) {
    if (digits.size() != layout.factors()) {
      throw std::invalid_argument("StateVector::basis: wrong number of digits");
    }
    Index flat = 0;
    for (std::size_t k = 0; k < digits.size(); ++k) {
      if (digits[k] < 0 || digits[k] >= layout.factor(k)) {
        throw std::invalid_argument("StateVector::basis: digit out of range");
      }
      flat = flat * layout.factor(k) + digits[k];
    }
    Vector v = Vector::Zero(layout.total());
    v(flat) = Scalar(1);
    return BasicStateVector(layout, std::move(v));
  }
  static BasicStateVector basis(const SpaceLayout& layout, std::initializer_list<Index> digits) {
    return basis(layout, std::span<const Index>(digits.begin(), digits.size()));
  }

  const SpaceLayout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }
  Scalar operator()(Index i) const { return amplitudes_(i); }

  RealScalar norm() const { return amplitudes_.norm(); }
  BasicStateVector normalized() const { return BasicStateVector(layout_, amplitudes_.normalized()); }

  Scalar inner(const BasicStateVector& other) const {
    detail::require_same(layout_, other.layout_, "StateVector inner");
    return amplitudes_.dot(other.amplitudes_);
  }

  BasicDensityMatrix<Scalar> projector() const;

  friend BasicStateVector operator*(const BasicOperator<Scalar>& op, const BasicStateVector& v) {
    detail::require_same(op.layout(), v.layout_, "Operator * StateVector");
    return BasicStateVector(v.layout_, op.matrix() * v.amplitudes_);
  }
  friend BasicStateVector operator+(const BasicStateVector& a, const BasicStateVector& b) {
    detail::require_same(a.layout_, b.layout_, "StateVector +");
    return BasicStateVector(a.layout_, a.amplitudes_ + b.amplitudes_);
  }
  friend BasicStateVector operator*(Scalar s, const BasicStateVector& v) {
    return BasicStateVector(v.layout_, s * v.amplitudes_);
  }

 private:
  SpaceLayout layout_;
  Vector amplitudes_;
};

/// Density operator. Trace, Hermiticity and positivity are checked by the
/// evolver's diagnostics rather than enforced here, because channel
/// tomography pushes arbitrary (non-Hermitian) operators through the same
/// machinery.
template <typename Scalar>
class BasicDensityMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RealScalar = typename Eigen::NumTraits<Scalar>::Real;

  BasicDensityMatrix(SpaceLayout layout, Matrix entries)
      : layout_(std::move(layout)), entries_(std::move(entries)) {
    if (entries_.rows() != layout_.total() || entries_.cols() != layout_.total()) {
      throw std::invalid_argument("DensityMatrix: matrix shape does not match layout");
    }
  }

  const SpaceLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return entries_; }
  Index dim() const { return entries_.rows(); }
  Scalar operator()(Index r, Index c) const { return entries_(r, c); }

  Scalar trace() const { return entries_.trace(); }
  RealScalar hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  }
  /// Smallest eigenvalue of the Hermitian part.
  RealScalar min_eigenvalue() const {
    Matrix herm = (entries_ + entries_.adjoint()) * RealScalar(0.5);
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  friend BasicDensityMatrix operator+(const BasicDensityMatrix& a, const BasicDensityMatrix& b) {
    detail::require_same(a.layout_, b.layout_, "DensityMatrix +");
    return BasicDensityMatrix(a.layout_, a.entries_ + b.entries_);
  }
  friend BasicDensityMatrix operator*(Scalar s, const BasicDensityMatrix& r) {
    return BasicDensityMatrix(r.layout_, s * r.entries_);
  }

 private:
  SpaceLayout layout_;
  Matrix entries_;
};

template <typename Scalar>
BasicDensityMatrix<Scalar> BasicStateVector<Scalar>::projector() const {
  return BasicDensityMatrix<Scalar>(layout_, amplitudes_ * amplitudes_.adjoint());
}

using Operator = BasicOperator<Complex>;
using StateVector = BasicStateVector<Complex>;
using DensityMatrix = BasicDensityMatrix<Complex>;
using Matrix = Operator::Matrix;
using Vector = StateVector::Vector;

// ---------------------------------------------------------------------------
// Tensor products

template <typename Scalar>
BasicOperator<Scalar> kron(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b) {
  using M = typename BasicOperator<Scalar>::Matrix;
  const Index na = a.dim();
  const Index nb = b.dim();
  M out(na * nb, na * nb);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.matrix();
    }
  }
  return BasicOperator<Scalar>(a.layout().concat(b.layout()), std::move(out));
}

template <typename Scalar>
BasicStateVector<Scalar> kron(const BasicStateVector<Scalar>& a, const BasicStateVector<Scalar>& b) {
  using V = typename BasicStateVector<Scalar>::Vector;
  V out(a.dim() * b.dim());
  for (Index i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a(i) * b.amplitudes();
  return BasicStateVector<Scalar>(a.layout().concat(b.layout()), std::move(out));
}

/// Tensor product of single-factor operators, one per factor of `layout`.
template <typename Scalar>
BasicOperator<Scalar> kron(const SpaceLayout& layout, std::span<const BasicOperator<Scalar>> ops) {
  if (ops.size() != layout.factors()) {
    throw std::invalid_argument("kron: need one operator per layout factor");
  }
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (ops[k].dim() != layout.factor(k)) {
      throw std::invalid_argument("kron: factor " + std::to_string(k) + " dimension mismatch");
    }
  }
  using M = typename BasicOperator<Scalar>::Matrix;
  M acc = ops[0].matrix();
  for (std::size_t k = 1; k < ops.size(); ++k) {
    acc = kron(BasicOperator<Scalar>(SpaceLayout({acc.rows()}), acc), ops[k]).matrix();
  }
  return BasicOperator<Scalar>(layout, std::move(acc));
}

template <typename Scalar>
BasicOperator<Scalar> kron(const SpaceLayout& layout,
                           std::initializer_list<BasicOperator<Scalar>> ops) {
  return kron<Scalar>(layout, std::span<const BasicOperator<Scalar>>(ops.begin(), ops.size()));
}

/// Places a single-factor operator at position `factor`, identity elsewhere.
template <typename Scalar>
BasicOperator<Scalar> embed(const SpaceLayout& layout, std::size_t factor,
                            const BasicOperator<Scalar>& local) {
  if (factor >= layout.factors()) throw std::invalid_argument("embed: factor index out of range");
  std::vector<BasicOperator<Scalar>> ops;
  ops.reserve(layout.factors());
  for (std::size_t k = 0; k < layout.factors(); ++k) {
    ops.push_back(k == factor ? local : BasicOperator<Scalar>::identity(SpaceLayout({layout.factor(k)})));
  }
  return kron<Scalar>(layout, std::span<const BasicOperator<Scalar>>(ops));
}

// ---------------------------------------------------------------------------
// Single-mode and single-level primitives

/// Truncated bosonic annihilator on {|0>, ..., |n_fock-1>}. a|n> = sqrt(n)|n-1>;
/// a^dagger a is exact below the ceiling while [a, a^dagger] differs from the
/// identity in the last diagonal entry.
template <typename Scalar = Complex>
BasicOperator<Scalar> annihilator(Index n_fock) {
  if (n_fock < 2) throw std::invalid_argument("annihilator: n_fock must be >= 2");
  using M = typename BasicOperator<Scalar>::Matrix;
  M a = M::Zero(n_fock, n_fock);
  for (Index n = 1; n < n_fock; ++n) a(n - 1, n) = Scalar(std::sqrt(static_cast<double>(n)));
  return BasicOperator<Scalar>(SpaceLayout({n_fock}), std::move(a));
}

/// |row><col| on a `dim`-level factor.
template <typename Scalar = Complex>
BasicOperator<Scalar> transition(Index dim, Index row, Index col) {
  using M = typename BasicOperator<Scalar>::Matrix;
  if (row < 0 || col < 0 || row >= dim || col >= dim) {
    throw std::invalid_argument("transition: level out of range");
  }
  M m = M::Zero(dim, dim);
  m(row, col) = Scalar(1);
  return BasicOperator<Scalar>(SpaceLayout({dim}), std::move(m));
}

// ---------------------------------------------------------------------------
// Partial trace

namespace detail {

// Splits flat indices of `layout` into (kept, traced) flat indices.
inline std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    const SpaceLayout& layout, std::span<const std::size_t> keep) {
  std::vector<bool> kept(layout.factors(), false);
  for (std::size_t k : keep) {
    if (k >= layout.factors()) throw std::invalid_argument("partial_trace: invalid factor index");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate factor index");
    kept[k] = true;
  }
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep is empty");

  const Index total = layout.total();
  std::vector<Index> keep_idx(static_cast<std::size_t>(total));
  std::vector<Index> trace_idx(static_cast<std::size_t>(total));
  std::vector<Index> digits(layout.factors());
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    for (std::size_t k = layout.factors(); k-- > 0;) {
      digits[k] = rem % layout.factor(k);
      rem /= layout.factor(k);
    }
    Index kf = 0;
    for (std::size_t k : keep) kf = kf * layout.factor(k) + digits[k];
    Index tf = 0;
    for (std::size_t k = 0; k < layout.factors(); ++k) {
      if (!kept[k]) tf = tf * layout.factor(k) + digits[k];
    }
    keep_idx[static_cast<std::size_t>(flat)] = kf;
    trace_idx[static_cast<std::size_t>(flat)] = tf;
  }
  return {std::move(keep_idx), std::move(trace_idx)};
}

}  // namespace detail

/// Reduced operator on the `keep` factors (in the order listed).
template <typename Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicDensityMatrix<Scalar>& rho,
                                         std::span<const std::size_t> keep) {
  const SpaceLayout reduced = rho.layout().subset(keep);
  if (reduced.factors() == rho.layout().factors()) {
    // Pure reordering is not needed by callers; only identity order is accepted.
    if (!std::is_sorted(keep.begin(), keep.end())) {
      throw std::invalid_argument("partial_trace: keeping every factor requires sorted order");
    }
    return rho;
  }
  auto [kidx, tidx] = detail::split_indices(rho.layout(), keep);
  using M = typename BasicDensityMatrix<Scalar>::Matrix;
  M out = M::Zero(reduced.total(), reduced.total());
  const Index total = rho.dim();
  for (Index i = 0; i < total; ++i) {
    for (Index j = 0; j < total; ++j) {
      if (tidx[static_cast<std::size_t>(i)] != tidx[static_cast<std::size_t>(j)]) continue;
      out(kidx[static_cast<std::size_t>(i)], kidx[static_cast<std::size_t>(j)]) += rho(i, j);
    }
  }
  return BasicDensityMatrix<Scalar>(reduced, std::move(out));
}

template <typename Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicDensityMatrix<Scalar>& rho,
                                         std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Reduced state of |psi><psi| without forming the full projector.
template <typename Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicStateVector<Scalar>& psi,
                                         std::span<const std::size_t> keep) {
  const SpaceLayout reduced = psi.layout().subset(keep);
  auto [kidx, tidx] = detail::split_indices(psi.layout(), keep);
  const Index nk = reduced.total();
  const Index nt = psi.dim() / nk;
  using M = typename BasicDensityMatrix<Scalar>::Matrix;
  M amp = M::Zero(nk, nt);
  for (Index i = 0; i < psi.dim(); ++i) {
    amp(kidx[static_cast<std::size_t>(i)], tidx[static_cast<std::size_t>(i)]) = psi(i);
  }
  return BasicDensityMatrix<Scalar>(reduced, amp * amp.adjoint());
}

template <typename Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicStateVector<Scalar>& psi,
                                         std::initializer_list<std::size_t> keep) {
  return partial_trace(psi, std::span<const std::size_t>(keep.begin(), keep.size()));
}

// ---------------------------------------------------------------------------
// Matrix exponential

/// exp(scale * m) by scaling and squaring with a degree-13 Pade approximant.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar scale) {
  using Scalar = typename Derived::Scalar;
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() != m.cols()) throw std::invalid_argument("expm: matrix must be square");
  if (!m.allFinite() || !std::isfinite(std::abs(scale))) {
    throw std::invalid_argument("expm: non-finite input");
  }
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const Index n = m.rows();
  M a = scale * m;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    a /= Scalar(std::ldexp(1.0, squarings));
  }
  const M id = M::Identity(n, n);
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  const M u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                    b[3] * a2 + b[1] * id;
  const M u = a * u_inner;
  const M v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
              b[0] * id;
  M r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

template <typename Scalar>
BasicOperator<Scalar> expm(const BasicOperator<Scalar>& h, Scalar scale) {
  return BasicOperator<Scalar>(h.layout(), expm(h.matrix(), scale));
}

// ---------------------------------------------------------------------------
// Expectation values

template <typename Scalar>
Scalar expectation(const BasicOperator<Scalar>& op, const BasicStateVector<Scalar>& psi) {
  detail::require_same(op.layout(), psi.layout(), "expectation");
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

template <typename Scalar>
Scalar expectation(const BasicOperator<Scalar>& op, const BasicDensityMatrix<Scalar>& rho) {
  detail::require_same(op.layout(), rho.layout(), "expectation");
  // tr(A rho) = sum_ij A_ij rho_ji
  return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

}  // namespace gatesim
