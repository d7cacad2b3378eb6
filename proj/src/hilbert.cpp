// Copyright 2026 The cqed Authors
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

#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "cqed/error.hpp"

namespace cqed {

SpaceDescriptor::SpaceDescriptor(std::vector<Factor> factors)
    : factors_(std::move(factors)), total_dim_(1) {
  if (factors_.empty()) {
    throw Error(ErrorKind::kInvalidDimension, "space needs at least one factor");
  }
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim == 0) {
      throw Error(ErrorKind::kInvalidDimension,
                  "factor '" + f.label + "' has zero dimension");
    }
    if (!seen.insert(f.label).second) {
      throw Error(ErrorKind::kShape, "duplicate factor label '" + f.label + "'");
    }
    total_dim_ *= f.dim;
  }
}

SpaceDescriptor::SpaceDescriptor(std::string label, std::size_t dim)
    : SpaceDescriptor(std::vector<Factor>{{std::move(label), dim}}) {}

std::optional<std::size_t> SpaceDescriptor::find(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  return std::nullopt;
}

SpaceDescriptor SpaceDescriptor::product(const SpaceDescriptor& left,
                                         const SpaceDescriptor& right) {
  std::vector<Factor> all = left.factors_;
  all.insert(all.end(), right.factors_.begin(), right.factors_.end());
  return SpaceDescriptor(std::move(all));
}

OperatorMatrix::OperatorMatrix(SpaceDescriptor space, Eigen::MatrixXcd entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  if (entries_.rows() != d || entries_.cols() != d) {
    throw Error(ErrorKind::kShape,
                "operator entries are " + std::to_string(entries_.rows()) + "x" +
                    std::to_string(entries_.cols()) + " but the space has dimension " +
                    std::to_string(d));
  }
}

OperatorMatrix OperatorMatrix::zero(const SpaceDescriptor& space) {
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  return OperatorMatrix(space, Eigen::MatrixXcd::Zero(d, d));
}

OperatorMatrix OperatorMatrix::identity(const SpaceDescriptor& space) {
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  return OperatorMatrix(space, Eigen::MatrixXcd::Identity(d, d));
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(space_, entries_.adjoint());
}

double OperatorMatrix::hermiticity_error() const {
  if (entries_.size() == 0) return 0.0;
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_space(const OperatorMatrix& a, const OperatorMatrix& b,
                        std::string_view what) {
  if (!(a.space() == b.space())) {
    throw Error(ErrorKind::kShape,
                std::string(what) + ": operands act on different spaces");
  }
}

}  // namespace

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  require_same_space(*this, other, "operator +");
  entries_ += other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  require_same_space(*this, other, "operator -");
  entries_ -= other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx scalar) {
  entries_ *= scalar;
  return *this;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a, b, "operator *");
  return OperatorMatrix(a.space(), a.matrix() * b.matrix());
}

OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  const Eigen::Index ra = A.rows(), rb = B.rows();
  Eigen::MatrixXcd out(ra * rb, ra * rb);
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < ra; ++j) {
      out.block(i * rb, j * rb, rb, rb) = A(i, j) * B;
    }
  }
  return OperatorMatrix(SpaceDescriptor::product(a.space(), b.space()),
                        std::move(out));
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b - b * a;
}

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  return a * b + b * a;
}

OperatorMatrix fock_annihilation(std::size_t dim, std::string label) {
  if (dim < 2) {
    throw Error(ErrorKind::kInvalidDimension,
                "Fock space needs at least 2 levels, got " + std::to_string(dim));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 1; j < d; ++j) a(j - 1, j) = std::sqrt(static_cast<double>(j));
  return OperatorMatrix(SpaceDescriptor(std::move(label), dim), std::move(a));
}

OperatorMatrix fock_number(std::size_t dim, std::string label) {
  if (dim < 2) {
    throw Error(ErrorKind::kInvalidDimension,
                "Fock space needs at least 2 levels, got " + std::to_string(dim));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) n(j, j) = static_cast<double>(j);
  return OperatorMatrix(SpaceDescriptor(std::move(label), dim), std::move(n));
}

// ---------------------------------------------------------------------------
// Momentum ladder

MomentumLadder::MomentumLadder(int n_max, double recoil)
    : n_max_(n_max), recoil_(recoil) {
  if (n_max < 1) {
    throw Error(ErrorKind::kInvalidDimension,
                "momentum ladder needs n_max >= 1, got " + std::to_string(n_max));
  }
  if (!(recoil > 0.0)) {
    throw Error(ErrorKind::kConfig, "recoil frequency must be positive");
  }
}

std::size_t MomentumLadder::index(int n) const {
  if (n < -n_max_ || n > n_max_) {
    throw Error(ErrorKind::kShape, "momentum index " + std::to_string(n) +
                                       " outside ladder of n_max " +
                                       std::to_string(n_max_));
  }
  return static_cast<std::size_t>(n + n_max_);
}

namespace {

// Symmetric coupling of every ladder state to its neighbour `shift` rungs
// away; couplings leaving the grid are dropped.
Eigen::MatrixXcd ladder_shift(std::size_t dim, std::size_t shift, double value) {
  const auto d = static_cast<Eigen::Index>(dim);
  const auto s = static_cast<Eigen::Index>(shift);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i + s < d; ++i) {
    m(i, i + s) = value;
    m(i + s, i) = value;
  }
  return m;
}

}  // namespace

OperatorMatrix cos_kx(const MomentumLadder& ladder) {
  return OperatorMatrix(ladder.space(), ladder_shift(ladder.dim(), 1, 0.5));
}

OperatorMatrix cos2_kx(const MomentumLadder& ladder) {
  Eigen::MatrixXcd m = ladder_shift(ladder.dim(), 2, 0.25);
  m.diagonal().setConstant(0.5);
  return OperatorMatrix(ladder.space(), std::move(m));
}

OperatorMatrix kinetic(const MomentumLadder& ladder) {
  const auto d = static_cast<Eigen::Index>(ladder.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double n = ladder.momentum_number(static_cast<std::size_t>(i));
    m(i, i) = n * n * ladder.recoil();
  }
  return OperatorMatrix(ladder.space(), std::move(m));
}

// ---------------------------------------------------------------------------
// Bosonic lattice

namespace {

void enumerate_occupations(int sites, int remaining, std::vector<int>& current,
                           std::vector<std::vector<int>>& out) {
  const auto pos = static_cast<int>(current.size());
  if (pos == sites - 1) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    current.push_back(n);
    enumerate_occupations(sites, remaining - n, current, out);
    current.pop_back();
  }
}

}  // namespace

LatticeFockBasis::LatticeFockBasis(int sites, int bosons)
    : sites_(sites), bosons_(bosons) {
  if (sites < 1) {
    throw Error(ErrorKind::kInvalidDimension, "lattice needs at least one site");
  }
  if (bosons < 0) {
    throw Error(ErrorKind::kInvalidDimension, "boson number must be non-negative");
  }
  std::vector<int> current;
  current.reserve(static_cast<std::size_t>(sites));
  enumerate_occupations(sites, bosons, current, states_);
}

std::optional<std::size_t> LatticeFockBasis::index_of(
    const std::vector<int>& occupation) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), occupation);
  if (it == states_.end() || *it != occupation) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

OperatorMatrix number_operator(const LatticeFockBasis& basis, int site) {
  if (site < 0 || site >= basis.sites()) {
    throw Error(ErrorKind::kShape, "site index out of range");
  }
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    m(k, k) = basis.state(static_cast<std::size_t>(k))[static_cast<std::size_t>(site)];
  }
  return OperatorMatrix(basis.space(), std::move(m));
}

OperatorMatrix hopping(const LatticeFockBasis& basis, int i, int j) {
  if (i < 0 || j < 0 || i >= basis.sites() || j >= basis.sites()) {
    throw Error(ErrorKind::kShape, "site index out of range");
  }
  if (i == j) return number_operator(basis, i);
  const auto d = static_cast<Eigen::Index>(basis.dim());
  const auto si = static_cast<std::size_t>(i);
  const auto sj = static_cast<std::size_t>(j);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    std::vector<int> occ = basis.state(col);
    if (occ[sj] == 0) continue;
    const double amp = std::sqrt(static_cast<double>(occ[sj]) * (occ[si] + 1));
    occ[sj] -= 1;
    occ[si] += 1;
    const auto row = basis.index_of(occ);
    m(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) = amp;
  }
  return OperatorMatrix(basis.space(), std::move(m));
}

SiteOperators site_operators(const LatticeFockBasis& basis) {
  SiteOperators ops;
  for (int j = 0; j < basis.sites(); ++j) ops.density.push_back(number_operator(basis, j));
  for (int j = 0; j + 1 < basis.sites(); ++j) ops.hop.push_back(hopping(basis, j, j + 1));
  return ops;
}

}  // namespace cqed
