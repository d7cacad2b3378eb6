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

// Hilbert-space descriptors and the elementary operators used by every model:
// truncated photon Fock space, the p = n*hbar*k momentum ladder and the
// fixed-particle-number bosonic lattice.

#ifndef CQED_HILBERT_HPP
#define CQED_HILBERT_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqed {

using cplx = std::complex<double>;

/// Canonical factor labels. Partial traces and observables locate factors
/// by label, so builders always use these.
inline constexpr std::string_view kPhotonLabel = "photon";
inline constexpr std::string_view kMomentumLabel = "momentum";
inline constexpr std::string_view kLatticeLabel = "lattice";

/// Ordered tensor-product structure of a Hilbert space. The left-most factor
/// varies slowest in the composite basis index.
class SpaceDescriptor {
 public:
  struct Factor {
    std::string label;
    std::size_t dim = 0;
    bool operator==(const Factor&) const = default;
  };

  SpaceDescriptor() = default;
  explicit SpaceDescriptor(std::vector<Factor> factors);
  SpaceDescriptor(std::string label, std::size_t dim);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t total_dim() const { return total_dim_; }

  /// Position of the factor with this label, if any.
  std::optional<std::size_t> find(std::string_view label) const;

  /// Concatenation of factor lists; labels must stay unique.
  static SpaceDescriptor product(const SpaceDescriptor& left,
                                 const SpaceDescriptor& right);

  bool operator==(const SpaceDescriptor&) const = default;

 private:
  std::vector<Factor> factors_;
  std::size_t total_dim_ = 0;
};

/// Dense complex square matrix tagged with the space it acts on.
class OperatorMatrix {
 public:
  OperatorMatrix(SpaceDescriptor space, Eigen::MatrixXcd entries);

  static OperatorMatrix zero(const SpaceDescriptor& space);
  static OperatorMatrix identity(const SpaceDescriptor& space);

  const SpaceDescriptor& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return entries_; }
  std::size_t dim() const { return space_.total_dim(); }
  cplx operator()(Eigen::Index row, Eigen::Index col) const {
    return entries_(row, col);
  }

  OperatorMatrix adjoint() const;
  cplx trace() const { return entries_.trace(); }
  /// Largest entrywise deviation from Hermiticity.
  double hermiticity_error() const;
  bool is_hermitian(double tol) const { return hermiticity_error() <= tol; }
  /// Frobenius norm.
  double norm() const { return entries_.norm(); }

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(cplx scalar);

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) {
    return a += b;
  }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) {
    return a -= b;
  }
  friend OperatorMatrix operator*(OperatorMatrix a, cplx s) { return a *= s; }
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix& a,
                                  const OperatorMatrix& b);

 private:
  SpaceDescriptor space_;
  Eigen::MatrixXcd entries_;
};

/// Kronecker product; the result's space is the concatenated factor list.
OperatorMatrix tensor(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Photon annihilation operator on a Fock space truncated to `dim` levels.
OperatorMatrix fock_annihilation(std::size_t dim,
                                 std::string label = std::string(kPhotonLabel));
/// a^dagger a on the same truncated space.
OperatorMatrix fock_number(std::size_t dim,
                           std::string label = std::string(kPhotonLabel));

/// Momentum grid p = n*hbar*k, n in [-n_max, n_max]. Units: hbar = 1, k = 1,
/// energies in units of the recoil frequency when recoil = 1.
class MomentumLadder {
 public:
  explicit MomentumLadder(int n_max, double recoil = 1.0);

  int n_max() const { return n_max_; }
  double recoil() const { return recoil_; }
  std::size_t dim() const { return static_cast<std::size_t>(2 * n_max_ + 1); }
  /// Basis index of momentum quantum number n.
  std::size_t index(int n) const;
  int momentum_number(std::size_t index) const {
    return static_cast<int>(index) - n_max_;
  }
  SpaceDescriptor space() const {
    return SpaceDescriptor(std::string(kMomentumLabel), dim());
  }

 private:
  int n_max_;
  double recoil_;
};

OperatorMatrix cos_kx(const MomentumLadder& ladder);
OperatorMatrix cos2_kx(const MomentumLadder& ladder);
/// Diagonal p^2/2m = n^2 * recoil.
OperatorMatrix kinetic(const MomentumLadder& ladder);

/// Fixed-N Fock basis of N bosons on L sites, tuples in ascending
/// lexicographic order.
class LatticeFockBasis {
 public:
  LatticeFockBasis(int sites, int bosons);

  int sites() const { return sites_; }
  int bosons() const { return bosons_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<std::vector<int>>& states() const { return states_; }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  /// Index of an occupation tuple; nullopt if it is not in the block.
  std::optional<std::size_t> index_of(const std::vector<int>& occupation) const;
  SpaceDescriptor space() const {
    return SpaceDescriptor(std::string(kLatticeLabel), dim());
  }

 private:
  int sites_;
  int bosons_;
  std::vector<std::vector<int>> states_;
};

/// Number-conserving single-site and nearest-neighbour operators on the
/// fixed-N block. Bare b_j would leave the block and are never built.
struct SiteOperators {
  std::vector<OperatorMatrix> density;  ///< n_j, j = 0..L-1
  std::vector<OperatorMatrix> hop;      ///< b_j^dagger b_{j+1}, j = 0..L-2
};

SiteOperators site_operators(const LatticeFockBasis& basis);
/// b_i^dagger b_j inside the block (any i, j).
OperatorMatrix hopping(const LatticeFockBasis& basis, int i, int j);
OperatorMatrix number_operator(const LatticeFockBasis& basis, int site);

}  // namespace cqed

#endif  // CQED_HILBERT_HPP
