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

// Lindblad master equations d(rho)/dt = -i[H, rho] + sum_n rate_n D[J_n] rho
// with the factor-2 dissipator D[J] rho = 2 J rho J^dag - {J^dag J, rho}.
// A photon mode with jump (kappa, a) therefore loses occupation as
// exp(-2 kappa t).

#ifndef CQED_LINDBLAD_HPP
#define CQED_LINDBLAD_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cqed/hilbert.hpp"

namespace cqed {

struct Dissipator {
  double rate = 0.0;
  OperatorMatrix jump;
  std::string label;
};

class LindbladModel {
 public:
  /// Throws if H is not Hermitian (relative tolerance 1e-10), a rate is
  /// negative, or an operator lives on a different space.
  explicit LindbladModel(OperatorMatrix hamiltonian,
                         std::vector<Dissipator> dissipators = {});

  const OperatorMatrix& hamiltonian() const { return hamiltonian_; }
  const std::vector<Dissipator>& dissipators() const { return dissipators_; }
  const SpaceDescriptor& space() const { return hamiltonian_.space(); }
  std::size_t dim() const { return hamiltonian_.dim(); }

 private:
  OperatorMatrix hamiltonian_;
  std::vector<Dissipator> dissipators_;
};

/// Hermitian, unit-trace, positive semidefinite operator (checked on
/// construction: 1e-10 for Hermiticity and trace, -1e-8 for the spectrum).
class DensityState {
 public:
  explicit DensityState(OperatorMatrix matrix);

  static DensityState pure(const SpaceDescriptor& space, const Eigen::VectorXcd& psi);
  static DensityState diagonal(const SpaceDescriptor& space,
                               const Eigen::VectorXd& populations);
  static DensityState maximally_mixed(const SpaceDescriptor& space);

  const OperatorMatrix& matrix() const { return matrix_; }
  const SpaceDescriptor& space() const { return matrix_.space(); }
  std::size_t dim() const { return matrix_.dim(); }

 private:
  OperatorMatrix matrix_;
};

DensityState tensor(const DensityState& a, const DensityState& b);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const OperatorMatrix& rho);

/// Generator applied to an operator (operator form, no superoperator).
OperatorMatrix rhs(const LindbladModel& model, const OperatorMatrix& rho);

/// Sparse-aware precompiled form of a model, reused across many rhs calls.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const LindbladModel& model);

  std::size_t dim() const { return dim_; }
  /// out = L(rho) for arbitrary rho.
  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  /// Same, assuming rho is Hermitian (roughly half the work).
  void apply_hermitian(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
  /// Entrywise rates of the basis-diagonal part of L:
  /// -i(H_ii - H_jj) - sum_n rate_n ((J^dag J)_ii + (J^dag J)_jj).
  Eigen::MatrixXcd diagonal_part() const;

 private:
  class Factor {
   public:
    explicit Factor(const Eigen::MatrixXcd& m);
    void left_multiply(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const;

   private:
    bool sparse_;
    Eigen::MatrixXcd dense_;
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> sparse_matrix_;
  };

  std::size_t dim_;
  Eigen::VectorXd energy_diag_;
  Eigen::VectorXd loss_diag_;
  Factor effective_;  // H - i sum_n rate_n J^dag J
  std::vector<std::pair<double, Factor>> jumps_;
  mutable Eigen::MatrixXcd scratch_a_, scratch_b_;
};

enum class Integrator {
  kDormandPrince45,  ///< adaptive embedded RK 5(4), PI step control
  kExponentialRk4,   ///< exponential RK4 on the diagonal part, step doubling
};

struct EvolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  Integrator method = Integrator::kDormandPrince45;
  double initial_step = 0.0;  ///< 0 selects automatically
  std::size_t max_steps = 20'000'000;
  double max_trace_drift = 1e-6;
  bool store_states = true;
};

struct NamedObservable {
  std::string name;
  std::function<cplx(const OperatorMatrix&)> evaluate;
};

struct Trajectory {
  std::vector<double> times;
  /// Raw integrator output at each time (Hermitian; trace not renormalised).
  /// Empty when EvolveOptions::store_states is false.
  std::vector<OperatorMatrix> states;
  std::vector<std::pair<std::string, std::vector<cplx>>> observables;
  double max_trace_drift = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const std::vector<cplx>& observable(std::string_view name) const;
};

/// Integrates the master equation and samples it on t_grid (t_grid[0] = 0,
/// strictly increasing). Hermiticity is restored after every accepted step;
/// the trace is not renormalised and a drift above max_trace_drift throws.
Trajectory evolve(const LindbladModel& model, const DensityState& rho0,
                  std::span<const double> t_grid, const EvolveOptions& options = {},
                  std::span<const NamedObservable> observables = {});

/// Column-stacking vectorisation, vec(AXB) = (B^T (x) A) vec(X).
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim);

inline constexpr std::size_t kDefaultSuperoperatorCap = 6400;

/// Dense d^2 x d^2 Liouvillian. Throws kSize if d^2 exceeds max_dim.
Eigen::MatrixXcd liouvillian_matrix(const LindbladModel& model,
                                    std::size_t max_dim = kDefaultSuperoperatorCap);

}  // namespace cqed

#endif  // CQED_LINDBLAD_HPP
