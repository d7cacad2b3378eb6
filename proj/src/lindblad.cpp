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

#include "cqed/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "cqed/detail/ode.hpp"
#include "cqed/error.hpp"

namespace cqed {

LindbladModel::LindbladModel(OperatorMatrix hamiltonian, std::vector<Dissipator> dissipators)
    : hamiltonian_(std::move(hamiltonian)), dissipators_(std::move(dissipators)) {
  const double scale = std::max(1.0, hamiltonian_.matrix().cwiseAbs().maxCoeff());
  if (hamiltonian_.hermiticity_error() > 1e-10 * scale) {
    throw Error(ErrorKind::kNumerical, "Hamiltonian is not Hermitian");
  }
  for (const auto& d : dissipators_) {
    if (!(d.rate >= 0.0)) {
      throw Error(ErrorKind::kConfig,
                  "dissipator '" + d.label + "' has negative rate");
    }
    if (!(d.jump.space() == hamiltonian_.space())) {
      throw Error(ErrorKind::kShape,
                  "dissipator '" + d.label + "' acts on a different space");
    }
  }
}

// ---------------------------------------------------------------------------
// DensityState

double min_eigenvalue(const OperatorMatrix& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityState::DensityState(OperatorMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.hermiticity_error() > 1e-10) {
    throw Error(ErrorKind::kNumerical, "density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - cplx(1.0)) > 1e-10) {
    std::ostringstream os;
    os << "density matrix trace is " << matrix_.trace().real() << ", expected 1";
    throw Error(ErrorKind::kNumerical, os.str());
  }
  if (min_eigenvalue(matrix_) < -1e-8) {
    throw Error(ErrorKind::kNumerical, "density matrix has a negative eigenvalue");
  }
}

DensityState DensityState::pure(const SpaceDescriptor& space, const Eigen::VectorXcd& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::kNumerical, "zero state vector");
  const Eigen::VectorXcd u = psi / n;
  return DensityState(OperatorMatrix(space, u * u.adjoint()));
}

DensityState DensityState::diagonal(const SpaceDescriptor& space,
                                    const Eigen::VectorXd& populations) {
  const double total = populations.sum();
  if (!(total > 0.0) || populations.minCoeff() < 0.0) {
    throw Error(ErrorKind::kNumerical, "populations must be non-negative with positive sum");
  }
  Eigen::MatrixXcd m = (populations / total).cast<cplx>().asDiagonal();
  return DensityState(OperatorMatrix(space, std::move(m)));
}

DensityState DensityState::maximally_mixed(const SpaceDescriptor& space) {
  OperatorMatrix id = OperatorMatrix::identity(space);
  id *= 1.0 / static_cast<double>(space.total_dim());
  return DensityState(std::move(id));
}

DensityState tensor(const DensityState& a, const DensityState& b) {
  return DensityState(tensor(a.matrix(), b.matrix()));
}

// ---------------------------------------------------------------------------
// Generator

OperatorMatrix rhs(const LindbladModel& model, const OperatorMatrix& rho) {
  if (!(rho.space() == model.space())) {
    throw Error(ErrorKind::kShape, "state and model act on different spaces");
  }
  const auto& H = model.hamiltonian().matrix();
  const auto& R = rho.matrix();
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd out = -i * (H * R - R * H);
  for (const auto& d : model.dissipators()) {
    const auto& J = d.jump.matrix();
    const Eigen::MatrixXcd JdJ = J.adjoint() * J;
    out += d.rate * (2.0 * J * R * J.adjoint() - JdJ * R - R * JdJ);
  }
  return OperatorMatrix(model.space(), std::move(out));
}

LindbladGenerator::Factor::Factor(const Eigen::MatrixXcd& m) {
  const auto nnz = (m.array() != cplx(0.0)).count();
  sparse_ = static_cast<double>(nnz) < 0.25 * static_cast<double>(m.size());
  if (sparse_) {
    sparse_matrix_ = m.sparseView();
    sparse_matrix_.makeCompressed();
  } else {
    dense_ = m;
  }
}

void LindbladGenerator::Factor::left_multiply(const Eigen::MatrixXcd& x,
                                              Eigen::MatrixXcd& out) const {
  if (sparse_) {
    out.noalias() = sparse_matrix_ * x;
  } else {
    out.noalias() = dense_ * x;
  }
}

namespace {

Eigen::MatrixXcd effective_hamiltonian(const LindbladModel& model) {
  Eigen::MatrixXcd k = model.hamiltonian().matrix();
  const cplx i(0.0, 1.0);
  for (const auto& d : model.dissipators()) {
    k -= i * d.rate * (d.jump.matrix().adjoint() * d.jump.matrix());
  }
  return k;
}

}  // namespace

LindbladGenerator::LindbladGenerator(const LindbladModel& model)
    : dim_(model.dim()),
      energy_diag_(model.hamiltonian().matrix().diagonal().real()),
      loss_diag_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dim()))),
      effective_(effective_hamiltonian(model)) {
  for (const auto& d : model.dissipators()) {
    if (d.rate == 0.0) continue;
    const auto& J = d.jump.matrix();
    loss_diag_ += d.rate * (J.adjoint() * J).diagonal().real();
    jumps_.emplace_back(d.rate, Factor(J));
  }
}

void LindbladGenerator::apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
  const cplx i(0.0, 1.0);
  // -i (K rho - rho K^dag), with rho K^dag = (K rho^dag)^dag
  effective_.left_multiply(rho, scratch_a_);
  out = -i * scratch_a_;
  effective_.left_multiply(rho.adjoint(), scratch_b_);
  out += i * scratch_b_.adjoint();
  for (const auto& [rate, J] : jumps_) {
    // J rho J^dag = J (J rho^dag)^dag
    J.left_multiply(rho.adjoint(), scratch_a_);
    J.left_multiply(scratch_a_.adjoint(), scratch_b_);
    out += (2.0 * rate) * scratch_b_;
  }
}

void LindbladGenerator::apply_hermitian(const Eigen::MatrixXcd& rho,
                                        Eigen::MatrixXcd& out) const {
  const cplx i(0.0, 1.0);
  effective_.left_multiply(rho, scratch_a_);
  out = -i * scratch_a_;
  out += i * scratch_a_.adjoint();
  for (const auto& [rate, J] : jumps_) {
    J.left_multiply(rho, scratch_a_);
    J.left_multiply(scratch_a_.adjoint(), scratch_b_);
    out += (2.0 * rate) * scratch_b_;
  }
}

Eigen::MatrixXcd LindbladGenerator::diagonal_part() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXcd out(d, d);
  const cplx i(0.0, 1.0);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      out(r, c) = -i * (energy_diag_(r) - energy_diag_(c)) - (loss_diag_(r) + loss_diag_(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Time evolution

namespace {

// Splitting for models on A (x) B whose jumps all have the form I (x) J_B and
// whose Hamiltonian's A-block-diagonal part is diag(e) (x) I + I (x) h_B. The
// linear part is then the full B generator plus the A energy differences;
// each (i, j) block of rho evolves under the same small superoperator M_B,
// diagonalised once as P D P^-1. The integrator works on W, whose column
// i + j*dA holds P^-1 vec(rho_ij). The remainder -i[V, rho] is traceless, so
// the scheme conserves the trace exactly.
struct SeparableSplit {
  Eigen::Index da = 0, db = 0;
  Eigen::VectorXd energies;
  // The B generator only couples |n><m| to |n+1><m+1|, so P is sparse.
  Eigen::SparseMatrix<cplx> p, p_inv;
  Eigen::VectorXcd modes;
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> coupling;  // V

  Eigen::MatrixXcd linear() const {
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd lin(db * db, da * da);
    for (Eigen::Index b = 0; b < da; ++b) {
      for (Eigen::Index a = 0; a < da; ++a) {
        lin.col(a + b * da) = modes.array() - i * (energies(a) - energies(b));
      }
    }
    return lin;
  }

  void to_modes(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& w, Eigen::MatrixXcd& z) const {
    z.resize(db * db, da * da);
    const cplx* src = rho.data();
    cplx* dst = z.data();
    for (std::size_t k = 0; k < layout.size(); ++k) dst[k] = src[layout[k]];
    w.noalias() = p_inv * z;
  }

  void from_modes(const Eigen::MatrixXcd& w, Eigen::MatrixXcd& rho, Eigen::MatrixXcd& z) const {
    z.noalias() = p * w;
    rho.resize(da * db, da * db);
    const cplx* src = z.data();
    cplx* dst = rho.data();
    for (std::size_t k = 0; k < layout.size(); ++k) dst[layout[k]] = src[k];
  }

  // Entry k of the (db^2 x da^2) block layout lives at rho.data()[layout[k]].
  std::vector<Eigen::Index> layout;
};

std::optional<SeparableSplit> separable_split(const LindbladModel& model) {
  const auto& factors = model.space().factors();
  if (factors.size() < 2) return std::nullopt;
  const auto db = static_cast<Eigen::Index>(factors.back().dim);
  const auto d = static_cast<Eigen::Index>(model.dim());
  const Eigen::Index da = d / db;
  const Eigen::MatrixXcd& H = model.hamiltonian().matrix();
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  SeparableSplit s;
  s.da = da;
  s.db = db;
  s.energies.resize(da);
  const Eigen::MatrixXcd h0 = H.block(0, 0, db, db);
  const Eigen::MatrixXcd id_b = Eigen::MatrixXcd::Identity(db, db);
  for (Eigen::Index a = 0; a < da; ++a) {
    const Eigen::MatrixXcd diff = H.block(a * db, a * db, db, db) - h0;
    s.energies(a) = diff.trace().real() / double(db);
    if ((diff - s.energies(a) * id_b).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  }

  std::vector<std::pair<double, Eigen::MatrixXcd>> jumps;
  for (const auto& diss : model.dissipators()) {
    if (diss.rate == 0.0) continue;
    const Eigen::MatrixXcd& J = diss.jump.matrix();
    const Eigen::MatrixXcd jb = J.block(0, 0, db, db);
    const double jtol = 1e-12 * std::max(1.0, J.cwiseAbs().maxCoeff());
    for (Eigen::Index b = 0; b < da; ++b) {
      for (Eigen::Index a = 0; a < da; ++a) {
        const auto blk = J.block(a * db, b * db, db, db);
        const double dev = a == b ? (blk - jb).cwiseAbs().maxCoeff() : blk.cwiseAbs().maxCoeff();
        if (dev > jtol) return std::nullopt;
      }
    }
    jumps.emplace_back(diss.rate, jb);
  }

  // M_B in column-stacking order.
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(db * db, db * db);
  auto add_kron = [db](Eigen::MatrixXcd& acc, cplx w, const Eigen::MatrixXcd& A,
                       const Eigen::MatrixXcd& B) {
    for (Eigen::Index r = 0; r < db; ++r) {
      for (Eigen::Index c = 0; c < db; ++c) acc.block(r * db, c * db, db, db) += (w * A(r, c)) * B;
    }
  };
  add_kron(m, -i, id_b, h0);
  add_kron(m, i, h0.transpose(), id_b);
  for (const auto& [rate, jb] : jumps) {
    const Eigen::MatrixXcd jdj = jb.adjoint() * jb;
    add_kron(m, 2.0 * rate, jb.conjugate(), jb);
    add_kron(m, -rate, id_b, jdj);
    add_kron(m, -rate, jdj.transpose(), id_b);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXcd p = es.eigenvectors();
  s.modes = es.eigenvalues();
  const Eigen::MatrixXcd p_inv = Eigen::PartialPivLU<Eigen::MatrixXcd>(p).inverse();
  const double cond = p.cwiseAbs().rowwise().sum().maxCoeff() *
                      p_inv.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(cond < 1e8)) return std::nullopt;
  s.p = p.sparseView(1.0, 1e-15);
  s.p_inv = p_inv.sparseView(1.0, 1e-15 * std::max(1.0, p_inv.cwiseAbs().maxCoeff()));
  const double mnorm = std::max(1.0, m.cwiseAbs().maxCoeff());
  const Eigen::MatrixXcd rebuilt =
      Eigen::MatrixXcd(s.p) * s.modes.asDiagonal() * Eigen::MatrixXcd(s.p_inv);
  if ((rebuilt - m).cwiseAbs().maxCoeff() > 1e-10 * mnorm) return std::nullopt;

  Eigen::MatrixXcd v = H;
  for (Eigen::Index a = 0; a < da; ++a) {
    v.block(a * db, a * db, db, db) -= h0 + s.energies(a) * id_b;
  }
  const Eigen::Index d_full = da * db;
  s.layout.resize(static_cast<std::size_t>(d_full * d_full));
  std::size_t k = 0;
  for (Eigen::Index b = 0; b < da; ++b) {
    for (Eigen::Index a = 0; a < da; ++a) {
      for (Eigen::Index m2 = 0; m2 < db; ++m2) {
        for (Eigen::Index n2 = 0; n2 < db; ++n2) {
          s.layout[k++] = (a * db + n2) + (b * db + m2) * d_full;
        }
      }
    }
  }
  s.coupling = v.sparseView(1.0, 1e-14 * scale);
  s.coupling.makeCompressed();
  return s;
}

}  // namespace

const std::vector<cplx>& Trajectory::observable(std::string_view name) const {
  for (const auto& [n, values] : observables) {
    if (n == name) return values;
  }
  throw Error(ErrorKind::kConfig, "trajectory has no observable '" + std::string(name) + "'");
}

Trajectory evolve(const LindbladModel& model, const DensityState& rho0,
                  std::span<const double> t_grid, const EvolveOptions& options,
                  std::span<const NamedObservable> observables) {
  if (!(rho0.space() == model.space())) {
    throw Error(ErrorKind::kShape, "initial state and model act on different spaces");
  }
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw Error(ErrorKind::kConfig, "time grid must start at 0");
  }
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) {
      throw Error(ErrorKind::kConfig, "time grid must be strictly increasing");
    }
  }

  Trajectory traj;
  traj.times.assign(t_grid.begin(), t_grid.end());
  for (const auto& obs : observables) {
    traj.observables.emplace_back(obs.name, std::vector<cplx>(t_grid.size()));
  }
  if (options.store_states) traj.states.reserve(t_grid.size());

  const cplx trace0 = rho0.matrix().trace();
  const SpaceDescriptor space = model.space();
  auto record = [&](std::size_t k, const Eigen::MatrixXcd& rho) {
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(rho.trace() - trace0));
    OperatorMatrix op(space, rho);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      traj.observables[o].second[k] = observables[o].evaluate(op);
    }
    if (options.store_states) traj.states.push_back(std::move(op));
  };
  auto hermitize = [](Eigen::MatrixXcd& rho) {
    rho = (0.5 * (rho + rho.adjoint())).eval();
  };

  const LindbladGenerator gen(model);
  detail::OdeControl ctl;
  ctl.rel_tol = options.rel_tol;
  ctl.abs_tol = options.abs_tol;
  ctl.initial_step = options.initial_step;
  ctl.max_steps = options.max_steps;

  detail::OdeStats stats;
  if (options.method == Integrator::kDormandPrince45) {
    auto f = [&gen](const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
      gen.apply_hermitian(rho, out);
    };
    stats = detail::dormand_prince45(f, Eigen::MatrixXcd(rho0.matrix().matrix()), t_grid,
                                     ctl, hermitize, record);
  } else if (const auto split = separable_split(model)) {
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd rho_buf, z_buf, comm, comm_adj;
    auto back = [&](const Eigen::MatrixXcd& w) -> const Eigen::MatrixXcd& {
      split->from_modes(w, rho_buf, z_buf);
      return rho_buf;
    };
    detail::MatrixRhs nonlinear = [&](const Eigen::MatrixXcd& w, Eigen::MatrixXcd& out) {
      const Eigen::MatrixXcd& rho = back(w);
      comm.noalias() = split->coupling * rho;
      // -i[V, rho] = -i V rho + (-i V rho)^dag for Hermitian rho
      comm *= -i;
      comm_adj = comm.adjoint();
      comm += comm_adj;
      split->to_modes(comm, out, z_buf);
    };
    Eigen::MatrixXcd w0;
    split->to_modes(rho0.matrix().matrix(), w0, z_buf);
    const Eigen::MatrixXcd linear = split->linear();
    stats = detail::exponential_rk4(
        linear, nonlinear, std::move(w0), t_grid, ctl,
        [&](Eigen::MatrixXcd& w) {
          Eigen::MatrixXcd rho = back(w);
          hermitize(rho);
          split->to_modes(rho, w, z_buf);
        },
        [&](std::size_t k, const Eigen::MatrixXcd& w) { record(k, back(w)); });
  } else {
    const Eigen::MatrixXcd linear = gen.diagonal_part();
    detail::MatrixRhs nonlinear = [&gen, &linear](const Eigen::MatrixXcd& rho,
                                                  Eigen::MatrixXcd& out) {
      gen.apply_hermitian(rho, out);
      out -= linear.cwiseProduct(rho);
    };
    stats = detail::exponential_rk4(linear, nonlinear, rho0.matrix().matrix(), t_grid, ctl,
                                    hermitize, record);
  }
  traj.accepted_steps = stats.accepted;
  traj.rejected_steps = stats.rejected;

  if (traj.max_trace_drift > options.max_trace_drift) {
    std::ostringstream os;
    os << "trace drifted by " << traj.max_trace_drift << " (limit "
       << options.max_trace_drift << "); tighten tolerances or enlarge cutoffs";
    throw Error(ErrorKind::kIntegrationAccuracy, os.str());
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Superoperator

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Eigen::Index dim) {
  if (v.size() != dim * dim) {
    throw Error(ErrorKind::kShape, "vector length does not match dim^2");
  }
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

Eigen::MatrixXcd liouvillian_matrix(const LindbladModel& model, std::size_t max_dim) {
  const auto d = static_cast<Eigen::Index>(model.dim());
  const auto n = static_cast<std::size_t>(d * d);
  if (n > max_dim) {
    throw Error(ErrorKind::kSize,
                "Liouvillian would be " + std::to_string(n) + "-dimensional (cap " +
                    std::to_string(max_dim) + "); reduce the cutoffs");
  }
  const cplx i(0.0, 1.0);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd& H = model.hamiltonian().matrix();

  // Kronecker product A (x) B into the accumulator with a scalar weight.
  auto add_kron = [d](Eigen::MatrixXcd& acc, cplx w, const Eigen::MatrixXcd& A,
                      const Eigen::MatrixXcd& B) {
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const cplx a = A(r, c);
        if (a == cplx(0.0)) continue;
        acc.block(r * d, c * d, d, d) += (w * a) * B;
      }
    }
  };

  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d * d, d * d);
  add_kron(L, -i, id, H);
  add_kron(L, i, H.transpose(), id);
  for (const auto& diss : model.dissipators()) {
    if (diss.rate == 0.0) continue;
    const Eigen::MatrixXcd& J = diss.jump.matrix();
    const Eigen::MatrixXcd JdJ = J.adjoint() * J;
    add_kron(L, 2.0 * diss.rate, J.conjugate(), J);
    add_kron(L, -diss.rate, id, JdJ);
    add_kron(L, -diss.rate, JdJ.transpose(), id);
  }
  return L;
}

}  // namespace cqed
