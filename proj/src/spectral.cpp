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

#include "cqed/spectral.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqed/error.hpp"

namespace cqed {

SpectralDecomposition::SpectralDecomposition(SpaceDescriptor space,
                                             Eigen::VectorXcd eigenvalues,
                                             Eigen::MatrixXcd right, Eigen::MatrixXcd left,
                                             bool defective)
    : space_(std::move(space)),
      eigenvalues_(std::move(eigenvalues)),
      right_(std::move(right)),
      left_(std::move(left)),
      defective_(defective) {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  if (right_.rows() != d * d || left_.rows() != d * d ||
      right_.cols() != eigenvalues_.size() || left_.cols() != eigenvalues_.size()) {
    throw Error(ErrorKind::kShape, "mode matrices do not match the space");
  }
}

OperatorMatrix SpectralDecomposition::right_mode(std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  return OperatorMatrix(space_, unvectorize(right_.col(static_cast<Eigen::Index>(k)), d));
}

OperatorMatrix SpectralDecomposition::left_mode(std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  return OperatorMatrix(space_, unvectorize(left_.col(static_cast<Eigen::Index>(k)), d));
}

Eigen::VectorXcd SpectralDecomposition::coefficients(const OperatorMatrix& rho0) const {
  if (!(rho0.space() == space_)) {
    throw Error(ErrorKind::kShape, "state acts on a different space");
  }
  return left_.adjoint() * vectorize(rho0.matrix());
}

OperatorMatrix SpectralDecomposition::propagate(const OperatorMatrix& rho0, double t) const {
  const Eigen::VectorXcd c = coefficients(rho0);
  const Eigen::VectorXcd w = c.array() * (eigenvalues_.array() * t).exp();
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  return OperatorMatrix(space_, unvectorize(right_ * w, d));
}

namespace {

double infinity_norm(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

[[noreturn]] void throw_lapack(const char* routine, lapack_int info) {
  std::ostringstream os;
  os << routine << " failed with info = " << info;
  throw Error(ErrorKind::kNumerical, os.str());
}

// Groups indices whose eigenvalues are within tol of each other (transitive
// closure), scanning in order of real part.
std::vector<std::vector<Eigen::Index>> clusters(const Eigen::VectorXcd& values, double tol) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return values(a).real() < values(b).real(); });

  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto root = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      i = parent[static_cast<std::size_t>(i)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
    }
    return i;
  };
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const cplx la = values(order[a]);
      const cplx lb = values(order[b]);
      if (lb.real() - la.real() >= tol) break;
      if (std::abs(la - lb) < tol) parent[static_cast<std::size_t>(root(order[a]))] = root(order[b]);
    }
  }
  std::vector<std::vector<Eigen::Index>> groups(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(root(i))].push_back(i);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

double condition_number(const Eigen::MatrixXcd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::VectorXcd eigenvalues_of(Eigen::MatrixXcd matrix) {
  const auto n = static_cast<lapack_int>(matrix.rows());
  Eigen::VectorXcd w(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, matrix.data(), n,
                                        w.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw_lapack("zgeev", info);
  return w;
}

Eigen::VectorXcd liouvillian_eigenvalues(const LindbladModel& model, std::size_t max_dim) {
  return eigenvalues_of(liouvillian_matrix(model, max_dim));
}

SpectralDecomposition spectral_decompose(const LindbladModel& model,
                                         const SpectralOptions& options) {
  Eigen::MatrixXcd L = liouvillian_matrix(model, options.max_dim);
  const double norm = infinity_norm(L);
  const auto n = static_cast<lapack_int>(L.rows());
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vl(n, n);
  Eigen::MatrixXcd vr(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', n, L.data(), n, w.data(),
                                        vl.data(), n, vr.data(), n);
  if (info != 0) throw_lapack("zgeev", info);
  L.resize(0, 0);

  bool defective = false;
  // zgeev returns unit-norm columns; scale the left ones so u_k^H v_k = 1.
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx s = vl.col(k).dot(vr.col(k));
    if (!(std::abs(s) * options.gram_condition_cap > 1.0)) defective = true;
    if (std::abs(s) > 0.0) vl.col(k) /= std::conj(s);
  }

  const double tol = options.degeneracy_rel * std::max(norm, 1e-300);
  for (const auto& group : clusters(w, tol)) {
    if (group.size() < 2) continue;
    const auto m = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXcd u(n, m);
    Eigen::MatrixXcd v(n, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      u.col(a) = vl.col(group[static_cast<std::size_t>(a)]);
      v.col(a) = vr.col(group[static_cast<std::size_t>(a)]);
    }
    const Eigen::MatrixXcd gram = u.adjoint() * v;
    if (condition_number(gram) > options.gram_condition_cap) {
      defective = true;
      continue;
    }
    // (U G^{-H})^H V = G^{-1} G = I
    const Eigen::MatrixXcd repaired =
        u * gram.adjoint().partialPivLu().solve(Eigen::MatrixXcd::Identity(m, m));
    for (Eigen::Index a = 0; a < m; ++a) vl.col(group[static_cast<std::size_t>(a)]) = repaired.col(a);
  }

  return SpectralDecomposition(model.space(), std::move(w), std::move(vr), std::move(vl),
                               defective);
}

std::vector<cplx> slowest_eigenvalues(const Eigen::VectorXcd& values, std::size_t count) {
  std::vector<cplx> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  if (v.size() > count) v.resize(count);
  return v;
}

double biorthonormality_error(const SpectralDecomposition& decomposition) {
  const Eigen::MatrixXcd g = decomposition.left().adjoint() * decomposition.right();
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

DensityState steady_state(const LindbladModel& model, std::size_t max_dim) {
  const Eigen::MatrixXcd L = liouvillian_matrix(model, max_dim);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(L, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double threshold = 1e-8 * std::max(1.0, s(0));
  Eigen::Index null_dim = 0;
  for (Eigen::Index k = s.size() - 1; k >= 0 && s(k) < threshold; --k) ++null_dim;
  if (null_dim == 0) {
    std::ostringstream os;
    os << "Liouvillian has no null vector (smallest singular value " << s(s.size() - 1)
       << ")";
    throw Error(ErrorKind::kNoSteadyState, os.str());
  }
  const Eigen::MatrixXcd null = svd.matrixV().rightCols(null_dim);
  const auto d = static_cast<Eigen::Index>(model.dim());
  const Eigen::VectorXcd mixed = vectorize(Eigen::MatrixXcd::Identity(d, d)) / double(d);
  Eigen::MatrixXcd rho = unvectorize(null * (null.adjoint() * mixed), d);
  rho = (0.5 * (rho + rho.adjoint())).eval();
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw Error(ErrorKind::kNoSteadyState, "null space carries no trace");
  }
  rho /= tr;
  return DensityState(OperatorMatrix(model.space(), std::move(rho)));
}

}  // namespace cqed
