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

#include "cqed/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/detail/ode.hpp"
#include "cqed/error.hpp"
#include "cqed/observables.hpp"

namespace cqed {

void CoolingParams::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("kappa", "kappa must be positive");
  if (photon_cutoff < 2) throw ConfigError("photon_cutoff", "photon cutoff must be at least 2");
  if (!std::isfinite(eta) || !std::isfinite(delta) || !std::isfinite(dispersive_shift)) {
    throw ConfigError("params", "parameters must be finite");
  }
}

LindbladModel build_full_cooling_model(const CoolingParams& p) {
  p.validate();
  const MomentumLadder& lad = p.ladder;
  const OperatorMatrix a = fock_annihilation(p.photon_cutoff);
  const OperatorMatrix n = fock_number(p.photon_cutoff);
  const OperatorMatrix id_at = OperatorMatrix::identity(lad.space());
  const OperatorMatrix id_ph = OperatorMatrix::identity(a.space());
  const OperatorMatrix cos1 = cos_kx(lad);

  OperatorMatrix h = tensor(kinetic(lad), id_ph);
  h -= tensor(id_at, n) * cplx(p.delta);
  if (p.dispersive_shift != 0.0) h += tensor(cos2_kx(lad), n) * cplx(p.dispersive_shift);
  h += tensor(cos1, a + a.adjoint()) * cplx(p.eta);
  return LindbladModel(std::move(h), {Dissipator{p.kappa, tensor(id_at, a), "cavity loss"}});
}

std::pair<cplx, cplx> alpha_pm(const CoolingParams& p, int n) {
  if (std::abs(n) > p.ladder.n_max()) {
    throw Error(ErrorKind::kShape, "momentum index outside the ladder");
  }
  const double wr = p.ladder.recoil();
  const cplx half_eta(0.5 * p.eta, 0.0);
  const cplx minus = half_eta / cplx(p.delta + 2.0 * n * wr - wr, p.kappa);
  const cplx plus = half_eta / cplx(p.delta - 2.0 * n * wr - wr, p.kappa);
  return {minus, plus};
}

OperatorMatrix build_alpha_operator(const CoolingParams& p) {
  const MomentumLadder& lad = p.ladder;
  const auto dim = static_cast<Eigen::Index>(lad.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = -lad.n_max(); n <= lad.n_max(); ++n) {
    const auto [am, ap] = alpha_pm(p, n);
    const auto col = static_cast<Eigen::Index>(lad.index(n));
    if (n > -lad.n_max()) m(col - 1, col) = am;
    if (n < lad.n_max()) m(col + 1, col) = ap;
  }
  return OperatorMatrix(lad.space(), std::move(m));
}

LindbladModel build_atom_only_cooling_model(const CoolingParams& p) {
  p.validate();
  const double ratio = std::abs(p.eta) / p.kappa;
  if (ratio > kWeakCouplingLimit) {
    std::ostringstream os;
    os << "|eta|/kappa = " << ratio << " exceeds the weak-coupling limit "
       << kWeakCouplingLimit;
    throw Error(ErrorKind::kRegime, os.str());
  }
  const OperatorMatrix alpha = build_alpha_operator(p);
  const OperatorMatrix cos1 = cos_kx(p.ladder);
  OperatorMatrix coupling = alpha.adjoint() * cos1;
  coupling += coupling.adjoint();
  OperatorMatrix h = kinetic(p.ladder) + coupling * cplx(0.5 * p.eta);
  return LindbladModel(std::move(h), {Dissipator{p.kappa, alpha, "cavity-mediated recoil"}});
}

Eigen::MatrixXd rate_matrix(const CoolingParams& p) {
  const MomentumLadder& lad = p.ladder;
  const auto dim = static_cast<Eigen::Index>(lad.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = -lad.n_max(); n <= lad.n_max(); ++n) {
    const auto [am, ap] = alpha_pm(p, n);
    const double rm = 2.0 * p.kappa * std::norm(am);
    const double rp = 2.0 * p.kappa * std::norm(ap);
    const auto c = static_cast<Eigen::Index>(lad.index(n));
    m(c, c) = -(rm + rp);
    if (n > -lad.n_max()) m(c - 1, c) = rm;
    if (n < lad.n_max()) m(c + 1, c) = rp;
  }
  return m;
}

GaussianAnsatzCoefficients gaussian_ansatz(const CoolingParams& p) {
  if (!(p.delta < 0.0)) {
    throw Error(ErrorKind::kNoCooling, "no cooling for Delta >= 0");
  }
  const double wr = p.ladder.recoil();
  const double d2k2 = p.delta * p.delta + p.kappa * p.kappa;
  const double eta2 = p.eta * p.eta;
  GaussianAnsatzCoefficients c;
  c.gamma_c = wr * eta2 * (-8.0 * p.delta * p.kappa) / (d2k2 * d2k2);
  c.h = wr * eta2 * p.kappa / d2k2;
  c.E_ss = d2k2 / (8.0 * std::abs(p.delta));
  return c;
}

Eigen::VectorXd detailed_balance_steady_state(const CoolingParams& p) {
  if (!(p.delta < -0.5 * p.ladder.recoil())) {
    throw Error(ErrorKind::kNonNormalizable,
                "stationary distribution is not normalizable for Delta >= -recoil/2");
  }
  const MomentumLadder& lad = p.ladder;
  const int nmax = lad.n_max();
  // log Pi_{n+1} = log Pi_n + log r_+(n) - log r_-(n+1)
  std::vector<double> logpi(static_cast<std::size_t>(nmax) + 1, 0.0);
  for (int n = 0; n < nmax; ++n) {
    const double rp = std::norm(alpha_pm(p, n).second);
    const double rm = std::norm(alpha_pm(p, n + 1).first);
    logpi[static_cast<std::size_t>(n) + 1] =
        logpi[static_cast<std::size_t>(n)] + std::log(rp) - std::log(rm);
  }
  Eigen::VectorXd pi(static_cast<Eigen::Index>(lad.dim()));
  for (int n = -nmax; n <= nmax; ++n) {
    pi(static_cast<Eigen::Index>(lad.index(n))) =
        std::exp(logpi[static_cast<std::size_t>(std::abs(n))]);
  }
  return pi / pi.sum();
}

Eigen::VectorXd thermal_distribution(const MomentumLadder& ladder, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature", "temperature must be positive");
  Eigen::VectorXd pi(static_cast<Eigen::Index>(ladder.dim()));
  for (int n = -ladder.n_max(); n <= ladder.n_max(); ++n) {
    pi(static_cast<Eigen::Index>(ladder.index(n))) =
        std::exp(-double(n) * n * ladder.recoil() / temperature);
  }
  return pi / pi.sum();
}

DensityState thermal_state(const MomentumLadder& ladder, double temperature) {
  return DensityState::diagonal(ladder.space(), thermal_distribution(ladder, temperature));
}

RateTrajectory evolve_rate_equations(const CoolingParams& p, const Eigen::VectorXd& pi0,
                                     std::span<const double> t_grid, double rel_tol,
                                     double abs_tol) {
  if (static_cast<std::size_t>(pi0.size()) != p.ladder.dim()) {
    throw Error(ErrorKind::kShape, "initial populations do not match the ladder");
  }
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw Error(ErrorKind::kConfig, "time grid must start at 0");
  }
  const Eigen::MatrixXd m = rate_matrix(p);
  const double total0 = pi0.sum();
  RateTrajectory out;
  out.times.assign(t_grid.begin(), t_grid.end());
  out.populations.reserve(t_grid.size());
  detail::OdeControl ctl;
  ctl.rel_tol = rel_tol;
  ctl.abs_tol = abs_tol;
  detail::dormand_prince45(
      [&m](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy.noalias() = m * y; },
      Eigen::VectorXd(pi0), t_grid, ctl, [](Eigen::VectorXd&) {},
      [&](std::size_t, const Eigen::VectorXd& y) {
        out.max_leakage = std::max(out.max_leakage, std::abs(total0 - y.sum()));
        out.populations.push_back(y);
      });
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kWarn: return "warn";
    case Verdict::kFail: return "fail";
  }
  return "fail";
}

Verdict grade(double value) {
  if (value < 0.1) return Verdict::kPass;
  if (value < 0.3) return Verdict::kWarn;
  return Verdict::kFail;
}

Verdict ValidityReport::worst() const {
  Verdict w = Verdict::kPass;
  for (const auto& item : items) w = std::max(w, item.verdict);
  return w;
}

ValidityReport weak_coupling_validity(const CoolingParams& p, const OperatorMatrix& state) {
  const OperatorMatrix rho = state.space().factors().size() > 1
                                 ? reduce_to(state, kMomentumLabel)
                                 : state;
  if (rho.dim() != p.ladder.dim()) {
    throw Error(ErrorKind::kShape, "state does not live on the cooling ladder");
  }
  ValidityReport r;
  auto add = [&r](std::string name, double value) {
    r.items.push_back(Diagnostic{std::move(name), value, grade(value)});
  };
  add("photon_number", lab_frame_photon_number(rho, build_alpha_operator(p)));
  add("eta_over_kappa", std::abs(p.eta) / p.kappa);
  add("dispersive_shift_over_kappa",
      std::abs(p.dispersive_shift * expectation(cos2_kx(p.ladder), rho).real()) / p.kappa);
  const double gamma = p.delta < 0.0 ? gaussian_ansatz(p).gamma_c : 0.0;
  add("timescale_ratio", gamma / p.kappa);
  return r;
}

}  // namespace cqed
