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

// Acceptance suite: one PASS/FAIL line per criterion. The long benchmark
// runs go through the scenario runner and are judged from the files it
// writes (CSV series, spectra.json, manifest.json).
//
//   cqed_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cqed/bose_hubbard.hpp"
#include "cqed/cooling.hpp"
#include "cqed/error.hpp"
#include "cqed/observables.hpp"
#include "cqed/scenario.hpp"
#include "cqed/spectral.hpp"

using namespace cqed;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

fs::path g_work;

// Runs a shipped config into work/<name> and returns the manifest.
json run_config(const std::string& name) {
  const auto config = load_config(fs::path(CQED_CONFIG_DIR) / (name + ".json"));
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_scenario(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run(config, out, g_work / name, wall);
  std::ifstream in(g_work / name / "manifest.json");
  return json::parse(in);
}

ObservableSeries series(const std::string& run, const std::string& key) {
  return read_csv(g_work / run / (key + ".csv"));
}

std::vector<cplx> spectrum(const json& spectra, const std::string& tier, const char* key = "tiers") {
  std::vector<cplx> v;
  for (const auto& pair : spectra[key][tier]) v.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  return v;
}

// Largest distance from a point of `a` to its nearest neighbour in `b`.
double max_nearest(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (const cplx x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx y : b) best = std::min(best, std::abs(x - y));
    m = std::max(m, best);
  }
  return m;
}

double max_pairwise(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  using big = boost::multiprecision::cpp_bin_float_50;
  Outcome o;
  double worst = 0.0;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  std::vector<std::array<double, 3>> sets{{1, -20, 20}, {1, -20, 5}, {0.3, -7.5, 41}};
  for (int k = 0; k < 50; ++k) sets.push_back({u(rng) / 50.0, -u(rng), u(rng)});
  for (const auto& [eta, delta, kappa] : sets) {
    CoolingParams p;
    p.eta = eta;
    p.delta = delta;
    p.kappa = kappa;
    const auto got = gaussian_ansatz(p);
    const big e(eta), d(delta), k(kappa), s = d * d + k * k;
    const big gamma = e * e * (-8 * d * k) / (s * s);
    const big h = e * e * k / s;
    const big ess = s / (8 * abs(d));
    auto rel = [](double x, const big& ref) { return static_cast<double>(abs((big(x) - ref) / ref)); };
    worst = std::max({worst, rel(got.gamma_c, gamma), rel(got.h, h), rel(got.E_ss, ess), rel(got.h / got.gamma_c, ess)});
  }
  o.require(worst <= 1e-12, "closed forms vs 50-digit evaluation, max rel " + fmt("%.2e", worst));
  double minimum = 0.0;
  for (double kappa : {0.5, 5.0, 20.0, 33.3, 250.0}) {
    CoolingParams p;
    p.kappa = kappa;
    p.delta = -kappa;
    minimum = std::max(minimum, std::abs(gaussian_ansatz(p).E_ss / (kappa / 4.0) - 1.0));
  }
  o.require(minimum <= 4 * std::numeric_limits<double>::epsilon(),
            "E_ss = kappa/4 at Delta = -kappa, rel " + fmt("%.1e", minimum));
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (const std::string set : {"fig2a_cooling", "fig2b_cooling"}) {
    const json m = run_config(set);
    const auto full = series(set, "full/E_kin");
    const auto atom = series(set, "atom_only/E_kin");
    const auto cmp = compare_series(full, atom, 0.05);
    o.require(cmp.pass, set + ": full vs atom-only E_kin max rel " + fmt("%.2e", cmp.max_relative_deviation));

    auto monotone = [](const ObservableSeries& s) {
      for (std::size_t k = 1; k < s.values.size(); ++k)
        if (s.values[k].real() > s.values[k - 1].real() * (1.0 + 1e-9)) return false;
      return true;
    };
    o.require(monotone(full) && monotone(atom), set + ": monotone cooling");

    const double target = m["diagnostics"]["rate_equation"]["E_kin_detailed_balance"].get<double>();
    const double ef = full.values.back().real(), ea = atom.values.back().real();
    const double off = std::max(std::abs(ef / target - 1.0), std::abs(ea / target - 1.0));
    o.require(off <= 0.2, set + ": final E_kin " + fmt("%.3f", ef) + " vs detailed balance " +
                              fmt("%.3f", target) + " (rel " + fmt("%.3f", off) + ")");

    double kmax = 0.0;
    for (const auto& v : series(set, "full/kurtosis").values) kmax = std::max(kmax, v.real());
    o.require(kmax > 3.05, set + ": max kurtosis " + fmt("%.4f", kmax));
    o.require(m["diagnostics"]["full"]["trace_drift"].get<double>() <= 1e-8, set + ": trace drift " +
              fmt("%.1e", m["diagnostics"]["full"]["trace_drift"].get<double>()));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  CoolingParams p;
  const Eigen::VectorXd pi = detailed_balance_steady_state(p);
  const Eigen::VectorXd r = rate_matrix(p) * pi;
  const double residual = r.segment(1, r.size() - 2).cwiseAbs().maxCoeff();
  o.require(residual <= 1e-12, "interior residual " + fmt("%.1e", residual));
  double asym = 0.0;
  for (int n = 1; n <= p.ladder.n_max(); ++n) {
    const double a = pi(Eigen::Index(p.ladder.index(n))), b = pi(Eigen::Index(p.ladder.index(-n)));
    asym = std::max(asym, std::abs(a - b) / std::max(a, b));
  }
  o.require(asym <= 1e-12, "+-p asymmetry " + fmt("%.1e", asym));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 20; n <= 40; ++n, ++m) {
    const double x = std::log(double(n)), y = std::log(pi(Eigen::Index(p.ladder.index(n))));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double expected = 2.0 * p.delta / p.ladder.recoil();
  o.require(std::abs(slope / expected - 1.0) <= 0.15,
            "tail slope " + fmt("%.2f", slope) + " vs " + fmt("%.0f", expected));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const BHParams p;
  const LatticeFockBasis basis(p.L, p.N);
  long num = 0;
  for (const auto& occ : basis.states()) {
    long s = 0;
    for (int j = 0; j < p.L; ++j) s += (j % 2 == 0 ? -1 : 1) * occ[j];
    num += s * s;
  }
  const long den = long(basis.dim()) * p.N * p.N;
  o.require(num * 5 == den * 3, "exact sum " + std::to_string(num) + "/" + std::to_string(basis.dim()) + "/" +
                                    std::to_string(p.N * p.N));
  const OperatorMatrix theta = build_theta_bh(p);
  const double v = expectation(theta * theta, DensityState::maximally_mixed(basis.space()).matrix()).real() /
                   double(p.N * p.N);
  o.require(std::abs(v - 0.6) <= 1e-15, "computed " + fmt("%.17g", v));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (auto [eta, want] : std::vector<std::pair<double, double>>{{100, 0.04}, {300, 0.36}}) {
    BHParams p;
    p.eta = eta;
    const double eps = epsilon_report(p, 0.0).eps_fig3;
    o.require(std::abs(eps - want) <= 1e-12, "eta=" + fmt("%.0f", eta) + " -> " + fmt("%.15g", eps));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  {
    const json m = run_config("fig3a_spectrum_eps004");
    std::ifstream in(g_work / "fig3a_spectrum_eps004" / "spectra.json");
    const json s = json::parse(in);
    const auto full = spectrum(s, "full"), ad = spectrum(s, "adiabatic"), dia = spectrum(s, "diabatic");
    const double d = std::max({max_pairwise(full, ad), max_pairwise(full, dia), max_pairwise(ad, dia)});
    o.require(full.size() == 10 && d <= 0.05, "eps=0.04: 10 slowest pairwise max |dlambda| " + fmt("%.4f", d) + " J");
    const json& conv = s["convergence"]["full"];
    o.require(conv["status"] == "converged",
              "cutoff " + std::to_string(conv["photon_cutoff"].get<int>() - 1) + " vs +1 shift " +
                  fmt("%.1e", conv["max_shift"].get<double>()));
  }
  {
    const json m = run_config("fig3a_spectrum_eps036");
    std::ifstream in(g_work / "fig3a_spectrum_eps036" / "spectra.json");
    const json s = json::parse(in);
    const auto full = spectrum(s, "full"), ad = spectrum(s, "adiabatic"), dia = spectrum(s, "diabatic");
    // Each slow eigenvalue of one side must have a partner in the other side's spectrum.
    const auto bracket = [&](const std::vector<cplx>& slow, const std::string& tier) {
      return std::max(max_nearest(full, spectrum(s, tier, "all")), max_nearest(slow, spectrum(s, "full", "all")));
    };
    const double da = bracket(ad, "adiabatic"), dd = bracket(dia, "diabatic");
    o.require(da <= 0.2 && dd <= 0.2,
              "eps=0.36: slow bundle nearest-partner full vs adiabatic " + fmt("%.4f", da) + " J, vs diabatic " +
                  fmt("%.4f", dd) + " J (sorted pairwise " + fmt("%.4f", max_pairwise(full, ad)) + ", " +
                  fmt("%.4f", max_pairwise(full, dia)) + ")");
    const json& conv = s["convergence"]["full"];
    o.require(conv.contains("max_shift") && conv["max_shift"].get<double>() <= 0.2,
              "eps=0.36 cutoff check shift " +
                  (conv.contains("max_shift") ? fmt("%.1e", conv["max_shift"].get<double>()) : std::string("n/a")));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (double eta : {100.0, 300.0}) {
    BHParams p;
    p.eta = eta;
    const double d = (build_alpha1_bh(p).matrix() - alpha1_from_commutator(p).matrix()).cwiseAbs().maxCoeff();
    o.require(d <= 1e-12, "eta=" + fmt("%.0f", eta) + " max entry diff " + fmt("%.1e", d));
  }
  return o;
}

// First time the relative deviation leaves the band; +inf if it never does.
double first_crossing(const ObservableSeries& tier, const ObservableSeries& ref, double band) {
  for (std::size_t k = 0; k < ref.times.size(); ++k) {
    const double r = ref.values[k].real();
    if (std::abs(tier.values[k].real() - r) > band * std::abs(r)) return ref.times[k];
  }
  return std::numeric_limits<double>::infinity();
}

Outcome criterion8() {
  Outcome o;
  const std::string run = "fig3_dynamics_eps004";
  const json m = run_config(run);
  const auto full = series(run, "full/theta_sq_per_N2");
  const double t_end = full.times.back();
  const double ta = first_crossing(series(run, "adiabatic/theta_sq_per_N2"), full, 0.05);
  const double td = first_crossing(series(run, "diabatic/theta_sq_per_N2"), full, 0.05);
  auto show = [t_end](double t) { return std::isinf(t) ? "none up to " + fmt("%g", t_end) : fmt("%g", t); };
  o.require(std::isfinite(ta) && std::min(td, t_end) >= 2.0 * ta,
            "5% band crossing: adiabatic " + show(ta) + ", diabatic " + show(td) + " (t in 1/J)");

  BHParams p;
  const double transient = 3.0 / p.kappa;
  const auto n_full = series(run, "full/photon_number");
  for (const std::string tier : {"adiabatic", "diabatic"}) {
    const auto n = series(run, tier + "/photon_number");
    double worst = 0.0;
    for (std::size_t k = 0; k < n_full.times.size(); ++k) {
      if (n_full.times[k] < transient) continue;
      worst = std::max(worst, std::abs(n.values[k].real() / n_full.values[k].real() - 1.0));
    }
    o.require(worst <= 0.10, tier + " photon number vs full after 3/kappa, max rel " + fmt("%.3f", worst));
  }
  o.require(m["diagnostics"]["full"]["boson_number_drift"].get<double>() <= 1e-8, "boson number drift " +
            fmt("%.1e", m["diagnostics"]["full"]["boson_number_drift"].get<double>()));
  return o;
}

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937 rng(5);
  const SpaceDescriptor space(std::vector<SpaceDescriptor::Factor>{{"a", 2}, {"b", 3}});
  const Eigen::MatrixXcd h = random_matrix(6, rng);
  const LindbladModel model(OperatorMatrix(space, 0.5 * (h + h.adjoint())),
                            {{0.4, OperatorMatrix(space, random_matrix(6, rng)), "j1"},
                             {0.9, OperatorMatrix(space, random_matrix(6, rng)), "j2"}});
  Eigen::MatrixXcd x = random_matrix(6, rng);
  Eigen::MatrixXcd r0 = x * x.adjoint();
  r0 /= r0.trace();
  const DensityState rho0(OperatorMatrix(space, r0));
  std::vector<double> t;
  for (int k = 0; k <= 30; ++k) t.push_back(0.2 * k);

  double drift = 0.0, herm = 0.0, minev = 1.0, recon = 0.0;
  const auto dec = spectral_decompose(model);
  for (Integrator method : {Integrator::kDormandPrince45, Integrator::kExponentialRk4}) {
    EvolveOptions opt;
    opt.method = method;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-12;
    const auto tr = evolve(model, rho0, t, opt);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& r = tr.states[k];
      drift = std::max(drift, std::abs(r.trace() - 1.0));
      herm = std::max(herm, r.hermiticity_error());
      minev = std::min(minev, min_eigenvalue(r));
      recon = std::max(recon, (dec.propagate(rho0.matrix(), t[k]) - r).norm());
    }
  }
  o.require(drift <= 1e-8, "trace drift " + fmt("%.1e", drift));
  o.require(herm <= 1e-12, "hermiticity " + fmt("%.1e", herm));
  o.require(minev >= -1e-8, "min eigenvalue " + fmt("%.1e", minev));
  o.require(recon <= 1e-6, "spectral vs integrated " + fmt("%.1e", recon));

  double re_max = -1.0;
  std::vector<LindbladModel> models{model};
  BHParams bh;
  bh.photon_cutoff = 3;
  models.push_back(build_adiabatic_bh_model(bh));
  models.push_back(build_diabatic_bh_model(bh));
  models.push_back(build_full_bh_model(bh));
  CoolingParams cp;
  cp.ladder = MomentumLadder(8);
  cp.photon_cutoff = 3;
  models.push_back(build_full_cooling_model(cp));
  models.push_back(build_atom_only_cooling_model(cp));
  for (const auto& mdl : models) re_max = std::max(re_max, liouvillian_eigenvalues(mdl).real().maxCoeff());
  o.require(re_max <= 1e-9, "max Re lambda over " + std::to_string(models.size()) + " spectra " + fmt("%.1e", re_max));

  {
    const double kappa = 0.7;
    const LindbladModel cav(fock_number(4) * cplx(20.0), {{kappa, fock_annihilation(4), "loss"}});
    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(4);
    one(1) = 1.0;
    const NamedObservable n{"n", [](const OperatorMatrix& r) { return cplx(lab_frame_photon_number(r)); }};
    double err = 0.0;
    for (Integrator method : {Integrator::kDormandPrince45, Integrator::kExponentialRk4}) {
      EvolveOptions opt;
      opt.method = method;
      const auto tr = evolve(cav, DensityState::pure(cav.space(), one), t, opt, std::span(&n, 1));
      for (std::size_t k = 0; k < t.size(); ++k)
        err = std::max(err, std::abs(tr.observable("n")[k].real() - std::exp(-2.0 * kappa * t[k])));
    }
    o.require(err <= 1e-7, "pure decay " + fmt("%.1e", err));
  }
  {
    BHParams p;
    p.photon_cutoff = 4;
    const auto hs = build_bh_hamiltonian(p);
    const auto gs = ground_state(hs);
    const SpaceDescriptor photon("photon", 4);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(4);
    vac(0) = 1.0;
    const auto start = tensor(DensityState::pure(hs.space(), gs.vector), DensityState::pure(photon, vac));
    const auto ops = site_operators(LatticeFockBasis(p.L, p.N));
    OperatorMatrix number = OperatorMatrix::zero(hs.space());
    for (const auto& d : ops.density) number += d;
    const auto nf = tensor(number, OperatorMatrix::identity(photon));
    const std::vector<double> tb{0.0, 0.1, 0.2, 0.4};
    const auto tr = evolve(build_full_bh_model(p), start, tb);
    double dn = 0.0;
    for (const auto& r : tr.states) dn = std::max(dn, std::abs(expectation(nf, r).real() - double(p.N)));
    o.require(dn <= 1e-8, "boson number " + fmt("%.1e", dn));
  }
  {
    BHParams p;
    p.J = 0.0;
    const LatticeFockBasis basis(p.L, p.N);
    Eigen::VectorXd pops = Eigen::VectorXd::LinSpaced(Eigen::Index(basis.dim()), 1.0, 3.0);
    pops /= pops.sum();
    const auto mu = DensityState::diagonal(basis.space(), pops);
    const double r = std::max(rhs(build_adiabatic_bh_model(p), mu.matrix()).norm(),
                              rhs(build_diabatic_bh_model(p), mu.matrix()).norm());
    o.require(r <= 1e-13, "J=0 Fock-diagonal |L mu| " + fmt("%.1e", r));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "cqed_acceptance";
  fs::create_directories(g_work);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {3, criterion3}, {4, criterion4}, {5, criterion5}, {7, criterion7},
      {9, criterion9}, {6, criterion6}, {8, criterion8}, {2, criterion2}};
  std::vector<std::string> lines(10);
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    lines[id] = "criterion " + std::to_string(id) + ": " + (o.pass ? "PASS" : "FAIL") + "  " + o.detail +
                "  (" + fmt("%.1f", secs) + " s)";
    std::printf("%s\n", lines[id].c_str());
    std::fflush(stdout);
  }
  std::printf("\nsummary (criterion order):\n");
  for (int id = 1; id <= 9; ++id) std::printf("%s\n", lines[id].c_str());
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
