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

// Time steppers shared by the Lindblad and rate-equation evolutions.

#ifndef CQED_DETAIL_ODE_HPP
#define CQED_DETAIL_ODE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <sstream>

#include "cqed/error.hpp"

namespace cqed::detail {

struct OdeControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;
  std::size_t max_steps = 20'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// max_i |err_i| / (atol + rtol * max(|y0_i|, |y1_i|))
template <class State>
double scaled_error(const State& err, const State& y0, const State& y1,
                    double rel_tol, double abs_tol) {
  const auto scale =
      (y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array() * rel_tol + abs_tol).eval();
  return (err.cwiseAbs().array() / scale).maxCoeff();
}

[[noreturn]] inline void throw_stiff(double t, double h, const char* why) {
  std::ostringstream os;
  os << "integrator stalled at t = " << t << " (step " << h << "): " << why;
  throw StiffnessError(t, os.str());
}

/// Dormand-Prince 5(4) with FSAL and PI step-size control. Steps are clamped
/// to land exactly on every output time. `f(y, dydt)` evaluates the rhs,
/// `post_step(y)` may project an accepted state, `output(k, y)` receives the
/// state at times[k].
template <class State, class Rhs, class PostStep, class Output>
OdeStats dormand_prince45(Rhs&& f, State y, std::span<const double> times,
                          const OdeControl& ctl, PostStep&& post_step,
                          Output&& output) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  (void)c2, (void)c3, (void)c4, (void)c5;  // autonomous systems only
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 10.0;
  constexpr double kBeta = 0.04, kAlpha = 0.2 - 0.75 * kBeta;

  OdeStats stats;
  output(std::size_t{0}, y);
  if (times.size() < 2) return stats;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y, ynew = y,
        err = y;
  f(y, k1);
  ++stats.rhs_evals;

  double t = times.front();
  const double span_len = times.back() - times.front();
  double h = ctl.initial_step;
  if (h <= 0.0) {
    // Hairer-Wanner starting step.
    const auto sc = (y.cwiseAbs().array() * ctl.rel_tol + ctl.abs_tol).eval();
    const double d0 = (y.cwiseAbs().array() / sc).maxCoeff();
    const double d1 = (k1.cwiseAbs().array() / sc).maxCoeff();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span_len);
    tmp = y + h0 * k1;
    f(tmp, k2);
    ++stats.rhs_evals;
    const double d2 = ((k2 - k1).cwiseAbs().array() / sc).maxCoeff() / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 1.0 / 5.0);
    h = std::min(100 * h0, h1);
  }
  double err_old = 1e-4;
  bool rejected_last = false;

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t_out = times[k];
    while (t < t_out) {
      if (stats.accepted + stats.rejected >= ctl.max_steps) {
        throw_stiff(t, h, "maximum number of steps exceeded");
      }
      const double h_min =
          64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span_len);
      if (h < h_min) throw_stiff(t, h, "step size underflow");
      bool clamped = false;
      double h_try = h;
      if (t + h_try >= t_out - h_min) {
        h_try = t_out - t;
        clamped = true;
      }

      tmp = y + h_try * (a21 * k1);
      f(tmp, k2);
      tmp = y + h_try * (a31 * k1 + a32 * k2);
      f(tmp, k3);
      tmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
      f(tmp, k4);
      tmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(tmp, k5);
      tmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(tmp, k6);
      ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(ynew, k7);
      stats.rhs_evals += 6;
      err = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = scaled_error(err, y, ynew, ctl.rel_tol, ctl.abs_tol);

      if (en <= 1.0 && std::isfinite(en)) {
        const double e = std::max(en, 1e-10);
        double fac = kSafety * std::pow(e, -kAlpha) * std::pow(err_old, kBeta);
        fac = std::clamp(fac, kMinFactor, kMaxFactor);
        if (rejected_last) fac = std::min(fac, 1.0);
        err_old = e;
        t = clamped ? t_out : t + h_try;
        post_step(ynew);
        std::swap(y, ynew);
        std::swap(k1, k7);
        ++stats.accepted;
        rejected_last = false;
        const double h_next = h_try * fac;
        h = clamped ? std::max(h, h_next) : h_next;
      } else {
        ++stats.rejected;
        rejected_last = true;
        const double fac = std::isfinite(en)
                               ? std::max(kMinFactor, kSafety * std::pow(en, -kAlpha))
                               : kMinFactor;
        h = h_try * std::min(fac, 1.0);
      }
    }
    output(k, y);
  }
  return stats;
}

using MatrixRhs = std::function<void(const Eigen::MatrixXcd&, Eigen::MatrixXcd&)>;

/// Exponential (Cox-Matthews) RK4 for y' = linear .* y + N(y) with an
/// entrywise linear part; adaptive through step doubling. Every output
/// interval is split into equal sub-steps so the phi-function tables are
/// reused.
OdeStats exponential_rk4(const Eigen::MatrixXcd& linear, const MatrixRhs& nonlinear,
                         Eigen::MatrixXcd y, std::span<const double> times,
                         const OdeControl& ctl,
                         const std::function<void(Eigen::MatrixXcd&)>& post_step,
                         const std::function<void(std::size_t, const Eigen::MatrixXcd&)>& output);

/// phi_1, phi_2, phi_3 of z, stable near z = 0.
void phi_functions(std::complex<double> z, std::complex<double>& phi1, std::complex<double>& phi2, std::complex<double>& phi3);

}  // namespace cqed::detail

#endif  // CQED_DETAIL_ODE_HPP
