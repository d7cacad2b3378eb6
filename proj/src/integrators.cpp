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

#include <array>
#include <cmath>
#include <complex>

#include "cqed/detail/ode.hpp"

namespace cqed::detail {

void phi_functions(std::complex<double> z, std::complex<double>& phi1,
                   std::complex<double>& phi2, std::complex<double>& phi3) {
  if (std::abs(z) < 1.0) {
    // phi_k(z) = sum_m z^m / (m + k)!
    std::complex<double> s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::complex<double> zm = 1.0;
    double f1 = 1.0, f2 = 0.5, f3 = 1.0 / 6.0;  // 1/(m+k)! at m = 0
    for (int m = 0; m < 20; ++m) {
      s1 += zm * f1;
      s2 += zm * f2;
      s3 += zm * f3;
      zm *= z;
      f1 /= (m + 2);
      f2 /= (m + 3);
      f3 /= (m + 4);
    }
    phi1 = s1;
    phi2 = s2;
    phi3 = s3;
    return;
  }
  const std::complex<double> ez = std::exp(z);
  phi1 = (ez - 1.0) / z;
  phi2 = (phi1 - 1.0) / z;
  phi3 = (phi2 - 0.5) / z;
}

namespace {

struct EtdTable {
  double h = -1.0;
  Eigen::MatrixXcd e_full, e_half, q_half, f1, f2, f3;
};

void build_table(const Eigen::MatrixXcd& linear, double h, EtdTable& tab) {
  const Eigen::Index r = linear.rows(), c = linear.cols();
  tab.h = h;
  tab.e_full.resize(r, c);
  tab.e_half.resize(r, c);
  tab.q_half.resize(r, c);
  tab.f1.resize(r, c);
  tab.f2.resize(r, c);
  tab.f3.resize(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      const std::complex<double> z = h * linear(i, j);
      std::complex<double> p1, p2, p3, q1, q2, q3;
      phi_functions(z, p1, p2, p3);
      phi_functions(0.5 * z, q1, q2, q3);
      tab.e_full(i, j) = std::exp(z);
      tab.e_half(i, j) = std::exp(0.5 * z);
      tab.q_half(i, j) = 0.5 * h * q1;
      tab.f1(i, j) = h * (p1 - 3.0 * p2 + 4.0 * p3);
      tab.f2(i, j) = h * 2.0 * (p2 - 2.0 * p3);
      tab.f3(i, j) = h * (4.0 * p3 - p2);
    }
  }
}

class EtdStepper {
 public:
  EtdStepper(const Eigen::MatrixXcd& linear, const MatrixRhs& nonlinear)
      : linear_(linear), nonlinear_(nonlinear) {}

  const EtdTable& table(double h) {
    for (auto& t : cache_) {
      if (t.h == h) return t;
    }
    EtdTable& slot = cache_[next_slot_];
    next_slot_ = (next_slot_ + 1) % cache_.size();
    build_table(linear_, h, slot);
    return slot;
  }

  // One Cox-Matthews step from y with precomputed N(y).
  void step(const EtdTable& tab, const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& ny,
            Eigen::MatrixXcd& out, OdeStats& stats) {
    a_ = tab.e_half.cwiseProduct(y) + tab.q_half.cwiseProduct(ny);
    nonlinear_(a_, na_);
    b_ = tab.e_half.cwiseProduct(y) + tab.q_half.cwiseProduct(na_);
    nonlinear_(b_, nb_);
    c_ = tab.e_half.cwiseProduct(a_) + tab.q_half.cwiseProduct(2.0 * nb_ - ny);
    nonlinear_(c_, nc_);
    stats.rhs_evals += 3;
    out = tab.e_full.cwiseProduct(y) + tab.f1.cwiseProduct(ny) +
          tab.f2.cwiseProduct(na_ + nb_) + tab.f3.cwiseProduct(nc_);
  }

  void eval(const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out, OdeStats& stats) {
    nonlinear_(y, out);
    ++stats.rhs_evals;
  }

 private:
  const Eigen::MatrixXcd& linear_;
  const MatrixRhs& nonlinear_;
  std::array<EtdTable, 4> cache_;
  std::size_t next_slot_ = 0;
  Eigen::MatrixXcd a_, b_, c_, na_, nb_, nc_;
};

// Smallest count of the form 2^k or 3 * 2^k that is >= x, so the step sizes
// within an output interval come from a short list and tables are reused.
long quantized_substeps(double x) {
  long n = 1;
  while (static_cast<double>(n) < x - 1e-9) {
    n = (n & (n - 1)) == 0 && n >= 2 ? n / 2 * 3 : (n % 3 == 0 ? n / 3 * 4 : n * 2);
  }
  return n;
}

}  // namespace

OdeStats exponential_rk4(
    const Eigen::MatrixXcd& linear, const MatrixRhs& nonlinear, Eigen::MatrixXcd y,
    std::span<const double> times, const OdeControl& ctl,
    const std::function<void(Eigen::MatrixXcd&)>& post_step,
    const std::function<void(std::size_t, const Eigen::MatrixXcd&)>& output) {
  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 4.0;
  OdeStats stats;
  output(0, y);
  if (times.size() < 2) return stats;

  EtdStepper stepper(linear, nonlinear);
  Eigen::MatrixXcd ny, full, half, nhalf, two_half, diff;
  const double span_len = times.back() - times.front();
  double h_prop = ctl.initial_step > 0.0 ? ctl.initial_step : span_len / 1000.0;
  double t = times.front();

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t_out = times[k];
    double remaining = t_out - t;
    long substeps = quantized_substeps(remaining / (1.2 * h_prop));
    double h = remaining / static_cast<double>(substeps);
    while (substeps > 0) {
      if (stats.accepted + stats.rejected >= ctl.max_steps) {
        throw_stiff(t, h, "maximum number of steps exceeded");
      }
      if (h < 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span_len)) {
        throw_stiff(t, h, "step size underflow");
      }
      stepper.eval(y, ny, stats);
      stepper.step(stepper.table(h), y, ny, full, stats);
      const EtdTable& half_tab = stepper.table(0.5 * h);
      stepper.step(half_tab, y, ny, half, stats);
      stepper.eval(half, nhalf, stats);
      stepper.step(half_tab, half, nhalf, two_half, stats);
      diff = (two_half - full) / 15.0;
      const double en = scaled_error(diff, y, two_half, ctl.rel_tol, ctl.abs_tol);
      if (en <= 1.0 && std::isfinite(en)) {
        post_step(two_half);
        std::swap(y, two_half);
        ++stats.accepted;
        --substeps;
        remaining -= h;
        t = substeps == 0 ? t_out : t_out - remaining;
        const double fac =
            std::clamp(kSafety * std::pow(std::max(en, 1e-10), -0.2), kMinFactor, kMaxFactor);
        h_prop = h * fac;
        // An accepted step size is kept for the rest of the interval; it
        // only grows at the next output time.
      } else {
        ++stats.rejected;
        const double fac = std::isfinite(en)
                               ? std::max(kMinFactor, kSafety * std::pow(en, -0.2))
                               : kMinFactor;
        h_prop = h * std::min(fac, 0.9);
        substeps = std::max(1L, static_cast<long>(std::ceil(remaining / h_prop - 1e-9)));
        h = remaining / static_cast<double>(substeps);
      }
    }
    output(k, y);
  }
  return stats;
}

}  // namespace cqed::detail
