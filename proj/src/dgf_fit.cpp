/*
  Copyright 2026 The uwchan Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "least_squares.hpp"
#include "uwchan/channel_stats.hpp"

namespace uwchan {

double DgfFit::eval(double t) const noexcept {
  return c1 * t * std::exp(-c2 * t) + c3 * t * std::exp(-c4 * t);
}

namespace {

// Integral of u exp(-r u) over [k, k+1], stable for small r.
double gamma_bin(double r, double k) {
  double g1, g2;  // integrals of exp(-r u) and u exp(-r u) over [0, 1]
  if (r < 1e-3) {
    g1 = 1.0 - r / 2.0 + r * r / 6.0 - r * r * r / 24.0;
    g2 = 0.5 - r / 3.0 + r * r / 8.0 - r * r * r / 30.0;
  } else {
    g1 = -std::expm1(-r) / r;
    g2 = (g1 - std::exp(-r)) / r;
  }
  return std::exp(-r * k) * (k * g1 + g2);
}

}  // namespace

double DgfFit::bin_average(double t0, double t1) const noexcept {
  if (!(t1 > t0)) return eval(t0);
  // Scale to units of the bin so gamma_bin applies.
  const double w = t1 - t0;
  const double k = t0 / w;
  double s = 0.0;
  for (auto [a, c] : {std::pair{c1, c2}, std::pair{c3, c4}}) {
    if (a == 0.0) continue;
    s += a * w * gamma_bin(c * w, k);
  }
  return s;
}

double DgfFit::total_gain() const noexcept {
  if (time_bin <= 0.0) return 0.0;
  double g = 0.0;
  if (c2 > 0.0) g += c1 / (c2 * c2);
  if (c4 > 0.0) g += c3 / (c4 * c4);
  return g / time_bin;
}

double dgf_drms(const DgfFit& f) noexcept {
  // Moments of t exp(-c t): 1/c^2, 2/c^3, 6/c^4.
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (auto [a, c] : {std::pair{f.c1, f.c2}, std::pair{f.c3, f.c4}}) {
    if (c <= 0.0 || a == 0.0) continue;
    m0 += a / (c * c);
    m1 += 2.0 * a / (c * c * c);
    m2 += 6.0 * a / (c * c * c * c);
  }
  if (m0 <= 0.0) return 0.0;
  const double mean = m1 / m0;
  return std::sqrt(std::max(0.0, m2 / m0 - mean * mean));
}

namespace {

constexpr double kMinLogRate = -14.0;  // rates in units of 1/bin
constexpr double kMaxLogRate = 3.4;  // about 30 per bin

struct Projection {
  double a1 = 0.0;
  double a3 = 0.0;
  double ss = std::numeric_limits<double>::infinity();
};

class Problem {
 public:
  // Data are normalized to unit peak; amplitudes come back in that scale.
  Problem(std::span<const double> y, DgfSampling sampling)
      : y_(y.begin(), y.end()), sampling_(sampling) {
    scale_ = *std::max_element(y_.begin(), y_.end());
    for (double& v : y_) v /= scale_;
  }

  double scale() const noexcept { return scale_; }

  std::size_t size() const noexcept { return y_.size(); }

  void basis(double r, std::vector<double>& f) const {
    f.resize(y_.size());
    for (std::size_t k = 0; k < y_.size(); ++k) {
      const double kk = static_cast<double>(k);
      f[k] = sampling_ == DgfSampling::kBinAverage ? gamma_bin(r, kk)
                                                    : (kk + 0.5) * std::exp(-r * (kk + 0.5));
    }
  }

  // Non-negative least squares over the two amplitudes.
  Projection project(double r2, double r4) const {
    basis(r2, f1_);
    basis(r4, f2_);
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (std::size_t k = 0; k < y_.size(); ++k) {
      s11 += f1_[k] * f1_[k];
      s12 += f1_[k] * f2_[k];
      s22 += f2_[k] * f2_[k];
      b1 += f1_[k] * y_[k];
      b2 += f2_[k] * y_[k];
    }
    Projection best;
    auto consider = [&](double a1, double a3) {
      const double ss = sum_sq(a1, a3);
      if (ss < best.ss) best = {a1, a3, ss};
    };
    const double det = s11 * s22 - s12 * s12;
    if (det > 1e-12 * s11 * s22) {
      const double a1 = (b1 * s22 - b2 * s12) / det;
      const double a3 = (b2 * s11 - b1 * s12) / det;
      if (a1 >= 0.0 && a3 >= 0.0) {
        consider(a1, a3);
        return best;
      }
    }
    if (s11 > 0.0) consider(std::max(0.0, b1 / s11), 0.0);
    if (s22 > 0.0) consider(0.0, std::max(0.0, b2 / s22));
    return best;
  }

  void residuals(double r2, double r4, const Projection& p, std::vector<double>& out) const {
    basis(r2, f1_);
    basis(r4, f2_);
    out.resize(y_.size());
    for (std::size_t k = 0; k < y_.size(); ++k) out[k] = y_[k] - p.a1 * f1_[k] - p.a3 * f2_[k];
  }

  double total_ss() const {
    double mean = 0.0;
    for (double v : y_) mean += v;
    mean /= static_cast<double>(y_.size());
    double ss = 0.0;
    for (double v : y_) ss += (v - mean) * (v - mean);
    return ss;
  }

 private:
  double sum_sq(double a1, double a3) const {
    double ss = 0.0;
    for (std::size_t k = 0; k < y_.size(); ++k) {
      const double r = y_[k] - a1 * f1_[k] - a3 * f2_[k];
      ss += r * r;
    }
    return ss;
  }

  std::vector<double> y_;
  double scale_ = 1.0;
  DgfSampling sampling_;
  mutable std::vector<double> f1_, f2_;
};

double clamp_log(double v) { return std::clamp(v, kMinLogRate, kMaxLogRate); }

}  // namespace

DgfFit fit_dgf(std::span<const double> hist, double time_bin, const DgfFitOptions& options) {
  require(time_bin > 0.0 && std::isfinite(time_bin), ErrorCode::kInvalidArgument,
          "fit_dgf: time_bin must be positive");
  std::size_t last = 0, occupied = 0;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    require(std::isfinite(hist[k]) && hist[k] >= 0.0, ErrorCode::kInvalidArgument,
            "fit_dgf: histogram entries must be finite and non-negative");
    if (hist[k] > 0.0) {
      last = k;
      ++occupied;
    }
  }
  require(occupied >= 8, ErrorCode::kInvalidArgument,
          "fit_dgf: need at least 8 occupied bins");

  const Problem problem(hist.first(last + 1), options.sampling);
  double mass = 0.0, first = 0.0, peak = 0.0;
  std::size_t peak_bin = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    mass += hist[k];
    first += hist[k] * (static_cast<double>(k) + 0.5);
    if (hist[k] > peak) {
      peak = hist[k];
      peak_bin = k;
    }
  }
  const double r0 = 2.0 / (first / mass);
  const double rp = 1.0 / (static_cast<double>(peak_bin) + 0.5);
  const std::array<std::pair<double, double>, 5> starts{{{r0 * std::sqrt(10.0), r0 / std::sqrt(10.0)},
                                                        {10.0 * r0, r0},
                                                        {r0, r0 / 10.0},
                                                        {30.0 * r0, r0 / 3.0},
                                                        {rp, r0 / 3.0}}};

  const detail::ResidualFn fn = [&](std::span<const double> p, std::vector<double>& res) {
    const double r2 = std::exp(clamp_log(p[0]));
    const double r4 = std::exp(clamp_log(p[1]));
    problem.residuals(r2, r4, problem.project(r2, r4), res);
  };

  bool any_converged = false;
  double best_ss = std::numeric_limits<double>::infinity();
  double best_r2 = 0.0, best_r4 = 0.0;
  Projection best_p;
  for (auto [s2, s4] : starts) {
    const auto lm = detail::levenberg_marquardt(
        fn, {clamp_log(std::log(s2)), clamp_log(std::log(s4))}, options.max_iterations,
        options.tolerance);
    const double r2 = std::exp(clamp_log(lm.params[0]));
    const double r4 = std::exp(clamp_log(lm.params[1]));
    const Projection p = problem.project(r2, r4);
    if (!std::isfinite(p.ss)) continue;
    // A converged candidate always beats an unconverged one.
    const bool better = (lm.converged && !any_converged) ||
                        (lm.converged == any_converged && p.ss < best_ss);
    if (better) {
      any_converged = any_converged || lm.converged;
      best_ss = p.ss;
      best_r2 = r2;
      best_r4 = r4;
      best_p = p;
    }
  }

  DgfFit fit;
  fit.time_bin = time_bin;
  fit.bins_used = last + 1;
  fit.c1 = best_p.a1 * problem.scale() / time_bin;
  fit.c2 = best_r2 / time_bin;
  fit.c3 = best_p.a3 * problem.scale() / time_bin;
  fit.c4 = best_r4 / time_bin;
  if (fit.c2 < fit.c4) {
    std::swap(fit.c1, fit.c3);
    std::swap(fit.c2, fit.c4);
  }
  const double sst = problem.total_ss();
  fit.r_squared = sst > 0.0 ? 1.0 - best_ss / sst : (best_ss == 0.0 ? 1.0 : 0.0);
  fit.d_rms = dgf_drms(fit);
  if (!any_converged) throw DgfFitError("fit_dgf: no starting point converged", fit);
  return fit;
}

}  // namespace uwchan
