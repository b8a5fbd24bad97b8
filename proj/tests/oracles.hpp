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

// Reference computations for tests. Nothing here calls into the library's
// numerical code; inputs are plain functions and vectors.

#ifndef UWCHAN_TESTS_ORACLES_HPP
#define UWCHAN_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Angular CDF of a density on [0, pi] (per steradian), built with Simpson's
// rule on a dense mixed grid.
class AngularCdf {
 public:
  explicit AngularCdf(const std::function<double(double)>& density, double min_angle = 1e-6) {
    std::vector<double> edges{0.0};
    const int n_log = 20000;
    for (int i = 0; i <= n_log; ++i) {
      edges.push_back(min_angle * std::pow(0.05 / min_angle, double(i) / n_log));
    }
    const int n_lin = 20000;
    for (int i = 1; i <= n_lin; ++i) edges.push_back(0.05 + (kPi - 0.05) * i / n_lin);
    auto f = [&](double th) {
      return 2.0 * kPi * density(std::max(th, min_angle)) * std::sin(th);
    };
    theta_ = edges;
    cdf_.assign(edges.size(), 0.0);
    for (std::size_t k = 1; k < edges.size(); ++k) {
      const double a = edges[k - 1], b = edges[k];
      cdf_[k] = cdf_[k - 1] + (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    total_ = cdf_.back();
    for (double& v : cdf_) v /= total_;
  }

  double total() const { return total_; }

  double operator()(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= kPi) return 1.0;
    auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
    const std::size_t j = std::size_t(it - theta_.begin()) - 1;
    const double f = (theta - theta_[j]) / (theta_[j + 1] - theta_[j]);
    return cdf_[j] + f * (cdf_[j + 1] - cdf_[j]);
  }

  // Angle with CDF u, by bisection.
  double inverse(double u) const {
    double lo = 0.0, hi = kPi;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((*this)(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> theta_;
  std::vector<double> cdf_;
  double total_ = 0.0;
};

// Two-sided KS statistic of samples against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = double(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Pearson chi-square over `bins` equiprobable bins of the reference CDF.
template <typename Cdf>
double chi_square_equiprobable(const std::vector<double>& samples, const Cdf& cdf, int bins) {
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) {
    const int k = std::clamp(int(cdf(s) * bins), 0, bins - 1);
    counts[k] += 1.0;
  }
  const double expected = double(samples.size()) / bins;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  return chi2;
}

// h(t) = c1 t exp(-c2 t) + c3 t exp(-c4 t).
struct Dgf {
  double c1, c2, c3, c4;
  double operator()(double t) const {
    return c1 * t * std::exp(-c2 * t) + c3 * t * std::exp(-c4 * t);
  }
};

// Composite Simpson integral of f over [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Tap k (1-based) of a rectangle of width t_b and height 1/t_b convolved with
// h, integrated over slot k: brute-force nested quadrature. h is probability
// per bin of width `bin`.
inline std::vector<double> brute_force_taps(const Dgf& h, double bin, double t_b, int m) {
  std::vector<double> taps(m, 0.0);
  // (f*h)(t) = (1/t_b) integral_{max(0,t-t_b)}^{t} h(s) ds
  const int inner = 400;
  auto conv = [&](double t) {
    const double lo = std::max(0.0, t - t_b);
    if (t <= lo) return 0.0;
    return simpson([&](double s) { return h(s); }, lo, t, inner) / t_b / bin;
  };
  for (int k = 0; k < m; ++k) {
    taps[k] = simpson(conv, k * t_b, (k + 1) * t_b, 400);
  }
  return taps;
}

inline double poisson_pmf(std::uint64_t y, double a) {
  if (a == 0.0) return y == 0 ? 1.0 : 0.0;
  return std::exp(double(y) * std::log(a) - a - std::lgamma(double(y) + 1.0));
}

// Entropy of Poisson(a) in bits, by direct summation.
inline double poisson_entropy_bits(double a) {
  double h = 0.0;
  const auto top = std::uint64_t(a + 40.0 * std::sqrt(a + 1.0) + 40.0);
  for (std::uint64_t y = 0; y <= top; ++y) {
    const double p = poisson_pmf(y, a);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// P(Y^L) for equiprobable inputs, summing over all 2^L input strings.
// Bits before the stream are zeros; taps[0] multiplies the current bit.
inline double exhaustive_output_probability(const std::vector<std::uint64_t>& y,
                                            const std::vector<double>& taps, double n_ph,
                                            double n_bg) {
  const std::size_t l = y.size();
  double total = 0.0;
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << l); ++word) {
    double p = 1.0;
    for (std::size_t i = 0; i < l; ++i) {
      double a = n_bg;
      for (std::size_t k = 0; k < taps.size() && k <= i; ++k) {
        if ((word >> (i - k)) & 1u) a += n_ph * taps[k];
      }
      p *= poisson_pmf(y[i], a);
    }
    total += p * std::pow(0.5, double(l));
  }
  return total;
}

}  // namespace oracle

#endif  // UWCHAN_TESTS_ORACLES_HPP
