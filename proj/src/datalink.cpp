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

#include "uwchan/datalink.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "uwchan/parallel.hpp"

namespace uwchan {

double DiscreteChannel::total() const noexcept {
  double s = 0.0;
  for (double p : taps) s += p;
  return s;
}

namespace {

// Integral over [a, b] of t exp(-c t) (alpha + beta t).
double weighted_moment(double c, double a, double b, double alpha, double beta) {
  if (b <= a) return 0.0;
  auto f1 = [c](double t) { return -std::exp(-c * t) * (t / c + 1.0 / (c * c)); };
  auto f2 = [c](double t) {
    return -std::exp(-c * t) * (t * t / c + 2.0 * t / (c * c) + 2.0 / (c * c * c));
  };
  return alpha * (f1(b) - f1(a)) + beta * (f2(b) - f2(a));
}

double tap(const DgfFit& fit, double t_b, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double lo = std::max(0.0, (kk - 2.0) * t_b);
  const double mid = std::max(0.0, (kk - 1.0) * t_b);
  const double hi = kk * t_b;
  double s = 0.0;
  for (auto [amp, rate] : {std::pair{fit.c1, fit.c2}, std::pair{fit.c3, fit.c4}}) {
    if (amp == 0.0) continue;
    s += amp * (weighted_moment(rate, lo, mid, -(kk - 2.0), 1.0 / t_b) +
                weighted_moment(rate, mid, hi, kk, -1.0 / t_b));
  }
  return s / fit.time_bin;
}

}  // namespace

DiscreteChannel discretize_response(const DgfFit& fit, double t_b, double mass_cutoff,
                                    std::size_t max_memory) {
  require(t_b > 0.0 && std::isfinite(t_b), ErrorCode::kInvalidArgument,
          "discretize_response: bit duration must be positive");
  require(mass_cutoff > 0.0 && mass_cutoff < 1.0, ErrorCode::kInvalidArgument,
          "discretize_response: mass_cutoff must lie in (0, 1)");
  require(max_memory >= 1, ErrorCode::kInvalidArgument, "discretize_response: max_memory >= 1");
  require(fit.time_bin > 0.0 && fit.c1 >= 0.0 && fit.c3 >= 0.0 &&
              (fit.c1 == 0.0 || fit.c2 > 0.0) && (fit.c3 == 0.0 || fit.c4 > 0.0),
          ErrorCode::kInvalidArgument, "discretize_response: invalid DGF constants");
  const double gain = fit.total_gain();
  require(gain > 0.0, ErrorCode::kDegenerate, "discretize_response: response has zero gain");

  DiscreteChannel ch;
  ch.bit_duration = t_b;
  double sum = 0.0;
  for (std::size_t k = 1;; ++k) {
    if (k > max_memory) {
      fail(ErrorCode::kMemoryCap,
           "discretize_response: channel memory exceeds " + std::to_string(max_memory) +
               " bit slots; use a longer bit duration");
    }
    const double p = std::max(0.0, tap(fit, t_b, k));
    ch.taps.push_back(p);
    sum += p;
    if (gain - sum < mass_cutoff * gain) break;
  }
  return ch;
}

double photons_per_bit(double p_t, double t_b, double wavelength) noexcept {
  return 2.0 * p_t * t_b * wavelength / (kPlanck * kSpeedOfLight);
}

PhotonBudget PhotonBudget::from_power(double p_t, double t_b, double wavelength, double n_bg) {
  PhotonBudget b;
  b.p_t = p_t;
  b.wavelength = wavelength;
  b.n_bg = n_bg;
  b.n_ph = photons_per_bit(p_t, t_b, wavelength);
  b.validate();
  return b;
}

void PhotonBudget::validate() const {
  require(n_ph > 0.0 && std::isfinite(n_ph), ErrorCode::kInvalidArgument,
          "photon budget: n_ph must be positive");
  require(n_bg >= 0.0 && std::isfinite(n_bg), ErrorCode::kInvalidArgument,
          "photon budget: n_bg must be non-negative");
}

double mean_photon_rate(std::span<const std::uint8_t> history, const DiscreteChannel& ch,
                        const PhotonBudget& budget) {
  double s = 0.0;
  const std::size_t n = std::min(history.size(), ch.taps.size());
  for (std::size_t j = 0; j < n; ++j) {
    require(history[j] <= 1, ErrorCode::kInvalidArgument, "mean_photon_rate: bits must be 0 or 1");
    if (history[j]) s += ch.taps[j];
  }
  return budget.n_ph * s + budget.n_bg;
}

std::vector<double> mean_photon_rates(std::span<const std::uint8_t> bits,
                                      const DiscreteChannel& ch, const PhotonBudget& budget) {
  std::vector<double> a(bits.size(), 0.0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    require(bits[i] <= 1, ErrorCode::kInvalidArgument, "mean_photon_rates: bits must be 0 or 1");
    if (!bits[i]) continue;
    for (std::size_t k = 0; k < ch.taps.size() && i + k < bits.size(); ++k) a[i + k] += ch.taps[k];
  }
  for (double& v : a) v = budget.n_ph * v + budget.n_bg;
  return a;
}

std::uint64_t sample_output(double a, CounterRng& rng) {
  require(a >= 0.0 && std::isfinite(a), ErrorCode::kInvalidArgument,
          "sample_output: mean must be finite and non-negative");
  if (a == 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(a);
  return dist(rng);
}

double log2_poisson(std::uint64_t y, double a) noexcept {
  const double yd = static_cast<double>(y);
  if (a <= 0.0) return y == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return (yd * std::log(a) - a - std::lgamma(yd + 1.0)) / std::numbers::ln2;
}

double entropy_rate_given_x(std::span<const std::uint8_t> bits, std::span<const std::uint64_t> y,
                            const DiscreteChannel& ch, const PhotonBudget& budget) {
  require(bits.size() == y.size() && !y.empty(), ErrorCode::kInvalidArgument,
          "entropy_rate_given_x: streams must be non-empty and of equal length");
  const auto a = mean_photon_rates(bits, ch, budget);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s -= log2_poisson(y[i], a[i]);
  return s / static_cast<double>(y.size());
}

ForwardRecursion::ForwardRecursion(std::vector<double> rates) : rates_(std::move(rates)) {
  const std::size_t n = rates_.size();
  require(n >= 2 && (n & (n - 1)) == 0, ErrorCode::kInvalidArgument,
          "forward recursion: state count must be a power of two >= 2");
  memory_ = static_cast<std::size_t>(std::countr_zero(n));
  log_rates_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    require(rates_[s] >= 0.0 && std::isfinite(rates_[s]), ErrorCode::kInvalidArgument,
            "forward recursion: state rates must be finite and non-negative");
    log_rates_[s] = rates_[s] > 0.0 ? std::log(rates_[s]) : -std::numeric_limits<double>::infinity();
  }
  alpha_.assign(n, 0.0);
  alpha_[0] = 1.0;
  next_.resize(n);
  log_gamma_.resize(n);
}

void ForwardRecursion::step(std::uint64_t y) {
  const std::size_t n = rates_.size();
  const std::size_t top = std::size_t{1} << (memory_ - 1);
  const double yd = static_cast<double>(y);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    const double lg = y == 0 ? -rates_[s] : yd * log_rates_[s] - rates_[s];
    log_gamma_[s] = lg;
    peak = std::max(peak, lg);
  }
  require(std::isfinite(peak), ErrorCode::kNumerical,
          "forward recursion: output has zero probability in every state");
  double total = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t prev = s >> 1;
    const double v = (alpha_[prev] + alpha_[prev | top]) * 0.5 * std::exp(log_gamma_[s] - peak);
    next_[s] = v;
    total += v;
  }
  require(total > 0.0 && std::isfinite(total), ErrorCode::kNumerical,
          "forward recursion: slot normalizer underflowed");
  for (std::size_t s = 0; s < n; ++s) alpha_[s] = next_[s] / total;
  log2_accum_ += (std::log(total) + peak - std::lgamma(yd + 1.0)) / std::numbers::ln2;
  ++steps_;
}

void ForwardRecursion::rescale(double factor) {
  require(factor > 0.0 && std::isfinite(factor), ErrorCode::kInvalidArgument,
          "forward recursion: rescale factor must be positive");
  for (double& v : alpha_) v *= factor;
  log2_accum_ -= std::log2(factor);
}

std::vector<double> state_rates(const DiscreteChannel& ch, const PhotonBudget& budget) {
  require(ch.memory() >= 1 && ch.memory() < 31, ErrorCode::kInvalidArgument,
          "state_rates: memory must be in [1, 30]");
  const std::size_t n = std::size_t{1} << ch.memory();
  std::vector<double> a(n);
  for (std::size_t s = 0; s < n; ++s) {
    double v = 0.0;
    for (std::size_t j = 0; j < ch.memory(); ++j)
      if ((s >> j) & 1U) v += ch.taps[j];
    a[s] = budget.n_ph * v + budget.n_bg;
  }
  return a;
}

double log2_output_probability(std::span<const std::uint64_t> y, const DiscreteChannel& ch,
                               const PhotonBudget& budget) {
  ForwardRecursion fr(state_rates(ch, budget));
  for (std::uint64_t v : y) fr.step(v);
  return fr.log2_probability();
}

double entropy_rate_output(std::span<const std::uint64_t> y, const DiscreteChannel& ch,
                           const PhotonBudget& budget) {
  require(!y.empty(), ErrorCode::kInvalidArgument, "entropy_rate_output: empty stream");
  return -log2_output_probability(y, ch, budget) / static_cast<double>(y.size());
}

MutualInfoEstimate mutual_information(const DiscreteChannel& ch, const PhotonBudget& budget,
                                      const MutualInfoOptions& opt) {
  require(opt.l_bits >= 1000, ErrorCode::kInvalidArgument, "mutual_information: l_bits >= 1000");
  require(opt.trellis_memory >= 1 && opt.trellis_memory <= 24, ErrorCode::kInvalidArgument,
          "mutual_information: trellis_memory must be in [1, 24]");
  require(ch.memory() >= 1, ErrorCode::kInvalidArgument, "mutual_information: empty channel");
  budget.validate();

  CounterRng rng(opt.seed, opt.stream, CounterRng::kDatalink);
  std::vector<std::uint8_t> bits(opt.l_bits);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  const auto a = mean_photon_rates(bits, ch, budget);
  std::vector<std::uint64_t> y(opt.l_bits);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = sample_output(a[i], rng);

  MutualInfoEstimate est;
  est.reduced = ch.memory() > opt.trellis_memory;
  DiscreteChannel aux;
  aux.bit_duration = ch.bit_duration;
  PhotonBudget aux_budget = budget;
  if (est.reduced) {
    aux.taps.assign(ch.taps.begin(), ch.taps.begin() + static_cast<std::ptrdiff_t>(opt.trellis_memory));
    double tail = 0.0;
    for (std::size_t k = opt.trellis_memory; k < ch.memory(); ++k) tail += ch.taps[k];
    aux_budget.n_bg += 0.5 * budget.n_ph * tail;
  } else {
    aux = ch;
  }
  // Pad to two taps so the trellis has a predecessor bit.
  if (aux.memory() == 1) aux.taps.push_back(0.0);
  est.trellis_memory = aux.memory();

  ForwardRecursion fr(state_rates(aux, aux_budget));
  double cond = 0.0;
  std::size_t state = 0;
  const std::size_t mask = (std::size_t{1} << aux.memory()) - 1;
  const auto rates = state_rates(aux, aux_budget);
  for (std::size_t i = 0; i < y.size(); ++i) {
    state = ((state << 1) | bits[i]) & mask;
    cond -= log2_poisson(y[i], rates[state]);
    fr.step(y[i]);
  }
  const double l = static_cast<double>(y.size());
  est.h_y = -fr.log2_probability() / l;
  est.h_y_given_x = cond / l;
  est.mutual_info = std::clamp(est.h_y - est.h_y_given_x, 0.0, 1.0);
  return est;
}

void RateOptions::validate() const {
  require(p_t > 0.0 && std::isfinite(p_t), ErrorCode::kInvalidArgument,
          "datalink: p_t must be positive");
  require(wavelength > 0.0 && std::isfinite(wavelength), ErrorCode::kInvalidArgument,
          "datalink: wavelength must be positive");
  require(n_bg >= 0.0 && std::isfinite(n_bg), ErrorCode::kInvalidArgument,
          "datalink: n_bg must be non-negative");
  require(mass_cutoff > 0.0 && mass_cutoff < 1.0, ErrorCode::kInvalidArgument,
          "datalink: mass_cutoff must lie in (0, 1)");
  require(max_memory >= 1 && max_memory <= 64, ErrorCode::kInvalidArgument,
          "datalink: max_memory must be in [1, 64]");
  require(trellis_memory >= 1 && trellis_memory <= 24, ErrorCode::kInvalidArgument,
          "datalink: trellis_memory must be in [1, 24]");
  require(l_bits >= 1000, ErrorCode::kInvalidArgument, "datalink: l_bits must be >= 1000");
}

std::vector<double> log_rate_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo && n >= 2, ErrorCode::kInvalidArgument,
          "log_rate_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

RateResult max_rate(const DgfFit& fit, std::span<const double> grid, const RateOptions& opt) {
  opt.validate();
  require(grid.size() >= 10, ErrorCode::kInvalidArgument, "max_rate: rate grid needs >= 10 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0.0 && std::isfinite(grid[i]) && (i == 0 || grid[i] > grid[i - 1]),
            ErrorCode::kInvalidArgument, "max_rate: rate grid must be positive and increasing");
  }
  RateResult out;
  out.points.resize(grid.size());
  parallel_chunks(grid.size(), 1, opt.workers, [&](std::size_t i, std::uint64_t, std::uint64_t) {
    RatePoint& pt = out.points[i];
    pt.symbol_rate = grid[i];
    const double t_b = 1.0 / grid[i];
    DiscreteChannel ch;
    try {
      ch = discretize_response(fit, t_b, opt.mass_cutoff, opt.max_memory);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMemoryCap) throw;
      pt.skipped = true;
      return;
    }
    const auto budget = PhotonBudget::from_power(opt.p_t, t_b, opt.wavelength, opt.n_bg);
    MutualInfoOptions mo;
    mo.l_bits = opt.l_bits;
    mo.trellis_memory = opt.trellis_memory;
    mo.seed = opt.seed;
    const auto est = mutual_information(ch, budget, mo);
    pt.memory = ch.memory();
    pt.reduced = est.reduced;
    pt.mutual_info = est.mutual_info;
    pt.rate = est.mutual_info * grid[i];
  });
  bool any = false;
  for (const RatePoint& pt : out.points) {
    if (pt.skipped) continue;
    any = true;
    if (pt.rate > out.r_max) {
      out.r_max = pt.rate;
      out.best_symbol_rate = pt.symbol_rate;
    }
  }
  require(any, ErrorCode::kMemoryCap,
          "max_rate: every grid point exceeds the memory cap; lower the symbol rates");
  return out;
}

}  // namespace uwchan
