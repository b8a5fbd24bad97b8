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

#ifndef UWCHAN_DATALINK_HPP
#define UWCHAN_DATALINK_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uwchan/channel_stats.hpp"
#include "uwchan/rng.hpp"

namespace uwchan {

inline constexpr double kPlanck = 6.62607e-34;  // J s

/// Discrete-time ISI channel: p_k is the fraction of one bit's energy that
/// lands in bit slot k (k = 1..M).
struct DiscreteChannel {
  std::vector<double> taps;
  double bit_duration = 0.0;

  std::size_t memory() const noexcept { return taps.size(); }
  double total() const noexcept;
};

/// Taps of a unit-area rectangular pulse of width t_b passed through the
/// fitted response. M is the smallest tap count whose remaining tail holds
/// less than mass_cutoff of the total gain. Throws Error(kMemoryCap) if that
/// needs more than max_memory taps.
DiscreteChannel discretize_response(const DgfFit& fit, double t_b, double mass_cutoff = 1e-3,
                                    std::size_t max_memory = 20);

/// Mean photons in a `1` bit: 2 P_t T_b lambda / (h v).
double photons_per_bit(double p_t, double t_b, double wavelength) noexcept;

struct PhotonBudget {
  double n_ph = 0.0;         // mean photons per `1` bit
  double n_bg = 1e-3;        // background photons per slot
  double p_t = 0.02;         // W
  double wavelength = 532e-9;

  static PhotonBudget from_power(double p_t, double t_b, double wavelength, double n_bg);
  void validate() const;
};

/// history[j] holds x_{i-j}; missing entries count as zeros.
double mean_photon_rate(std::span<const std::uint8_t> history, const DiscreteChannel& channel,
                        const PhotonBudget& budget);

/// a_i for every slot of a bit stream, with zeros before the first bit.
std::vector<double> mean_photon_rates(std::span<const std::uint8_t> bits,
                                      const DiscreteChannel& channel, const PhotonBudget& budget);

std::uint64_t sample_output(double a, CounterRng& rng);

/// log2 of the Poisson mass P(y | a).
double log2_poisson(std::uint64_t y, double a) noexcept;

/// -(1/L) sum log2 P(y_i | a_i).
double entropy_rate_given_x(std::span<const std::uint8_t> bits, std::span<const std::uint64_t> y,
                            const DiscreteChannel& channel, const PhotonBudget& budget);

/// Normalized forward recursion over the 2^M input histories.
/// State bit j holds x_{i-j}. The recursion starts in the all-zero state.
class ForwardRecursion {
 public:
  /// state_rates[s] is the mean photon count for state s; its size sets M.
  explicit ForwardRecursion(std::vector<double> state_rates);

  void step(std::uint64_t y);
  const std::vector<double>& alphas() const noexcept { return alpha_; }
  double log2_probability() const noexcept { return log2_accum_; }
  std::size_t steps() const noexcept { return steps_; }
  /// Rescales the current alphas; the bookkeeping keeps log2_probability exact.
  void rescale(double factor);

 private:
  std::size_t memory_;
  std::vector<double> rates_;
  std::vector<double> log_rates_;
  std::vector<double> alpha_;
  std::vector<double> next_;
  std::vector<double> log_gamma_;
  double log2_accum_ = 0.0;
  std::size_t steps_ = 0;
};

/// Mean photon count per trellis state of an M-tap channel.
std::vector<double> state_rates(const DiscreteChannel& channel, const PhotonBudget& budget);

/// log2 P(Y^L) for equiprobable inputs.
double log2_output_probability(std::span<const std::uint64_t> y, const DiscreteChannel& channel,
                               const PhotonBudget& budget);

/// -(1/L) log2 P(Y^L).
double entropy_rate_output(std::span<const std::uint64_t> y, const DiscreteChannel& channel,
                           const PhotonBudget& budget);

struct MutualInfoOptions {
  std::size_t l_bits = 20000;
  /// Channels with more taps are scored on a reduced trellis whose missing
  /// taps add their mean to the background, giving a lower bound.
  std::size_t trellis_memory = 12;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

struct MutualInfoEstimate {
  double h_y = 0.0;
  double h_y_given_x = 0.0;
  double mutual_info = 0.0;  // clamped to [0, 1]
  std::size_t trellis_memory = 0;
  bool reduced = false;
};

MutualInfoEstimate mutual_information(const DiscreteChannel& channel, const PhotonBudget& budget,
                                      const MutualInfoOptions& options = {});

struct RatePoint {
  double symbol_rate = 0.0;  // Hz
  double mutual_info = 0.0;  // bits/symbol
  double rate = 0.0;         // bits/s
  std::size_t memory = 0;
  bool reduced = false;
  bool skipped = false;  // memory cap exceeded; not evaluated
};

struct RateOptions {
  double p_t = 0.02;
  double wavelength = 532e-9;
  double n_bg = 1e-3;
  double mass_cutoff = 1e-3;
  std::size_t max_memory = 20;
  std::size_t trellis_memory = 12;
  std::size_t l_bits = 20000;
  std::uint64_t seed = 1;
  unsigned workers = 0;

  void validate() const;
  friend bool operator==(const RateOptions&, const RateOptions&) = default;
};

struct RateResult {
  std::vector<RatePoint> points;
  double r_max = 0.0;
  double best_symbol_rate = 0.0;
};

/// n log-spaced symbol rates on [lo, hi].
std::vector<double> log_rate_grid(double lo, double hi, std::size_t n);

/// Evaluates I(X;Y) R_sym over the grid. Throws Error(kMemoryCap) if every
/// grid point exceeds the memory cap.
RateResult max_rate(const DgfFit& fit, std::span<const double> rate_grid,
                    const RateOptions& options = {});

}  // namespace uwchan

#endif  // UWCHAN_DATALINK_HPP
