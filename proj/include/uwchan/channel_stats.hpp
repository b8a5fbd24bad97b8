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

#ifndef UWCHAN_CHANNEL_STATS_HPP
#define UWCHAN_CHANNEL_STATS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uwchan/error.hpp"
#include "uwchan/receiver.hpp"
#include "uwchan/transport.hpp"

namespace uwchan {

/// Binned receiver-plane response.
///
/// The spatial map covers (2N+1)^2 square cells of side grid_pitch, with cell
/// (0, 0) centred on the optical axis. The impulse histogram collects arrivals
/// within aperture_radius of the axis, binned by excess delay over the
/// ballistic time. Sums are stored raw; accessors divide by photon_count.
class ChannelResponse {
 public:
  ChannelResponse(const RxConfig& rx, double ballistic_time, std::uint64_t photon_count);

  void add(const ArrivalRecord& record) noexcept;
  /// Adds another response's sums. Grids must match.
  void merge(const ChannelResponse& other);

  const RxConfig& rx() const noexcept { return rx_; }
  double ballistic_time() const noexcept { return ballistic_time_; }
  std::uint64_t photon_count() const noexcept { return photon_count_; }
  int half_bins() const noexcept { return half_bins_; }
  int width() const noexcept { return 2 * half_bins_ + 1; }
  std::size_t time_bins() const noexcept { return impulse_.size(); }

  /// Probability per cell; ix, iy in [-N, N].
  double spatial(int ix, int iy) const noexcept;
  /// Probability per time bin for the aperture.
  double impulse(std::size_t k) const noexcept;
  std::vector<double> impulse_hist() const;
  /// Centre of cell ix along one axis, m.
  double cell_center(int ix) const noexcept { return ix * rx_.grid_pitch; }

  double spatial_mass() const noexcept;       // sum of the map
  double overflow_mass() const noexcept;      // accepted weight outside the map
  double aperture_gain() const noexcept;      // weight inside the aperture
  double late_mass() const noexcept;          // aperture weight beyond the time window
  std::uint64_t aperture_entries() const noexcept { return aperture_entries_; }

 private:
  RxConfig rx_;
  double ballistic_time_;
  std::uint64_t photon_count_;
  int half_bins_;
  std::vector<double> spatial_;
  std::vector<double> impulse_;
  double overflow_ = 0.0;
  double aperture_ = 0.0;
  double late_ = 0.0;
  std::uint64_t aperture_entries_ = 0;
};

ChannelResponse bin_arrivals(std::span<const ArrivalRecord> records, const RxConfig& rx,
                             double ballistic_time, std::uint64_t photon_count);

struct ResponseRun {
  ChannelResponse response;
  TransportCounters counters;
};

/// Transport and binning in one pass, without materializing the arrival set.
/// Deterministic for a fixed configuration regardless of config.workers.
ResponseRun simulate_response(const LinkConfig& config, const Medium& medium,
                              const RxConfig& rx);

/// Full width at half maximum of the x-slice through the map's peak, m.
/// Throws Error(kDegenerate) without a positive maximum and
/// Error(kDomain) if the slice stays above half maximum up to map_extent.
double compute_fwhm(const ChannelResponse& response);

/// Power-weighted RMS delay spread over bin centres, s.
/// Throws Error(kDegenerate) for an empty histogram.
double compute_drms(std::span<const double> impulse_hist, double time_bin);

/// Azimuthal uniformity of the received intensity: for each annulus of width
/// `ring_width`, the squared coefficient of variation of the weight collected
/// in `sectors` equal azimuthal sectors.
struct RingSymmetry {
  double inner_radius;
  double outer_radius;
  std::uint64_t entries;
  double mean_weight;
  double cv_squared;
};
std::vector<RingSymmetry> ring_symmetry(std::span<const ArrivalRecord> records,
                                        double ring_width, int rings, int sectors = 4);

/// h(t) = c1 t exp(-c2 t) + c3 t exp(-c4 t), with t the excess delay in
/// seconds and h the probability per histogram bin of width time_bin.
struct DgfFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double r_squared = 0.0;
  double d_rms = 0.0;
  double time_bin = 0.0;
  std::size_t bins_used = 0;

  double eval(double t) const noexcept;
  /// Mean of h over [t0, t1].
  double bin_average(double t0, double t1) const noexcept;
  /// Integral of h over t divided by time_bin: probability delivered to the
  /// aperture.
  double total_gain() const noexcept;
};

/// RMS delay spread of the continuous model, s.
double dgf_drms(const DgfFit& fit) noexcept;

class DgfFitError : public Error {
 public:
  DgfFitError(const std::string& what, const DgfFit& best)
      : Error(ErrorCode::kFitNotConverged, what), best_(best) {}
  const DgfFit& best() const noexcept { return best_; }

 private:
  DgfFit best_;
};

/// How model values are compared with histogram bins.
enum class DgfSampling {
  kBinAverage,  // mean of h over each bin; keeps the fitted integral equal to the binned mass
  kBinCenter,   // h at the bin centre
};

struct DgfFitOptions {
  int max_iterations = 300;
  double tolerance = 1e-12;  // relative change of the residual sum of squares
  DgfSampling sampling = DgfSampling::kBinAverage;
};

/// Least-squares fit of the double-gamma model to a binned impulse response
/// (bin k covers [k, k+1) time_bin). Amplitudes are solved linearly for given
/// decay rates; the two rates are refined by damped Gauss-Newton in log space
/// from several starting points.
/// Requires at least 8 occupied bins (Error(kInvalidArgument)); throws
/// DgfFitError carrying the best candidate if no start converges.
DgfFit fit_dgf(std::span<const double> impulse_hist, double time_bin,
               const DgfFitOptions& options = {});

enum class FadingKind { kLogNormal, kGaussian };

struct FadingFit {
  double sigma_sim_sq = 0.0;  // sample scintillation index
  double sigma_i_sq = 0.0;    // scintillation index of the fitted distribution
  double mu = 0.0;            // log-normal: mean log intensity; gaussian: mean
  double sigma = 0.0;         // log-normal: sd of log intensity; gaussian: sd
  double r_squared = 0.0;
  FadingKind kind = FadingKind::kLogNormal;
};

/// (<I^2> - <I>^2) / <I>^2. Throws Error(kDegenerate) if the mean is zero.
double scintillation_index(std::span<const double> samples);

struct DensityHistogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> centers;
  std::vector<double> density;
};

/// Normalized histogram with ceil(sqrt(n)) bins spanning [min, max].
DensityHistogram density_histogram(std::span<const double> samples);

double lognormal_pdf(double x, double mu, double sigma) noexcept;
double gaussian_pdf(double x, double mean, double sigma) noexcept;

/// Least-squares fit of a log-normal or Gaussian density to the histogram of
/// `samples` (already normalized by their mean).
FadingFit fit_fading(std::span<const double> samples, FadingKind kind);

struct EnsembleConfig {
  LinkConfig link;  // photon_count is ignored
  double a = 0.179;
  double b_petzold = 0.219;
  double b_sw = kSeawaterScattering;
  PhaseFunctionParams phase;
  std::size_t resolution = CompositeVsf::kDefaultResolution;
  RxConfig rx;
  std::size_t n_iter = 200;
  std::uint64_t photons_per_iter = 1000000;
  double bt_max = 0.0;
};

struct EnsembleResult {
  std::vector<double> b_t;         // turbulence drawn per iteration
  std::vector<double> received;    // aperture weight / photons_per_iter
  std::vector<double> normalized;  // received / mean(received)
  FadingFit fit;
  DensityHistogram histogram;
};

/// Weight collected inside the aperture (FOV-accepted), per emitted photon.
double aperture_received(const LinkConfig& config, const Medium& medium, const RxConfig& rx);

/// Fading ensemble: every iteration draws b_t ~ U[0, bt_max], rebuilds the
/// medium and records the aperture weight. Throws Error(kDegenerate) when no
/// iteration receives anything.
EnsembleResult scintillation_ensemble(const EnsembleConfig& config);

}  // namespace uwchan

#endif  // UWCHAN_CHANNEL_STATS_HPP
