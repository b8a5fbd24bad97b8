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

#include "uwchan/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uwchan/parallel.hpp"

namespace uwchan {

ChannelResponse::ChannelResponse(const RxConfig& rx, double ballistic_time,
                                 std::uint64_t photon_count)
    : rx_(rx), ballistic_time_(ballistic_time), photon_count_(photon_count) {
  rx.validate();
  require(photon_count > 0, ErrorCode::kInvalidArgument,
          "channel response: photon_count must be > 0");
  half_bins_ = static_cast<int>(std::floor(rx.map_extent / rx.grid_pitch + 0.5));
  const auto w = static_cast<std::size_t>(2 * half_bins_ + 1);
  spatial_.assign(w * w, 0.0);
  impulse_.assign(static_cast<std::size_t>(std::ceil(rx.time_window / rx.time_bin - 1e-9)), 0.0);
}

void ChannelResponse::add(const ArrivalRecord& r) noexcept {
  const double fx = std::floor(r.x / rx_.grid_pitch + 0.5);
  const double fy = std::floor(r.y / rx_.grid_pitch + 0.5);
  if (std::abs(fx) <= half_bins_ && std::abs(fy) <= half_bins_) {
    const auto ix = static_cast<std::size_t>(static_cast<int>(fx) + half_bins_);
    const auto iy = static_cast<std::size_t>(static_cast<int>(fy) + half_bins_);
    spatial_[iy * static_cast<std::size_t>(width()) + ix] += r.weight;
  } else {
    overflow_ += r.weight;
  }
  if (std::hypot(r.x, r.y) <= rx_.aperture_radius) {
    aperture_ += r.weight;
    ++aperture_entries_;
    const double excess = std::max(0.0, r.t - ballistic_time_);
    const double k = std::floor(excess / rx_.time_bin);
    if (k < static_cast<double>(impulse_.size())) {
      impulse_[static_cast<std::size_t>(k)] += r.weight;
    } else {
      late_ += r.weight;
    }
  }
}

void ChannelResponse::merge(const ChannelResponse& o) {
  require(o.rx_ == rx_ && o.ballistic_time_ == ballistic_time_, ErrorCode::kInvalidArgument,
          "channel response: cannot merge responses with different grids");
  for (std::size_t i = 0; i < spatial_.size(); ++i) spatial_[i] += o.spatial_[i];
  for (std::size_t i = 0; i < impulse_.size(); ++i) impulse_[i] += o.impulse_[i];
  overflow_ += o.overflow_;
  aperture_ += o.aperture_;
  late_ += o.late_;
  aperture_entries_ += o.aperture_entries_;
}

double ChannelResponse::spatial(int ix, int iy) const noexcept {
  if (std::abs(ix) > half_bins_ || std::abs(iy) > half_bins_) return 0.0;
  const auto w = static_cast<std::size_t>(width());
  return spatial_[static_cast<std::size_t>(iy + half_bins_) * w +
                  static_cast<std::size_t>(ix + half_bins_)] /
         static_cast<double>(photon_count_);
}

double ChannelResponse::impulse(std::size_t k) const noexcept {
  return k < impulse_.size() ? impulse_[k] / static_cast<double>(photon_count_) : 0.0;
}

std::vector<double> ChannelResponse::impulse_hist() const {
  std::vector<double> out(impulse_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = impulse(k);
  return out;
}

double ChannelResponse::spatial_mass() const noexcept {
  double s = 0.0;
  for (double v : spatial_) s += v;
  return s / static_cast<double>(photon_count_);
}

double ChannelResponse::overflow_mass() const noexcept {
  return overflow_ / static_cast<double>(photon_count_);
}

double ChannelResponse::aperture_gain() const noexcept {
  return aperture_ / static_cast<double>(photon_count_);
}

double ChannelResponse::late_mass() const noexcept {
  return late_ / static_cast<double>(photon_count_);
}

ChannelResponse bin_arrivals(std::span<const ArrivalRecord> records, const RxConfig& rx,
                             double ballistic_time, std::uint64_t photon_count) {
  ChannelResponse out(rx, ballistic_time, photon_count);
  for (const ArrivalRecord& r : records) out.add(r);
  return out;
}

namespace {

// Chunk size for streamed binning: a function of the photon count only, so
// partial sums are combined identically for any number of workers.
std::uint64_t response_chunk(std::uint64_t count) {
  const std::uint64_t target = (count + 63) / 64;
  const std::uint64_t rounded = (target + kTransportChunk - 1) / kTransportChunk * kTransportChunk;
  return std::max<std::uint64_t>(kTransportChunk, rounded);
}

}  // namespace

ResponseRun simulate_response(const LinkConfig& config, const Medium& medium,
                              const RxConfig& rx) {
  config.validate();
  rx.validate();
  const std::uint64_t chunk = response_chunk(config.photon_count);
  const std::size_t chunks = chunk_count(config.photon_count, chunk);
  const double t0 = config.ballistic_time();
  std::vector<ChannelResponse> parts(chunks, ChannelResponse(rx, t0, std::max<std::uint64_t>(config.photon_count, 1)));
  std::vector<TransportCounters> counters(chunks);

  parallel_chunks(config.photon_count, chunk, config.workers,
                  [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
                    auto& resp = parts[c];
                    auto& cnt = counters[c];
                    trace_photons(config, medium, begin, end,
                                  [&](std::uint64_t, const PhotonOutcome& o) {
                                    const bool ok = o.fate == Fate::kArrived &&
                                                    accepted_by_fov(o.arrival, rx);
                                    count_outcome(cnt, o, ok);
                                    if (ok) resp.add(o.arrival);
                                  });
                  });

  ResponseRun run{ChannelResponse(rx, t0, std::max<std::uint64_t>(config.photon_count, 1)), {}};
  for (std::size_t c = 0; c < chunks; ++c) {
    run.response.merge(parts[c]);
    run.counters.merge(counters[c]);
  }
  return run;
}

double compute_fwhm(const ChannelResponse& response) {
  const int n = response.half_bins();
  int peak_x = 0, peak_y = 0;
  double peak = 0.0;
  for (int iy = -n; iy <= n; ++iy) {
    for (int ix = -n; ix <= n; ++ix) {
      const double v = response.spatial(ix, iy);
      if (v > peak) {
        peak = v;
        peak_x = ix;
        peak_y = iy;
      }
    }
  }
  require(peak > 0.0, ErrorCode::kDegenerate, "fwhm: spatial map has no positive maximum");
  const double half = peak / 2.0;
  const double pitch = response.rx().grid_pitch;

  // Position where the slice crosses half maximum, walking away from the peak.
  auto crossing = [&](int dir) {
    for (int ix = peak_x + dir; std::abs(ix) <= n; ix += dir) {
      const double v = response.spatial(ix, peak_y);
      if (v < half) {
        const double prev = response.spatial(ix - dir, peak_y);
        const double f = (prev - half) / (prev - v);
        return response.cell_center(ix - dir) + dir * f * pitch;
      }
    }
    // Just beyond the map the profile is unknown.
    fail(ErrorCode::kDomain, "fwhm: profile stays above half maximum inside map_extent");
  };
  return crossing(+1) - crossing(-1);
}

double compute_drms(std::span<const double> hist, double time_bin) {
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double t = (static_cast<double>(i) + 0.5) * time_bin;
    mass += hist[i];
    first += hist[i] * t;
  }
  require(mass > 0.0, ErrorCode::kDegenerate, "drms: empty impulse histogram");
  const double mean = first / mass;
  double second = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double d = (static_cast<double>(i) + 0.5) * time_bin - mean;
    second += hist[i] * d * d;
  }
  return std::sqrt(second / mass);
}

std::vector<RingSymmetry> ring_symmetry(std::span<const ArrivalRecord> records,
                                        double ring_width, int rings, int sectors) {
  require(ring_width > 0.0 && rings > 0 && sectors >= 2, ErrorCode::kInvalidArgument,
          "ring_symmetry: bad ring layout");
  const auto nr = static_cast<std::size_t>(rings);
  const auto ns = static_cast<std::size_t>(sectors);
  std::vector<double> w(nr * ns, 0.0);
  std::vector<std::uint64_t> entries(nr, 0);
  for (const ArrivalRecord& r : records) {
    const double rad = std::hypot(r.x, r.y);
    const auto ring = static_cast<std::size_t>(rad / ring_width);
    if (ring >= nr) continue;
    double ang = std::atan2(r.y, r.x);
    if (ang < 0.0) ang += 2.0 * std::numbers::pi;
    const auto sec = std::min(ns - 1, static_cast<std::size_t>(ang / (2.0 * std::numbers::pi) *
                                                              static_cast<double>(ns)));
    w[ring * ns + sec] += r.weight;
    ++entries[ring];
  }
  std::vector<RingSymmetry> out;
  for (std::size_t i = 0; i < nr; ++i) {
    double mean = 0.0;
    for (std::size_t s = 0; s < ns; ++s) mean += w[i * ns + s];
    mean /= static_cast<double>(ns);
    double var = 0.0;
    for (std::size_t s = 0; s < ns; ++s) var += (w[i * ns + s] - mean) * (w[i * ns + s] - mean);
    var /= static_cast<double>(ns - 1);
    out.push_back({static_cast<double>(i) * ring_width, static_cast<double>(i + 1) * ring_width,
                   entries[i], mean, mean > 0.0 ? var / (mean * mean) : 0.0});
  }
  return out;
}

}  // namespace uwchan
