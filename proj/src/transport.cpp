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

#include "uwchan/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uwchan/error.hpp"
#include "uwchan/parallel.hpp"

namespace uwchan {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPolarAligned = 1.0 - 1e-12;
}  // namespace

double Vec3::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

void LinkConfig::validate() const {
  require(z_link > 0.0 && std::isfinite(z_link), ErrorCode::kInvalidArgument,
          "link: z_link must be > 0");
  require(beam_divergence >= 0.0 && beam_divergence < kPi, ErrorCode::kInvalidArgument,
          "link: beam_divergence must be in [0, pi)");
  require(weight_threshold > 0.0 && weight_threshold < 1.0, ErrorCode::kInvalidArgument,
          "link: weight_threshold must be in (0, 1)");
  require(n_water >= 1.0, ErrorCode::kInvalidArgument, "link: n_water must be >= 1");
  require(max_events > 0, ErrorCode::kInvalidArgument, "link: max_events must be > 0");
}

void RxConfig::validate() const {
  require(grid_pitch > 0.0 && time_bin > 0.0 && fov_limit > 0.0 && map_extent > 0.0 &&
              aperture_radius > 0.0 && time_window > 0.0,
          ErrorCode::kInvalidArgument, "rx: all receiver parameters must be > 0");
  require(map_extent >= grid_pitch / 2.0, ErrorCode::kInvalidArgument,
          "rx: map_extent smaller than half a grid cell");
  require(time_window >= time_bin, ErrorCode::kInvalidArgument,
          "rx: time_window shorter than one time bin");
}

Medium::Medium(const ScatteringBudget& budget, const PhaseFunctionParams& params,
               std::size_t resolution)
    : budget_(budget) {
  if (budget.b() > 0.0) vsf_ = std::make_shared<const CompositeVsf>(budget, params, resolution);
}

const CompositeVsf& Medium::vsf() const {
  require(vsf_ != nullptr, ErrorCode::kInvalidArgument, "medium does not scatter");
  return *vsf_;
}

Photon emit_photon(const LinkConfig& config, CounterRng& rng) {
  const double polar = rng.uniform() * config.beam_divergence / 2.0;
  const double azimuth = sample_phi(rng.uniform());
  Photon p;
  const double s = std::sin(polar);
  p.direction = {s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)};
  return p;
}

double step_length(double c, double epsilon) {
  if (!(c > 0.0)) fail(ErrorCode::kDomain, "step_length: extinction coefficient must be > 0");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    fail(ErrorCode::kDomain, "step_length: epsilon must be in (0, 1]");
  }
  return -std::log(epsilon) / c;
}

Photon update_weight(Photon photon, const ScatteringBudget& budget) noexcept {
  photon.weight *= budget.albedo();
  ++photon.scatter_count;
  return photon;
}

Photon scatter_direction(Photon photon, double theta_s, double phi_s) noexcept {
  const double st = std::sin(theta_s);
  const double ct = std::cos(theta_s);
  const double sp = std::sin(phi_s);
  const double cp = std::cos(phi_s);
  const Vec3 u = photon.direction;
  Vec3 out;
  if (std::abs(u.z) < kPolarAligned) {
    const double tmp = std::sqrt(1.0 - u.z * u.z);
    out.x = st * (u.x * u.z * cp - u.y * sp) / tmp + u.x * ct;
    out.y = st * (u.y * u.z * cp + u.x * sp) / tmp + u.y * ct;
    out.z = -st * cp * tmp + u.z * ct;
  } else {
    out = {st * cp, st * sp, std::copysign(ct, u.z)};
  }
  const double n = out.norm();
  photon.direction = {out.x / n, out.y / n, out.z / n};
  return photon;
}

PhotonOutcome propagate_photon(const LinkConfig& config, const Medium& medium,
                               CounterRng& rng) {
  const ScatteringBudget& budget = medium.budget();
  const double c = budget.c();
  const CompositeVsf* vsf = medium.scatters() ? &medium.vsf() : nullptr;
  Photon p = emit_photon(config, rng);
  PhotonOutcome out;

  for (std::uint64_t event = 0;; ++event) {
    if (event >= config.max_events) {
      out.fate = Fate::kEventCap;
      out.final_weight = p.weight;
      out.events = event;
      return out;
    }
    const double s = step_length(c, rng.uniform_open());
    const double z_next = p.position.z + p.direction.z * s;
    if (z_next >= config.z_link) {
      // Stop on the plane instead of at the end of the step.
      const double partial = (config.z_link - p.position.z) / p.direction.z;
      p.path_length += partial;
      ArrivalRecord& a = out.arrival;
      a.x = p.position.x + p.direction.x * partial;
      a.y = p.position.y + p.direction.y * partial;
      a.t = p.path_length * config.n_water / kSpeedOfLight;
      a.weight = p.weight;
      a.incidence_angle = std::acos(std::clamp(p.direction.z, -1.0, 1.0));
      a.scatter_count = p.scatter_count;
      out.fate = Fate::kArrived;
      out.final_weight = p.weight;
      out.events = event;
      return out;
    }
    p.position = {p.position.x + p.direction.x * s, p.position.y + p.direction.y * s, z_next};
    p.path_length += s;
    if (p.position.z < -config.z_link) {
      out.fate = Fate::kLost;
      out.final_weight = p.weight;
      out.events = event + 1;
      return out;
    }
    if (vsf == nullptr) {
      // Albedo is zero: the first interaction removes the photon.
      out.fate = Fate::kAbsorbed;
      out.final_weight = p.weight;
      out.events = event + 1;
      return out;
    }
    const double theta = vsf->sample_theta(rng.uniform());
    const double phi = sample_phi(rng.uniform());
    p = update_weight(scatter_direction(p, theta, phi), budget);
    if (p.weight < config.weight_threshold) {
      out.fate = Fate::kAbsorbed;
      out.final_weight = p.weight;
      out.events = event + 1;
      return out;
    }
  }
}

PhotonOutcome propagate_photon(const LinkConfig& config, const Medium& medium,
                               std::uint64_t index) {
  CounterRng rng(config.seed, index, CounterRng::kPhoton);
  PhotonOutcome out = propagate_photon(config, medium, rng);
  out.arrival.photon_index = index;
  return out;
}

bool accepted_by_fov(const ArrivalRecord& record, const RxConfig& rx) noexcept {
  return record.incidence_angle <= rx.fov_limit;
}

void TransportCounters::merge(const TransportCounters& o) noexcept {
  emitted += o.emitted;
  arrived += o.arrived;
  accepted += o.accepted;
  absorbed += o.absorbed;
  lost += o.lost;
  event_capped += o.event_capped;
  arrived_weight += o.arrived_weight;
  accepted_weight += o.accepted_weight;
  discarded_weight += o.discarded_weight;
  lost_weight += o.lost_weight;
}

void count_outcome(TransportCounters& c, const PhotonOutcome& o, bool accepted) noexcept {
  ++c.emitted;
  switch (o.fate) {
    case Fate::kArrived:
      ++c.arrived;
      c.arrived_weight += o.arrival.weight;
      if (accepted) {
        ++c.accepted;
        c.accepted_weight += o.arrival.weight;
      }
      break;
    case Fate::kAbsorbed:
      ++c.absorbed;
      c.discarded_weight += o.final_weight;
      break;
    case Fate::kLost:
      ++c.lost;
      c.lost_weight += o.final_weight;
      break;
    case Fate::kEventCap:
      ++c.event_capped;
      break;
  }
}

SimulationResult run_simulation(const LinkConfig& config, const Medium& medium,
                                const RxConfig& rx) {
  config.validate();
  rx.validate();
  SimulationResult result;
  const std::size_t chunks = chunk_count(config.photon_count, kTransportChunk);
  std::vector<std::vector<ArrivalRecord>> parts(chunks);
  std::vector<TransportCounters> counters(chunks);

  parallel_chunks(config.photon_count, kTransportChunk, config.workers,
                  [&](std::size_t chunk, std::uint64_t begin, std::uint64_t end) {
                    auto& out = parts[chunk];
                    auto& cnt = counters[chunk];
                    trace_photons(config, medium, begin, end,
                                  [&](std::uint64_t, const PhotonOutcome& o) {
                                    const bool ok = o.fate == Fate::kArrived &&
                                                    accepted_by_fov(o.arrival, rx);
                                    count_outcome(cnt, o, ok);
                                    if (ok) out.push_back(o.arrival);
                                  });
                  });

  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  result.arrivals.reserve(total);
  for (std::size_t i = 0; i < chunks; ++i) {
    result.arrivals.insert(result.arrivals.end(), parts[i].begin(), parts[i].end());
    result.counters.merge(counters[i]);
  }
  return result;
}

}  // namespace uwchan
