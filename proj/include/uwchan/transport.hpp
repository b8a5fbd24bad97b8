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

#ifndef UWCHAN_TRANSPORT_HPP
#define UWCHAN_TRANSPORT_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "uwchan/phase_functions.hpp"
#include "uwchan/receiver.hpp"
#include "uwchan/rng.hpp"

namespace uwchan {

/// Vacuum speed of light, m/s.
inline constexpr double kSpeedOfLight = 2.998e8;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const noexcept;
};

struct Photon {
  Vec3 position;
  Vec3 direction{0.0, 0.0, 1.0};
  double weight = 1.0;
  double path_length = 0.0;
  std::uint32_t scatter_count = 0;
};

struct LinkConfig {
  double z_link = 30.0;            // m
  double beam_divergence = 1.5e-3;  // full cone angle, rad
  double weight_threshold = 1e-6;
  double n_water = 1.33;
  std::uint64_t photon_count = 1000000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::uint64_t max_events = 1000000;

  double ballistic_time() const noexcept { return z_link * n_water / kSpeedOfLight; }
  void validate() const;

  friend bool operator==(const LinkConfig&, const LinkConfig&) = default;
};

struct ArrivalRecord {
  std::uint64_t photon_index = 0;
  double x = 0.0;  // m
  double y = 0.0;  // m
  double t = 0.0;  // s
  double weight = 0.0;
  double incidence_angle = 0.0;  // rad, from +z
  std::uint32_t scatter_count = 0;

  friend bool operator==(const ArrivalRecord&, const ArrivalRecord&) = default;
};

/// Water channel seen by the transport kernel: coefficients plus the sampling
/// table (absent for a pure absorber).
class Medium {
 public:
  Medium(const ScatteringBudget& budget, const PhaseFunctionParams& params,
         std::size_t resolution = CompositeVsf::kDefaultResolution);

  const ScatteringBudget& budget() const noexcept { return budget_; }
  bool scatters() const noexcept { return vsf_ != nullptr; }
  /// Throws Error(kInvalidArgument) for a non-scattering medium.
  const CompositeVsf& vsf() const;

 private:
  ScatteringBudget budget_;
  std::shared_ptr<const CompositeVsf> vsf_;
};

Photon emit_photon(const LinkConfig& config, CounterRng& rng);

/// Free path -ln(epsilon)/c. Throws Error(kDomain) for epsilon outside (0, 1]
/// or c <= 0.
double step_length(double c, double epsilon);

Photon update_weight(Photon photon, const ScatteringBudget& budget) noexcept;

/// Rotates the direction by polar angle theta_s and azimuth phi_s about the
/// current direction.
Photon scatter_direction(Photon photon, double theta_s, double phi_s) noexcept;

enum class Fate : std::uint8_t { kArrived, kAbsorbed, kLost, kEventCap };

struct PhotonOutcome {
  Fate fate = Fate::kAbsorbed;
  ArrivalRecord arrival;      // valid when fate == kArrived
  double final_weight = 0.0;  // weight when tracking stopped
  std::uint64_t events = 0;
};

PhotonOutcome propagate_photon(const LinkConfig& config, const Medium& medium,
                               CounterRng& rng);

/// Tracks photon `index` of a run on its own counter-based stream.
PhotonOutcome propagate_photon(const LinkConfig& config, const Medium& medium,
                               std::uint64_t index);

struct TransportCounters {
  std::uint64_t emitted = 0;
  std::uint64_t arrived = 0;       // reached the plane, any angle
  std::uint64_t accepted = 0;      // reached the plane inside the FOV
  std::uint64_t absorbed = 0;      // weight fell below the threshold
  std::uint64_t lost = 0;          // backward escape
  std::uint64_t event_capped = 0;  // hit the event cap (diagnostic)
  double arrived_weight = 0.0;
  double accepted_weight = 0.0;
  double discarded_weight = 0.0;  // weight carried by threshold discards
  double lost_weight = 0.0;

  void merge(const TransportCounters& other) noexcept;
};

void count_outcome(TransportCounters& counters, const PhotonOutcome& outcome,
                   bool accepted) noexcept;

struct SimulationResult {
  std::vector<ArrivalRecord> arrivals;  // FOV-accepted, ordered by photon index
  TransportCounters counters;
};

/// Runs config.photon_count histories. The output depends only on the
/// configuration and seed, never on the number of workers.
SimulationResult run_simulation(const LinkConfig& config, const Medium& medium,
                                const RxConfig& rx);

inline constexpr std::uint64_t kTransportChunk = 4096;

/// Calls visit(index, outcome) for photons [begin, end) in index order.
template <typename Visitor>
void trace_photons(const LinkConfig& config, const Medium& medium, std::uint64_t begin,
                   std::uint64_t end, Visitor&& visit) {
  for (std::uint64_t i = begin; i < end; ++i) visit(i, propagate_photon(config, medium, i));
}

bool accepted_by_fov(const ArrivalRecord& record, const RxConfig& rx) noexcept;

}  // namespace uwchan

#endif  // UWCHAN_TRANSPORT_HPP
