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

#ifndef UWCHAN_RECEIVER_HPP
#define UWCHAN_RECEIVER_HPP

#include <numbers>

namespace uwchan {

// Receiver-plane geometry: binning of the spatial map and of the impulse
// response, plus the acceptance cone.
struct RxConfig {
  double grid_pitch = 0.1;                    // m
  double time_bin = 1e-10;                    // s
  double fov_limit = std::numbers::pi / 2.0;  // acceptance half-angle, rad
  double map_extent = 10.0;                   // half-width of the binned plane, m
  double aperture_radius = 0.05;              // impulse-response aperture, m
  double time_window = 50e-9;                 // impulse histogram span (excess delay), s

  void validate() const;

  friend bool operator==(const RxConfig&, const RxConfig&) = default;
};

}  // namespace uwchan

#endif  // UWCHAN_RECEIVER_HPP
