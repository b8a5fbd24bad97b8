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

#ifndef UWCHAN_RNG_HPP
#define UWCHAN_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace uwchan {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
// A stream is fully determined by (seed, stream id, domain), so every photon
// history or ensemble iteration can draw its own numbers independently of
// which worker thread runs it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  // Domain tags keep streams of different pipeline stages disjoint.
  enum Domain : std::uint32_t {
    kPhoton = 0x50484f54u,
    kEnsemble = 0x454e5342u,
    kDatalink = 0x44415441u,
    kTest = 0x54455354u,
  };

  CounterRng(std::uint64_t seed, std::uint64_t stream,
             std::uint32_t domain = kPhoton) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

// Stateless 64-bit mixer used to derive child seeds (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace uwchan

#endif  // UWCHAN_RNG_HPP
