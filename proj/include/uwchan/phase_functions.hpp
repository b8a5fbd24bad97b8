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

#ifndef UWCHAN_PHASE_FUNCTIONS_HPP
#define UWCHAN_PHASE_FUNCTIONS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

namespace uwchan {

/// Seawater (pure-water molecular) scattering coefficient, m^-1.
inline constexpr double kSeawaterScattering = 2.33e-3;

/// Scattering budget of one water channel. All coefficients in m^-1.
///
/// The particle part is never set directly: it is what remains of the
/// tabulated (Petzold) total once the seawater part is removed, and the
/// turbulence part is added on top of the tabulated total.
class ScatteringBudget {
 public:
  ScatteringBudget() = default;

  /// Throws Error(kInvalidArgument) on negative coefficients, b_sw > b_petzold
  /// or a vanishing extinction coefficient.
  static ScatteringBudget from_petzold(double a, double b_petzold, double b_t,
                                       double b_sw = kSeawaterScattering);

  double a() const noexcept { return a_; }
  double b_sw() const noexcept { return b_sw_; }
  double b_p() const noexcept { return b_p_; }
  double b_t() const noexcept { return b_t_; }
  double b_petzold() const noexcept { return b_petzold_; }

  double b() const noexcept { return b_sw_ + b_p_ + b_t_; }
  double c() const noexcept { return a_ + b(); }
  double albedo() const noexcept { return b() / c(); }

  ScatteringBudget with_turbulence(double b_t) const;

  friend bool operator==(const ScatteringBudget&, const ScatteringBudget&) = default;

 private:
  double a_ = 0.0;
  double b_sw_ = 0.0;
  double b_p_ = 0.0;
  double b_t_ = 0.0;
  double b_petzold_ = 0.0;
};

struct PhaseFunctionParams {
  double g = 0.975;          // HG average cosine
  double m_junge = 3.05;     // Junge slope
  double n_water = 1.33;     // refractive index used by the FF delta term
  double hg_exponent = 1.5;  // exponent on the HG denominator

  double v() const noexcept { return (3.0 - m_junge) / 2.0; }

  /// Throws Error(kInvalidArgument) when a parameter is out of range.
  void validate() const;

  friend bool operator==(const PhaseFunctionParams&, const PhaseFunctionParams&) = default;
};

struct WaterPreset {
  std::string_view name;
  double a;
  double b_petzold;
};

inline constexpr WaterPreset kHarbour{"harbour", 0.295, 1.875};
inline constexpr WaterPreset kCoastal{"coastal", 0.179, 0.219};
inline constexpr WaterPreset kClearOcean{"clear", 0.114, 0.037};

/// Returns nullptr for an unknown name.
const WaterPreset* find_water_preset(std::string_view name) noexcept;

// Raw (unnormalized) phase functions, sr^-1. Angles in radians.
double beta_sw(double theta);
double beta_hg(double theta, double g, double exponent);
double beta_ff(double theta, const PhaseFunctionParams& params);

/// FF size parameter delta(theta) = 4 / (3 (n-1)^2) sin^2(theta/2).
double ff_delta(double theta, double n_water) noexcept;

/// Angles below this are evaluated at the cutoff (the FF density diverges at 0).
inline constexpr double kFfMinAngle = 1e-6;

double sample_phi(double epsilon) noexcept;

enum class Component : int { kSeawater = 0, kParticle = 1, kTurbulence = 2 };

/// Normalized mixture of seawater, particle and turbulence phase functions,
/// tabulated for inverse-CDF sampling of the polar scattering angle.
///
/// Every component is normalized on the table knots so that
/// 2*pi * integral(beta_i(theta) sin(theta)) = 1 before mixing with weights
/// b_i / b. The table uses `resolution` log-spaced knots on
/// [kFfMinAngle, kLogSplitAngle) and `resolution` linear knots on
/// [kLogSplitAngle, pi], plus theta = 0.
///
/// Immutable after construction.
class CompositeVsf {
 public:
  static constexpr double kLogSplitAngle = 0.1;
  static constexpr std::size_t kMinResolution = 1000;
  static constexpr std::size_t kDefaultResolution = 10000;

  /// Throws Error(kInvalidArgument) if b == 0 or resolution < kMinResolution,
  /// Error(kNormalization) if mixing breaks normalization by more than 1e-4.
  CompositeVsf(const ScatteringBudget& budget, const PhaseFunctionParams& params,
               std::size_t resolution = kDefaultResolution);

  const ScatteringBudget& budget() const noexcept { return budget_; }
  const PhaseFunctionParams& params() const noexcept { return params_; }
  std::size_t resolution() const noexcept { return resolution_; }

  /// Mixture weight b_i / b.
  double weight(Component c) const noexcept { return weights_[index(c)]; }

  /// Normalized density of a single component.
  double component_density(Component c, double theta) const;

  /// Normalized composite density beta~(theta), sr^-1.
  double density(double theta) const;

  /// Cumulative probability of scattering into [0, theta], interpolated on
  /// the table.
  double cdf(double theta) const noexcept;

  /// Polar angle for a uniform deviate, by linear interpolation in the table.
  double sample_theta(double epsilon) const noexcept;

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> cdf_values() const noexcept { return cdf_; }

 private:
  static constexpr std::size_t index(Component c) noexcept {
    return static_cast<std::size_t>(c);
  }
  double raw_component(std::size_t i, double theta) const;
  void build_guide();

  ScatteringBudget budget_;
  PhaseFunctionParams params_;
  std::size_t resolution_;
  std::array<double, 3> weights_{};
  std::array<double, 3> norms_{};  // 1 / (2 pi integral beta_i sin)
  std::vector<double> knots_;
  std::vector<double> cdf_;
  std::vector<std::uint32_t> guide_;
};

}  // namespace uwchan

#endif  // UWCHAN_PHASE_FUNCTIONS_HPP
