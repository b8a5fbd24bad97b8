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

#include "uwchan/phase_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwchan/error.hpp"

namespace uwchan {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double theta, const char* who) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    fail(ErrorCode::kDomain, std::string(who) + ": angle outside [0, pi]: " +
                                 std::to_string(theta));
  }
}

// FF density for theta > 0 with delta != 1.
double ff_formula(double theta, double n, double v, double delta180_v,
                  double delta180) {
  const double delta = ff_delta(theta, n);
  const double delta_v = std::pow(delta, v);
  const double s = std::sin(theta / 2.0);
  const double one_minus = 1.0 - delta;
  const double bracket = v * one_minus - (1.0 - delta_v) +
                         (delta * (1.0 - delta_v) - v * one_minus) / (s * s);
  const double first = bracket / (4.0 * kPi * one_minus * one_minus * delta_v);
  const double c = std::cos(theta);
  const double second = (1.0 - delta180_v) /
                        (16.0 * kPi * (delta180 - 1.0) * delta180_v) *
                        (3.0 * c * c - 1.0);
  return first + second;
}

// Angle at which delta(theta) equals `target`, or NaN if unreachable.
double ff_angle_for_delta(double target, double n) {
  const double s2 = target * 3.0 * (n - 1.0) * (n - 1.0) / 4.0;
  if (s2 <= 0.0 || s2 >= 1.0) return std::nan("");
  return 2.0 * std::asin(std::sqrt(s2));
}

// Removable singularity at delta == 1: below this distance the bracket loses
// all significant digits, so interpolate between points just outside.
constexpr double kDeltaGuard = 1e-3;

}  // namespace

ScatteringBudget ScatteringBudget::from_petzold(double a, double b_petzold,
                                                double b_t, double b_sw) {
  require(a >= 0.0 && b_petzold >= 0.0 && b_t >= 0.0 && b_sw >= 0.0,
          ErrorCode::kInvalidArgument, "scattering budget: coefficients must be >= 0");
  require(b_sw <= b_petzold || b_petzold == 0.0, ErrorCode::kInvalidArgument,
          "scattering budget: b_sw exceeds the tabulated total");
  ScatteringBudget out;
  out.a_ = a;
  out.b_petzold_ = b_petzold;
  // A zero tabulated total means a pure absorber: no seawater part either.
  out.b_sw_ = b_petzold == 0.0 ? 0.0 : b_sw;
  out.b_p_ = b_petzold - out.b_sw_;
  out.b_t_ = b_t;
  require(out.c() > 0.0, ErrorCode::kInvalidArgument,
          "scattering budget: extinction coefficient must be > 0");
  return out;
}

ScatteringBudget ScatteringBudget::with_turbulence(double b_t) const {
  return from_petzold(a_, b_petzold_, b_t, b_sw_);
}

void PhaseFunctionParams::validate() const {
  require(g > 0.0 && g < 1.0, ErrorCode::kInvalidArgument, "phase params: g must be in (0, 1)");
  require(n_water > 1.0, ErrorCode::kInvalidArgument, "phase params: n_water must be > 1");
  require(std::isfinite(v()) && v() != 0.0, ErrorCode::kInvalidArgument,
          "phase params: (3 - m_junge) / 2 must be finite and nonzero");
  require(hg_exponent > 0.0 && std::isfinite(hg_exponent), ErrorCode::kInvalidArgument,
          "phase params: hg_exponent must be > 0");
}

const WaterPreset* find_water_preset(std::string_view name) noexcept {
  for (const WaterPreset* p : {&kHarbour, &kCoastal, &kClearOcean}) {
    if (p->name == name) return p;
  }
  return nullptr;
}

double beta_sw(double theta) {
  check_angle(theta, "beta_sw");
  const double c = std::cos(theta);
  return 0.06225 * (1.0 + 0.835 * c * c);
}

double beta_hg(double theta, double g, double exponent) {
  check_angle(theta, "beta_hg");
  const double base = 1.0 + g * g - 2.0 * g * std::cos(theta);
  if (!(base > 0.0)) fail(ErrorCode::kDegenerate, "beta_hg: denominator base <= 0");
  return (1.0 - g * g) / (4.0 * kPi * std::pow(base, exponent));
}

double ff_delta(double theta, double n_water) noexcept {
  const double s = std::sin(theta / 2.0);
  return 4.0 / (3.0 * (n_water - 1.0) * (n_water - 1.0)) * s * s;
}

double beta_ff(double theta, const PhaseFunctionParams& params) {
  if (theta == 0.0) fail(ErrorCode::kDegenerate, "beta_ff: density diverges at theta = 0");
  check_angle(theta, "beta_ff");
  const double n = params.n_water;
  const double v = params.v();
  const double delta180 = ff_delta(kPi, n);
  const double delta180_v = std::pow(delta180, v);
  const double delta = ff_delta(theta, n);
  if (std::abs(delta - 1.0) < kDeltaGuard) {
    const double lo = ff_angle_for_delta(1.0 - kDeltaGuard, n);
    const double hi = ff_angle_for_delta(1.0 + kDeltaGuard, n);
    const double f_lo = ff_formula(lo, n, v, delta180_v, delta180);
    const double f_hi = ff_formula(hi, n, v, delta180_v, delta180);
    return f_lo + (f_hi - f_lo) * (theta - lo) / (hi - lo);
  }
  return ff_formula(theta, n, v, delta180_v, delta180);
}

double sample_phi(double epsilon) noexcept { return 2.0 * kPi * epsilon; }

CompositeVsf::CompositeVsf(const ScatteringBudget& budget,
                           const PhaseFunctionParams& params, std::size_t resolution)
    : budget_(budget), params_(params), resolution_(resolution) {
  params_.validate();
  require(budget.b() > 0.0, ErrorCode::kInvalidArgument,
          "composite VSF: total scattering coefficient must be > 0");
  require(resolution >= kMinResolution, ErrorCode::kInvalidArgument,
          "composite VSF: resolution must be >= 1000");

  const double b = budget.b();
  weights_ = {budget.b_sw() / b, budget.b_p() / b, budget.b_t() / b};

  knots_.reserve(2 * resolution + 1);
  knots_.push_back(0.0);
  const double log_lo = std::log(kFfMinAngle);
  const double log_hi = std::log(kLogSplitAngle);
  for (std::size_t i = 0; i < resolution; ++i) {
    knots_.push_back(std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                           static_cast<double>(resolution)));
  }
  for (std::size_t i = 0; i < resolution; ++i) {
    knots_.push_back(kLogSplitAngle + (kPi - kLogSplitAngle) * static_cast<double>(i) /
                                          static_cast<double>(resolution - 1));
  }
  knots_.back() = kPi;

  const std::size_t n = knots_.size();
  std::array<std::vector<double>, 3> integrand;
  for (std::size_t c = 0; c < 3; ++c) {
    integrand[c].resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      integrand[c][k] = 2.0 * kPi * raw_component(c, knots_[k]) * std::sin(knots_[k]);
    }
    double total = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      total += 0.5 * (integrand[c][k] + integrand[c][k - 1]) * (knots_[k] - knots_[k - 1]);
    }
    require(total > 0.0 && std::isfinite(total), ErrorCode::kNormalization,
            "composite VSF: component does not integrate to a positive value");
    norms_[c] = 1.0 / total;
  }

  cdf_.assign(n, 0.0);
  double prev = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double y0 = 0.0, y1 = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      y0 += weights_[c] * norms_[c] * integrand[c][k - 1];
      y1 += weights_[c] * norms_[c] * integrand[c][k];
    }
    prev += 0.5 * (y0 + y1) * (knots_[k] - knots_[k - 1]);
    cdf_[k] = prev;
  }
  const double total = cdf_.back();
  if (!(std::abs(total - 1.0) <= 1e-4)) {
    fail(ErrorCode::kNormalization,
         "composite VSF: mixture integrates to " + std::to_string(total));
  }
  for (double& v : cdf_) v /= total;
  cdf_.back() = 1.0;
  build_guide();
}

double CompositeVsf::raw_component(std::size_t i, double theta) const {
  switch (i) {
    case 0:
      return beta_sw(theta);
    case 1:
      return beta_hg(theta, params_.g, params_.hg_exponent);
    default:
      return beta_ff(std::max(theta, kFfMinAngle), params_);
  }
}

double CompositeVsf::component_density(Component c, double theta) const {
  check_angle(theta, "component_density");
  return norms_[index(c)] * raw_component(index(c), theta);
}

double CompositeVsf::density(double theta) const {
  check_angle(theta, "density");
  double sum = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    if (weights_[c] > 0.0) sum += weights_[c] * norms_[c] * raw_component(c, theta);
  }
  return sum;
}

double CompositeVsf::cdf(double theta) const noexcept {
  if (theta <= 0.0) return 0.0;
  if (theta >= kPi) return 1.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), theta);
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double f = (theta - knots_[j]) / (knots_[j + 1] - knots_[j]);
  return cdf_[j] + f * (cdf_[j + 1] - cdf_[j]);
}

void CompositeVsf::build_guide() {
  const std::size_t buckets = 4 * knots_.size();
  guide_.resize(buckets);
  std::size_t j = 0;
  for (std::size_t k = 0; k < buckets; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(buckets);
    while (j + 2 < cdf_.size() && cdf_[j + 1] <= u) ++j;
    guide_[k] = static_cast<std::uint32_t>(j);
  }
}

double CompositeVsf::sample_theta(double epsilon) const noexcept {
  if (!(epsilon > 0.0)) return 0.0;
  if (epsilon >= 1.0) return kPi;
  const std::size_t bucket = static_cast<std::size_t>(epsilon * static_cast<double>(guide_.size()));
  std::size_t j = guide_[std::min(bucket, guide_.size() - 1)];
  const std::size_t last = cdf_.size() - 2;
  while (j < last && cdf_[j + 1] <= epsilon) ++j;
  const double span = cdf_[j + 1] - cdf_[j];
  const double f = span > 0.0 ? (epsilon - cdf_[j]) / span : 0.0;
  return knots_[j] + f * (knots_[j + 1] - knots_[j]);
}

}  // namespace uwchan
