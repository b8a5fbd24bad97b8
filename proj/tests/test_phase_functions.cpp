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

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uwchan/error.hpp"
#include "uwchan/phase_functions.hpp"
#include "uwchan/rng.hpp"

using namespace uwchan;
namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::vector<double> draw(const CompositeVsf& vsf, int n, std::uint64_t stream) {
  CounterRng rng(11, stream, CounterRng::kTest);
  std::vector<double> out(n);
  for (double& v : out) v = vsf.sample_theta(rng.uniform());
  return out;
}

// Composite density assembled from the raw formulas, each component
// normalized by oracle quadrature.
struct ReferenceMixture {
  const ScatteringBudget& budget;
  const PhaseFunctionParams& p;
  double n_sw, n_hg, n_ff;

  ReferenceMixture(const ScatteringBudget& b, const PhaseFunctionParams& params)
      : budget(b), p(params) {
    n_sw = oracle::AngularCdf([](double t) { return beta_sw(t); }).total();
    n_hg = oracle::AngularCdf([&](double t) { return beta_hg(t, p.g, p.hg_exponent); }).total();
    n_ff = oracle::AngularCdf([&](double t) { return beta_ff(t, p); }).total();
  }
  double operator()(double t) const {
    const double b = budget.b();
    return budget.b_sw() / b * beta_sw(t) / n_sw +
           budget.b_p() / b * beta_hg(t, p.g, p.hg_exponent) / n_hg +
           budget.b_t() / b * beta_ff(t, p) / n_ff;
  }
};

}  // namespace

TEST_CASE("seawater phase function") {
  CHECK(beta_sw(0.0) == doctest::Approx(0.11422875).epsilon(1e-12));
  CHECK(beta_sw(kPi / 2) == doctest::Approx(0.06225).epsilon(1e-12));
  CHECK(beta_sw(kPi) == doctest::Approx(0.11422875).epsilon(1e-12));
  CHECK(code_of([] { beta_sw(-0.1); }) == ErrorCode::kDomain);
  CHECK(code_of([] { beta_sw(4.0); }) == ErrorCode::kDomain);
}

TEST_CASE("Henyey-Greenstein phase function") {
  const double g = 0.975;
  const double num = 1.0 - g * g;
  CHECK(beta_hg(0.0, g, 1.0) == doctest::Approx(num / (4 * kPi * 0.000625)).epsilon(1e-12));
  CHECK(beta_hg(0.0, g, 1.0) == doctest::Approx(6.2866).epsilon(1e-4));
  CHECK(beta_hg(kPi, g, 1.0) == doctest::Approx(1.0074e-3).epsilon(1e-4));
  for (double th : {0.0, 0.3, 1.7, kPi}) {
    CHECK(beta_hg(th, 1e-12, 1.0) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-9));
    CHECK(beta_hg(th, 1e-12, 1.5) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-9));
  }
  CHECK(code_of([] { beta_hg(5.0, 0.9, 1.0); }) == ErrorCode::kDomain);
}

TEST_CASE("Fournier-Forand phase function") {
  PhaseFunctionParams p;
  CHECK(ff_delta(kPi, 1.33) == doctest::Approx(4.0 / 3.0 / (0.33 * 0.33)).epsilon(1e-12));
  CHECK(ff_delta(kPi, 1.33) == doctest::Approx(12.2437).epsilon(1e-5));
  CHECK(p.v() == doctest::Approx(-0.025));
  CHECK(beta_ff(1e-3, p) > beta_ff(0.1, p));
  CHECK(code_of([&] { beta_ff(0.0, p); }) == ErrorCode::kDegenerate);

  // Continuous through delta = 1.
  const double th1 = 2.0 * std::asin(std::sqrt(3.0 * 0.33 * 0.33 / 4.0));
  const double left = beta_ff(th1 - 2e-3, p);
  const double mid = beta_ff(th1, p);
  const double right = beta_ff(th1 + 2e-3, p);
  CHECK(std::isfinite(mid));
  CHECK(mid > 0.0);
  CHECK(std::abs(mid - 0.5 * (left + right)) < 0.02 * mid);
}

TEST_CASE("sample_phi") {
  CHECK(sample_phi(0.0) == 0.0);
  CHECK(sample_phi(0.5) == doctest::Approx(kPi));
  CHECK(sample_phi(1.0) == doctest::Approx(2 * kPi));
}

TEST_CASE("scattering budget") {
  const auto b = ScatteringBudget::from_petzold(0.179, 0.219, 0.0);
  CHECK(b.b() == doctest::Approx(0.219).epsilon(1e-14));
  CHECK(b.b_p() == doctest::Approx(0.219 - 2.33e-3).epsilon(1e-14));
  CHECK(b.c() == doctest::Approx(0.398).epsilon(1e-14));
  const auto h = ScatteringBudget::from_petzold(0.295, 1.875, 0.0);
  CHECK(h.albedo() == doctest::Approx(1.875 / 2.17).epsilon(1e-14));
  CHECK(b.with_turbulence(0.1).b() == doctest::Approx(0.319).epsilon(1e-14));
  CHECK(code_of([] { ScatteringBudget::from_petzold(-1, 0.2, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { ScatteringBudget::from_petzold(0.1, 0.001, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { ScatteringBudget::from_petzold(0, 0, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("composite VSF invariants") {
  PhaseFunctionParams p;
  for (double bt : {0.0, 0.05, 0.5}) {
    const auto budget = ScatteringBudget::from_petzold(0.179, 0.219, bt);
    const CompositeVsf vsf(budget, p);
    CAPTURE(bt);

    double wsum = 0.0;
    for (auto c : {Component::kSeawater, Component::kParticle, Component::kTurbulence}) {
      wsum += vsf.weight(c);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));

    // Mixture linearity.
    for (double th : {1e-5, 1e-3, 0.05, 0.5, 2.0, 3.0}) {
      double mix = 0.0;
      for (auto c : {Component::kSeawater, Component::kParticle, Component::kTurbulence}) {
        if (vsf.weight(c) > 0.0) mix += vsf.weight(c) * vsf.component_density(c, th);
      }
      CHECK(budget.b() * vsf.density(th) ==
            doctest::Approx(budget.b() * mix).epsilon(1e-12));
    }

    // Normalization on the table knots.
    const auto k = vsf.knots();
    double total = 0.0;
    for (std::size_t i = 1; i < k.size(); ++i) {
      const double f0 = 2 * kPi * vsf.density(std::max(k[i - 1], kFfMinAngle)) * std::sin(k[i - 1]);
      const double f1 = 2 * kPi * vsf.density(k[i]) * std::sin(k[i]);
      total += 0.5 * (f0 + f1) * (k[i] - k[i - 1]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));

    const auto cdf = vsf.cdf_values();
    CHECK(cdf.front() == 0.0);
    CHECK(cdf.back() == 1.0);
    for (std::size_t i = 1; i < cdf.size(); ++i) REQUIRE(cdf[i] >= cdf[i - 1]);

    CHECK(vsf.sample_theta(0.0) == 0.0);
    CHECK(vsf.sample_theta(1.0) == doctest::Approx(kPi));
  }
}

TEST_CASE("single seawater component equals the normalized seawater density") {
  const auto budget = ScatteringBudget::from_petzold(0.1, kSeawaterScattering, 0.0);
  const CompositeVsf vsf(budget, PhaseFunctionParams{});
  CHECK(vsf.weight(Component::kSeawater) == 1.0);
  const double norm = 1.0 / oracle::AngularCdf([](double t) { return beta_sw(t); }).total();
  for (double th : {0.0, 0.7, 2.5}) {
    CHECK(vsf.density(th) == doctest::Approx(norm * beta_sw(th)).epsilon(1e-7));
  }
}

TEST_CASE("isotropic median") {
  PhaseFunctionParams p;
  p.g = 1e-9;
  const auto budget = ScatteringBudget::from_petzold(0.1, 0.5, 0.0, 0.0);
  const CompositeVsf vsf(budget, p);
  const double spacing = (kPi - CompositeVsf::kLogSplitAngle) / (vsf.resolution() - 1);
  CHECK(std::abs(vsf.sample_theta(0.5) - kPi / 2) < spacing);
}

TEST_CASE("cdf inversion round trip") {
  const CompositeVsf vsf(ScatteringBudget::from_petzold(0.295, 1.875, 0.5), PhaseFunctionParams{});
  CounterRng rng(3, 0, CounterRng::kTest);
  const auto knots = vsf.knots();
  const auto cdf = vsf.cdf_values();
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.uniform();
    const double th = vsf.sample_theta(e);
    // one knot's worth of probability around th
    auto it = std::upper_bound(knots.begin(), knots.end(), th);
    const std::size_t j = std::min<std::size_t>(std::size_t(it - knots.begin()), knots.size() - 1);
    const double slack = cdf[j] - cdf[j > 0 ? j - 1 : 0] + 1e-12;
    REQUIRE(std::abs(vsf.cdf(th) - e) <= slack);
  }
}

TEST_CASE("small-angle mass grows with turbulence") {
  PhaseFunctionParams p;
  double prev = -1.0;
  for (double bt : {0.0, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    const CompositeVsf vsf(ScatteringBudget::from_petzold(0.179, 0.219, bt), p);
    const double mass = vsf.cdf(0.1 * kPi / 180.0);
    CHECK(mass > prev);
    prev = mass;
  }
}

TEST_CASE("sampler matches each component (chi-square, 100 bins)") {
  PhaseFunctionParams p;
  struct Case {
    const char* name;
    ScatteringBudget budget;
  };
  const Case cases[] = {
      {"seawater", ScatteringBudget::from_petzold(0.1, kSeawaterScattering, 0.0)},
      {"hg", ScatteringBudget::from_petzold(0.1, 0.5, 0.0, 0.0)},
      {"ff", ScatteringBudget::from_petzold(0.1, 0.0, 0.3)},
      {"harbour composite", ScatteringBudget::from_petzold(0.295, 1.875, 1.0)},
  };
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const CompositeVsf vsf(c.budget, p);
    const ReferenceMixture ref(c.budget, p);
    const oracle::AngularCdf cdf([&](double t) { return ref(t); });
    const auto s = draw(vsf, 400000, stream++);
    // 99 degrees of freedom; 1% critical value 134.6
    CHECK(oracle::chi_square_equiprobable(s, cdf, 100) < 134.6);
  }
}

TEST_CASE("sampler KS distance for the water presets") {
  PhaseFunctionParams p;
  std::uint64_t stream = 100;
  for (const WaterPreset* w : {&kHarbour, &kCoastal, &kClearOcean}) {
    for (double bt : {0.0, 0.1}) {
      CAPTURE(w->name);
      CAPTURE(bt);
      const auto budget = ScatteringBudget::from_petzold(w->a, w->b_petzold, bt);
      const CompositeVsf vsf(budget, p);
      const ReferenceMixture ref(budget, p);
      const oracle::AngularCdf cdf([&](double t) { return ref(t); });
      CHECK(oracle::ks_statistic(draw(vsf, 200000, stream++), cdf) < 0.005);
    }
  }
}

TEST_CASE("construction errors") {
  PhaseFunctionParams p;
  const auto b = ScatteringBudget::from_petzold(0.1, 0.2, 0);
  CHECK(code_of([&] { CompositeVsf(b, p, 999); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { CompositeVsf(ScatteringBudget::from_petzold(0.1, 0, 0), p); }) ==
        ErrorCode::kInvalidArgument);
  p.g = 1.0;
  CHECK(code_of([&] { CompositeVsf(b, p); }) == ErrorCode::kInvalidArgument);
  CHECK(find_water_preset("harbour") == &kHarbour);
  CHECK(find_water_preset("lake") == nullptr);
}
