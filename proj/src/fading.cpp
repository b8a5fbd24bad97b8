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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "least_squares.hpp"
#include "uwchan/channel_stats.hpp"
#include "uwchan/parallel.hpp"
#include "uwchan/rng.hpp"

namespace uwchan {

double scintillation_index(std::span<const double> s) {
  require(!s.empty(), ErrorCode::kInvalidArgument, "scintillation_index: no samples");
  double m1 = 0.0, m2 = 0.0;
  for (double v : s) {
    m1 += v;
    m2 += v * v;
  }
  m1 /= static_cast<double>(s.size());
  m2 /= static_cast<double>(s.size());
  require(m1 != 0.0, ErrorCode::kDegenerate, "scintillation_index: zero mean intensity");
  return std::max(0.0, m2 - m1 * m1) / (m1 * m1);
}

DensityHistogram density_histogram(std::span<const double> s) {
  require(s.size() >= 2, ErrorCode::kInvalidArgument, "density_histogram: need two samples");
  const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
  const auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s.size()))));
  DensityHistogram h;
  h.lo = *mn;
  h.width = (*mx - *mn) / static_cast<double>(bins);
  require(h.width > 0.0, ErrorCode::kDegenerate, "density_histogram: all samples equal");
  std::vector<double> counts(bins, 0.0);
  for (double v : s) {
    auto k = static_cast<std::size_t>((v - h.lo) / h.width);
    counts[std::min(k, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(s.size()) * h.width);
  for (std::size_t k = 0; k < bins; ++k) {
    h.centers.push_back(h.lo + (static_cast<double>(k) + 0.5) * h.width);
    h.density.push_back(counts[k] * norm);
  }
  return h;
}

double lognormal_pdf(double x, double mu, double sigma) noexcept {
  if (x <= 0.0 || sigma <= 0.0) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gaussian_pdf(double x, double mean, double sigma) noexcept {
  if (sigma <= 0.0) return 0.0;
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

FadingFit fit_fading(std::span<const double> samples, FadingKind kind) {
  FadingFit fit;
  fit.kind = kind;
  fit.sigma_sim_sq = scintillation_index(samples);
  const DensityHistogram h = density_histogram(samples);

  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());

  auto pdf = [kind](double x, double a, double b) {
    return kind == FadingKind::kLogNormal ? lognormal_pdf(x, a, b) : gaussian_pdf(x, a, b);
  };
  const detail::ResidualFn fn = [&](std::span<const double> p, std::vector<double>& r) {
    const double sd = std::exp(std::clamp(p[1], -30.0, 10.0));
    r.resize(h.centers.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = h.density[k] - pdf(h.centers[k], p[0], sd);
  };

  std::vector<double> start;
  if (kind == FadingKind::kLogNormal) {
    const double s2 = std::log1p(std::max(fit.sigma_sim_sq, 1e-12));
    start = {std::log(mean) - 0.5 * s2, 0.5 * std::log(s2)};
  } else {
    start = {mean, std::log(std::sqrt(std::max(fit.sigma_sim_sq, 1e-24)) * mean)};
  }
  const auto lm = detail::levenberg_marquardt(fn, start, 500, 1e-12);
  fit.mu = lm.params[0];
  fit.sigma = std::exp(std::clamp(lm.params[1], -30.0, 10.0));
  if (kind == FadingKind::kLogNormal) {
    fit.sigma_i_sq = std::expm1(fit.sigma * fit.sigma);
  } else {
    require(fit.mu != 0.0, ErrorCode::kDegenerate, "fit_fading: zero fitted mean");
    fit.sigma_i_sq = fit.sigma * fit.sigma / (fit.mu * fit.mu);
  }

  double dm = 0.0;
  for (double d : h.density) dm += d;
  dm /= static_cast<double>(h.density.size());
  double sst = 0.0;
  for (double d : h.density) sst += (d - dm) * (d - dm);
  const double ssr = 2.0 * lm.cost;
  fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
  return fit;
}

double aperture_received(const LinkConfig& config, const Medium& medium, const RxConfig& rx) {
  return simulate_response(config, medium, rx).response.aperture_gain();
}

EnsembleResult scintillation_ensemble(const EnsembleConfig& cfg) {
  require(cfg.n_iter >= 2, ErrorCode::kInvalidArgument, "scintillation: n_iter must be >= 2");
  require(cfg.photons_per_iter > 0, ErrorCode::kInvalidArgument,
          "scintillation: photons_per_iter must be > 0");
  require(cfg.bt_max >= 0.0 && std::isfinite(cfg.bt_max), ErrorCode::kInvalidArgument,
          "scintillation: bt_max must be finite and >= 0");
  cfg.link.validate();
  cfg.rx.validate();
  cfg.phase.validate();

  EnsembleResult out;
  out.b_t.resize(cfg.n_iter);
  out.received.resize(cfg.n_iter);
  parallel_chunks(cfg.n_iter, 1, cfg.link.workers,
                  [&](std::size_t k, std::uint64_t, std::uint64_t) {
                    CounterRng rng(cfg.link.seed, k, CounterRng::kEnsemble);
                    const double bt = cfg.bt_max * rng.uniform();
                    const Medium medium(
                        ScatteringBudget::from_petzold(cfg.a, cfg.b_petzold, bt, cfg.b_sw),
                        cfg.phase, cfg.resolution);
                    LinkConfig link = cfg.link;
                    link.photon_count = cfg.photons_per_iter;
                    link.seed = mix_seed(cfg.link.seed, k);
                    link.workers = 1;
                    out.b_t[k] = bt;
                    out.received[k] = aperture_received(link, medium, cfg.rx);
                  });

  double mean = 0.0;
  for (double v : out.received) mean += v;
  mean /= static_cast<double>(out.received.size());
  require(mean > 0.0, ErrorCode::kDegenerate,
          "scintillation: no iteration received any weight in the aperture");
  out.normalized.reserve(out.received.size());
  for (double v : out.received) out.normalized.push_back(v / mean);
  out.histogram = density_histogram(out.normalized);
  out.fit = fit_fading(out.normalized, FadingKind::kLogNormal);
  return out;
}

}  // namespace uwchan
