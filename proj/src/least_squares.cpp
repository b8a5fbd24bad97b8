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

#include "least_squares.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace uwchan::detail {

namespace {

double half_sum_squares(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return 0.5 * s;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> start,
                             int max_iterations, double tolerance) {
  const std::size_t n = start.size();
  LmResult out;
  out.params = std::move(start);

  std::vector<double> r;
  fn(out.params, r);
  const std::size_t m = r.size();
  out.cost = half_sum_squares(r);
  if (!std::isfinite(out.cost)) return out;

  double lambda = 1e-3;
  std::vector<double> trial(n), r_trial, r_step;
  Eigen::MatrixXd jac(m, n);

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    for (std::size_t j = 0; j < n; ++j) {
      trial = out.params;
      const double h = 1e-7 * std::max(1.0, std::abs(trial[j]));
      trial[j] += h;
      fn(trial, r_step);
      for (std::size_t i = 0; i < m; ++i) jac(i, j) = (r_step[i] - r[i]) / h;
    }
    const Eigen::Map<const Eigen::VectorXd> res(r.data(), static_cast<Eigen::Index>(m));
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, 2.0 * out.cost)) {
      out.converged = true;
      return out;
    }

    bool improved = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      for (std::size_t j = 0; j < n; ++j) {
        a(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      }
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      for (std::size_t j = 0; j < n; ++j) trial[j] = out.params[j] + step[j];
      fn(trial, r_trial);
      const double cost = half_sum_squares(r_trial);
      if (std::isfinite(cost) && cost < out.cost) {
        const double rel = (out.cost - cost) / std::max(out.cost, 1e-300);
        out.params = trial;
        out.cost = cost;
        r.swap(r_trial);
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel < tolerance) out.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    // No descent direction left: a stationary point at working precision.
    if (!improved) out.converged = true;
    if (out.converged) return out;
  }
  return out;
}

}  // namespace uwchan::detail
