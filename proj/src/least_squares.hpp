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

#ifndef UWCHAN_SRC_LEAST_SQUARES_HPP
#define UWCHAN_SRC_LEAST_SQUARES_HPP

#include <functional>
#include <span>
#include <vector>

namespace uwchan::detail {

using ResidualFn = std::function<void(std::span<const double> params, std::vector<double>& residuals)>;

struct LmResult {
  std::vector<double> params;
  double cost = 0.0;  // 0.5 * sum of squared residuals
  bool converged = false;
  int iterations = 0;
};

// Levenberg-Marquardt with a forward-difference Jacobian and Marquardt's
// diagonal scaling. Meant for a handful of parameters.
LmResult levenberg_marquardt(const ResidualFn& fn, std::vector<double> start,
                             int max_iterations, double tolerance);

}  // namespace uwchan::detail

#endif  // UWCHAN_SRC_LEAST_SQUARES_HPP
