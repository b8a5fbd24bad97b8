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

#ifndef UWCHAN_CONFIG_HPP
#define UWCHAN_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uwchan/channel_stats.hpp"
#include "uwchan/datalink.hpp"
#include "uwchan/phase_functions.hpp"
#include "uwchan/receiver.hpp"
#include "uwchan/transport.hpp"

namespace uwchan {

enum class Stage { kSimulate, kFit, kScintillation, kRate };

std::string_view stage_name(Stage s) noexcept;
/// Throws Error(kConfig) for an unknown name.
Stage parse_stage(std::string_view name);

/// Everything a pipeline run needs. One run covers one water body and link
/// length, swept over the listed turbulence values.
struct RunConfig {
  std::string label = "run";

  // water
  std::string water_preset = "coastal";  // "custom" when a/b are explicit
  double a = kCoastal.a;
  double b_petzold = kCoastal.b_petzold;
  double b_sw = kSeawaterScattering;

  // turbulence sweep for simulate / fit / rate
  std::vector<double> b_t{0.0};

  PhaseFunctionParams phase;
  std::size_t resolution = CompositeVsf::kDefaultResolution;
  LinkConfig link;
  RxConfig rx;

  // scintillation
  std::vector<double> bt_max{0.0};
  std::size_t n_iter = 200;
  std::uint64_t photons_per_iter = 1000000;

  // datalink
  RateOptions rate;
  double rate_min = 1e8;
  double rate_max = 1e11;
  std::size_t rate_points = 31;

  // run
  std::vector<Stage> stages{Stage::kSimulate, Stage::kFit, Stage::kScintillation, Stage::kRate};
  std::string output_dir = "uwchan_out";

  bool has_stage(Stage s) const noexcept;
  /// Throws Error(kConfig) naming the offending key.
  void validate() const;
  ScatteringBudget budget(double b_t_value) const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigKey {
  std::string name;  // "section.key"
  std::string help;
};

/// Every accepted key, in render order.
const std::vector<ConfigKey>& config_keys();

/// Applies key/value pairs. water.preset is applied before explicit water
/// values regardless of order. Throws Error(kConfig) for unknown keys and
/// unparsable values.
void apply_settings(RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& settings);

/// Sectioned key = value text; '#' starts a comment. Duplicate and unknown
/// keys are rejected. The result is validated.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

/// Rendering of the inputs that determine numeric outputs (excludes the
/// stage list, output directory and worker count).
std::string physics_text(const RunConfig& config);

/// Shortest text form that reads back to the same double.
std::string format_double(double v);

}  // namespace uwchan

#endif  // UWCHAN_CONFIG_HPP
