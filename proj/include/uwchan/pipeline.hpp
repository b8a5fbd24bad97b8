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

#ifndef UWCHAN_PIPELINE_HPP
#define UWCHAN_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "uwchan/config.hpp"

namespace uwchan {

struct FileEntry {
  std::string path;    // relative to the manifest directory
  std::string sha256;  // lowercase hex
};

struct StageRecord {
  Stage stage = Stage::kSimulate;
  double seconds = 0.0;
  std::vector<FileEntry> files;
};

struct ResultManifest {
  std::filesystem::path directory;
  std::string version;
  std::string label;
  std::string config_text;     // full rendered configuration
  std::string physics_sha256;  // digest of the inputs that fix numeric outputs
  std::vector<StageRecord> stages;

  const StageRecord* find(Stage s) const noexcept;
  bool empty() const noexcept { return stages.empty(); }
};

std::string version_string();

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Runs the selected stages in order (simulate, fit, scintillation, rate).
/// Stages that are not selected are taken from the manifest already in
/// output_dir when its physics digest matches; otherwise a dependent stage
/// fails with Error(kMissingStage). The manifest is rewritten after each
/// completed stage, so a failure leaves the completed stages recorded.
ResultManifest run_pipeline(const RunConfig& config);

/// Reads <dir>/manifest.json and checks every listed digest.
ResultManifest read_manifest(const std::filesystem::path& dir);

/// Summary tables and plot data for one or more runs. Returns the
/// files written. Throws Error(kMissingStage), writing nothing, when no
/// manifest holds a completed stage.
std::vector<std::filesystem::path> emit_tables(const std::vector<ResultManifest>& manifests,
                                               const std::filesystem::path& out_dir);

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace uwchan

#endif  // UWCHAN_PIPELINE_HPP
