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

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwchan/uwchan.h"

namespace {

int report_failure(uwc_status s) {
  std::fprintf(stderr, "uwchan: %s: %s\n", uwc_status_name(s), uwc_last_error());
  return s == UWC_E_CONFIG || s == UWC_E_INVALID_ARGUMENT ? 2 : 1;
}

struct Common {
  std::string config_path;
  std::vector<std::string> sets;  // key=value
  std::map<std::string, std::string> flags;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, Common& c, bool allow_stages) {
  cmd->add_option("-c,--config", c.config_path, "configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "override as section.key=value (repeatable)");
  cmd->add_flag("--dry-run", c.dry_run, "print the effective configuration and exit");
  for (size_t i = 0; i < uwc_config_key_count(); ++i) {
    const std::string key = uwc_config_key_name(i);
    if (key == "run.stages" && !allow_stages) continue;
    cmd->add_option_function<std::string>(
        "--" + key, [&c, key](const std::string& v) { c.flags[key] = v; }, uwc_config_key_help(i));
  }
}

// Builds the configuration: file, then UWCHAN_OUTPUT_DIR, then flags.
uwc_status build_config(const Common& c, uwc_config** out) {
  uwc_status s = c.config_path.empty() ? uwc_config_new(out) : uwc_config_load(c.config_path.c_str(), out);
  if (s != UWC_OK) return s;
  if (const char* env = std::getenv("UWCHAN_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    if ((s = uwc_config_set(*out, "run.output_dir", env)) != UWC_OK) return s;
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "uwchan: --set expects key=value, got '%s'\n", kv.c_str());
      return UWC_E_CONFIG;
    }
    pairs.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& kv : c.flags) pairs.push_back(kv);
  // A preset must not override explicit water values given alongside it.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& [k, v] : pairs) {
      if ((k == "water.preset") != (pass == 0)) continue;
      if ((s = uwc_config_set(*out, k.c_str(), v.c_str())) != UWC_OK) return s;
    }
  }
  return UWC_OK;
}

void print_manifest(const uwc_manifest* m) {
  std::printf("manifest: %s/manifest.json\n", uwc_manifest_directory(m));
  for (size_t i = 0; i < uwc_manifest_stage_count(m); ++i) {
    std::printf("  %-14s %8.2f s  %zu files\n", uwc_manifest_stage_name(m, i),
                uwc_manifest_stage_seconds(m, i), uwc_manifest_file_count(m, i));
  }
}

int run_stage(const Common& c, const char* stages) {
  uwc_config* cfg = nullptr;
  uwc_status s = build_config(c, &cfg);
  if (s == UWC_OK && stages != nullptr) s = uwc_config_set(cfg, "run.stages", stages);
  if (s == UWC_OK) s = uwc_config_validate(cfg);
  if (s != UWC_OK) {
    uwc_config_free(cfg);
    return report_failure(s);
  }
  if (c.dry_run) {
    char* text = nullptr;
    s = uwc_config_render(cfg, &text);
    if (s == UWC_OK) std::fputs(text, stdout);
    uwc_string_free(text);
    uwc_config_free(cfg);
    return s == UWC_OK ? 0 : report_failure(s);
  }
  uwc_manifest* m = nullptr;
  s = uwc_run_pipeline(cfg, &m);
  uwc_config_free(cfg);
  if (s != UWC_OK) return report_failure(s);
  print_manifest(m);
  uwc_manifest_free(m);
  return 0;
}

int run_report(const Common& c, std::vector<std::string> from, std::string out_dir) {
  if (from.empty()) {
    uwc_config* cfg = nullptr;
    uwc_status s = build_config(c, &cfg);
    char* dir = nullptr;
    if (s == UWC_OK) s = uwc_config_get(cfg, "run.output_dir", &dir);
    uwc_config_free(cfg);
    if (s != UWC_OK) return report_failure(s);
    from.emplace_back(dir);
    uwc_string_free(dir);
  }
  if (out_dir.empty()) out_dir = from.front() + "/report";
  std::vector<uwc_manifest*> list;
  uwc_status s = UWC_OK;
  for (const std::string& d : from) {
    uwc_manifest* m = nullptr;
    if ((s = uwc_manifest_load(d.c_str(), &m)) != UWC_OK) break;
    list.push_back(m);
  }
  size_t written = 0;
  if (s == UWC_OK) s = uwc_emit_tables(list.data(), list.size(), out_dir.c_str(), &written);
  for (uwc_manifest* m : list) uwc_manifest_free(m);
  if (s != UWC_OK) return report_failure(s);
  std::printf("report: %zu files in %s\n", written, out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo underwater optical channel simulator"};
  app.set_version_flag("--version", uwc_version());
  app.require_subcommand(1);

  Common run_c, sim_c, fit_c, sci_c, rate_c, rep_c;
  auto* run = app.add_subcommand("run", "run the stages listed in run.stages");
  add_common(run, run_c, true);
  auto* sim = app.add_subcommand("simulate", "photon transport and binning");
  add_common(sim, sim_c, false);
  auto* fit = app.add_subcommand("fit", "double-gamma fits of the impulse responses");
  add_common(fit, fit_c, false);
  auto* sci = app.add_subcommand("scintillation", "fading ensembles over bt_max");
  add_common(sci, sci_c, false);
  auto* rate = app.add_subcommand("rate", "information rate and maximum data rate");
  add_common(rate, rate_c, false);
  auto* rep = app.add_subcommand("report", "tables and figure data from finished runs");
  add_common(rep, rep_c, false);
  std::vector<std::string> from;
  std::string out_dir;
  rep->add_option("--from", from, "run directories to include (default: run.output_dir)");
  rep->add_option("-o,--out", out_dir, "report directory (default: <first run>/report)");

  CLI11_PARSE(app, argc, argv);

  if (*run) return run_stage(run_c, nullptr);
  if (*sim) return run_stage(sim_c, "simulate");
  if (*fit) return run_stage(fit_c, "fit");
  if (*sci) return run_stage(sci_c, "scintillation");
  if (*rate) return run_stage(rate_c, "rate");
  if (*rep) return run_report(rep_c, from, out_dir);
  return 1;
}
