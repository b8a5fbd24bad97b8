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

#include "uwchan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace uwchan {

namespace {

struct Entry {
  ConfigKey key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  fail(ErrorCode::kConfig,
       "config: " + std::string(key) + " = '" + std::string(value) + "': " + std::string(what));
}

double to_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    bad_value(key, v, "expected a finite number");
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  v = trim(v);
  // Accept integral values written in exponent form, e.g. 1e7.
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d) || d > 1.8e19) bad_value(key, v, "expected a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> to_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s;
}

void set_water_value(RunConfig& c, double& field, double v, bool is_a) {
  field = v;
  if (const WaterPreset* p = find_water_preset(c.water_preset)) {
    if ((is_a ? p->a : p->b_petzold) != v) c.water_preset = "custom";
  }
}

#define UWC_DOUBLE(sec, name, help, member)                                      \
  Entry {                                                                       \
    {sec "." name, help}, [](const RunConfig& c) { return format_double(c.member); }, \
        [](RunConfig& c, std::string_view v) { c.member = to_double(sec "." name, v); } \
  }
#define UWC_COUNT(sec, name, help, member, type)                                  \
  Entry {                                                                        \
    {sec "." name, help}, [](const RunConfig& c) { return std::to_string(c.member); }, \
        [](RunConfig& c, std::string_view v) {                                   \
          c.member = static_cast<type>(to_u64(sec "." name, v));                 \
        }                                                                        \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"water.preset", "harbour | coastal | clear | custom; sets a and b_petzold"},
       [](const RunConfig& c) { return c.water_preset; },
       [](RunConfig& c, std::string_view v) {
         v = trim(v);
         if (v == "custom") {
           c.water_preset = "custom";
           return;
         }
         const WaterPreset* p = find_water_preset(v);
         if (p == nullptr) bad_value("water.preset", v, "unknown preset");
         c.water_preset = std::string(p->name);
         c.a = p->a;
         c.b_petzold = p->b_petzold;
       }},
      {{"water.a", "absorption coefficient, 1/m"},
       [](const RunConfig& c) { return format_double(c.a); },
       [](RunConfig& c, std::string_view v) { set_water_value(c, c.a, to_double("water.a", v), true); }},
      {{"water.b_petzold", "scattering coefficient incl. seawater, 1/m"},
       [](const RunConfig& c) { return format_double(c.b_petzold); },
       [](RunConfig& c, std::string_view v) {
         set_water_value(c, c.b_petzold, to_double("water.b_petzold", v), false);
       }},
      UWC_DOUBLE("water", "b_sw", "pure seawater scattering, 1/m", b_sw),
      {{"turbulence.b_t", "turbulence scattering values to sweep, 1/m (comma list)"},
       [](const RunConfig& c) { return join_doubles(c.b_t); },
       [](RunConfig& c, std::string_view v) { c.b_t = to_doubles("turbulence.b_t", v); }},
      UWC_DOUBLE("phase", "g", "Henyey-Greenstein average cosine", phase.g),
      UWC_DOUBLE("phase", "m_junge", "Junge slope of the particle size distribution", phase.m_junge),
      UWC_DOUBLE("phase", "n_water", "refractive index in the Fournier-Forand term", phase.n_water),
      UWC_DOUBLE("phase", "hg_exponent", "exponent of the HG denominator", phase.hg_exponent),
      UWC_COUNT("phase", "resolution", "knots per segment of the angle table", resolution, std::size_t),
      UWC_DOUBLE("link", "z_link", "link length, m", link.z_link),
      UWC_DOUBLE("link", "beam_divergence", "full beam divergence, rad", link.beam_divergence),
      UWC_DOUBLE("link", "weight_threshold", "photon discard weight", link.weight_threshold),
      UWC_DOUBLE("link", "n_water", "group refractive index for arrival times", link.n_water),
      UWC_COUNT("link", "photon_count", "photons per simulation", link.photon_count, std::uint64_t),
      UWC_COUNT("link", "max_events", "interaction cap per photon", link.max_events, std::uint64_t),
      UWC_DOUBLE("rx", "grid_pitch", "spatial bin size, m", rx.grid_pitch),
      UWC_DOUBLE("rx", "time_bin", "impulse-response bin width, s", rx.time_bin),
      UWC_DOUBLE("rx", "fov_limit", "acceptance half-angle, rad", rx.fov_limit),
      UWC_DOUBLE("rx", "map_extent", "half-width of the spatial map, m", rx.map_extent),
      UWC_DOUBLE("rx", "aperture_radius", "receiver radius for impulse and fading, m", rx.aperture_radius),
      UWC_DOUBLE("rx", "time_window", "impulse-response span, s", rx.time_window),
      {{"scintillation.bt_max", "upper ends of the b_t draw, 1/m (comma list)"},
       [](const RunConfig& c) { return join_doubles(c.bt_max); },
       [](RunConfig& c, std::string_view v) { c.bt_max = to_doubles("scintillation.bt_max", v); }},
      UWC_COUNT("scintillation", "n_iter", "ensemble iterations", n_iter, std::size_t),
      UWC_COUNT("scintillation", "photons_per_iter", "photons per iteration", photons_per_iter,
                std::uint64_t),
      UWC_DOUBLE("datalink", "p_t", "average transmit power, W", rate.p_t),
      UWC_DOUBLE("datalink", "wavelength", "optical wavelength, m", rate.wavelength),
      UWC_DOUBLE("datalink", "n_bg", "background photons per slot", rate.n_bg),
      UWC_DOUBLE("datalink", "mass_cutoff", "tail fraction dropped from the taps", rate.mass_cutoff),
      UWC_COUNT("datalink", "max_memory", "largest channel memory, bit slots", rate.max_memory,
                std::size_t),
      UWC_COUNT("datalink", "trellis_memory", "largest trellis memory, bit slots",
                rate.trellis_memory, std::size_t),
      UWC_COUNT("datalink", "l_bits", "bits per information-rate estimate", rate.l_bits,
                std::size_t),
      UWC_DOUBLE("datalink", "rate_min", "lowest symbol rate, Hz", rate_min),
      UWC_DOUBLE("datalink", "rate_max", "highest symbol rate, Hz", rate_max),
      UWC_COUNT("datalink", "rate_points", "log-spaced symbol rates", rate_points, std::size_t),
      {{"run.label", "name used in reports"},
       [](const RunConfig& c) { return c.label; },
       [](RunConfig& c, std::string_view v) { c.label = std::string(trim(v)); }},
      {{"run.seed", "master seed"},
       [](const RunConfig& c) { return std::to_string(c.link.seed); },
       [](RunConfig& c, std::string_view v) {
         c.link.seed = to_u64("run.seed", v);
         c.rate.seed = c.link.seed;
       }},
      {{"run.workers", "worker threads, 0 = all cores"},
       [](const RunConfig& c) { return std::to_string(c.link.workers); },
       [](RunConfig& c, std::string_view v) {
         const auto w = to_u64("run.workers", v);
         if (w > 4096) bad_value("run.workers", v, "too many workers");
         c.link.workers = static_cast<unsigned>(w);
         c.rate.workers = c.link.workers;
       }},
      {{"run.stages", "simulate, fit, scintillation, rate (comma list)"},
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.stages.size(); ++i) {
           if (i) s += ", ";
           s += stage_name(c.stages[i]);
         }
         return s;
       },
       [](RunConfig& c, std::string_view v) {
         std::set<Stage> chosen;
         for (auto item : split_list(v)) chosen.insert(parse_stage(item));
         c.stages.assign(chosen.begin(), chosen.end());
       }},
      {{"run.output_dir", "directory for artifacts and the manifest"},
       [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); }},
  };
  return table;
}

#undef UWC_DOUBLE
#undef UWC_COUNT

const Entry* find_entry(std::string_view name) {
  for (const Entry& e : entries())
    if (e.key.name == name) return &e;
  return nullptr;
}

void check(bool ok, std::string_view key, std::string_view what) {
  if (!ok) fail(ErrorCode::kConfig, "config: " + std::string(key) + ": " + std::string(what));
}

}  // namespace

std::string_view stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::kSimulate:
      return "simulate";
    case Stage::kFit:
      return "fit";
    case Stage::kScintillation:
      return "scintillation";
    case Stage::kRate:
      return "rate";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kSimulate, Stage::kFit, Stage::kScintillation, Stage::kRate})
    if (stage_name(s) == name) return s;
  fail(ErrorCode::kConfig, "config: unknown stage '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool RunConfig::has_stage(Stage s) const noexcept {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

ScatteringBudget RunConfig::budget(double b_t_value) const {
  return ScatteringBudget::from_petzold(a, b_petzold, b_t_value, b_sw);
}

void RunConfig::validate() const {
  auto wrap = [](std::string_view key, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfig) throw;
      fail(ErrorCode::kConfig, "config: " + std::string(key) + ": " + e.what());
    }
  };
  check(!label.empty(), "run.label", "must not be empty");
  auto plain = [](const std::string& v) {
    return v.find_first_of("#\n\r") == std::string::npos && trim(v) == v;
  };
  check(plain(label), "run.label", "no '#', line breaks or surrounding spaces");
  check(!output_dir.empty(), "run.output_dir", "must not be empty");
  check(plain(output_dir), "run.output_dir", "no '#', line breaks or surrounding spaces");
  check(!stages.empty(), "run.stages", "select at least one stage");
  check(!b_t.empty(), "turbulence.b_t", "list must not be empty");
  for (double v : b_t) check(v >= 0.0 && std::isfinite(v), "turbulence.b_t", "values must be >= 0");
  check(std::is_sorted(b_t.begin(), b_t.end()) &&
            std::adjacent_find(b_t.begin(), b_t.end()) == b_t.end(),
        "turbulence.b_t", "values must be strictly increasing");
  check(!bt_max.empty(), "scintillation.bt_max", "list must not be empty");
  for (double v : bt_max)
    check(v >= 0.0 && std::isfinite(v), "scintillation.bt_max", "values must be >= 0");
  check(std::is_sorted(bt_max.begin(), bt_max.end()) &&
            std::adjacent_find(bt_max.begin(), bt_max.end()) == bt_max.end(),
        "scintillation.bt_max", "values must be strictly increasing");
  check(n_iter >= 30, "scintillation.n_iter", "must be >= 30");
  check(photons_per_iter > 0, "scintillation.photons_per_iter", "must be > 0");
  check(resolution >= 1000, "phase.resolution", "must be >= 1000");
  check(rate_min > 0.0 && rate_max > rate_min, "datalink.rate_min",
        "need 0 < rate_min < rate_max");
  check(rate_points >= 10, "datalink.rate_points", "must be >= 10");
  check(link.seed == rate.seed && link.workers == rate.workers, "run.seed",
        "seed and workers must be set through run.*");
  wrap("water", [&] { (void)budget(b_t.back()); });
  wrap("phase", [&] { phase.validate(); });
  wrap("link", [&] { link.validate(); });
  wrap("rx", [&] { rx.validate(); });
  wrap("datalink", [&] { rate.validate(); });
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const Entry& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void apply_settings(RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& settings) {
  for (const auto& [k, v] : settings)
    if (find_entry(k) == nullptr) fail(ErrorCode::kConfig, "config: unknown key '" + k + "'");
  for (const auto& [k, v] : settings)
    if (k == "water.preset") find_entry(k)->set(config, v);
  for (const auto& [k, v] : settings)
    if (k != "water.preset") find_entry(k)->set(config, v);
}

RunConfig parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> settings;
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::kConfig, where + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kConfig, where + "expected key = value");
    if (section.empty()) fail(ErrorCode::kConfig, where + "key outside any [section]");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    if (find_entry(key) == nullptr) fail(ErrorCode::kConfig, where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(ErrorCode::kConfig, where + "duplicate key '" + key + "'");
    settings.emplace_back(key, std::string(trim(line.substr(eq + 1))));
  }
  RunConfig config;
  apply_settings(config, settings);
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string render(const RunConfig& c, bool physics_only) {
  std::string out;
  std::string section;
  for (const Entry& e : entries()) {
    const auto dot = e.key.name.find('.');
    const std::string sec = e.key.name.substr(0, dot);
    const std::string name = e.key.name.substr(dot + 1);
    if (physics_only &&
        (e.key.name == "run.stages" || e.key.name == "run.output_dir" ||
         e.key.name == "run.workers" || e.key.name == "run.label")) {
      continue;
    }
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += name + " = " + e.get(c) + "\n";
  }
  return out;
}

}  // namespace

std::string render_config(const RunConfig& config) { return render(config, false); }

std::string physics_text(const RunConfig& config) { return render(config, true); }

}  // namespace uwchan
