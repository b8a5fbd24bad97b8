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

#include "uwchan/uwchan.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "uwchan/pipeline.hpp"

struct uwc_config {
  uwchan::RunConfig config;
};

struct uwc_manifest {
  uwchan::ResultManifest manifest;
  std::string directory;
};

struct uwc_vsf {
  std::unique_ptr<uwchan::CompositeVsf> vsf;
};

namespace {

thread_local std::string g_last_error;

uwc_status to_status(uwchan::ErrorCode c) { return static_cast<uwc_status>(static_cast<int>(c)); }

uwc_status set_error(uwc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
uwc_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return UWC_OK;
  } catch (const uwchan::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(UWC_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(UWC_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(UWC_E_INTERNAL, "unknown error");
  }
}

#define UWC_REQUIRE_PTR(p)                                                 \
  do {                                                                     \
    if ((p) == nullptr) return set_error(UWC_E_NULL_POINTER, #p " is NULL"); \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const uwchan::StageRecord* stage_at(const uwc_manifest* m, size_t i) {
  if (m == nullptr || i >= m->manifest.stages.size()) return nullptr;
  return &m->manifest.stages[i];
}

const uwchan::FileEntry* file_at(const uwc_manifest* m, size_t stage, size_t file) {
  const auto* s = stage_at(m, stage);
  if (s == nullptr || file >= s->files.size()) return nullptr;
  return &s->files[file];
}

uwchan::DgfFit to_fit(const uwc_dgf& f) {
  uwchan::DgfFit d;
  d.c1 = f.c1;
  d.c2 = f.c2;
  d.c3 = f.c3;
  d.c4 = f.c4;
  d.r_squared = f.r_squared;
  d.time_bin = f.time_bin;
  d.d_rms = uwchan::dgf_drms(d);
  return d;
}

void from_fit(const uwchan::DgfFit& d, uwc_dgf* f) {
  f->c1 = d.c1;
  f->c2 = d.c2;
  f->c3 = d.c3;
  f->c4 = d.c4;
  f->r_squared = d.r_squared;
  f->d_rms = d.d_rms;
  f->time_bin = d.time_bin;
}

}  // namespace

extern "C" {

const char* uwc_version(void) {
  static const std::string v = uwchan::version_string();
  return v.c_str();
}

const char* uwc_last_error(void) { return g_last_error.c_str(); }

const char* uwc_status_name(uwc_status s) {
  switch (s) {
    case UWC_OK: return "ok";
    case UWC_E_INVALID_ARGUMENT: return "invalid argument";
    case UWC_E_DOMAIN: return "domain error";
    case UWC_E_DEGENERATE: return "degenerate input";
    case UWC_E_NORMALIZATION: return "normalization error";
    case UWC_E_ITERATION_CAP: return "iteration cap";
    case UWC_E_FIT_NOT_CONVERGED: return "fit did not converge";
    case UWC_E_MEMORY_CAP: return "channel memory cap";
    case UWC_E_NUMERICAL: return "numerical failure";
    case UWC_E_IO: return "i/o error";
    case UWC_E_CONFIG: return "configuration error";
    case UWC_E_MISSING_STAGE: return "missing stage";
    case UWC_E_NULL_POINTER: return "null pointer";
    case UWC_E_OUT_OF_RANGE: return "index out of range";
    case UWC_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void uwc_string_free(char* text) { std::free(text); }

uwc_status uwc_config_new(uwc_config** out) {
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new uwc_config{}; });
}

uwc_status uwc_config_parse(const char* text, uwc_config** out) {
  UWC_REQUIRE_PTR(text);
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new uwc_config{uwchan::parse_config(text)}; });
}

uwc_status uwc_config_load(const char* path, uwc_config** out) {
  UWC_REQUIRE_PTR(path);
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new uwc_config{uwchan::load_config(path)}; });
}

void uwc_config_free(uwc_config* config) { delete config; }

uwc_status uwc_config_set(uwc_config* config, const char* key, const char* value) {
  UWC_REQUIRE_PTR(config);
  UWC_REQUIRE_PTR(key);
  UWC_REQUIRE_PTR(value);
  return guarded([&] { uwchan::apply_settings(config->config, {{key, value}}); });
}

uwc_status uwc_config_get(const uwc_config* config, const char* key, char** value) {
  UWC_REQUIRE_PTR(config);
  UWC_REQUIRE_PTR(key);
  UWC_REQUIRE_PTR(value);
  *value = nullptr;
  return guarded([&] {
    const std::string text = uwchan::render_config(config->config);
    const std::string k = key;
    const auto dot = k.find('.');
    if (dot == std::string::npos) uwchan::fail(uwchan::ErrorCode::kConfig, "config: unknown key '" + k + "'");
    const std::string header = "[" + k.substr(0, dot) + "]\n";
    const std::string name = k.substr(dot + 1) + " = ";
    auto pos = text.find(header);
    if (pos != std::string::npos) {
      const auto end = text.find("\n[", pos);
      auto line = text.find("\n" + name, pos);
      if (line != std::string::npos && line < end) {
        line += 1 + name.size();
        *value = dup_string(text.substr(line, text.find('\n', line) - line));
        return;
      }
    }
    uwchan::fail(uwchan::ErrorCode::kConfig, "config: unknown key '" + k + "'");
  });
}

uwc_status uwc_config_validate(const uwc_config* config) {
  UWC_REQUIRE_PTR(config);
  return guarded([&] { config->config.validate(); });
}

uwc_status uwc_config_render(const uwc_config* config, char** text) {
  UWC_REQUIRE_PTR(config);
  UWC_REQUIRE_PTR(text);
  *text = nullptr;
  return guarded([&] { *text = dup_string(uwchan::render_config(config->config)); });
}

size_t uwc_config_key_count(void) { return uwchan::config_keys().size(); }

const char* uwc_config_key_name(size_t i) {
  const auto& k = uwchan::config_keys();
  return i < k.size() ? k[i].name.c_str() : nullptr;
}

const char* uwc_config_key_help(size_t i) {
  const auto& k = uwchan::config_keys();
  return i < k.size() ? k[i].help.c_str() : nullptr;
}

uwc_status uwc_run_pipeline(const uwc_config* config, uwc_manifest** out) {
  UWC_REQUIRE_PTR(config);
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] {
    auto m = uwchan::run_pipeline(config->config);
    const std::string dir = m.directory.string();
    *out = new uwc_manifest{std::move(m), dir};
  });
}

uwc_status uwc_manifest_load(const char* directory, uwc_manifest** out) {
  UWC_REQUIRE_PTR(directory);
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new uwc_manifest{uwchan::read_manifest(directory), directory}; });
}

void uwc_manifest_free(uwc_manifest* manifest) { delete manifest; }

size_t uwc_manifest_stage_count(const uwc_manifest* m) {
  return m == nullptr ? 0 : m->manifest.stages.size();
}

const char* uwc_manifest_stage_name(const uwc_manifest* m, size_t stage) {
  const auto* s = stage_at(m, stage);
  return s == nullptr ? nullptr : uwchan::stage_name(s->stage).data();
}

double uwc_manifest_stage_seconds(const uwc_manifest* m, size_t stage) {
  const auto* s = stage_at(m, stage);
  return s == nullptr ? -1.0 : s->seconds;
}

size_t uwc_manifest_file_count(const uwc_manifest* m, size_t stage) {
  const auto* s = stage_at(m, stage);
  return s == nullptr ? 0 : s->files.size();
}

const char* uwc_manifest_file_path(const uwc_manifest* m, size_t stage, size_t file) {
  const auto* f = file_at(m, stage, file);
  return f == nullptr ? nullptr : f->path.c_str();
}

const char* uwc_manifest_file_sha256(const uwc_manifest* m, size_t stage, size_t file) {
  const auto* f = file_at(m, stage, file);
  return f == nullptr ? nullptr : f->sha256.c_str();
}

const char* uwc_manifest_directory(const uwc_manifest* m) {
  return m == nullptr ? nullptr : m->directory.c_str();
}

uwc_status uwc_emit_tables(const uwc_manifest* const* manifests, size_t count, const char* out_dir,
                           size_t* written) {
  UWC_REQUIRE_PTR(out_dir);
  if (count > 0) UWC_REQUIRE_PTR(manifests);
  return guarded([&] {
    std::vector<uwchan::ResultManifest> list;
    for (size_t i = 0; i < count; ++i) {
      if (manifests[i] == nullptr)
        uwchan::fail(uwchan::ErrorCode::kInvalidArgument, "emit_tables: NULL manifest in list");
      list.push_back(manifests[i]->manifest);
    }
    const auto files = uwchan::emit_tables(list, out_dir);
    if (written != nullptr) *written = files.size();
  });
}

void uwc_phase_params_default(uwc_phase_params* p) {
  if (p == nullptr) return;
  const uwchan::PhaseFunctionParams d;
  *p = {d.g, d.m_junge, d.n_water, d.hg_exponent};
}

uwc_status uwc_vsf_new(double a, double b_petzold, double b_t, double b_sw,
                       const uwc_phase_params* params, size_t resolution, uwc_vsf** out) {
  UWC_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] {
    uwchan::PhaseFunctionParams p;
    if (params != nullptr) p = {params->g, params->m_junge, params->n_water, params->hg_exponent};
    const auto budget = uwchan::ScatteringBudget::from_petzold(a, b_petzold, b_t, b_sw);
    auto vsf = std::make_unique<uwchan::CompositeVsf>(
        budget, p, resolution == 0 ? uwchan::CompositeVsf::kDefaultResolution : resolution);
    *out = new uwc_vsf{std::move(vsf)};
  });
}

void uwc_vsf_free(uwc_vsf* vsf) { delete vsf; }

uwc_status uwc_vsf_density(const uwc_vsf* vsf, double theta, double* out) {
  UWC_REQUIRE_PTR(vsf);
  UWC_REQUIRE_PTR(out);
  return guarded([&] { *out = vsf->vsf->density(theta); });
}

uwc_status uwc_vsf_cdf(const uwc_vsf* vsf, double theta, double* out) {
  UWC_REQUIRE_PTR(vsf);
  UWC_REQUIRE_PTR(out);
  return guarded([&] { *out = vsf->vsf->cdf(theta); });
}

uwc_status uwc_vsf_sample(const uwc_vsf* vsf, double epsilon, double* theta) {
  UWC_REQUIRE_PTR(vsf);
  UWC_REQUIRE_PTR(theta);
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    return set_error(UWC_E_INVALID_ARGUMENT, "uwc_vsf_sample: epsilon must lie in [0, 1]");
  return guarded([&] { *theta = vsf->vsf->sample_theta(epsilon); });
}

uwc_status uwc_drms(const double* hist, size_t n, double time_bin, double* out) {
  UWC_REQUIRE_PTR(hist);
  UWC_REQUIRE_PTR(out);
  return guarded([&] { *out = uwchan::compute_drms({hist, n}, time_bin); });
}

uwc_status uwc_fit_dgf(const double* hist, size_t n, double time_bin, uwc_dgf* out) {
  UWC_REQUIRE_PTR(hist);
  UWC_REQUIRE_PTR(out);
  return guarded([&] {
    try {
      from_fit(uwchan::fit_dgf({hist, n}, time_bin), out);
    } catch (const uwchan::DgfFitError& e) {
      from_fit(e.best(), out);
      throw;
    }
  });
}

void uwc_rate_options_default(uwc_rate_options* o) {
  if (o == nullptr) return;
  const uwchan::RateOptions d;
  *o = {d.p_t, d.wavelength, d.n_bg, d.mass_cutoff, d.max_memory, d.trellis_memory,
        d.l_bits, d.seed, d.workers};
}

double uwc_photons_per_bit(double p_t, double t_b, double wavelength) {
  return uwchan::photons_per_bit(p_t, t_b, wavelength);
}

uwc_status uwc_max_rate(const uwc_dgf* fit, const double* grid, size_t n,
                        const uwc_rate_options* options, double* r_max, double* best) {
  UWC_REQUIRE_PTR(fit);
  UWC_REQUIRE_PTR(grid);
  UWC_REQUIRE_PTR(r_max);
  return guarded([&] {
    uwchan::RateOptions o;
    if (options != nullptr) {
      o.p_t = options->p_t;
      o.wavelength = options->wavelength;
      o.n_bg = options->n_bg;
      o.mass_cutoff = options->mass_cutoff;
      o.max_memory = options->max_memory;
      o.trellis_memory = options->trellis_memory;
      o.l_bits = options->l_bits;
      o.seed = options->seed;
      o.workers = options->workers;
    }
    const auto r = uwchan::max_rate(to_fit(*fit), {grid, n}, o);
    *r_max = r.r_max;
    if (best != nullptr) *best = r.best_symbol_rate;
  });
}

}  // extern "C"
