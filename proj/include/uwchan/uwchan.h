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

#ifndef UWCHAN_UWCHAN_H
#define UWCHAN_UWCHAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UWC_API __declspec(dllexport)
#else
#define UWC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uwc_status {
  UWC_OK = 0,
  UWC_E_INVALID_ARGUMENT = -1,
  UWC_E_DOMAIN = -2,
  UWC_E_DEGENERATE = -3,
  UWC_E_NORMALIZATION = -4,
  UWC_E_ITERATION_CAP = -5,
  UWC_E_FIT_NOT_CONVERGED = -6,
  UWC_E_MEMORY_CAP = -7,
  UWC_E_NUMERICAL = -8,
  UWC_E_IO = -9,
  UWC_E_CONFIG = -10,
  UWC_E_MISSING_STAGE = -11,
  UWC_E_NULL_POINTER = -20,
  UWC_E_OUT_OF_RANGE = -21,
  UWC_E_INTERNAL = -99
} uwc_status;

typedef struct uwc_config uwc_config;
typedef struct uwc_manifest uwc_manifest;
typedef struct uwc_vsf uwc_vsf;

/* Library version, e.g. "0.1.0". */
UWC_API const char* uwc_version(void);
/* Message of the last failed call on this thread; "" if none. */
UWC_API const char* uwc_last_error(void);
UWC_API const char* uwc_status_name(uwc_status status);
/* Frees strings returned through char** out-parameters. */
UWC_API void uwc_string_free(char* text);

/* Configuration */
UWC_API uwc_status uwc_config_new(uwc_config** out);
UWC_API uwc_status uwc_config_parse(const char* text, uwc_config** out);
UWC_API uwc_status uwc_config_load(const char* path, uwc_config** out);
UWC_API void uwc_config_free(uwc_config* config);
/* key is "section.key", e.g. "water.preset". Not validated until
   uwc_config_validate or a run. */
UWC_API uwc_status uwc_config_set(uwc_config* config, const char* key, const char* value);
UWC_API uwc_status uwc_config_get(const uwc_config* config, const char* key, char** value);
UWC_API uwc_status uwc_config_validate(const uwc_config* config);
UWC_API uwc_status uwc_config_render(const uwc_config* config, char** text);
UWC_API size_t uwc_config_key_count(void);
UWC_API const char* uwc_config_key_name(size_t index);
UWC_API const char* uwc_config_key_help(size_t index);

/* Pipeline. On failure *out stays NULL; the manifest file in the output
   directory still lists the stages that completed. */
UWC_API uwc_status uwc_run_pipeline(const uwc_config* config, uwc_manifest** out);
UWC_API uwc_status uwc_manifest_load(const char* directory, uwc_manifest** out);
UWC_API void uwc_manifest_free(uwc_manifest* manifest);
UWC_API size_t uwc_manifest_stage_count(const uwc_manifest* manifest);
UWC_API const char* uwc_manifest_stage_name(const uwc_manifest* manifest, size_t stage);
UWC_API double uwc_manifest_stage_seconds(const uwc_manifest* manifest, size_t stage);
UWC_API size_t uwc_manifest_file_count(const uwc_manifest* manifest, size_t stage);
UWC_API const char* uwc_manifest_file_path(const uwc_manifest* manifest, size_t stage, size_t file);
UWC_API const char* uwc_manifest_file_sha256(const uwc_manifest* manifest, size_t stage, size_t file);
UWC_API const char* uwc_manifest_directory(const uwc_manifest* manifest);

/* Table and figure-data files for one or more runs, written to out_dir.
   *written (optional) receives the number of files. */
UWC_API uwc_status uwc_emit_tables(const uwc_manifest* const* manifests, size_t count,
                                   const char* out_dir, size_t* written);

/* Composite scattering phase function */
typedef struct uwc_phase_params {
  double g;
  double m_junge;
  double n_water;
  double hg_exponent;
} uwc_phase_params;

UWC_API void uwc_phase_params_default(uwc_phase_params* params);
/* params may be NULL for the defaults; resolution 0 selects the default. */
UWC_API uwc_status uwc_vsf_new(double a, double b_petzold, double b_t, double b_sw,
                               const uwc_phase_params* params, size_t resolution, uwc_vsf** out);
UWC_API void uwc_vsf_free(uwc_vsf* vsf);
UWC_API uwc_status uwc_vsf_density(const uwc_vsf* vsf, double theta, double* out);
UWC_API uwc_status uwc_vsf_cdf(const uwc_vsf* vsf, double theta, double* out);
UWC_API uwc_status uwc_vsf_sample(const uwc_vsf* vsf, double epsilon, double* theta);

/* Impulse response */
typedef struct uwc_dgf {
  double c1, c2, c3, c4;
  double r_squared;
  double d_rms;
  double time_bin;
} uwc_dgf;

UWC_API uwc_status uwc_drms(const double* hist, size_t n, double time_bin, double* out);
/* On UWC_E_FIT_NOT_CONVERGED *out holds the best candidate. */
UWC_API uwc_status uwc_fit_dgf(const double* hist, size_t n, double time_bin, uwc_dgf* out);

/* Data link */
typedef struct uwc_rate_options {
  double p_t;
  double wavelength;
  double n_bg;
  double mass_cutoff;
  size_t max_memory;
  size_t trellis_memory;
  size_t l_bits;
  uint64_t seed;
  unsigned workers;
} uwc_rate_options;

UWC_API void uwc_rate_options_default(uwc_rate_options* options);
UWC_API double uwc_photons_per_bit(double p_t, double t_b, double wavelength);
/* options may be NULL for the defaults. */
UWC_API uwc_status uwc_max_rate(const uwc_dgf* fit, const double* rate_grid, size_t n,
                                const uwc_rate_options* options, double* r_max,
                                double* best_symbol_rate);

#ifdef __cplusplus
}
#endif

#endif /* UWCHAN_UWCHAN_H */
