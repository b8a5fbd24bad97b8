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

#include "uwchan/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace uwchan {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

#ifndef UWCHAN_VERSION
#define UWCHAN_VERSION "0.0.0"
#endif

std::string version_string() { return UWCHAN_VERSION; }

const StageRecord* ResultManifest::find(Stage s) const noexcept {
  for (const StageRecord& r : stages)
    if (r.stage == s) return &r;
  return nullptr;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::kInternal, "sha256: digest failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Numeric table with a single header row, tab separated.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }
  void row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) fail(ErrorCode::kInternal, "table: column count mismatch");
    rows_.push_back(values);
  }

  std::string text() const {
    std::string s;
    for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "\t" : "") + columns_[i];
    s += '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += '\t';
        s += format_double(r[i]);
      }
      s += '\n';
    }
    return s;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct ParsedTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t col(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    fail(ErrorCode::kIo, "table: missing column '" + std::string(name) + "'");
  }
  std::vector<double> column(std::string_view name) const {
    const std::size_t c = col(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

ParsedTable parse_table(const std::string& text, const std::string& what) {
  ParsedTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kIo, what + ": empty table");
  for (std::string_view rest = line;;) {
    const auto tab = rest.find('\t');
    t.columns.emplace_back(rest.substr(0, tab));
    if (tab == std::string_view::npos) break;
    rest.remove_prefix(tab + 1);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::string_view rest = line;
    while (true) {
      const auto tab = rest.find('\t');
      const std::string_view cell = rest.substr(0, tab);
      double v = 0.0;
      if (cell == "nan") {
        v = kNaN;
      } else {
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          fail(ErrorCode::kIo, what + ": bad number '" + std::string(cell) + "'");
      }
      r.push_back(v);
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (r.size() != t.columns.size()) fail(ErrorCode::kIo, what + ": ragged row");
    t.rows.push_back(std::move(r));
  }
  return t;
}

// Collects the files of one stage and records their digests.
class StageWriter {
 public:
  StageWriter(fs::path root, Stage stage) : root_(std::move(root)) { record_.stage = stage; }

  void put(const std::string& rel, const std::string& data) {
    write_file(root_ / rel, data);
    record_.files.push_back({rel, sha256_hex(data)});
  }
  StageRecord finish(double seconds) {
    record_.seconds = seconds;
    return std::move(record_);
  }

 private:
  fs::path root_;
  StageRecord record_;
};

std::string value_dir(std::string_view prefix, double v) {
  return std::string(prefix) + "_" + format_double(v);
}

const FileEntry& find_file(const StageRecord& r, std::string_view rel) {
  for (const FileEntry& f : r.files)
    if (f.path == rel) return f;
  fail(ErrorCode::kMissingStage,
       fmt::format("stage {} has no file {}", stage_name(r.stage), rel));
}

ParsedTable load_table(const ResultManifest& m, Stage s, std::string_view rel) {
  const StageRecord* r = m.find(s);
  if (r == nullptr)
    fail(ErrorCode::kMissingStage,
         fmt::format("{}: stage '{}' has not been run", m.directory.string(), stage_name(s)));
  const FileEntry& f = find_file(*r, rel);
  const std::string text = read_file(m.directory / f.path);
  if (sha256_hex(text) != f.sha256)
    fail(ErrorCode::kIo, "digest mismatch for " + (m.directory / f.path).string());
  return parse_table(text, f.path);
}

Json constants_json(const RunConfig& c) {
  Json j;
  j["speed_of_light_m_per_s"] = kSpeedOfLight;
  j["planck_J_s"] = kPlanck;
  j["seawater_vsf"] = {{"coefficient", 0.06225}, {"cos2_factor", 0.835}};
  j["ff_min_angle_rad"] = kFfMinAngle;
  j["angle_table"] = {{"log_knots", c.resolution}, {"linear_knots", c.resolution},
                      {"log_range_rad", {1e-6, 0.1}}};
  j["photon_chunk"] = kTransportChunk;
  j["time_origin"] = "ballistic arrival z_link * link.n_water / c";
  j["rng"] = "philox4x32-10, counter-based, stream per photon";
  Json presets = Json::array();
  for (const WaterPreset* p : {&kHarbour, &kCoastal, &kClearOcean})
    presets.push_back({{"name", p->name}, {"a", p->a}, {"b_petzold", p->b_petzold}});
  j["water_presets"] = presets;
  return j;
}

Json settings_json(const RunConfig& c) {
  Json j = Json::object();
  std::istringstream in(render_config(c));
  std::string section;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      j[section] = Json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    j[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

void write_manifest(const ResultManifest& m, const RunConfig& c) {
  Json j;
  j["format"] = "uwchan-manifest/1";
  j["version"] = m.version;
  j["label"] = m.label;
  j["physics_sha256"] = m.physics_sha256;
  j["config"] = m.config_text;
  j["settings"] = settings_json(c);
  j["constants"] = constants_json(c);
  Json stages = Json::array();
  for (const StageRecord& r : m.stages) {
    Json files = Json::array();
    for (const FileEntry& f : r.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
    stages.push_back({{"name", stage_name(r.stage)}, {"seconds", r.seconds}, {"files", files}});
  }
  j["stages"] = stages;
  write_file(m.directory / kManifestName, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- stages

struct SimulateOut {
  std::vector<std::vector<double>> impulse;  // per b_t
};

SimulateOut run_simulate(const RunConfig& c, StageWriter& w) {
  SimulateOut out;
  Table summary({"b_t", "extinction_lengths", "emitted", "arrived", "accepted", "absorbed",
                 "lost", "event_capped", "arrived_weight", "accepted_weight", "aligned_gain",
                 "aperture_gain", "overflow_mass", "late_mass", "fwhm_m", "drms_ns"});
  for (double bt : c.b_t) {
    const Medium medium(c.budget(bt), c.phase, c.resolution);
    const ResponseRun run = simulate_response(c.link, medium, c.rx);
    const ChannelResponse& r = run.response;
    const std::string dir = value_dir("simulate/bt", bt) + "/";

    Table spatial({"x_m", "y_m", "gain"});
    const int n = r.half_bins();
    for (int iy = -n; iy <= n; ++iy)
      for (int ix = -n; ix <= n; ++ix) spatial.row({r.cell_center(ix), r.cell_center(iy), r.spatial(ix, iy)});
    w.put(dir + "spatial.tsv", spatial.text());

    Table impulse({"t_ns", "gain"});
    auto hist = r.impulse_hist();
    for (std::size_t k = 0; k < hist.size(); ++k)
      impulse.row({(static_cast<double>(k) + 0.5) * c.rx.time_bin * 1e9, hist[k]});
    w.put(dir + "impulse.tsv", impulse.text());

    double fwhm = kNaN, drms = kNaN;
    try {
      fwhm = compute_fwhm(r);
    } catch (const Error&) {
    }
    try {
      drms = compute_drms(hist, c.rx.time_bin) * 1e9;
    } catch (const Error&) {
    }
    const auto& k = run.counters;
    summary.row({bt, medium.budget().c() * c.link.z_link, static_cast<double>(k.emitted),
                 static_cast<double>(k.arrived), static_cast<double>(k.accepted),
                 static_cast<double>(k.absorbed), static_cast<double>(k.lost),
                 static_cast<double>(k.event_capped),
                 k.arrived_weight / static_cast<double>(k.emitted),
                 k.accepted_weight / static_cast<double>(k.emitted), r.spatial(0, 0),
                 r.aperture_gain(), r.overflow_mass(), r.late_mass(), fwhm, drms});
    out.impulse.push_back(std::move(hist));
  }
  w.put("simulate/summary.tsv", summary.text());
  return out;
}

std::vector<DgfFit> run_fit(const RunConfig& c, const std::vector<std::vector<double>>& impulses,
                            StageWriter& w) {
  std::vector<DgfFit> fits;
  Table dgf({"b_t", "c1", "c2", "c3", "c4", "r_squared", "drms_fit_ns", "drms_mc_ns", "bins_used"});
  for (std::size_t i = 0; i < c.b_t.size(); ++i) {
    const auto& h = impulses[i];
    DgfFit f;
    try {
      f = fit_dgf(h, c.rx.time_bin);
    } catch (const Error& e) {
      fail(e.code(), fmt::format("fit at b_t = {}: {}", format_double(c.b_t[i]), e.what()));
    }
    dgf.row({c.b_t[i], f.c1, f.c2, f.c3, f.c4, f.r_squared, f.d_rms * 1e9,
             compute_drms(h, c.rx.time_bin) * 1e9, static_cast<double>(f.bins_used)});
    Table curve({"t_ns", "mc", "dgf", "dgf_point"});
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double t0 = static_cast<double>(k) * c.rx.time_bin;
      const double t = t0 + 0.5 * c.rx.time_bin;
      curve.row({t * 1e9, h[k], f.bin_average(t0, t0 + c.rx.time_bin), f.eval(t)});
    }
    w.put(value_dir("fit/bt", c.b_t[i]) + "_curve.tsv", curve.text());
    fits.push_back(f);
  }
  w.put("fit/dgf.tsv", dgf.text());
  return fits;
}

std::map<double, double> run_scintillation(const RunConfig& c, StageWriter& w) {
  std::map<double, double> sigma;
  Table fading({"bt_max", "sigma_sim_sq", "lognormal_sigma_i_sq", "lognormal_mu",
                "lognormal_sigma", "lognormal_r_squared", "gaussian_mean", "gaussian_variance",
                "gaussian_r_squared"});
  for (double bt : c.bt_max) {
    EnsembleConfig e;
    e.link = c.link;
    e.a = c.a;
    e.b_petzold = c.b_petzold;
    e.b_sw = c.b_sw;
    e.phase = c.phase;
    e.resolution = c.resolution;
    e.rx = c.rx;
    e.n_iter = c.n_iter;
    e.photons_per_iter = c.photons_per_iter;
    e.bt_max = bt;
    const EnsembleResult r = scintillation_ensemble(e);
    const FadingFit g = fit_fading(r.normalized, FadingKind::kGaussian);
    const std::string dir = value_dir("scintillation/btmax", bt) + "/";

    Table samples({"iteration", "b_t", "received", "normalized"});
    for (std::size_t i = 0; i < r.received.size(); ++i)
      samples.row({static_cast<double>(i), r.b_t[i], r.received[i], r.normalized[i]});
    w.put(dir + "samples.tsv", samples.text());

    Table hist({"intensity", "density", "lognormal_pdf", "gaussian_pdf"});
    for (std::size_t k = 0; k < r.histogram.centers.size(); ++k) {
      const double x = r.histogram.centers[k];
      hist.row({x, r.histogram.density[k], lognormal_pdf(x, r.fit.mu, r.fit.sigma),
                gaussian_pdf(x, g.mu, g.sigma)});
    }
    w.put(dir + "histogram.tsv", hist.text());

    fading.row({bt, r.fit.sigma_sim_sq, r.fit.sigma_i_sq, r.fit.mu, r.fit.sigma, r.fit.r_squared,
                g.mu, g.sigma * g.sigma, g.r_squared});
    sigma[bt] = r.fit.sigma_i_sq;
  }
  w.put("scintillation/fading.tsv", fading.text());
  return sigma;
}

void run_rate(const RunConfig& c, const std::vector<DgfFit>& fits,
              const std::map<double, double>& sigma, StageWriter& w) {
  const auto grid = log_rate_grid(c.rate_min, c.rate_max, c.rate_points);
  Table rmax({"b_t", "sigma_i_sq", "r_max_bps", "best_symbol_rate_hz"});
  for (std::size_t i = 0; i < c.b_t.size(); ++i) {
    RateResult r;
    try {
      r = max_rate(fits[i], grid, c.rate);
    } catch (const Error& e) {
      fail(e.code(), fmt::format("rate at b_t = {}: {}", format_double(c.b_t[i]), e.what()));
    }
    Table pts({"symbol_rate_hz", "mutual_info", "rate_bps", "memory", "reduced", "skipped"});
    for (const RatePoint& p : r.points)
      pts.row({p.symbol_rate, p.mutual_info, p.rate, static_cast<double>(p.memory),
               p.reduced ? 1.0 : 0.0, p.skipped ? 1.0 : 0.0});
    w.put(value_dir("rate/bt", c.b_t[i]) + "_points.tsv", pts.text());
    const auto it = sigma.find(c.b_t[i]);
    rmax.row({c.b_t[i], it == sigma.end() ? kNaN : it->second, r.r_max, r.best_symbol_rate});
  }
  w.put("rate/rmax.tsv", rmax.text());
}

std::vector<DgfFit> fits_from_table(const ParsedTable& t, const RunConfig& c) {
  const auto bt = t.column("b_t");
  if (bt != c.b_t) fail(ErrorCode::kMissingStage, "cached fits cover a different b_t list");
  std::vector<DgfFit> fits;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    DgfFit f;
    f.c1 = t.rows[i][t.col("c1")];
    f.c2 = t.rows[i][t.col("c2")];
    f.c3 = t.rows[i][t.col("c3")];
    f.c4 = t.rows[i][t.col("c4")];
    f.r_squared = t.rows[i][t.col("r_squared")];
    f.time_bin = c.rx.time_bin;
    f.d_rms = dgf_drms(f);
    fits.push_back(f);
  }
  return fits;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

ResultManifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kIo, path.string() + ": " + e.what());
  }
  ResultManifest m;
  m.directory = dir;
  try {
    if (j.at("format") != "uwchan-manifest/1") fail(ErrorCode::kIo, path.string() + ": unknown format");
    m.version = j.at("version").get<std::string>();
    m.label = j.at("label").get<std::string>();
    m.physics_sha256 = j.at("physics_sha256").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.stage = parse_stage(s.at("name").get<std::string>());
      r.seconds = s.at("seconds").get<double>();
      for (const auto& f : s.at("files")) {
        FileEntry e{f.at("path").get<std::string>(), f.at("sha256").get<std::string>()};
        if (sha256_file(dir / e.path) != e.sha256)
          fail(ErrorCode::kIo, "digest mismatch for " + (dir / e.path).string());
        r.files.push_back(std::move(e));
      }
      m.stages.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kIo, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) fail(ErrorCode::kIo, path.string() + ": " + e.what());
    throw;
  }
  return m;
}

ResultManifest run_pipeline(const RunConfig& c) {
  c.validate();
  ResultManifest m;
  m.directory = c.output_dir;
  m.version = version_string();
  m.label = c.label;
  m.config_text = render_config(c);
  m.physics_sha256 = sha256_hex(physics_text(c));
  fs::create_directories(m.directory);

  if (fs::exists(m.directory / kManifestName)) {
    try {
      ResultManifest old = read_manifest(m.directory);
      if (old.physics_sha256 == m.physics_sha256) {
        for (StageRecord& r : old.stages)
          if (!c.has_stage(r.stage)) m.stages.push_back(std::move(r));
      }
    } catch (const Error&) {
      // Unreadable or stale: start over.
    }
  }

  auto begin_stage = [&](Stage s) {
    std::erase_if(m.stages, [s](const StageRecord& r) { return r.stage == s; });
    write_manifest(m, c);
    fs::remove_all(m.directory / stage_name(s));
    return std::chrono::steady_clock::now();
  };
  auto end_stage = [&](StageRecord r) {
    m.stages.push_back(std::move(r));
    std::sort(m.stages.begin(), m.stages.end(),
              [](const StageRecord& x, const StageRecord& y) { return x.stage < y.stage; });
    write_manifest(m, c);
  };

  std::optional<std::vector<std::vector<double>>> impulses;
  std::optional<std::vector<DgfFit>> fits;
  std::optional<std::map<double, double>> sigma;

  if (c.has_stage(Stage::kSimulate)) {
    const auto t0 = begin_stage(Stage::kSimulate);
    StageWriter w(m.directory, Stage::kSimulate);
    impulses = run_simulate(c, w).impulse;
    end_stage(w.finish(seconds_since(t0)));
  }
  if (c.has_stage(Stage::kFit)) {
    if (!impulses) {
      impulses.emplace();
      for (double bt : c.b_t)
        impulses->push_back(
            load_table(m, Stage::kSimulate, value_dir("simulate/bt", bt) + "/impulse.tsv").column("gain"));
    }
    const auto t0 = begin_stage(Stage::kFit);
    StageWriter w(m.directory, Stage::kFit);
    fits = run_fit(c, *impulses, w);
    end_stage(w.finish(seconds_since(t0)));
  }
  if (c.has_stage(Stage::kScintillation)) {
    const auto t0 = begin_stage(Stage::kScintillation);
    StageWriter w(m.directory, Stage::kScintillation);
    sigma = run_scintillation(c, w);
    end_stage(w.finish(seconds_since(t0)));
  }
  if (c.has_stage(Stage::kRate)) {
    if (!fits) fits = fits_from_table(load_table(m, Stage::kFit, "fit/dgf.tsv"), c);
    if (!sigma) {
      sigma.emplace();
      if (m.find(Stage::kScintillation) != nullptr) {
        const auto t = load_table(m, Stage::kScintillation, "scintillation/fading.tsv");
        for (const auto& r : t.rows) (*sigma)[r[t.col("bt_max")]] = r[t.col("lognormal_sigma_i_sq")];
      }
    }
    const auto t0 = begin_stage(Stage::kRate);
    StageWriter w(m.directory, Stage::kRate);
    run_rate(c, *fits, *sigma, w);
    end_stage(w.finish(seconds_since(t0)));
  }
  return m;
}

// ---------------------------------------------------------------- reports

namespace {

std::string safe_name(std::string_view label) {
  std::string s;
  for (char ch : label)
    s += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.') ? ch : '_';
  return s.empty() ? "run" : s;
}

std::string sci(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.4g}", v); }

}  // namespace

std::vector<fs::path> emit_tables(const std::vector<ResultManifest>& manifests,
                                  const fs::path& out_dir) {
  bool any = false;
  for (const ResultManifest& m : manifests) any = any || !m.empty();
  if (!any) fail(ErrorCode::kMissingStage, "report: no completed stages to report");

  std::map<std::string, std::string> files;  // name -> content
  std::string t1, t2, t3;
  for (const ResultManifest& m : manifests) {
    if (m.empty()) continue;
    const RunConfig c = parse_config(m.config_text);
    const std::string name = safe_name(m.label);
    const std::string head = fmt::format("{} ({} {:g} m)", m.label, c.water_preset, c.link.z_link);

    if (m.find(Stage::kSimulate) != nullptr) {
      const auto first = value_dir("simulate/bt", c.b_t.front());
      files["spatial_map_" + name + ".tsv"] = [&] {
        const auto t = load_table(m, Stage::kSimulate, first + "/spatial.tsv");
        Table out({"x_m", "y_m", "gain"});
        for (const auto& r : t.rows) out.row(r);
        return out.text();
      }();
      std::vector<std::string> cols{"offset_m"};
      std::vector<std::vector<double>> slices;
      std::vector<double> offsets;
      for (double bt : c.b_t) {
        const auto t = load_table(m, Stage::kSimulate, value_dir("simulate/bt", bt) + "/spatial.tsv");
        std::vector<double> s;
        offsets.clear();
        for (const auto& r : t.rows) {
          if (r[1] != 0.0) continue;
          offsets.push_back(r[0]);
          s.push_back(r[2]);
        }
        slices.push_back(std::move(s));
        cols.push_back("gain_bt_" + format_double(bt));
      }
      Table profile(cols);
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        std::vector<double> row{offsets[i]};
        for (const auto& s : slices) row.push_back(s[i]);
        profile.row(row);
      }
      files["profile_" + name + ".tsv"] = profile.text();
    }

    if (m.find(Stage::kFit) != nullptr) {
      const auto t = load_table(m, Stage::kFit, "fit/dgf.tsv");
      t1 += head + "\n";
      t1 += fmt::format("  {:>8} {:>11} {:>11} {:>11} {:>11} {:>7} {:>12} {:>12}\n", "b_t", "C1", "C2",
                        "C3", "C4", "R2", "Drms_fit_ns", "Drms_mc_ns");
      Table spread({"b_t", "drms_mc_ns", "drms_fit_ns"});
      for (const auto& r : t.rows) {
        t1 += fmt::format("  {:>8} {:>11} {:>11} {:>11} {:>11} {:>7.4f} {:>12.4g} {:>12.4g}\n",
                          format_double(r[t.col("b_t")]), sci(r[t.col("c1")]), sci(r[t.col("c2")]),
                          sci(r[t.col("c3")]), sci(r[t.col("c4")]), r[t.col("r_squared")],
                          r[t.col("drms_fit_ns")], r[t.col("drms_mc_ns")]);
        spread.row({r[t.col("b_t")], r[t.col("drms_mc_ns")], r[t.col("drms_fit_ns")]});
      }
      t1 += "\n";
      files["drms_" + name + ".tsv"] = spread.text();
      const auto curve =
          load_table(m, Stage::kFit, value_dir("fit/bt", c.b_t.front()) + "_curve.tsv");
      Table fitted({"t_ns", "mc", "dgf", "dgf_point"});
      for (const auto& r : curve.rows) fitted.row(r);
      files["impulse_fit_" + name + ".tsv"] = fitted.text();
    }

    if (m.find(Stage::kScintillation) != nullptr) {
      const auto t = load_table(m, Stage::kScintillation, "scintillation/fading.tsv");
      t2 += head + "\n";
      t2 += fmt::format("  {:>8} {:>12} {:>12} {:>12} {:>7}\n", "bt_max", "sigma_sim2", "sigma_I2",
                        "mu", "R2");
      Table index({"bt_max", "sigma_i_sq"});
      for (const auto& r : t.rows) {
        t2 += fmt::format("  {:>8} {:>12.4g} {:>12.4g} {:>12.4g} {:>7.3f}\n",
                          format_double(r[t.col("bt_max")]), r[t.col("sigma_sim_sq")],
                          r[t.col("lognormal_sigma_i_sq")], r[t.col("lognormal_mu")],
                          r[t.col("lognormal_r_squared")]);
        index.row({r[t.col("bt_max")], r[t.col("lognormal_sigma_i_sq")]});
        if (r[t.col("bt_max")] == 0.0) {
          t3 += fmt::format("  {:<32} {:>12.4g} {:>10.4f} {:>7.3f}\n", head,
                            r[t.col("gaussian_variance")], r[t.col("gaussian_mean")],
                            r[t.col("gaussian_r_squared")]);
        }
      }
      t2 += "\n";
      files["scintillation_" + name + ".tsv"] = index.text();
    }

    if (m.find(Stage::kRate) != nullptr) {
      const auto t = load_table(m, Stage::kRate, "rate/rmax.tsv");
      Table rates({"sigma_i_sq", "r_max_bps", "b_t"});
      for (const auto& r : t.rows)
        rates.row({r[t.col("sigma_i_sq")], r[t.col("r_max_bps")], r[t.col("b_t")]});
      files["rate_" + name + ".tsv"] = rates.text();
    }
  }
  if (!t1.empty()) files["dgf_fits.txt"] = "Double-gamma fit constants\n\n" + t1;
  if (!t2.empty()) files["fading_lognormal.txt"] = "Scintillation and log-normal fit\n\n" + t2;
  if (!t3.empty()) {
    files["fading_gaussian.txt"] = "Gaussian fit without turbulence\n\n" +
                          fmt::format("  {:<32} {:>12} {:>10} {:>7}\n", "channel", "variance",
                                      "mean", "R2") +
                          t3;
  }

  std::vector<fs::path> written;
  for (const auto& [fname, text] : files) {
    write_file(out_dir / fname, text);
    written.push_back(out_dir / fname);
  }
  return written;
}

}  // namespace uwchan
