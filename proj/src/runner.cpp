#include "hhg/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "hhg/coherence.hpp"
#include "hhg/errors.hpp"
#include "hhg/freespace.hpp"
#include "hhg/units.hpp"

namespace fs = std::filesystem;

namespace hhg {

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

fs::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? fs::path(env) : fs::path("hhg_out");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string table_cache_key(const AtomModel& atom, double wavelength_nm, int order,
                            const GridSpec& grid, const SfaNumerics& numerics) {
  std::ostringstream s;
  s << "atom=" << atom.id << " ip=" << fmt(atom.ip) << " n_el=" << fmt(atom.n_el)
    << " lambda=" << fmt(wavelength_nm) << " order=" << order << " i_min=" << fmt(grid.i_min)
    << " i_max=" << fmt(grid.i_max) << " nodes=" << grid.nodes << " log=" << grid.log_spacing
    << " nu=" << fmt(numerics.nu) << " tau_max=" << fmt(numerics.tau_max_periods)
    << " tau_samples=" << numerics.tau_samples << " t_samples=" << numerics.t_samples
    << " deplete=" << numerics.deplete << " rate=" << fmt(numerics.depletion_rate)
    << " tail=" << fmt(numerics.max_tail) << " format=" << kTableVersion;
  return sha256_hex(s.str());
}

DipoleTable TableCache::get(const AtomModel& atom, double wavelength_nm, int order,
                            const GridSpec& grid, const SfaNumerics& numerics, bool* hit) {
  const std::string key = table_cache_key(atom, wavelength_nm, order, grid, numerics);
  // One build at a time: concurrent cases usually want the same table.
  std::lock_guard lock(mutex_);
  if (auto it = memory_.find(key); it != memory_.end()) {
    if (hit) *hit = true;
    return it->second;
  }
  const fs::path file = dir_ / (key + ".bin");
  DipoleTable table;
  bool found = false;
  if (fs::exists(file)) {
    try {
      table = load_table(file);
      found = true;
    } catch (const Error&) {
      found = false;  // unreadable entry: rebuild
    }
  }
  if (!found) {
    table = build_table(atom, wavelength_nm, order, grid, numerics);
    fs::create_directories(dir_);
    const fs::path tmp = dir_ / (key + ".tmp");
    save_table(table, tmp);
    fs::rename(tmp, file);
  }
  if (hit) *hit = found;
  memory_[key] = table;
  return table;
}

// Manifest ---------------------------------------------------------------------

std::string RunManifest::text() const {
  std::ostringstream s;
  s << "scenario_id = " << scenario_id << '\n'
    << "scenario_hash = " << scenario_hash << '\n'
    << "code_version = " << code_version << '\n'
    << "wall_time_s = " << fmt(std::round(wall_time_s * 1000.0) / 1000.0) << '\n'
    << "status = " << (ok() ? "ok" : "error") << '\n';
  for (const auto& [key, hit] : cache) s << "cache = " << key << ' ' << (hit ? "hit" : "miss") << '\n';
  for (const auto& [where, msg] : errors) s << "error." << where << " = " << one_line(msg) << '\n';
  for (const auto& f : files) s << "file = " << f.path << ' ' << f.sha256 << ' ' << f.bytes << '\n';
  return s.str();
}

RunManifest RunManifest::parse(const std::string& text) {
  RunManifest m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string k = line.substr(0, eq), v = line.substr(eq + 3);
    std::istringstream vs(v);
    if (k == "scenario_id") {
      m.scenario_id = v;
    } else if (k == "scenario_hash") {
      m.scenario_hash = v;
    } else if (k == "code_version") {
      m.code_version = v;
    } else if (k == "wall_time_s") {
      m.wall_time_s = std::stod(v);
    } else if (k == "cache") {
      std::string key, status;
      vs >> key >> status;
      m.cache.emplace_back(key, status == "hit");
    } else if (k.rfind("error.", 0) == 0) {
      m.errors[k.substr(6)] = v;
    } else if (k == "file") {
      ManifestFile f;
      vs >> f.path >> f.sha256 >> f.bytes;
      m.files.push_back(f);
    }
  }
  return m;
}

bool RunManifest::verify(const fs::path& run_dir, std::string* problem) const {
  for (const auto& f : files) {
    const fs::path p = run_dir / f.path;
    std::string why;
    if (!fs::exists(p))
      why = "missing " + f.path;
    else if (fs::file_size(p) != f.bytes || file_sha256(p) != f.sha256)
      why = "checksum mismatch for " + f.path;
    if (!why.empty()) {
      if (problem) *problem = why;
      return false;
    }
  }
  return true;
}

// Run --------------------------------------------------------------------------

namespace {

// Every output goes through here: one writer, one manifest list.
class Writer {
 public:
  explicit Writer(fs::path root) : root_(std::move(root)) {}

  void put(const std::string& rel, const std::string& bytes) {
    std::lock_guard lock(mutex_);
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + p.string());
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    files_[rel] = ManifestFile{rel, sha256_hex(bytes), bytes.size()};
  }

  std::vector<ManifestFile> files() const {
    std::vector<ManifestFile> v;
    for (const auto& [_, f] : files_) v.push_back(f);
    return v;
  }

 private:
  fs::path root_;
  std::mutex mutex_;
  std::map<std::string, ManifestFile> files_;
};

class Csv {
 public:
  explicit Csv(const std::string& header) { s_ << header << '\n'; }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((s_ << (first ? "" : ",") << cell(v), first = false), ...);
    s_ << '\n';
  }
  std::string str() const { return s_.str(); }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ostringstream s_;
};

std::string field_csv(const RadialField& f) {
  Csv c("r_um,re,im,intensity,phase_rad");
  for (std::size_t j = 0; j < f.size(); ++j)
    c.row(f.r_um[j], f.values[j].real(), f.values[j].imag(), std::norm(f.values[j]),
          std::arg(f.values[j]));
  return c.str();
}

struct CaseRunner {
  Settings s;
  std::string dir;  // relative, "" or "case/"
  Writer& writer;
  TableCache& cache;
  std::mutex& shared;
  std::vector<std::pair<std::string, bool>>& cache_log;
  std::map<std::string, std::string>& errors;
  const std::function<void(const std::string&)>& log;

  std::vector<std::array<std::string, 3>> summary;
  std::optional<DipoleTable> table_;
  std::optional<PulseRun> run_;
  std::optional<PulseAssembly> pulse_;
  std::vector<double> axis_history_;  // on-axis fundamental at the jet centre, per slice

  void note(const std::string& stage, const std::string& key, double v) {
    summary.push_back({stage, key, fmt(v)});
  }
  void note(const std::string& stage, const std::string& key, const std::string& v) {
    summary.push_back({stage, key, v});
  }
  void put(const std::string& name, const std::string& bytes) { writer.put(dir + name, bytes); }
  void say(const std::string& msg) {
    if (log) log(s.id + (s.case_name.empty() ? "" : "/" + s.case_name) + ": " + msg);
  }

  const DipoleTable& table() {
    if (!table_) {
      bool hit = false;
      table_ = cache.get(s.atom, s.propagation.geometry.wavelength_nm, s.propagation.order,
                         s.table_grid, s.numerics, &hit);
      record_cache(table_cache_key(s.atom, s.propagation.geometry.wavelength_nm,
                                   s.propagation.order, s.table_grid, s.numerics),
                   hit);
    }
    return *table_;
  }

  void record_cache(const std::string& key, bool hit) {
    std::lock_guard lock(shared);
    cache_log.emplace_back(key, hit);
  }

  const PulseRun& pulse_run() {
    if (!run_) {
      const auto& tab = table();
      say("propagating " + std::to_string(s.propagation.slice_times_fs().size()) + " slice(s)");
      SliceObserver observer;
      if (s.propagation.flags.ionization) {
        axis_history_.clear();
        const double zc = s.propagation.jet.center_mm;
        observer = [this, zc](std::size_t, const std::vector<RadialField>& planes) {
          std::size_t best = 0;
          for (std::size_t i = 1; i < planes.size(); ++i)
            if (std::abs(planes[i].z_mm - zc) < std::abs(planes[best].z_mm - zc)) best = i;
          axis_history_.push_back(std::norm(planes[best].values.front()));
        };
      }
      run_ = run_pulse(s.propagation, tab, observer);
    }
    return *run_;
  }

  const PulseAssembly& pulse() {
    if (!pulse_) pulse_ = PulseAssembly::from_run(pulse_run(), s.propagation);
    return *pulse_;
  }

  std::size_t peak_slice() {
    const auto& t = pulse_run().times_fs;
    std::size_t k = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
      if (std::abs(t[i]) < std::abs(t[k])) k = i;
    return k;
  }

  // Stages -------------------------------------------------------------------

  void stage_table() {
    const auto& t = table();
    std::ostringstream bin;
    write_table_binary(t, bin);
    put("table.bin", bin.str());
    Csv c("intensity_wcm2,amplitude_au,phase_rad,gamma_per_s");
    for (std::size_t i = 0; i < t.size(); ++i) c.row(t.intensity[i], t.amplitude[i], t.phase[i], t.gamma[i]);
    put("table.csv", c.str());

    const double tr = transition_intensity(t);
    note("table", "transition_wcm2", tr);
    const auto w = default_slope_windows(tr, t.i_max());
    const auto cut = phase_slope(t, w.cutoff_lo, w.cutoff_hi, SlopeRegion::cutoff);
    const auto pla = phase_slope(t, w.plateau_lo, w.plateau_hi, SlopeRegion::plateau);
    note("table", "eta_cutoff_per_1e14", cut.eta_per_1e14());
    note("table", "eta_plateau_per_1e14", pla.eta_per_1e14());
    note("table", "eta_ratio", pla.eta / cut.eta);
    PhaseModulationModel m;
    m.eta = pla.eta;
    m.i0_wcm2 = s.propagation.peak_intensity_wcm2;
    m.tau_fwhm_fs = s.propagation.fwhm_fs;
    m.harmonic_wavelength_nm = s.propagation.geometry.wavelength_nm / s.propagation.order;
    note("table", "delta_lambda_ext_angstrom", m.delta_lambda_ext_angstrom());
    note("table", "cutoff_coefficient", modified_cutoff_check(t, s.atom).coefficient);
  }

  void stage_phasemap() {
    const auto& o = s.phasemap;
    std::vector<double> z(o.z_points);
    for (std::size_t i = 0; i < o.z_points; ++i)
      z[i] = o.z_min_mm + (o.z_max_mm - o.z_min_mm) * static_cast<double>(i) /
                              static_cast<double>(o.z_points - 1);
    Csv c("intensity_wcm2,r_um,z_mm,geometric_rad,dipole_rad,total_rad");
    Csv radial("intensity_wcm2,z_mm,radial_coefficient_rad_um2");
    for (double I : o.intensities_wcm2) {
      const auto map = polarization_phase_map(s.propagation.geometry, table(), I, z, o.radii_um);
      for (std::size_t j = 0; j < map.r_um.size(); ++j)
        for (std::size_t i = 0; i < map.z_mm.size(); ++i)
          c.row(I, map.r_um[j], map.z_mm[i], map.geometric[j][i], map.dipole[j][i], map.total[j][i]);
      for (std::size_t i = 0; i < map.z_mm.size(); ++i)
        radial.row(I, map.z_mm[i], map.radial_coefficient[i]);
      const std::string tag = "@" + fmt(I);
      note("phasemap", "compensation_z_mm" + tag, map.compensation_z_mm);
      note("phasemap", "compensation_begin_mm" + tag, map.compensation_begin_mm);
      note("phasemap", "compensation_end_mm" + tag, map.compensation_end_mm);
    }
    put("phasemap.csv", c.str());
    put("phasemap_radial.csv", radial.str());
  }

  void stage_scan() {
    say("conversion scan, " + std::to_string(s.scan_jets_mm.size() * s.scan_intensities_wcm2.size()) +
        " points");
    const auto pts = conversion_scan(s.propagation, s.scan_jets_mm, s.scan_intensities_wcm2, table());
    Csv c("z_jet_mm,intensity_wcm2,exit_power_w,photon_number,efficiency");
    for (const auto& p : pts) c.row(p.z_jet_mm, p.intensity_wcm2, p.exit_power_w, p.photon_number, p.efficiency);
    put("scan.csv", c.str());
    for (double I : s.scan_intensities_wcm2) {
      const ConversionPoint* best = nullptr;
      for (const auto& p : pts)
        if (p.intensity_wcm2 == I && (!best || p.efficiency > best->efficiency)) best = &p;
      if (best) note("scan", "best_z_mm@" + fmt(I), best->z_jet_mm);
    }
    if (s.scan_intensities_wcm2.size() >= 6) {
      for (double z : s.scan_jets_mm) {
        std::vector<double> I, e;
        for (const auto& p : pts)
          if (p.z_jet_mm == z) {
            I.push_back(p.intensity_wcm2);
            e.push_back(p.efficiency);
          }
        try {
          const auto chk = modified_cutoff_check(I, e, s.atom, s.propagation.order,
                                                 s.propagation.geometry.wavelength_nm);
          note("scan", "transition_wcm2@z" + fmt(z), chk.transition_wcm2);
          note("scan", "cutoff_coefficient@z" + fmt(z), chk.coefficient);
        } catch (const Error& ex) {
          note("scan", "cutoff_coefficient@z" + fmt(z), std::string("n/a: ") + one_line(ex.what()));
        }
      }
    }
  }

  void stage_propagate() {
    const auto& run = pulse_run();
    const std::size_t k = peak_slice();
    const RadialField& exit = run.harmonic[k];
    put("exit_field.csv", field_csv(exit));
    {
      std::ostringstream bin;
      write_stack_binary(make_stack(run.peak_fundamental), bin);
      put("fundamental_planes.bin", bin.str());
    }
    note("propagate", "slices", static_cast<double>(run.times_fs.size()));
    note("propagate", "exit_z_mm", exit.z_mm);
    note("propagate", "exit_power_w", harmonic_power_w(exit));
    note("propagate", "exit_radius_1e2_um", radius_1e2_um(exit));
    note("propagate", "exit_outer_radius_1e2_um", outer_radius_1e2_um(exit));
    double imax = 0.0;
    for (const auto& v : exit.values) imax = std::max(imax, std::norm(v));
    note("propagate", "annular", std::norm(exit.values.front()) < 0.5 * imax ? "true" : "false");
    note("propagate", "exit_phase_coefficient_rad_um2", radial_phase_coefficient(exit));
    note("propagate", "fundamental_exit_peak_wcm2",
         *std::max_element(run.fundamental_exit_peak_wcm2.begin(), run.fundamental_exit_peak_wcm2.end()));

    const auto& a = s.analysis;
    const auto ff = far_field(exit, a.far_field_distance_mm, a.far_field_max_mrad, a.far_field_samples);
    Csv fc("angle_mrad,radius_um,intensity");
    for (std::size_t i = 0; i < ff.angle_mrad.size(); ++i) fc.row(ff.angle_mrad[i], ff.radius_um[i], ff.intensity[i]);
    put("farfield.csv", fc.str());
    note("propagate", "farfield_half_angle_mrad", ff.half_angle_1e2_mrad);
    note("propagate", "farfield_outer_half_angle_mrad", ff.outer_half_angle_1e2_mrad);
    note("propagate", "farfield_annular", ff.annular ? "true" : "false");
    const auto& g = s.propagation.geometry;
    note("propagate", "fundamental_half_angle_mrad",
         g.wavelength_nm * 1e-9 / (units::pi * g.waist_um() * 1e-6) * 1e3);

    const auto vf = virtual_focus(exit, a.focus_z_min_mm, a.focus_step_mm);
    Csv vc("r_um,intensity,phase_rad");
    for (std::size_t j = 0; j < vf.profile.size(); ++j)
      vc.row(vf.profile.r_um[j], std::norm(vf.profile.values[j]), std::arg(vf.profile.values[j]));
    put("focus.csv", vc.str());
    Csv sc("z_mm,axis_intensity");
    for (std::size_t i = 0; i < vf.scan_z_mm.size(); ++i) sc.row(vf.scan_z_mm[i], vf.scan_axis_intensity[i]);
    put("focus_scan.csv", sc.str());
    note("propagate", "focus_z_mm", vf.z_mm);
    note("propagate", "focus_waist_um", vf.waist_um);
    note("propagate", "focus_lobe_radius_um", vf.lobe_radius_um);
    note("propagate", "focus_phase_rms_rad", vf.phase_rms);
    note("propagate", "focus_at_boundary", vf.at_boundary ? "true" : "false");

    if (run.times_fs.size() >= 16) {
      const auto tp = temporal_profile(pulse());
      Csv tc("t_fs,power_w");
      for (std::size_t i = 0; i < tp.times_fs.size(); ++i) tc.row(tp.times_fs[i], tp.power[i]);
      put("temporal.csv", tc.str());
      note("propagate", "temporal_fwhm_fs", tp.fwhm_fs);
      note("propagate", "temporal_peak_time_fs", tp.peak_time_fs);
      const auto flu = fluence_profile(pulse());
      Csv fl("r_um,fluence");
      for (std::size_t j = 0; j < flu.size(); ++j) fl.row(flu.r_um[j], std::norm(flu.values[j]));
      put("fluence.csv", fl.str());
      note("propagate", "fluence_radius_1e2_um", radius_1e2_um(flu));
      note("propagate", "fluence_outer_radius_1e2_um", outer_radius_1e2_um(flu));
    }
    if (s.propagation.flags.ionization) plasma_notes();
  }

  void plasma_notes() {
    const auto& run = pulse_run();
    const auto& med = run.medium;
    const std::size_t plane = med.plane_near(s.propagation.jet.center_mm);
    const int q = s.propagation.order;
    const double lam = s.propagation.geometry.wavelength_nm;
    const double ne_end = med.electrons_cm3(plane, 0);
    note("propagate", "ionized_fraction_end", med.ionized_fraction(plane, 0));
    note("propagate", "plasma_mismatch_end_per_mm", plasma_mismatch(ne_end, q, lam));
    // Electron density at the pulse peak from the recorded on-axis history.
    if (axis_history_.size() == run.times_fs.size() && run.times_fs.size() > 1) {
      const std::size_t k = peak_slice();
      double integral = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double I = std::min(axis_history_[i], table().i_max());
        integral += query(table(), I).gamma * run.dt_fs * 1e-15;
      }
      const double frac = 1.0 - std::exp(-integral);
      const double na = med.atoms_cm3[plane];
      note("propagate", "ionized_fraction_peak", frac);
      note("propagate", "plasma_mismatch_peak_per_mm", plasma_mismatch(frac * na, q, lam));
    }
  }

  void stage_coherence() {
    const auto curve = coherence_degree(pulse(), s.analysis.r_ref_um);
    Csv c("r_um,gamma");
    for (std::size_t j = 0; j < curve.r_um.size(); ++j) c.row(curve.r_um[j], curve.gamma[j]);
    put("coherence.csv", c.str());
    const auto flu = fluence_profile(pulse());
    const double extent = outer_radius_1e2_um(flu);
    double gmin = 1.0, below = -1.0;
    for (std::size_t j = 0; j < curve.r_um.size(); ++j) {
      if (curve.r_um[j] <= extent) gmin = std::min(gmin, curve.gamma[j]);
      if (below < 0.0 && curve.gamma[j] < 0.5 && curve.r_um[j] > curve.r_ref_um) below = curve.r_um[j];
    }
    note("coherence", "r_ref_um", curve.r_ref_um);
    note("coherence", "extent_um", extent);
    note("coherence", "min_gamma_within_extent", gmin);
    note("coherence", "first_below_half_um", below);
  }

  SpectralOptions spectral_options() const {
    SpectralOptions o;
    o.padding = s.analysis.spectral_padding;
    o.coherent = s.analysis.coherent_sum;
    if (s.analysis.phase_radius_um >= 0.0) o.phase_radius_um = s.analysis.phase_radius_um;
    return o;
  }

  void stage_spectrum() {
    auto opt = spectral_options();
    const auto sp = spectral_profile(pulse(), opt);
    opt.zero_phase = true;
    const auto tl = spectral_profile(pulse(), opt);
    Csv c("domega_rad_fs,dlambda_angstrom,denergy_ev,intensity,phase_rad,transform_limited");
    for (std::size_t i = 0; i < sp.intensity.size(); ++i)
      c.row(sp.domega_rad_fs[i], sp.dlambda_angstrom[i], sp.denergy_ev[i], sp.intensity[i], sp.phase[i],
            tl.intensity[i]);
    put("spectrum.csv", c.str());
    note("spectrum", "fwhm_angstrom", sp.fwhm_angstrom);
    note("spectrum", "fwhm_ev", sp.fwhm_ev);
    note("spectrum", "centroid_angstrom", sp.centroid_angstrom);
    note("spectrum", "transform_limited_fwhm_angstrom", tl.fwhm_angstrom);
    note("spectrum", "phase_radius_um", sp.phase_radius_um);
    note("spectrum", "parseval_relative_error",
         std::abs(sp.spectral_energy - sp.time_energy) / sp.time_energy);
  }

  void stage_modulation() {
    const auto& p = pulse();
    const auto& r = p.r_um();
    std::size_t j = 0;
    if (s.analysis.phase_radius_um >= 0.0) {
      for (std::size_t i = 1; i < r.size(); ++i)
        if (std::abs(r[i] - s.analysis.phase_radius_um) < std::abs(r[j] - s.analysis.phase_radius_um)) j = i;
    } else {
      const auto flu = fluence_profile(p);
      for (std::size_t i = 1; i < r.size(); ++i)
        if (std::norm(flu.values[i]) > std::norm(flu.values[j])) j = i;
    }
    const std::size_t n = p.size();
    std::vector<double> power(n), phase(n), domega(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx v = p.slices[k].values[j];
      power[k] = std::norm(v);
      phase[k] = std::arg(v);
      if (k > 0) {
        double d = phase[k] - phase[k - 1];
        d -= 2.0 * units::pi * std::round(d / (2.0 * units::pi));
        phase[k] = phase[k - 1] + d;
      }
    }
    for (std::size_t k = 1; k + 1 < n; ++k)
      domega[k] = (phase[k + 1] - phase[k - 1]) / (p.times_fs[k + 1] - p.times_fs[k - 1]);

    const auto w = default_slope_windows(transition_intensity(table()), table().i_max());
    PhaseModulationModel m;
    m.eta = phase_slope(table(), w.plateau_lo, w.plateau_hi, SlopeRegion::plateau).eta;
    m.i0_wcm2 = s.propagation.peak_intensity_wcm2;
    m.tau_fwhm_fs = s.propagation.fwhm_fs;
    m.harmonic_wavelength_nm = p.harmonic_wavelength_nm();

    Csv c("t_fs,power,phase_rad,domega_rad_fs,model_domega_rad_fs");
    for (std::size_t k = 0; k < n; ++k) c.row(p.times_fs[k], power[k], phase[k], domega[k], m.delta_omega(p.times_fs[k]));
    put("modulation.csv", c.str());

    // Measured shift at the inflection times, same conversion as the spectra.
    const double lq = p.harmonic_wavelength_nm() * 1e-9;
    auto at = [&](double t) {
      std::size_t k = 1;
      while (k + 2 < n && p.times_fs[k + 1] < t) ++k;
      const double f = (t - p.times_fs[k]) / (p.times_fs[k + 1] - p.times_fs[k]);
      const double dw = domega[k] + f * (domega[k + 1] - domega[k]);
      return -lq * lq * dw * 1e15 / (2.0 * units::pi * units::c_si) * 1e10;
    };
    const double ti = m.inflection_time_fs();
    note("modulation", "radius_um", r[j]);
    note("modulation", "eta_plateau_per_1e14", m.eta * 1e14);
    note("modulation", "model_delta_lambda_ext_angstrom", m.delta_lambda_ext_angstrom());
    // Same model at the peak intensity this radius sees at the jet centre.
    const auto& g = s.propagation.geometry;
    const double zc = s.propagation.jet.center_mm - g.focus_z_mm;
    const double wz = g.radius_um(s.propagation.jet.center_mm);
    PhaseModulationModel local = m;
    local.i0_wcm2 = m.i0_wcm2 / (1.0 + std::pow(zc / g.rayleigh_mm(), 2)) *
                    std::exp(-2.0 * r[j] * r[j] / (wz * wz));
    note("modulation", "local_peak_intensity_wcm2", local.i0_wcm2);
    note("modulation", "local_model_delta_lambda_ext_angstrom", local.delta_lambda_ext_angstrom());
    note("modulation", "measured_delta_lambda_early_angstrom", at(-ti));
    note("modulation", "measured_delta_lambda_late_angstrom", at(ti));
    note("modulation", "spherical_coefficient_rad_um2@3.8mm",
         spherical_wave_coefficient(p.harmonic_wavelength_nm(), 3.8));
  }

  void stage_compress() {
    const auto cr = compress_pulse(pulse(), s.analysis.compression_threshold, s.analysis.spectral_padding);
    Csv c("profile,t_fs,power_w");
    auto dump = [&](const char* name, const TemporalProfile& t) {
      for (std::size_t i = 0; i < t.times_fs.size(); ++i) c.row(name, t.times_fs[i], t.power[i]);
    };
    dump("before", cr.before);
    dump("compressed", cr.compressed);
    dump("transform_limited", cr.transform_limited);
    put("compress.csv", c.str());
    note("compress", "before_fwhm_fs", cr.before.fwhm_fs);
    note("compress", "compressed_fwhm_fs", cr.compressed.fwhm_fs);
    note("compress", "transform_limited_fwhm_fs", cr.transform_limited.fwhm_fs);
    note("compress", "quadratic_phase_rad_fs2", cr.quadratic_fs2);
    note("compress", "fitted_bins", static_cast<double>(cr.fitted_bins));
  }

  void stage_nonadiabatic() {
    const auto& n = s.nonadiabatic;
    GridSpec grid;
    grid.i_min = 0.0;
    grid.i_max = n.peak_intensity_wcm2;
    grid.nodes = n.table_nodes;
    bool hit = false;
    const auto tab = cache.get(n.atom, n.wavelength_nm, n.order, grid, n.numerics, &hit);
    record_cache(table_cache_key(n.atom, n.wavelength_nm, n.order, grid, n.numerics), hit);
    say("nonadiabatic dipole");
    const auto res = nonadiabatic_pulse(n, tab);
    Csv t("t_fs,adiabatic_power,nonadiabatic_power,adiabatic_phase_rad,nonadiabatic_phase_rad");
    for (std::size_t k = 0; k < res.times_fs.size(); ++k)
      t.row(res.times_fs[k], std::norm(res.adiabatic[k]), std::norm(res.nonadiabatic[k]),
            std::arg(res.adiabatic[k]), std::arg(res.nonadiabatic[k]));
    put("nonadiabatic_temporal.csv", t.str());
    Csv sp("denergy_ev,dlambda_angstrom,adiabatic,nonadiabatic");
    const auto& a = res.adiabatic_spectrum;
    const auto& b = res.nonadiabatic_spectrum;
    for (std::size_t i = 0; i < a.intensity.size() && i < b.intensity.size(); ++i)
      sp.row(a.denergy_ev[i], a.dlambda_angstrom[i], a.intensity[i], b.intensity[i]);
    put("nonadiabatic_spectrum.csv", sp.str());
    note("nonadiabatic", "adiabatic_fwhm_fs", res.adiabatic_profile.fwhm_fs);
    note("nonadiabatic", "nonadiabatic_fwhm_fs", res.nonadiabatic_profile.fwhm_fs);
    note("nonadiabatic", "delay_fs", res.delay_fs);
    note("nonadiabatic", "adiabatic_phase_residual_rad", res.adiabatic_phase_residual);
    note("nonadiabatic", "adiabatic_width_ev", a.fwhm_ev);
    note("nonadiabatic", "nonadiabatic_width_ev", b.fwhm_ev);
    note("nonadiabatic", "red_shift_ev", res.red_shift_ev);
    note("nonadiabatic", "adiabatic_compressed_fs", res.adiabatic_compressed.compressed.fwhm_fs);
    note("nonadiabatic", "nonadiabatic_compressed_fs", res.nonadiabatic_compressed.compressed.fwhm_fs);
  }

  void run_stage(const std::string& stage) {
    say(stage);
    if (stage == "table") stage_table();
    else if (stage == "phasemap") stage_phasemap();
    else if (stage == "scan") stage_scan();
    else if (stage == "propagate") stage_propagate();
    else if (stage == "coherence") stage_coherence();
    else if (stage == "spectrum") stage_spectrum();
    else if (stage == "modulation") stage_modulation();
    else if (stage == "compress") stage_compress();
    else if (stage == "nonadiabatic") stage_nonadiabatic();
    else throw ConfigError("run.stages: unknown stage '" + stage + "'");
  }

  void execute(const std::vector<std::string>& stages) {
    for (const auto& stage : stage_names()) {
      if (std::find(stages.begin(), stages.end(), stage) == stages.end()) continue;
      try {
        run_stage(stage);
      } catch (const std::exception& e) {
        const std::string where = (s.case_name.empty() ? "" : s.case_name + "/") + stage;
        say("error in " + stage + ": " + e.what());
        std::lock_guard lock(shared);
        errors[where] = e.what();
        summary.push_back({stage, "error", one_line(e.what())});
      }
    }
    Csv c("stage,key,value");
    for (const auto& row : summary) c.row(row[0], row[1], row[2]);
    put("summary.csv", c.str());
  }
};

}  // namespace

RunManifest run_scenario(const Scenario& scenario, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Settings base = scenario.settings();
  fs::path out = options.out_dir;
  if (out.empty()) out = base.out_dir.empty() ? default_out_dir() : fs::path(base.out_dir);
  const fs::path run_dir = out / base.id;
  const fs::path cache_dir = options.cache_dir.empty() ? out / "table_cache" : options.cache_dir;
  fs::create_directories(run_dir);

  RunManifest manifest;
  manifest.scenario_id = base.id;
  const std::string canonical = serialize(scenario);
  manifest.scenario_hash = sha256_hex(canonical);

  Writer writer(run_dir);
  writer.put("scenario.ini", canonical);
  TableCache cache(cache_dir);
  std::mutex shared;

  std::vector<std::string> names = scenario.case_names();
  if (!options.only_case.empty()) {
    if (std::find(names.begin(), names.end(), options.only_case) == names.end())
      throw NotFoundError("no case named '" + options.only_case + "'");
    names = {options.only_case};
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      Settings s = scenario.settings(names[i]);
      if (!options.stages.empty()) s.stages = options.stages;
      CaseRunner cr{s, names[i].empty() ? "" : names[i] + "/", writer, cache, shared,
                    manifest.cache, manifest.errors, options.log, {}, {}, {}, {}, {}};
      cr.execute(s.stages);
    }
  };
  const std::size_t nw = std::max<std::size_t>(1, std::min(options.workers, names.size()));
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(worker);
  }

  std::sort(manifest.cache.begin(), manifest.cache.end());
  manifest.cache.erase(std::unique(manifest.cache.begin(), manifest.cache.end()), manifest.cache.end());
  manifest.files = writer.files();
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream(run_dir / "manifest.txt", std::ios::trunc) << manifest.text();
  return manifest;
}

}  // namespace hhg
