#include "hhg/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hhg/errors.hpp"

namespace hhg {

namespace {

enum class Check { any, positive, nonnegative, odd, fraction, range, min_int, choice };

struct KeyDef {
  KeyInfo info;
  Check check = Check::any;
  double lo = 0.0, hi = 0.0;
  std::vector<std::string> choices;
};

KeyDef key(std::string path, KeyType t, std::string def, std::string help, Check c = Check::any,
           double lo = 0.0, double hi = 0.0) {
  KeyDef k;
  k.info = KeyInfo{std::move(path), t, std::move(def), std::move(help), false};
  k.check = c;
  k.lo = lo;
  k.hi = hi;
  return k;
}

KeyDef choice(std::string path, KeyType t, std::string def, std::string help,
              std::vector<std::string> choices) {
  KeyDef k = key(std::move(path), t, std::move(def), std::move(help), Check::choice);
  k.choices = std::move(choices);
  return k;
}

const std::vector<KeyDef>& registry() {
  using K = KeyType;
  static const std::vector<KeyDef> keys = [] {
    std::vector<KeyDef> v;
    KeyDef id = key("run.id", K::text, "", "scenario identifier");
    id.info.required = true;
    v.push_back(id);
    v.push_back(key("run.description", K::text, "", "free text"));
    v.push_back(choice("run.stages", K::text_list, "propagate", "pipeline stages to execute",
                       stage_names()));
    v.push_back(key("run.out_dir", K::text, "", "output directory (overridden by --out-dir)"));
    v.push_back(choice("atom.id", K::text, "neon", "target atom", {"neon", "helium", "argon"}));
    v.push_back(key("drive.wavelength_nm", K::real, "825", "drive wavelength", Check::positive));
    v.push_back(key("drive.peak_intensity_wcm2", K::real, "6e+14", "peak intensity at focus",
                    Check::positive));
    v.push_back(choice("drive.envelope", K::text, "gaussian", "temporal envelope",
                       {"gaussian", "square"}));
    v.push_back(key("drive.fwhm_fs", K::real, "150", "intensity FWHM (square: width)",
                    Check::positive));
    v.push_back(key("drive.chirp_sign", K::integer, "0", "-1, 0 or +1", Check::range, -1, 1));
    v.push_back(key("drive.bandwidth_nm", K::real, "32", "chirped spectral FWHM", Check::positive));
    v.push_back(key("geometry.confocal_mm", K::real, "5", "confocal parameter b", Check::positive));
    v.push_back(key("geometry.focus_z_mm", K::real, "0", "focus position"));
    v.push_back(key("jet.center_mm", K::real, "0", "jet centre relative to focus", Check::range,
                    -5, 5));
    v.push_back(key("jet.fwhm_mm", K::real, "0.8", "jet density FWHM", Check::positive));
    v.push_back(key("jet.truncation_halfwidth_mm", K::real, "0.8", "density cut-off half width",
                    Check::positive));
    v.push_back(key("jet.pressure_torr", K::real, "15", "peak pressure", Check::positive));
    v.push_back(key("jet.temperature_k", K::real, "293", "gas temperature", Check::positive));
    v.push_back(key("harmonic.order", K::integer, "45", "harmonic order", Check::odd));
    v.push_back(key("flags.ionization", K::boolean, "false", "free electrons and plasma dephasing"));
    v.push_back(key("flags.defocusing", K::boolean, "true", "plasma term on the fundamental"));
    v.push_back(key("flags.depletion", K::boolean, "false", "neutral depletion in the source"));
    v.push_back(key("table.i_max_wcm2", K::real, "7.2e+14", "table upper intensity",
                    Check::positive));
    v.push_back(key("table.nodes", K::integer, "250", "table nodes", Check::min_int, 10));
    v.push_back(key("table.log_spacing", K::boolean, "false", "geometric node spacing"));
    v.push_back(key("numerics.nu", K::real, "0.001", "diffusion regularization", Check::positive));
    v.push_back(key("numerics.tau_max_periods", K::real, "4", "return-time cut", Check::positive));
    v.push_back(key("numerics.tau_samples", K::integer, "512", "tau points per period",
                    Check::min_int, 16));
    v.push_back(key("numerics.t_samples", K::integer, "512", "time points per period",
                    Check::min_int, 16));
    v.push_back(key("numerics.max_tail", K::real, "0.05", "accepted truncation tail",
                    Check::positive));
    v.push_back(key("grid.nr", K::integer, "2048", "radial nodes", Check::min_int, 16));
    v.push_back(key("grid.r_max_w0", K::real, "4", "radial extent in waists", Check::positive));
    v.push_back(key("grid.dz_jet_um", K::real, "5", "z step in the jet", Check::positive));
    v.push_back(key("grid.dz_out_um", K::real, "10", "z step outside the jet", Check::positive));
    v.push_back(key("grid.absorber_fraction", K::real, "0.1", "absorbing outer fraction",
                    Check::range, 0.0, 0.5));
    v.push_back(key("grid.absorber_per_mm", K::real, "50", "absorber strength",
                    Check::nonnegative));
    v.push_back(key("grid.slices", K::integer, "512", "envelope time slices", Check::min_int, 1));
    v.push_back(key("grid.slice_span_fwhm", K::real, "1.5", "slices cover +- span * FWHM",
                    Check::positive));
    v.push_back(key("grid.exit_z_mm", K::real, "0", "exit plane (<= jet end: jet end)"));
    v.push_back(key("scan.jet_positions_mm", K::real_list, "-3,-2,-1,0,1,2,3,4",
                    "jet positions of a conversion scan", Check::range, -5, 5));
    v.push_back(key("scan.intensities_wcm2", K::real_list, "3e+14,4e+14,5e+14,6e+14",
                    "peak intensities of a conversion scan", Check::positive));
    v.push_back(key("analysis.r_ref_um", K::real, "0", "coherence reference radius",
                    Check::nonnegative));
    v.push_back(key("analysis.spectral_padding", K::integer, "8", "FFT zero padding factor",
                    Check::min_int, 1));
    v.push_back(key("analysis.phase_radius_um", K::real, "-1",
                    "radius of spectral/temporal phase (< 0: dominant radius)"));
    v.push_back(key("analysis.coherent_sum", K::boolean, "false",
                    "sum spectral fields instead of intensities"));
    v.push_back(key("analysis.far_field_distance_mm", K::real, "1000", "far-field distance",
                    Check::positive));
    v.push_back(key("analysis.far_field_max_mrad", K::real, "40", "far-field angular range",
                    Check::positive));
    v.push_back(key("analysis.far_field_samples", K::integer, "801", "far-field angles",
                    Check::min_int, 3));
    v.push_back(key("analysis.focus_z_min_mm", K::real, "-4", "virtual focus scan start"));
    v.push_back(key("analysis.focus_step_mm", K::real, "0.01", "virtual focus scan step",
                    Check::positive));
    v.push_back(key("analysis.compression_threshold", K::real, "0.05",
                    "spectral fit threshold (fraction of peak)", Check::fraction));
    v.push_back(key("phasemap.z_min_mm", K::real, "-5", "phase map start"));
    v.push_back(key("phasemap.z_max_mm", K::real, "5", "phase map end"));
    v.push_back(key("phasemap.z_points", K::integer, "201", "phase map planes", Check::min_int, 3));
    v.push_back(key("phasemap.radii_um", K::real_list, "0,5,10,15", "phase map radii",
                    Check::nonnegative));
    v.push_back(key("phasemap.intensities_wcm2", K::real_list, "6e+14", "phase map peak intensities",
                    Check::positive));
    v.push_back(choice("nonadiabatic.atom", K::text, "argon", "short-pulse atom",
                       {"neon", "helium", "argon"}));
    v.push_back(key("nonadiabatic.wavelength_nm", K::real, "810", "short-pulse wavelength",
                    Check::positive));
    v.push_back(key("nonadiabatic.peak_intensity_wcm2", K::real, "3e+14", "short-pulse intensity",
                    Check::positive));
    v.push_back(key("nonadiabatic.fwhm_fs", K::real, "27", "short-pulse FWHM", Check::positive));
    v.push_back(key("nonadiabatic.order", K::integer, "49", "short-pulse harmonic", Check::odd));
    v.push_back(key("nonadiabatic.window_full_width_omega", K::real, "2",
                    "spectral window full width (drive frequencies)", Check::positive));
    v.push_back(key("nonadiabatic.window_order", K::integer, "4", "super-gaussian order",
                    Check::min_int, 1));
    v.push_back(key("nonadiabatic.span_fwhm", K::real, "2", "time span in FWHM each side",
                    Check::positive));
    v.push_back(key("nonadiabatic.table_nodes", K::integer, "150", "adiabatic table nodes",
                    Check::min_int, 16));
    return v;
  }();
  return keys;
}

const KeyDef* find_key(const std::string& path) {
  for (const auto& k : registry())
    if (k.info.path == path) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& path, const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
    throw ConfigError(path + ": '" + s + "' is not a number");
  return v;
}

long long parse_int(const std::string& path, const std::string& s) {
  long long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw ConfigError(path + ": '" + s + "' is not an integer");
  return v;
}

void check_number(const KeyDef& k, double v) {
  const std::string& p = k.info.path;
  auto fail = [&](const std::string& what) {
    throw ConfigError(p + ": non-physical value " + format_real(v) + " (" + what + ")");
  };
  switch (k.check) {
    case Check::positive:
      if (!(v > 0.0)) fail("must be positive");
      break;
    case Check::nonnegative:
      if (!(v >= 0.0)) fail("must be non-negative");
      break;
    case Check::fraction:
      if (!(v > 0.0 && v < 1.0)) fail("must lie in (0, 1)");
      break;
    case Check::range:
      if (!(v >= k.lo && v <= k.hi))
        fail("must lie in [" + format_real(k.lo) + ", " + format_real(k.hi) + "]");
      break;
    case Check::min_int:
      if (!(v >= k.lo)) fail("must be at least " + format_real(k.lo));
      break;
    case Check::odd:
      if (!(v > 0.0) || static_cast<long long>(v) % 2 == 0) fail("must be a positive odd integer");
      break;
    default:
      break;
  }
}

// Canonical string for a raw value of key k; throws with the key path.
std::string canonical(const KeyDef& k, const std::string& raw) {
  const std::string& p = k.info.path;
  const std::string s = trim(raw);
  switch (k.info.type) {
    case KeyType::real: {
      const double v = parse_real(p, s);
      check_number(k, v);
      return format_real(v);
    }
    case KeyType::integer: {
      const long long v = parse_int(p, s);
      check_number(k, static_cast<double>(v));
      return std::to_string(v);
    }
    case KeyType::boolean: {
      std::string l = s;
      std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
      if (l == "true" || l == "yes" || l == "on" || l == "1") return "true";
      if (l == "false" || l == "no" || l == "off" || l == "0") return "false";
      throw ConfigError(p + ": '" + s + "' is not a boolean");
    }
    case KeyType::text:
      if (k.check == Check::choice &&
          std::find(k.choices.begin(), k.choices.end(), s) == k.choices.end())
        throw ConfigError(p + ": unknown value '" + s + "'");
      return s;
    case KeyType::real_list: {
      std::string out;
      for (const auto& item : split_list(s)) {
        const double v = parse_real(p, item);
        check_number(k, v);
        out += (out.empty() ? "" : ",") + format_real(v);
      }
      return out;
    }
    case KeyType::text_list: {
      std::string out;
      for (const auto& item : split_list(s)) {
        if (k.check == Check::choice &&
            std::find(k.choices.begin(), k.choices.end(), item) == k.choices.end())
          throw ConfigError(p + ": unknown entry '" + item + "'");
        out += (out.empty() ? "" : ",") + item;
      }
      return out;
    }
  }
  return s;
}

// Typed accessors over a canonical map.
struct View {
  const std::map<std::string, std::string>& m;
  const std::string& raw(const std::string& p) const { return m.at(p); }
  double real(const std::string& p) const { return parse_real(p, raw(p)); }
  long long integer(const std::string& p) const { return parse_int(p, raw(p)); }
  std::size_t size(const std::string& p) const { return static_cast<std::size_t>(integer(p)); }
  bool boolean(const std::string& p) const { return raw(p) == "true"; }
  std::vector<double> reals(const std::string& p) const {
    std::vector<double> v;
    for (const auto& s : split_list(raw(p))) v.push_back(parse_real(p, s));
    return v;
  }
  std::vector<std::string> texts(const std::string& p) const { return split_list(raw(p)); }
};

Settings build_settings(const std::map<std::string, std::string>& values, const std::string& name) {
  const View v{values};
  Settings s;
  s.id = v.raw("run.id");
  s.case_name = name;
  s.description = v.raw("run.description");
  s.stages = v.texts("run.stages");
  s.out_dir = v.raw("run.out_dir");
  s.atom = AtomModel::preset(v.raw("atom.id"));

  PropagationSetup& p = s.propagation;
  p.geometry.wavelength_nm = v.real("drive.wavelength_nm");
  p.geometry.confocal_mm = v.real("geometry.confocal_mm");
  p.geometry.focus_z_mm = v.real("geometry.focus_z_mm");
  p.jet.center_mm = v.real("jet.center_mm");
  p.jet.fwhm_mm = v.real("jet.fwhm_mm");
  p.jet.truncation_halfwidth_mm = v.real("jet.truncation_halfwidth_mm");
  p.jet.peak_pressure_torr = v.real("jet.pressure_torr");
  p.jet.temperature_k = v.real("jet.temperature_k");
  p.jet.atom = s.atom;
  p.peak_intensity_wcm2 = v.real("drive.peak_intensity_wcm2");
  p.envelope = v.raw("drive.envelope") == "square" ? Envelope::square : Envelope::gaussian;
  p.fwhm_fs = v.real("drive.fwhm_fs");
  s.chirp_sign = static_cast<int>(v.integer("drive.chirp_sign"));
  s.bandwidth_nm = v.real("drive.bandwidth_nm");
  p.chirp_rad_per_fs2 =
      s.chirp_sign == 0 ? 0.0
                        : s.chirp_sign * chirp_for_bandwidth(p.fwhm_fs, p.geometry.wavelength_nm,
                                                             s.bandwidth_nm);
  p.order = static_cast<int>(v.integer("harmonic.order"));
  p.flags.ionization = v.boolean("flags.ionization");
  p.flags.defocusing = v.boolean("flags.defocusing");
  p.flags.depletion = v.boolean("flags.depletion");
  p.grid.nr = v.size("grid.nr");
  p.grid.r_max_w0 = v.real("grid.r_max_w0");
  p.grid.dz_jet_um = v.real("grid.dz_jet_um");
  p.grid.dz_out_um = v.real("grid.dz_out_um");
  p.grid.absorber_fraction = v.real("grid.absorber_fraction");
  p.grid.absorber_per_mm = v.real("grid.absorber_per_mm");
  p.slices = v.size("grid.slices");
  p.slice_span_fwhm = v.real("grid.slice_span_fwhm");
  p.exit_z_mm = v.real("grid.exit_z_mm");

  s.table_grid.i_min = 0.0;
  s.table_grid.i_max = v.real("table.i_max_wcm2");
  s.table_grid.nodes = v.size("table.nodes");
  s.table_grid.log_spacing = v.boolean("table.log_spacing");
  s.numerics.nu = v.real("numerics.nu");
  s.numerics.tau_max_periods = v.real("numerics.tau_max_periods");
  s.numerics.tau_samples = static_cast<int>(v.integer("numerics.tau_samples"));
  s.numerics.t_samples = static_cast<int>(v.integer("numerics.t_samples"));
  s.numerics.max_tail = v.real("numerics.max_tail");

  s.scan_jets_mm = v.reals("scan.jet_positions_mm");
  s.scan_intensities_wcm2 = v.reals("scan.intensities_wcm2");

  AnalysisOptions& a = s.analysis;
  a.r_ref_um = v.real("analysis.r_ref_um");
  a.spectral_padding = v.size("analysis.spectral_padding");
  a.phase_radius_um = v.real("analysis.phase_radius_um");
  a.coherent_sum = v.boolean("analysis.coherent_sum");
  a.far_field_distance_mm = v.real("analysis.far_field_distance_mm");
  a.far_field_max_mrad = v.real("analysis.far_field_max_mrad");
  a.far_field_samples = v.size("analysis.far_field_samples");
  a.focus_z_min_mm = v.real("analysis.focus_z_min_mm");
  a.focus_step_mm = v.real("analysis.focus_step_mm");
  a.compression_threshold = v.real("analysis.compression_threshold");

  PhaseMapOptions& m = s.phasemap;
  m.z_min_mm = v.real("phasemap.z_min_mm");
  m.z_max_mm = v.real("phasemap.z_max_mm");
  m.z_points = v.size("phasemap.z_points");
  m.radii_um = v.reals("phasemap.radii_um");
  m.intensities_wcm2 = v.reals("phasemap.intensities_wcm2");

  NonadiabaticSetup& n = s.nonadiabatic;
  n.atom = AtomModel::preset(v.raw("nonadiabatic.atom"));
  n.wavelength_nm = v.real("nonadiabatic.wavelength_nm");
  n.peak_intensity_wcm2 = v.real("nonadiabatic.peak_intensity_wcm2");
  n.fwhm_fs = v.real("nonadiabatic.fwhm_fs");
  n.order = static_cast<int>(v.integer("nonadiabatic.order"));
  n.window.full_width_omega = v.real("nonadiabatic.window_full_width_omega");
  n.window.order = static_cast<int>(v.integer("nonadiabatic.window_order"));
  n.span_fwhm = v.real("nonadiabatic.span_fwhm");
  n.table_nodes = v.size("nonadiabatic.table_nodes");
  n.numerics = s.numerics;
  return s;
}

bool uses_table(const std::vector<std::string>& stages) {
  for (const auto& s : stages)
    if (s != "nonadiabatic") return true;
  return false;
}

}  // namespace

const std::vector<KeyInfo>& documented_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> v;
    for (const auto& k : registry()) v.push_back(k.info);
    return v;
  }();
  return keys;
}

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"table",    "phasemap", "scan",
                                              "propagate", "coherence", "spectrum",
                                              "modulation", "compress", "nonadiabatic"};
  return names;
}

void Settings::validate() const {
  const std::string where = case_name.empty() ? "" : "case." + case_name + ": ";
  try {
    atom.validate();
    propagation.validate();
    table_grid.validate();
    numerics.validate();
    if (std::find(stages.begin(), stages.end(), "nonadiabatic") != stages.end())
      nonadiabatic.validate();
    if (stages.empty()) throw ConfigError("run.stages: no stage selected");
    if (!(phasemap.z_min_mm < phasemap.z_max_mm))
      throw ConfigError("phasemap.z_min_mm: must be below phasemap.z_max_mm");
    if (uses_table(stages)) {
      const double top = table_grid.i_max * (1.0 + 1e-9);
      if (propagation.peak_intensity_wcm2 > top)
        throw ConfigError("drive.peak_intensity_wcm2: exceeds table.i_max_wcm2");
      auto has = [&](const char* s) { return std::find(stages.begin(), stages.end(), s) != stages.end(); };
      if (has("scan"))
        for (double I : scan_intensities_wcm2)
          if (I > top) throw ConfigError("scan.intensities_wcm2: entry exceeds table.i_max_wcm2");
      if (has("phasemap"))
        for (double I : phasemap.intensities_wcm2)
          if (I > top) throw ConfigError("phasemap.intensities_wcm2: entry exceeds table.i_max_wcm2");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(where + e.what());
  }
}

std::vector<std::string> Scenario::case_names() const {
  if (cases.empty()) return {""};
  std::vector<std::string> names;
  for (const auto& [n, _] : cases) names.push_back(n);
  return names;
}

Settings Scenario::settings(const std::string& name) const {
  if (name.empty()) return build_settings(values, name);
  const auto it = cases.find(name);
  if (it == cases.end()) throw NotFoundError("no case named '" + name + "'");
  auto merged = values;
  for (const auto& [k, v] : it->second) merged[k] = v;
  return build_settings(merged, name);
}

Scenario parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  Scenario s;
  for (const auto& k : registry()) s.values[k.info.path] = k.info.default_value;
  std::set<std::string> given;

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(section + ": key outside of any section");
    const bool is_case = section.rfind("case.", 0) == 0;
    if (is_case) {
      const std::string name = section.substr(5);
      if (name.empty()) throw ConfigError(section + ": case needs a name");
      if (!std::all_of(name.begin(), name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '-' || c == '_' || c == '.';
          }))
        throw ConfigError(section + ": case names use letters, digits, '-', '_' and '.'");
      auto& overrides = s.cases[name];
      for (const auto& [k, node] : body) {
        const KeyDef* def = find_key(k);
        if (!def) throw ConfigError(section + "." + k + ": unknown key");
        if (k.rfind("run.", 0) == 0) throw ConfigError(section + "." + k + ": run keys cannot vary per case");
        try {
          overrides[k] = canonical(*def, node.data());
        } catch (const ConfigError& e) {
          throw ConfigError(section + ": " + e.what());
        }
      }
      continue;
    }
    for (const auto& [k, node] : body) {
      const std::string path = section + "." + k;
      const KeyDef* def = find_key(path);
      if (!def) throw ConfigError(path + ": unknown key");
      s.values[path] = canonical(*def, node.data());
      given.insert(path);
    }
  }
  for (const auto& k : registry())
    if (k.info.required && (!given.count(k.info.path) || s.values[k.info.path].empty()))
      throw ConfigError(k.info.path + ": missing required key");
  for (const auto& name : s.case_names()) s.settings(name).validate();
  return s;
}

std::string serialize(const Scenario& s) {
  std::ostringstream out;
  std::string section;
  for (const auto& k : registry()) {
    const auto dot = k.info.path.find('.');
    const std::string sec = k.info.path.substr(0, dot);
    if (sec != section) {
      out << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    out << k.info.path.substr(dot + 1) << " = " << s.values.at(k.info.path) << '\n';
  }
  for (const auto& [name, overrides] : s.cases) {
    out << "\n[case." << name << "]\n";
    for (const auto& [k, v] : overrides) out << k << " = " << v << '\n';
  }
  return out.str();
}

Scenario reference_scenario() { return parse_config("[run]\nid = reference\n"); }

void set_value(Scenario& s, const std::string& path, const std::string& value) {
  const KeyDef* def = find_key(path);
  if (!def) throw ConfigError(path + ": unknown key");
  s.values[path] = canonical(*def, value);
  for (const auto& name : s.case_names()) s.settings(name).validate();
}

// Presets -------------------------------------------------------------------------

namespace {

std::string doc(const std::string& id, const std::string& title, const std::string& body) {
  return "[run]\nid = " + id + "\ndescription = " + title + "\n" + body;
}

std::vector<Preset> make_presets() {
  std::vector<Preset> v;
  auto add = [&](const std::string& id, const std::string& title, const std::string& body) {
    v.push_back({id, title, doc(id, title, body)});
  };
  const std::string three_intensities =
      "\n[case.i4]\ndrive.peak_intensity_wcm2 = 4e14\n"
      "\n[case.i5]\ndrive.peak_intensity_wcm2 = 5e14\n"
      "\n[case.i6]\ndrive.peak_intensity_wcm2 = 6e14\n";
  const std::string jet15 =
      "jet_positions_mm = -3,-2.5,-2,-1.5,-1,-0.5,0,0.5,1,1.5,2,2.5,3,3.5,4\n";

  add("fig-dipole", "single-atom amplitude and phase of the 45th harmonic versus intensity",
      "stages = table\n");
  add("fig-phaspol", "on-axis polarization phase and its two components at 6e14 W/cm2",
      "stages = table,phasemap\n\n[phasemap]\nradii_um = 0\nintensities_wcm2 = 6e14\n");
  add("fig-phaspoloff", "polarization phase at r = 0, 5, 10, 15 um, 6e14 W/cm2",
      "stages = phasemap\n\n[phasemap]\nradii_um = 0,5,10,15\nintensities_wcm2 = 6e14\n");
  add("fig-phaspolint", "on-axis polarization phase for peak intensities 2..6e14 W/cm2",
      "stages = phasemap\n\n[phasemap]\nradii_um = 0\n"
      "intensities_wcm2 = 2e14,3e14,4e14,5e14,6e14\n");
  add("fig-convstat", "conversion efficiency versus jet position, square 150 fs pulses",
      "stages = scan\n\n[drive]\nenvelope = square\n\n[scan]\n" + jet15 +
          "intensities_wcm2 = 3e14,4e14,5e14,6e14\n");
  add("fig-convdyn", "conversion efficiency versus jet position, gaussian 150 fs pulses",
      // pulse energies only: 64 slices are enough
      "stages = scan\n\n[grid]\nslices = 64\n\n[scan]\n" + jet15 +
          "intensities_wcm2 = 3e14,4e14,5e14,6e14\n"
          "\n[case.neutral]\nflags.ionization = false\n"
          "\n[case.ionized]\nflags.ionization = true\nflags.depletion = true\n"
          "scan.intensities_wcm2 = 6e14\n");
  add("fig-intdep", "conversion efficiency versus peak intensity at z = 0 and z = 1 mm, ionization on",
      "stages = scan\n\n[flags]\nionization = true\ndepletion = true\n\n[grid]\nslices = 64\n"
      "\n[scan]\njet_positions_mm = 0,1\nintensities_wcm2 = 1e14,1.25e14,1.5e14,1.75e14,2e14,2.25e14,"
      "2.5e14,2.75e14,3e14,3.25e14,3.5e14,3.75e14,4e14,4.25e14,4.5e14,4.75e14,5e14,5.25e14,"
      "5.5e14,5.75e14,6e14,6.25e14,6.5e14,6.75e14,7e14\n");
  const std::string z3_square = "stages = propagate\n\n[drive]\nenvelope = square\n\n[jet]\ncenter_mm = 3\n";
  add("fig-nfprof3", "near- and far-field profiles at z = 3 mm, 4..6e14 W/cm2",
      z3_square + three_intensities);
  add("fig-nfphase3", "radial phase of the exit field at z = 3 mm, 4..6e14 W/cm2",
      z3_square + three_intensities);
  add("fig-focus3", "exit field backpropagated to the virtual focus, z = 3 mm",
      z3_square + "\n[analysis]\nfocus_z_min_mm = -2\n" + three_intensities);
  add("fig-cohdeg3", "degree of coherence at the exit, z = 3 mm, 3 Torr",
      "stages = propagate,coherence\n\n[jet]\ncenter_mm = 3\npressure_torr = 3\n"
      "\n[flags]\nionization = true\ndepletion = true\n");
  add("fig-cohdeg3-150torr", "degree of coherence at the exit, z = 3 mm, 150 Torr",
      "stages = propagate,coherence\n\n[jet]\ncenter_mm = 3\npressure_torr = 150\n"
      "\n[flags]\nionization = true\ndepletion = true\n");
  const std::string z1_square =
      "stages = propagate\n\n[drive]\nenvelope = square\n\n[jet]\ncenter_mm = -1\n";
  add("fig-nfprof1", "near- and far-field profiles at z = -1 mm", z1_square + three_intensities);
  add("fig-nfphase1", "radial phase of the exit field at z = -1 mm, 4..6e14 W/cm2",
      z1_square + three_intensities);
  add("fig-focus1", "exit field backpropagated towards the medium entrance, z = -1 mm",
      z1_square + "\n[analysis]\nfocus_z_min_mm = -4\n");
  add("fig-cohdeg1", "degree of coherence against r = 22 um, z = -1 mm, 3 Torr",
      "stages = propagate,coherence\n\n[jet]\ncenter_mm = -1\npressure_torr = 3\n"
      "\n[flags]\nionization = true\ndepletion = true\n\n[analysis]\nr_ref_um = 22\n");
  std::string positions;
  for (const char* z : {"-1", "0", "1", "2", "3", "4"})
    positions += std::string("\n[case.z") + z + "]\njet.center_mm = " + z + "\n";
  add("fig-temp", "temporal profiles for jet positions -1..4 mm", "stages = propagate\n" + positions);
  add("fig-spec", "spectral profiles for jet positions -1..4 mm", "stages = spectrum\n" + positions);
  add("fig-mod3", "on-axis temporal phase and chirp of the exit field, z = 3 mm",
      "stages = modulation\n\n[jet]\ncenter_mm = 3\n\n[analysis]\nphase_radius_um = 0\n");
  add("fig-mod1", "temporal phase and chirp at r = 20 um, z = -1 mm",
      "stages = modulation\n\n[jet]\ncenter_mm = -1\n\n[analysis]\nphase_radius_um = 20\n");
  add("fig-ioni", "ionization effects on temporal and spectral profiles, z = -1 mm",
      "stages = propagate,spectrum\n\n[jet]\ncenter_mm = -1\n"
      "\n[case.a-neutral]\nflags.ionization = false\n"
      "\n[case.b-3torr]\njet.pressure_torr = 3\nflags.ionization = true\nflags.depletion = true\n"
      "\n[case.c-15torr-nodefocus]\nflags.ionization = true\nflags.depletion = true\n"
      "flags.defocusing = false\n"
      "\n[case.d-15torr]\nflags.ionization = true\nflags.depletion = true\n");
  add("fig-compress", "compressed temporal profiles at z = 3 and -1 mm, 3 and 15 Torr",
      "stages = compress\n\n[flags]\nionization = true\ndepletion = true\n"
      "\n[case.z3-3torr]\njet.center_mm = 3\njet.pressure_torr = 3\n"
      "\n[case.z3-15torr]\njet.center_mm = 3\njet.pressure_torr = 15\n"
      "\n[case.zm1-3torr]\njet.center_mm = -1\njet.pressure_torr = 3\n"
      "\n[case.zm1-15torr]\njet.center_mm = -1\njet.pressure_torr = 15\n");
  add("fig-chirp", "spectra with an unchirped, positively and negatively chirped drive",
      "stages = spectrum\n"
      "\n[case.z3-none]\njet.center_mm = 3\n"
      "\n[case.z3-pos]\njet.center_mm = 3\ndrive.chirp_sign = 1\n"
      "\n[case.z3-neg]\njet.center_mm = 3\ndrive.chirp_sign = -1\n"
      "\n[case.zm1-none]\njet.center_mm = -1\n"
      "\n[case.zm1-pos]\njet.center_mm = -1\ndrive.chirp_sign = 1\n"
      "\n[case.zm1-neg]\njet.center_mm = -1\ndrive.chirp_sign = -1\n");
  add("fig-chirpion", "chirped drive at z = -1 mm, 15 Torr, with and without ionization",
      "stages = spectrum\n\n[jet]\ncenter_mm = -1\n"
      "\n[case.pos-neutral]\ndrive.chirp_sign = 1\n"
      "\n[case.pos-ionized]\ndrive.chirp_sign = 1\nflags.ionization = true\nflags.depletion = true\n"
      "\n[case.neg-neutral]\ndrive.chirp_sign = -1\n"
      "\n[case.neg-ionized]\ndrive.chirp_sign = -1\nflags.ionization = true\nflags.depletion = true\n");
  add("fig-tempadia", "49th harmonic in argon, 27 fs: adiabatic and nonadiabatic envelopes",
      "stages = nonadiabatic\n");
  add("fig-specadia", "49th harmonic in argon, 27 fs: adiabatic and nonadiabatic spectra",
      "stages = nonadiabatic\n");
  return v;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = make_presets();
  return p;
}

const Preset& find_preset(const std::string& id) {
  for (const auto& p : presets())
    if (p.id == id || p.id == "fig-" + id) return p;
  throw NotFoundError("no preset named '" + id + "'");
}

}  // namespace hhg
