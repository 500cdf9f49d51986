#pragma once

// Declarative scenarios: INI-style text with sections, a fixed key set, and
// optional [case.NAME] sections that override keys for one variant of the
// run (another intensity, pressure, chirp sign, ...).

#include <map>
#include <string>
#include <vector>

#include "hhg/dipole_table.hpp"
#include "hhg/nonadiabatic.hpp"
#include "hhg/propagator.hpp"
#include "hhg/sfa.hpp"

namespace hhg {

enum class KeyType { real, integer, boolean, text, real_list, text_list };

struct KeyInfo {
  std::string path;  // section.key
  KeyType type;
  std::string default_value;  // canonical form; empty + required => must be given
  std::string help;
  bool required = false;
};

/// Every accepted key with its default, in document order.
const std::vector<KeyInfo>& documented_keys();

struct AnalysisOptions {
  double r_ref_um = 0.0;
  std::size_t spectral_padding = 8;
  double phase_radius_um = -1.0;  // < 0: dominant radius
  bool coherent_sum = false;
  double far_field_distance_mm = 1000.0;
  double far_field_max_mrad = 40.0;
  std::size_t far_field_samples = 801;
  double focus_z_min_mm = -4.0;
  double focus_step_mm = 0.01;
  double compression_threshold = 0.05;
};

struct PhaseMapOptions {
  double z_min_mm = -5.0;
  double z_max_mm = 5.0;
  std::size_t z_points = 201;
  std::vector<double> radii_um{0.0, 5.0, 10.0, 15.0};
  std::vector<double> intensities_wcm2{6e14};
};

/// Typed view of one case of a scenario.
struct Settings {
  std::string id;
  std::string case_name;
  std::string description;
  std::vector<std::string> stages;
  std::string out_dir;
  AtomModel atom;
  int chirp_sign = 0;
  double bandwidth_nm = 32.0;
  PropagationSetup propagation;
  GridSpec table_grid;
  SfaNumerics numerics;
  std::vector<double> scan_jets_mm;
  std::vector<double> scan_intensities_wcm2;
  AnalysisOptions analysis;
  PhaseMapOptions phasemap;
  NonadiabaticSetup nonadiabatic;

  void validate() const;
};

struct Scenario {
  /// Canonical values for every documented key (defaults filled in).
  std::map<std::string, std::string> values;
  /// Case name -> overridden keys (canonical values), in name order.
  std::map<std::string, std::map<std::string, std::string>> cases;

  /// Case names, or {""} when the scenario has none.
  std::vector<std::string> case_names() const;
  Settings settings(const std::string& case_name = "") const;
  bool operator==(const Scenario&) const = default;
};

/// Known stage names, in execution order.
const std::vector<std::string>& stage_names();

/// Parses and validates. Errors name the offending key path.
Scenario parse_config(const std::string& text);

/// Canonical text; parse_config(serialize(s)) == s.
std::string serialize(const Scenario& scenario);

/// Reference scenario (825 nm, 150 fs, b = 5 mm, neon, 0.8 mm jet).
Scenario reference_scenario();

/// Sets one key (canonicalized and checked) on the base values.
void set_value(Scenario& scenario, const std::string& path, const std::string& value);

struct Preset {
  std::string id;
  std::string title;
  std::string text;  // scenario document
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& id);

}  // namespace hhg
