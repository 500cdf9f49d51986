#pragma once

// Adiabatic single-atom response tabulated against intensity for one
// harmonic order. Tables are immutable once built and safe to share.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hhg/sfa.hpp"

namespace hhg {

struct GridSpec {
  double i_min = 0.0;      // W/cm^2 (0 gives an exact zero-field anchor)
  double i_max = 7.2e14;   // W/cm^2
  std::size_t nodes = 250;
  bool log_spacing = false;  // geometric spacing from max(i_min, i_max*1e-3)

  std::vector<double> intensities() const;
  void validate() const;
};

struct DipoleTable {
  int order = 0;
  std::string atom_id;
  double wavelength_nm = 0.0;
  std::vector<double> intensity;  // W/cm^2, strictly ascending
  std::vector<double> amplitude;  // |x_q|, a.u.
  std::vector<double> phase;      // unwrapped arg x_q, rad
  std::vector<double> gamma;      // total ionization rate, 1/s

  std::size_t size() const { return intensity.size(); }
  double i_min() const { return intensity.front(); }
  double i_max() const { return intensity.back(); }
  void validate() const;
};

struct TableSample {
  std::complex<double> x_q;
  double amplitude = 0.0;
  double phase = 0.0;
  double gamma = 0.0;  // 1/s
};

enum class SlopeRegion { cutoff, plateau };

/// Mean phase slope -eta over an intensity window. eta is reported as a
/// positive number in rad per W/cm^2.
struct PhaseSlope {
  double eta = 0.0;
  double i_lo = 0.0;
  double i_hi = 0.0;
  SlopeRegion region = SlopeRegion::cutoff;
  double fit_residual = 0.0;  // RMS, rad
  double slope = 0.0;         // signed d(phase)/dI
  std::size_t nodes = 0;

  double eta_per_1e14() const { return eta * 1e14; }
};

/// One node of the table: x_q and Gamma at a single intensity.
TableSample evaluate_node(const AtomModel& atom, double wavelength_nm, int order,
                          double intensity_wcm2, const SfaNumerics& numerics = {});

/// Fill every node with the SFA response (parallel over nodes) and unwrap
/// the phase by continuation from the lowest node.
DipoleTable build_table(const AtomModel& atom, double wavelength_nm, int order,
                        const GridSpec& grid, const SfaNumerics& numerics = {});

/// Linear interpolation of amplitude and unwrapped phase (separately) and of
/// gamma. Throws RangeError outside [i_min, i_max].
TableSample query(const DipoleTable& table, double intensity_wcm2);

/// Least-squares line through the unwrapped phase in [i_lo, i_hi].
PhaseSlope phase_slope(const DipoleTable& table, double i_lo, double i_hi,
                       SlopeRegion region = SlopeRegion::cutoff);

/// Plateau-cutoff transition: first intensity above the steep rise where
/// the smoothed log-log slope of |x_q| falls below half of its reference
/// value (see implementation). Throws NotFoundError.
double transition_intensity(const DipoleTable& table);

/// Generic form of the detector: `signal` is any positive measure of the
/// response (amplitude, yield) sampled at ascending intensities.
double half_slope_transition(const std::vector<double>& intensity_wcm2,
                             const std::vector<double>& signal);

/// Default cutoff / plateau windows around a transition intensity.
struct SlopeWindows {
  double cutoff_lo, cutoff_hi, plateau_lo, plateau_hi;
};
SlopeWindows default_slope_windows(double transition_wcm2, double table_max_wcm2);

// Persistence ------------------------------------------------------------

inline constexpr std::uint64_t kTableMagic = 0x3142415444484848ull;  // "HHHDTAB1"
inline constexpr std::uint64_t kTableVersion = 1;

/// Numeric atom code stored in the binary header.
std::uint64_t atom_code(const std::string& atom_id);
std::string atom_from_code(std::uint64_t code);

void write_table_binary(const DipoleTable& table, std::ostream& out);
DipoleTable read_table_binary(std::istream& in);
void save_table(const DipoleTable& table, const std::filesystem::path& path);
DipoleTable load_table(const std::filesystem::path& path);
void write_table_csv(const DipoleTable& table, std::ostream& out);

}  // namespace hhg
