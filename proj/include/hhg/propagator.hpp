#pragma once

// Paraxial propagation of the fundamental and of one harmonic through the
// gas jet. Crank-Nicolson in z, finite-volume cylindrical Laplacian in r.
// Each call handles one time slice of the drive envelope.

#include <functional>
#include <optional>
#include <vector>

#include "hhg/beam.hpp"
#include "hhg/dipole_table.hpp"

namespace hhg {

struct PropagationGrid {
  std::size_t nr = 2048;
  double r_max_w0 = 4.0;          // r_max in units of the focal waist
  double dz_jet_um = 5.0;         // step inside the jet
  double dz_out_um = 10.0;        // step in gas-free stretches
  double absorber_fraction = 0.1; // outer part of the r-grid with damping
  double absorber_per_mm = 50.0;  // peak field damping rate of the ramp

  std::vector<double> radii(const FocusGeometry& geometry) const;
  void validate() const;
};

/// z planes from z_begin to z_end; dz_jet inside the jet, dz_out elsewhere.
std::vector<double> march_planes(const JetProfile& jet, const PropagationGrid& grid,
                                 double z_begin_mm, double z_end_mm);

/// Atomic density per plane plus the accumulated ionization integral.
struct MediumState {
  std::vector<double> z_mm;
  std::vector<double> r_um;
  std::vector<double> atoms_cm3;        // N_a per plane
  std::vector<double> integrated_rate;  // int Gamma dt per [plane * nr + j]

  static MediumState neutral(const JetProfile& jet, std::vector<double> z_mm,
                             std::vector<double> r_um);
  std::size_t planes() const { return z_mm.size(); }
  std::size_t nr() const { return r_um.size(); }
  double ionized_fraction(std::size_t plane, std::size_t j) const;
  double electrons_cm3(std::size_t plane, std::size_t j) const;
  /// Plane index closest to z.
  std::size_t plane_near(double z_mm) const;
};

/// Plasma correction of the wave vector of order q (q=1: fundamental), in
/// 1/mm. Negative for any N_e > 0.
double plasma_dephasing(double electrons_cm3, int q, double wavelength_nm);

/// |q dk_1 - dk_q| in 1/mm.
double plasma_mismatch(double electrons_cm3, int q, double wavelength_nm);

/// March the fundamental from the first medium plane (analytic Gaussian at
/// the slice intensity) to the last. With `plasma` set, dk_1 follows the
/// electron density already stored in `medium`.
std::vector<RadialField> propagate_fundamental(const FocusGeometry& geometry,
                                               double slice_peak_intensity_wcm2,
                                               const MediumState& medium, bool plasma,
                                               const PropagationGrid& grid,
                                               double slice_time_fs = 0.0);

/// Adds Gamma(|E1|^2) * dt to the ionization integral of every grid node.
void accumulate_electrons(MediumState& medium, const std::vector<RadialField>& fundamental,
                          const DipoleTable& table, double dt_fs);

/// Same for a whole slice history at uniform spacing.
void accumulate_electrons(MediumState& medium,
                          const std::vector<std::vector<RadialField>>& history,
                          const DipoleTable& table, double dt_fs);

/// Nonlinear polarization amplitude (C/m^2) per [plane][r]:
/// P_q = 2 N_a x_q(|E1|^2) exp(i q phi_1) [exp(-int Gamma)] exp(i extra_phase).
using SourceField = std::vector<std::vector<cplx>>;
SourceField polarization_source(const DipoleTable& table,
                                const std::vector<RadialField>& fundamental,
                                const MediumState& medium, bool depletion,
                                double extra_phase = 0.0);

/// March the harmonic with the given source from zero field at the first
/// plane; returns the exit-plane field in V/m.
RadialField propagate_harmonic(const SourceField& source, const MediumState& medium,
                               const FocusGeometry& geometry, int q, bool plasma,
                               const PropagationGrid& grid, double slice_time_fs = 0.0);

// Pipeline -----------------------------------------------------------------

struct PropagationFlags {
  bool ionization = false;  // accumulate electrons, plasma dephasing of the harmonic
  bool defocusing = true;   // plasma term on the fundamental (needs ionization)
  bool depletion = false;   // neutral depletion in the source
};

struct PropagationSetup {
  FocusGeometry geometry;
  JetProfile jet;
  double peak_intensity_wcm2 = 6e14;
  Envelope envelope = Envelope::gaussian;
  double fwhm_fs = 150.0;
  double chirp_rad_per_fs2 = 0.0;  // drive carrier phase w t + b t^2 (b > 0: red first)
  int order = 45;
  PropagationFlags flags;
  PropagationGrid grid;
  std::size_t slices = 512;  // envelope time slices (gaussian)
  double slice_span_fwhm = 1.5;
  double exit_z_mm = 0.0;     // <= jet end means "jet end"

  double exit_plane_mm() const;
  std::vector<double> slice_times_fs() const;
  double slice_intensity(double t_fs) const;
  void validate() const;
};

/// Harmonic exit fields for every slice (a square envelope gives one slice).
struct PulseRun {
  std::vector<double> times_fs;
  std::vector<RadialField> harmonic;       // exit plane, V/m
  std::vector<double> fundamental_exit_peak_wcm2;
  std::vector<double> fundamental_exit_axis_wcm2;
  MediumState medium;                      // after the last slice
  std::vector<RadialField> peak_fundamental;  // all planes for the slice nearest t=0
  double dt_fs = 0.0;
};

/// Optional per-slice observer (slice index, fundamental planes).
using SliceObserver = std::function<void(std::size_t, const std::vector<RadialField>&)>;

PulseRun run_pulse(const PropagationSetup& setup, const DipoleTable& table,
                   const SliceObserver& observer = {});

/// Exit power (W) of a harmonic field in V/m.
double harmonic_power_w(const RadialField& field);
/// Fundamental power (W) at focus for a peak intensity in W/cm^2.
double fundamental_power_w(const FocusGeometry& geometry, double peak_intensity_wcm2);

struct ConversionPoint {
  double z_jet_mm = 0.0;
  double intensity_wcm2 = 0.0;
  double exit_power_w = 0.0;    // static: exit power; dynamic: pulse-averaged power
  double photon_number = 0.0;   // dynamic only (per pulse)
  double efficiency = 0.0;      // power (static) or energy (dynamic) ratio
};

/// Efficiency over jet positions x peak intensities. A square envelope gives
/// the static curves, a gaussian one the dynamic curves.
std::vector<ConversionPoint> conversion_scan(const PropagationSetup& base,
                                             const std::vector<double>& jet_positions_mm,
                                             const std::vector<double>& intensities_wcm2,
                                             const DipoleTable& table);

/// Change of slope of log(efficiency) vs log(I): same half-slope criterion as
/// the single-atom transition. Returns the intensity.
double efficiency_transition(const std::vector<double>& intensities_wcm2,
                             const std::vector<double>& efficiency);

struct CutoffCheck {
  double transition_wcm2 = 0.0;
  double coefficient = 0.0;
};

/// Effective coefficient c in I_p + c U_p implied by the transition of an
/// efficiency-vs-intensity curve.
CutoffCheck modified_cutoff_check(const std::vector<double>& intensities_wcm2,
                                  const std::vector<double>& efficiency, const AtomModel& atom,
                                  int q, double wavelength_nm);

/// Single-atom counterpart from a dipole table.
CutoffCheck modified_cutoff_check(const DipoleTable& table, const AtomModel& atom);

}  // namespace hhg
