#pragma once

// Observables built from a stack of harmonic exit fields (one per envelope
// time slice): temporal and spectral profiles, spatial coherence, spectral
// phase compression, and the analytic phase-modulation model.

#include <optional>
#include <vector>

#include "hhg/beam.hpp"
#include "hhg/dipole_table.hpp"
#include "hhg/propagator.hpp"

namespace hhg {

struct PulseAssembly {
  std::vector<double> times_fs;     // strictly increasing
  std::vector<RadialField> slices;  // one per time, shared r-grid and wavelength
  double z_mm = 0.0;
  int order = 45;
  double drive_wavelength_nm = 825.0;
  double drive_fwhm_fs = 150.0;

  static PulseAssembly from_run(const PulseRun& run, const PropagationSetup& setup);

  std::size_t size() const { return slices.size(); }
  const std::vector<double>& r_um() const { return slices.front().r_um; }
  double harmonic_wavelength_nm() const { return drive_wavelength_nm / order; }
  /// True for a uniform slice spacing (relative tolerance 1e-6).
  bool uniform() const;
  double dt_fs() const;
  void validate() const;
};

/// Width of the contiguous region above half the global maximum, with linear
/// interpolation at both crossings. Zero for an all-zero curve.
double fwhm(const std::vector<double>& x, const std::vector<double>& y);

struct TemporalProfile {
  std::vector<double> times_fs;
  std::vector<double> power;  // W (assemblies) or |x|^2 (single series)
  double fwhm_fs = 0.0;
  double peak_time_fs = 0.0;  // midpoint of the half-maximum crossings
};

/// |x|^2 profile of one complex series.
TemporalProfile series_profile(const std::vector<double>& times_fs, const std::vector<cplx>& x);

/// Radially integrated harmonic power per slice.
TemporalProfile temporal_profile(const PulseAssembly& pulse, std::size_t min_slices = 16);

/// Radially integrated (time-integrated) fluence profile, as a field whose
/// |value|^2 is the fluence; useful for the profile extent.
RadialField fluence_profile(const PulseAssembly& pulse);

struct SpectralOptions {
  std::size_t padding = 8;          // zero-padding factor of the FFT
  bool zero_phase = false;          // drop the temporal phase (transform-limit control)
  bool coherent = false;            // sum fields over the area instead of intensities
  std::optional<double> phase_radius_um;  // default: dominant radius
};

struct SpectralProfile {
  std::vector<double> domega_rad_fs;   // offset from q w; positive = blue
  std::vector<double> dlambda_angstrom;
  std::vector<double> denergy_ev;
  std::vector<double> intensity;       // >= 0
  std::vector<double> phase;           // unwrapped, rad, at phase_radius_um
  double phase_radius_um = 0.0;
  double fwhm_angstrom = 0.0;
  double fwhm_ev = 0.0;
  double centroid_angstrom = 0.0;      // intensity-weighted mean offset
  double centroid_ev = 0.0;
  double time_energy = 0.0;            // sum over radii and slices of w |E|^2 dt
  double spectral_energy = 0.0;        // same via the spectrum (Parseval)
};

SpectralProfile spectral_profile(const PulseAssembly& pulse, const SpectralOptions& options = {});

/// Spectrum of one complex envelope series x(t) (uniform t, fs) around the
/// carrier of wavelength `carrier_nm`.
SpectralProfile series_spectrum(const std::vector<double>& times_fs, const std::vector<cplx>& x,
                                double carrier_nm, std::size_t padding = 8);

struct CoherenceCurve {
  double r_ref_um = 0.0;
  std::vector<double> r_um;
  std::vector<double> gamma;  // |gamma_12(0)| in [0, 1]
};

/// Equal-time degree of coherence against the node nearest r_ref, uniform
/// average over the slices.
CoherenceCurve coherence_degree(const PulseAssembly& pulse, double r_ref_um);

struct CompressionResult {
  TemporalProfile before;
  TemporalProfile compressed;
  TemporalProfile transform_limited;
  double quadratic_fs2 = 0.0;  // mean phi(w) = c w^2 that was removed, rad fs^2
  std::size_t fitted_bins = 0;
};

/// Removes one intensity-weighted mean quadratic spectral phase from every
/// radius and re-integrates. Bins below `threshold` of each spectrum's peak
/// are ignored by the fits.
CompressionResult compress_pulse(const PulseAssembly& pulse, double threshold = 0.05,
                                 std::size_t padding = 8);

/// Same operation on one complex series.
CompressionResult compress_series(const std::vector<double>& times_fs, const std::vector<cplx>& x,
                                  double threshold = 0.05, std::size_t padding = 8);

/// Weighted quadratic fit y ~ a + b x + c x^2; returns {a, b, c} about x = 0.
std::vector<double> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& w);

// Analytic phase modulation ---------------------------------------------------

struct PhaseModulationModel {
  double eta = 0.0;               // rad per W/cm^2
  double i0_wcm2 = 0.0;
  double tau_fwhm_fs = 150.0;
  double harmonic_wavelength_nm = 825.0 / 45.0;

  double intensity(double t_fs) const;
  double delta_phase(double t_fs) const;            // -eta I(t)
  double delta_omega(double t_fs) const;            // rad/fs, = eta dI/dt
  double inflection_time_fs() const;                // tau / sqrt(8 ln 2)
  double delta_lambda_ext_angstrom() const;         // at the inflection points
  /// Delta lambda_ext per unit eta * I0, Angstrom per rad.
  double lambda_coefficient() const;
};

/// Spherical wave phase coefficient k_q / (2 d) (rad/um^2) at distance d.
double spherical_wave_coefficient(double wavelength_nm, double distance_mm);

// Polarization phase map --------------------------------------------------------

struct PhaseMap {
  std::vector<double> z_mm;
  std::vector<double> r_um;
  // [r index][z index]
  std::vector<std::vector<double>> geometric;  // -q atan(2z/b) + q(2z/b)(r/w)^2
  std::vector<std::vector<double>> dipole;     // table phase at I(r, z)
  std::vector<std::vector<double>> total;
  /// On-axis z (> focus) where d(total)/dz is smallest in magnitude.
  double compensation_z_mm = 0.0;
  /// z interval around it where |d(total)/dz| stays below half the Gouy slope at focus.
  double compensation_begin_mm = 0.0;
  double compensation_end_mm = 0.0;
  /// Quadratic radial coefficient of the total phase per z (weighted by I^2 within w(z)).
  std::vector<double> radial_coefficient;
};

PhaseMap polarization_phase_map(const FocusGeometry& geometry, const DipoleTable& table,
                                double i0_wcm2, const std::vector<double>& z_mm,
                                const std::vector<double>& r_um);

/// Magnitude of the chirp that broadens a 150 fs drive to 32 nm at 825 nm.
double reference_drive_chirp();

/// Full pipeline with a chirped drive; sign > 0 gives b > 0.
SpectralProfile chirped_drive_scenario(PropagationSetup setup, int sign, const DipoleTable& table,
                                       const SpectralOptions& options = {});

}  // namespace hhg
