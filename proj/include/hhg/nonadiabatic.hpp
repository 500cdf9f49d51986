#pragma once

// Short-pulse single-atom study: the full carrier-resolved dipole over the
// pulse, one harmonic cut out spectrally, compared with the adiabatic
// envelope assembled from a dipole table.

#include <vector>

#include "hhg/coherence.hpp"
#include "hhg/dipole_table.hpp"
#include "hhg/sfa.hpp"

namespace hhg {

/// Super-gaussian W = exp(-ln2 |(w - q w0) / (full_width/2 w0)|^(2 order)).
struct WindowSpec {
  double full_width_omega = 2.0;  // in units of the drive frequency
  int order = 4;

  double operator()(double detuning_omega) const;  // detuning in units of w0
  void validate() const;                           // half width < 2 w0
};

struct NonadiabaticSetup {
  AtomModel atom = AtomModel::argon();
  double wavelength_nm = 810.0;
  double peak_intensity_wcm2 = 3e14;
  double fwhm_fs = 27.0;
  int order = 49;
  WindowSpec window;
  SfaNumerics numerics;
  double span_fwhm = 2.0;         // dipole evaluated over +-span * fwhm
  std::size_t table_nodes = 150;  // adiabatic reference table

  DriveWaveform waveform() const;
  void validate() const;
};

struct NonadiabaticResult {
  std::vector<double> times_fs;
  std::vector<cplx> adiabatic;     // x_q(t) from the table at I(t)
  std::vector<cplx> nonadiabatic;  // windowed full dipole
  TemporalProfile adiabatic_profile;
  TemporalProfile nonadiabatic_profile;
  double delay_fs = 0.0;           // nonadiabatic minus adiabatic half-maximum midpoint
  double adiabatic_phase_residual = 0.0;  // rms deviation from a quadratic over the FWHM, rad
  SpectralProfile adiabatic_spectrum;
  SpectralProfile nonadiabatic_spectrum;
  double red_shift_ev = 0.0;       // adiabatic minus nonadiabatic centroid
  CompressionResult adiabatic_compressed;
  CompressionResult nonadiabatic_compressed;
};

NonadiabaticResult nonadiabatic_pulse(const NonadiabaticSetup& setup);

/// Same, with a caller-provided adiabatic table (order and atom must match).
NonadiabaticResult nonadiabatic_pulse(const NonadiabaticSetup& setup, const DipoleTable& table);

}  // namespace hhg
