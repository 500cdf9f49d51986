#pragma once

#include <string>
#include <string_view>

namespace hhg {

/// Atomic species in the single-active-electron picture. Energies in a.u.
struct AtomModel {
  std::string id;
  double ip = 0.0;    // ionization potential (Hartree)
  double n_el = 1.0;  // effective number of active electrons

  /// Width constant of the hydrogen-like s-state transition element.
  double alpha() const { return 2.0 * ip; }
  double ip_ev() const;
  void validate() const;

  static AtomModel neon();
  static AtomModel helium();
  static AtomModel argon();
  /// Lookup by id ("neon", "helium", "argon"); throws ConfigError.
  static AtomModel preset(std::string_view id);
};

enum class Envelope { square, gaussian };

std::string_view to_string(Envelope e);
Envelope envelope_from_string(std::string_view s);

struct FieldSample {
  double e = 0.0;  // electric field, a.u.
  double a = 0.0;  // vector potential, a.u.
};

/// Linearly polarized drive. Times passed to the member functions are in
/// atomic units, measured from the envelope peak.
///
/// The vector potential is the primary quantity,
///   A(t) = -(E0 / w) f(t) sin(w t + phi(t) + phi0),
/// and E(t) = -dA/dt is its exact derivative. With a constant envelope and no
/// chirp this reduces to E = E0 cos(w t + phi0).
struct DriveWaveform {
  double wavelength_nm = 825.0;
  double peak_intensity_wcm2 = 0.0;
  Envelope envelope = Envelope::square;
  double fwhm_fs = 150.0;           // intensity FWHM (gaussian envelope)
  double chirp_rad_per_fs2 = 0.0;   // quadratic temporal phase phi(t) = b t^2
  double carrier_phase = 0.0;       // 0: cosine carrier, -pi/2: sine carrier
  bool adiabatic = true;            // freeze the envelope at its peak value

  static DriveWaveform monochromatic(double wavelength_nm, double intensity_wcm2);

  double omega() const;
  double period() const;
  double peak_field() const;

  /// Field-amplitude envelope f(t) in [0, 1]; always 1 for square envelopes.
  double envelope_factor(double t) const;
  /// Instantaneous intensity envelope I0 f(t)^2 in W/cm^2.
  double envelope_intensity(double t) const;
  /// Chirp phase phi(t) in rad.
  double chirp_phase(double t) const;

  FieldSample at(double t) const;

  void validate() const;
};

/// Chirp coefficient (rad/fs^2) for a gaussian pulse of intensity FWHM
/// `fwhm_fs` whose spectrum is broadened to that of a `tl_fwhm_fs`
/// transform-limited pulse.
double chirp_for_transform_limit(double fwhm_fs, double tl_fwhm_fs);

/// Chirp coefficient that broadens the spectrum of a gaussian pulse to an
/// intensity FWHM of `bandwidth_nm` around `wavelength_nm`.
double chirp_for_bandwidth(double fwhm_fs, double wavelength_nm, double bandwidth_nm);

}  // namespace hhg
