#pragma once

// Physical constants and unit conversions. Everything inside the single-atom
// code is in atomic units; the propagation code works in SI with lengths
// usually quoted in mm / um at the API surface.

#include <cmath>
#include <numbers>

namespace hhg::units {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018
inline constexpr double c_si = 299792458.0;            // m/s
inline constexpr double e_si = 1.602176634e-19;        // C
inline constexpr double me_si = 9.1093837015e-31;      // kg
inline constexpr double eps0_si = 8.8541878128e-12;    // F/m
inline constexpr double kB_si = 1.380649e-23;          // J/K
inline constexpr double hbar_si = 1.054571817e-34;     // J s
inline constexpr double torr_pa = 101325.0 / 760.0;    // Pa

inline constexpr double hartree_ev = 27.211386245988;
inline constexpr double au_time_s = 2.4188843265857e-17;
inline constexpr double au_time_fs = au_time_s * 1e15;
inline constexpr double bohr_m = 5.29177210903e-11;
inline constexpr double au_field_v_per_m = 5.14220674763e11;
inline constexpr double au_dipole_cm = e_si * bohr_m;   // C m
// I [W/cm^2] = intensity_au_wcm2 * E0[a.u.]^2 for a linearly polarized field
inline constexpr double intensity_au_wcm2 = 3.5094475e16;

inline double wavelength_nm_to_omega_au(double lambda_nm) {
  // omega = 2 pi c / lambda, expressed in a.u. of angular frequency
  const double omega_si = 2.0 * pi * c_si / (lambda_nm * 1e-9);
  return omega_si * au_time_s;
}

inline double photon_energy_ev(double lambda_nm) {
  return wavelength_nm_to_omega_au(lambda_nm) * hartree_ev;
}

inline double intensity_to_field_au(double intensity_wcm2) {
  return std::sqrt(intensity_wcm2 / intensity_au_wcm2);
}

inline double field_au_to_intensity(double field_au) {
  return field_au * field_au * intensity_au_wcm2;
}

inline double ev_to_au(double ev) { return ev / hartree_ev; }
inline double au_to_ev(double au) { return au * hartree_ev; }
inline double fs_to_au(double fs) { return fs / au_time_fs; }
inline double au_to_fs(double au) { return au * au_time_fs; }

// Ponderomotive energy e^2 E^2 / (4 m omega^2) in eV, evaluated in SI.
inline double ponderomotive_ev(double intensity_wcm2, double lambda_nm) {
  const double intensity_si = intensity_wcm2 * 1e4;  // W/m^2
  const double e_field = std::sqrt(2.0 * intensity_si / (c_si * eps0_si));
  const double omega = 2.0 * pi * c_si / (lambda_nm * 1e-9);
  const double up_j = e_si * e_si * e_field * e_field / (4.0 * me_si * omega * omega);
  return up_j / e_si;
}

// Ideal-gas number density in cm^-3.
inline double gas_density_cm3(double pressure_torr, double temperature_k) {
  return pressure_torr * torr_pa / (kB_si * temperature_k) * 1e-6;
}

}  // namespace hhg::units
