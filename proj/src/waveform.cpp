#include "hhg/waveform.hpp"

#include <cmath>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

double AtomModel::ip_ev() const { return units::au_to_ev(ip); }

void AtomModel::validate() const {
  if (!(ip > 0.0)) throw DomainError("atom '" + id + "': ionization potential must be positive");
  if (!(n_el >= 1.0)) throw DomainError("atom '" + id + "': n_el must be >= 1");
}

AtomModel AtomModel::neon() { return {"neon", units::ev_to_au(21.5645), 4.0}; }
AtomModel AtomModel::helium() { return {"helium", units::ev_to_au(24.5874), 2.0}; }
AtomModel AtomModel::argon() { return {"argon", units::ev_to_au(15.7596), 4.0}; }

AtomModel AtomModel::preset(std::string_view id) {
  if (id == "neon") return neon();
  if (id == "helium") return helium();
  if (id == "argon") return argon();
  throw ConfigError("unknown atom id '" + std::string(id) + "'");
}

std::string_view to_string(Envelope e) {
  return e == Envelope::square ? "square" : "gaussian";
}

Envelope envelope_from_string(std::string_view s) {
  if (s == "square") return Envelope::square;
  if (s == "gaussian") return Envelope::gaussian;
  throw ConfigError("unknown envelope '" + std::string(s) + "'");
}

DriveWaveform DriveWaveform::monochromatic(double wavelength_nm, double intensity_wcm2) {
  DriveWaveform w;
  w.wavelength_nm = wavelength_nm;
  w.peak_intensity_wcm2 = intensity_wcm2;
  w.envelope = Envelope::square;
  w.adiabatic = true;
  return w;
}

double DriveWaveform::omega() const { return units::wavelength_nm_to_omega_au(wavelength_nm); }
double DriveWaveform::period() const { return 2.0 * units::pi / omega(); }
double DriveWaveform::peak_field() const { return units::intensity_to_field_au(peak_intensity_wcm2); }

double DriveWaveform::envelope_factor(double t) const {
  if (envelope == Envelope::square) return 1.0;
  const double tau = units::fs_to_au(fwhm_fs);
  return std::exp(-2.0 * std::log(2.0) * t * t / (tau * tau));
}

double DriveWaveform::envelope_intensity(double t) const {
  const double f = envelope_factor(t);
  return peak_intensity_wcm2 * f * f;
}

double DriveWaveform::chirp_phase(double t) const {
  const double t_fs = units::au_to_fs(t);
  return chirp_rad_per_fs2 * t_fs * t_fs;
}

FieldSample DriveWaveform::at(double t) const {
  const double w = omega();
  const double e0 = peak_field();
  if (e0 == 0.0) return {};
  if (adiabatic || envelope == Envelope::square) {
    // frozen envelope; chirp only enters through the slow phase
    const double theta = w * t + carrier_phase;
    return {e0 * std::cos(theta), -(e0 / w) * std::sin(theta)};
  }
  const double tau = units::fs_to_au(fwhm_fs);
  const double k = 2.0 * std::log(2.0) / (tau * tau);
  const double f = std::exp(-k * t * t);
  const double df = -2.0 * k * t * f;
  const double b = chirp_rad_per_fs2 * units::au_time_fs * units::au_time_fs;  // rad/au^2
  const double theta = w * t + b * t * t + carrier_phase;
  const double dtheta = w + 2.0 * b * t;
  const double a = -(e0 / w) * f * std::sin(theta);
  const double e = (e0 / w) * (df * std::sin(theta) + f * dtheta * std::cos(theta));
  return {e, a};
}

void DriveWaveform::validate() const {
  if (!(wavelength_nm > 0.0)) throw DomainError("waveform: wavelength must be positive");
  if (!(peak_intensity_wcm2 >= 0.0)) throw DomainError("waveform: peak intensity must be >= 0");
  if (envelope == Envelope::gaussian && !(fwhm_fs > 0.0))
    throw DomainError("waveform: gaussian envelope needs fwhm > 0");
}

double chirp_for_transform_limit(double fwhm_fs, double tl_fwhm_fs) {
  // E ~ exp(-2 ln2 t^2/T^2 + i b t^2): the spectral width grows by
  // sqrt(1 + (b T^2 / (2 ln2))^2).
  const double ratio = fwhm_fs / tl_fwhm_fs;
  if (ratio < 1.0) throw DomainError("chirped pulse cannot be shorter than its transform limit");
  return std::sqrt(ratio * ratio - 1.0) * 2.0 * std::log(2.0) / (fwhm_fs * fwhm_fs);
}

double chirp_for_bandwidth(double fwhm_fs, double wavelength_nm, double bandwidth_nm) {
  // gaussian time-bandwidth product dnu dt = 2 ln2 / pi
  const double lambda = wavelength_nm * 1e-9;
  const double dnu = units::c_si * bandwidth_nm * 1e-9 / (lambda * lambda);
  const double tl_fs = 2.0 * std::log(2.0) / units::pi / dnu * 1e15;
  return chirp_for_transform_limit(fwhm_fs, tl_fs);
}

}  // namespace hhg
