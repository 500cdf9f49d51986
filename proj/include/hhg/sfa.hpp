#pragma once

// Single-atom response in the strong-field approximation. Atomic units
// throughout; conversion happens at the call sites via hhg/units.hpp.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hhg/waveform.hpp"

namespace hhg {

using cplx = std::complex<double>;

struct SfaNumerics {
  double nu = 1e-3;               // regularization of the diffusion prefactor
  double tau_max_periods = 4.0;   // upper limit of the return-time integral
  int tau_samples = 512;          // trapezoid points per optical period in tau
  int t_samples = 512;            // time samples per optical period
  bool deplete = false;           // apply exp(-Gamma t) to the dipole
  double depletion_rate = 0.0;    // Gamma in 1/a.u.; <= 0 means compute it
  double max_tail = 5e-2;         // relative tail bound accepted at tau_max

  void validate() const;
};

/// Odd-order Fourier components x_q of the dipole, x(t) = sum x_q e^{-i q w t} + c.c.
struct HarmonicComponents {
  std::vector<cplx> x;  // indexed by order, x[0..q_max]
  double intensity_wcm2 = 0.0;
  double wavelength_nm = 0.0;
  AtomModel atom;

  cplx operator[](int q) const { return x.at(static_cast<std::size_t>(q)); }
  int q_max() const { return static_cast<int>(x.size()) - 1; }
};

/// Uniformly sampled dipole x(t_j) = x_re[j], t_j = t0 + j h.
struct DipoleSeries {
  double t0 = 0.0;
  double step = 0.0;
  std::vector<double> x;
  std::vector<double> gamma;   // instantaneous Re part of the complex decay rate (n_el included)
  double tail_estimate = 0.0;  // endpoint bound at tau_max relative to the sum (L2 over samples)
};

FieldSample field_and_potential(const DriveWaveform& waveform, double t);

/// Saddle-point momentum p_s = (1/tau) int_{t-tau}^{t} A(t'') dt''.
double stationary_momentum(const DriveWaveform& waveform, double t, double tau);

/// S(p,t,tau) = int_{t-tau}^{t} [ (p - A)^2 / 2 + Ip ] dt''.
double quasiclassical_action(const DriveWaveform& waveform, const AtomModel& atom, double p,
                             double t, double tau);

/// Hydrogen-like s-state bound-free transition element (1D projection).
cplx bound_free_dipole(double p, double alpha);

/// Quantum-diffusion prefactor (pi / (nu + i tau/2))^{3/2}.
cplx diffusion_prefactor(double tau, double nu);

/// Total (n_el-scaled) dipole at time t. The imaginary part is zero up to
/// rounding; it is returned complex to keep the c.c. construction visible.
cplx dipole_moment(const DriveWaveform& waveform, const AtomModel& atom,
                   const SfaNumerics& numerics, double t);

/// Dipole on `count` uniform samples starting at t0, spacing one period /
/// t_samples. This is the workhorse behind every other evaluation.
DipoleSeries dipole_series(const DriveWaveform& waveform, const AtomModel& atom,
                           const SfaNumerics& numerics, double t0, std::size_t count);

/// Cycle-averaged total ionization rate Gamma = 2 Re <gamma(t)> (1/a.u. time)
/// for a frozen envelope.
double ionization_rate(const DriveWaveform& waveform, const AtomModel& atom,
                       const SfaNumerics& numerics);

/// x_q for q = 0..q_max from one period of the adiabatic dipole.
HarmonicComponents harmonic_components(const DriveWaveform& waveform, const AtomModel& atom,
                                       const SfaNumerics& numerics, int q_max);

/// Single order plus ionization rate from the same one-period evaluation.
struct HarmonicPoint {
  cplx x_q;
  double gamma = 0.0;  // 1/a.u. time
};
HarmonicPoint harmonic_point(const DriveWaveform& waveform, const AtomModel& atom,
                             const SfaNumerics& numerics, int q);

/// I_p + coefficient * U_p in eV.
double cutoff_energy_ev(const AtomModel& atom, double intensity_wcm2, double wavelength_nm,
                        double coefficient);

/// Peak intensity at which I_p + coefficient * U_p equals q photon energies.
double cutoff_intensity_wcm2(const AtomModel& atom, int q, double wavelength_nm,
                             double coefficient);

/// Inverse of cutoff_intensity_wcm2: coefficient c such that I_p + c U_p(I) = q hbar w.
double cutoff_coefficient(const AtomModel& atom, int q, double wavelength_nm,
                          double intensity_wcm2);

}  // namespace hhg
