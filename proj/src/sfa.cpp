#include "hhg/sfa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/fft.hpp"
#include "hhg/units.hpp"

namespace hhg {
namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 4> kGlX = {0.1834346424956498, 0.5255324099163290,
                                        0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlW = {0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

// Composite 8-point Gauss-Legendre over [a, b] with panels no longer than
// one sixteenth of a period.
template <typename F>
double composite_gl(F&& f, double a, double b, double period) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / (period / 16.0))));
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = 0; i < kGlX.size(); ++i) {
      sum += kGlW[i] * (f(mid - half * kGlX[i]) + f(mid + half * kGlX[i]));
    }
  }
  return sum * 0.5 * h;
}

struct GaussLegendre {
  std::vector<double> x, w;
};

// Nodes/weights on [-1, 1] by Newton iteration on P_n.
GaussLegendre make_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.x.resize(static_cast<std::size_t>(n));
  gl.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(units::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.x[static_cast<std::size_t>(i)] = x;
    gl.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

const GaussLegendre& start_rule() {
  static const GaussLegendre gl = make_gauss_legendre(24);
  return gl;
}

constexpr std::size_t kStartSteps = 8;

// |d(p)|-prefactor 2^{7/2} alpha^{5/4} / pi
double dipole_constant(double alpha) {
  return std::pow(2.0, 3.5) * std::pow(alpha, 1.25) / units::pi;
}

}  // namespace

void SfaNumerics::validate() const {
  if (!(nu > 0.0)) throw DomainError("sfa numerics: nu must be positive");
  if (!(tau_max_periods >= 2.0)) throw DomainError("sfa numerics: tau_max must be >= 2 periods");
  if (!is_pow2(tau_samples) || tau_samples < 128)
    throw DomainError("sfa numerics: tau_samples must be a power of two >= 128");
  if (!is_pow2(t_samples) || t_samples < 128)
    throw DomainError("sfa numerics: t_samples must be a power of two >= 128");
}

FieldSample field_and_potential(const DriveWaveform& waveform, double t) { return waveform.at(t); }

double stationary_momentum(const DriveWaveform& waveform, double t, double tau) {
  if (!(tau > 0.0)) throw DomainError("stationary_momentum: tau must be positive");
  const double integral =
      composite_gl([&](double s) { return waveform.at(s).a; }, t - tau, t, waveform.period());
  return integral / tau;
}

double quasiclassical_action(const DriveWaveform& waveform, const AtomModel& atom, double p,
                             double t, double tau) {
  if (!(tau > 0.0)) throw DomainError("quasiclassical_action: tau must be positive");
  const double ip = atom.ip;
  return composite_gl(
      [&](double s) {
        const double v = p - waveform.at(s).a;
        return 0.5 * v * v + ip;
      },
      t - tau, t, waveform.period());
}

cplx bound_free_dipole(double p, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("bound_free_dipole: alpha must be positive");
  const double den = p * p + alpha;
  return {0.0, dipole_constant(alpha) * p / (den * den * den)};
}

cplx diffusion_prefactor(double tau, double nu) {
  return std::pow(units::pi / cplx(nu, 0.5 * tau), 1.5);
}

DipoleSeries dipole_series(const DriveWaveform& waveform, const AtomModel& atom,
                           const SfaNumerics& numerics, double t0, std::size_t count) {
  waveform.validate();
  atom.validate();
  numerics.validate();

  DipoleSeries out;
  const double period = waveform.period();
  const int base = std::max(numerics.t_samples, numerics.tau_samples);
  const double h = period / base;
  const std::size_t t_stride = static_cast<std::size_t>(base / numerics.t_samples);
  const std::size_t tau_stride = static_cast<std::size_t>(base / numerics.tau_samples);
  const std::size_t n_tau =
      static_cast<std::size_t>(std::llround(numerics.tau_max_periods * numerics.tau_samples));
  out.t0 = t0;
  out.step = h * static_cast<double>(t_stride);
  out.x.assign(count, 0.0);
  out.gamma.assign(count, 0.0);
  if (count == 0) return out;
  if (waveform.peak_intensity_wcm2 == 0.0) return out;

  // Base grid covers [t0 - tau_max, t_last].
  const std::size_t back = n_tau * tau_stride;
  const std::size_t n_grid = back + (count - 1) * t_stride + 1;
  const double g0 = t0 - static_cast<double>(back) * h;
  std::vector<double> a(n_grid), e(n_grid), ga(n_grid), ha(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    const FieldSample s = waveform.at(g0 + static_cast<double>(i) * h);
    a[i] = s.a;
    e[i] = s.e;
  }
  // Running integrals of A and A^2: trapezoid with the Euler-Maclaurin end
  // correction, using dA/dt = -E exactly (4th order).
  ga[0] = 0.0;
  ha[0] = 0.0;
  const double h2 = h * h / 12.0;
  for (std::size_t i = 0; i + 1 < n_grid; ++i) {
    ga[i + 1] = ga[i] + 0.5 * h * (a[i] + a[i + 1]) + h2 * (e[i + 1] - e[i]);
    ha[i + 1] = ha[i] + 0.5 * h * (a[i] * a[i] + a[i + 1] * a[i + 1]) +
                h2 * 2.0 * (a[i + 1] * e[i + 1] - a[i] * e[i]);
  }

  const double dtau = h * static_cast<double>(tau_stride);
  // Return-time quadrature: the integrand behaves like tau^{1/2} near zero, so
  // [0, tau_c] is integrated in s = sqrt(tau) with Gauss-Legendre (smooth in
  // s), and [tau_c, tau_max] with composite Simpson on the tau grid.
  const std::size_t k_start = kStartSteps;
  std::size_t n_simpson = n_tau - k_start;
  if (n_simpson % 2 != 0) --n_simpson;
  const std::size_t k_end = k_start + n_simpson;
  const double tau_c = static_cast<double>(k_start) * dtau;
  // Smooth cos^2 roll-off over the last period removes the truncation
  // endpoint term, which otherwise leaks into the small real part of gamma.
  const std::size_t k_taper =
      k_end > static_cast<std::size_t>(numerics.tau_samples)
          ? k_end - static_cast<std::size_t>(numerics.tau_samples) : k_start;
  auto taper = [&](std::size_t k) {
    if (k <= k_taper) return 1.0;
    const double u = static_cast<double>(k - k_taper) / static_cast<double>(k_end - k_taper);
    const double cv = std::cos(0.5 * units::pi * u);
    return cv * cv;
  };
  std::vector<cplx> pref(k_end + 1);
  for (std::size_t k = k_start; k <= k_end; ++k) {
    double w = (k - k_start) % 2 == 1 ? 4.0 : 2.0;
    if (k == k_start || k == k_end) w = 1.0;
    pref[k] = w * dtau / 3.0 * taper(k) *
              diffusion_prefactor(static_cast<double>(k) * dtau, numerics.nu);
  }
  const GaussLegendre& gl = start_rule();
  const double s_c = std::sqrt(tau_c);
  std::vector<double> start_tau(gl.x.size());
  std::vector<cplx> start_pref(gl.x.size());
  for (std::size_t n = 0; n < gl.x.size(); ++n) {
    const double sv = 0.5 * s_c * (1.0 + gl.x[n]);
    start_tau[n] = sv * sv;
    // d tau = 2 s ds, ds = s_c / 2 * dx
    start_pref[n] = gl.w[n] * 0.5 * s_c * 2.0 * sv *
                    diffusion_prefactor(start_tau[n], numerics.nu);
  }
  const double end_pref_abs = std::abs(diffusion_prefactor(static_cast<double>(k_end) * dtau,
                                                           numerics.nu));

  const double alpha = atom.alpha();
  const double c = dipole_constant(alpha);
  const double c2 = c * c;
  const double ip = atom.ip;

  // pref * amp * exp(-iS) accumulated into (re, im)
  auto accumulate = [](cplx pf, double amp, double action, double& re, double& im) {
    const double cs = std::cos(action), sn = std::sin(action);
    const double pr = pf.real() * amp, pim = pf.imag() * amp;
    re += pr * cs + pim * sn;
    im += pim * cs - pr * sn;
  };

  double scale = 0.0;
  double tail_max = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t r = back + j * t_stride;
    const double t = g0 + static_cast<double>(r) * h;
    double sum_re = 0.0, sum_im = 0.0;
    double tail = 0.0;

    for (std::size_t n = 0; n < start_tau.size(); ++n) {
      const double tau = start_tau[n];
      // short interval: one 8-point Gauss-Legendre panel for int A, int A^2
      double ia = 0.0, ia2 = 0.0;
      for (std::size_t g = 0; g < kGlX.size(); ++g) {
        for (double sign : {-1.0, 1.0}) {
          const double av = waveform.at(t - 0.5 * tau + sign * 0.5 * tau * kGlX[g]).a;
          ia += kGlW[g] * av;
          ia2 += kGlW[g] * av * av;
        }
      }
      ia *= 0.5 * tau;
      ia2 *= 0.5 * tau;
      const double ps = ia / tau;
      const double action = 0.5 * ia2 - 0.5 * tau * ps * ps + ip * tau;
      const FieldSample birth = waveform.at(t - tau);
      const double p1 = ps - a[r];
      const double p2 = ps - birth.a;
      const double d1 = p1 * p1 + alpha;
      const double d2 = p2 * p2 + alpha;
      const double amp = c2 * p1 * p2 / (d1 * d1 * d1 * d2 * d2 * d2) * birth.e;
      accumulate(start_pref[n], amp, action, sum_re, sum_im);
    }

    for (std::size_t k = k_start; k <= k_end; ++k) {
      const std::size_t i = r - k * tau_stride;
      const double tau = static_cast<double>(k) * dtau;
      const double ps = (ga[r] - ga[i]) / tau;
      const double action = 0.5 * (ha[r] - ha[i]) - 0.5 * tau * ps * ps + ip * tau;
      const double p1 = ps - a[r];
      const double p2 = ps - a[i];
      const double d1 = p1 * p1 + alpha;
      const double d2 = p2 * p2 + alpha;
      // conj(d(p1)) * d(p2) is real for the s-state element
      const double amp = c2 * p1 * p2 / (d1 * d1 * d1 * d2 * d2 * d2) * e[i];
      accumulate(pref[k], amp, action, sum_re, sum_im);
      if (k == k_end) {
        // Leading integration-by-parts term of the neglected integral
        // int_{tau_max}^inf g e^{-iS}: |g| / (dS/dtau), dS/dtau = (p_s - A)^2/2 + Ip > 0.
        tail = end_pref_abs * std::abs(amp) / (0.5 * p2 * p2 + ip);
      }
    }
    // z = i * sum; x = z + c.c. = -2 Im(sum)
    out.x[j] = -2.0 * sum_im * atom.n_el;
    // gamma(t) = E(t) * sum; Gamma(t) = 2 Re gamma
    out.gamma[j] = 2.0 * e[r] * sum_re * atom.n_el;
    scale += sum_re * sum_re + sum_im * sum_im;
    tail_max += tail * tail;
  }
  out.tail_estimate = scale > 0.0 ? std::sqrt(tail_max / scale) : 0.0;
  if (out.tail_estimate > numerics.max_tail) {
    throw NumericalAccuracyError("dipole: return-time integral not converged at tau_max (tail " +
                                     std::to_string(out.tail_estimate) + ")",
                                 out.tail_estimate);
  }

  if (numerics.deplete) {
    double rate = numerics.depletion_rate;
    if (rate <= 0.0) {
      DriveWaveform frozen = waveform;
      frozen.adiabatic = true;
      SfaNumerics plain = numerics;
      plain.deplete = false;
      rate = ionization_rate(frozen, atom, plain);
    }
    for (std::size_t j = 0; j < count; ++j) {
      const double t = t0 + static_cast<double>(j) * out.step;
      out.x[j] *= std::exp(-rate * t);
    }
  }
  return out;
}

cplx dipole_moment(const DriveWaveform& waveform, const AtomModel& atom,
                   const SfaNumerics& numerics, double t) {
  const DipoleSeries s = dipole_series(waveform, atom, numerics, t, 1);
  return {s.x[0], 0.0};
}

double ionization_rate(const DriveWaveform& waveform, const AtomModel& atom,
                       const SfaNumerics& numerics) {
  DriveWaveform frozen = waveform;
  frozen.adiabatic = true;
  SfaNumerics plain = numerics;
  plain.deplete = false;
  const DipoleSeries s =
      dipole_series(frozen, atom, plain, 0.0, static_cast<std::size_t>(numerics.t_samples));
  double mean = 0.0;
  for (double g : s.gamma) mean += g;
  return std::max(0.0, mean / static_cast<double>(s.gamma.size()));
}

HarmonicPoint harmonic_point(const DriveWaveform& waveform, const AtomModel& atom,
                             const SfaNumerics& numerics, int q) {
  DriveWaveform frozen = waveform;
  frozen.adiabatic = true;
  const auto n = static_cast<std::size_t>(numerics.t_samples);
  const DipoleSeries s = dipole_series(frozen, atom, numerics, 0.0, n);
  cplx acc = 0.0;
  double g = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = 2.0 * units::pi * q * static_cast<double>(j) / static_cast<double>(n);
    acc += s.x[j] * cplx(std::cos(ph), std::sin(ph));
    g += s.gamma[j];
  }
  return {acc / static_cast<double>(n), std::max(0.0, g / static_cast<double>(n))};
}

HarmonicComponents harmonic_components(const DriveWaveform& waveform, const AtomModel& atom,
                                       const SfaNumerics& numerics, int q_max) {
  if (q_max < 1 || q_max % 2 == 0) throw DomainError("harmonic_components: q_max must be odd");
  if (q_max >= numerics.t_samples / 2)
    throw DomainError("harmonic_components: q_max exceeds the Nyquist order of the time grid");
  DriveWaveform frozen = waveform;
  frozen.adiabatic = true;
  const auto n = static_cast<std::size_t>(numerics.t_samples);
  const DipoleSeries s = dipole_series(frozen, atom, numerics, 0.0, n);
  std::vector<cplx> xt(s.x.begin(), s.x.end());
  // x_q = (1/N) sum_j x_j e^{+i q w t_j}
  const std::vector<cplx> spec = fft::backward(xt);
  HarmonicComponents hc;
  hc.x.resize(static_cast<std::size_t>(q_max) + 1);
  for (int q = 0; q <= q_max; ++q)
    hc.x[static_cast<std::size_t>(q)] = spec[static_cast<std::size_t>(q)] / static_cast<double>(n);
  hc.intensity_wcm2 = waveform.peak_intensity_wcm2;
  hc.wavelength_nm = waveform.wavelength_nm;
  hc.atom = atom;
  return hc;
}

double cutoff_energy_ev(const AtomModel& atom, double intensity_wcm2, double wavelength_nm,
                        double coefficient) {
  if (coefficient < 2.0 || coefficient > 3.5)
    throw DomainError("cutoff_energy: coefficient outside [2, 3.5]");
  return atom.ip_ev() + coefficient * units::ponderomotive_ev(intensity_wcm2, wavelength_nm);
}

double cutoff_intensity_wcm2(const AtomModel& atom, int q, double wavelength_nm,
                             double coefficient) {
  const double photon = q * units::photon_energy_ev(wavelength_nm);
  const double up = (photon - atom.ip_ev()) / coefficient;
  if (up <= 0.0) throw DomainError("cutoff_intensity: order lies below the ionization potential");
  return up / units::ponderomotive_ev(1.0, wavelength_nm);
}

double cutoff_coefficient(const AtomModel& atom, int q, double wavelength_nm,
                          double intensity_wcm2) {
  const double photon = q * units::photon_energy_ev(wavelength_nm);
  return (photon - atom.ip_ev()) / units::ponderomotive_ev(intensity_wcm2, wavelength_nm);
}

}  // namespace hhg
