#include "hhg/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hhg/errors.hpp"
#include "hhg/fft.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

constexpr double kPi = units::pi;

// (0.5 c eps0) * um^2 -> m^2, turns 2 pi sum w |E|^2 into watts
constexpr double kPowerScale = 0.5 * units::c_si * units::eps0_si * 1e-12;

// rad/fs offset -> Angstrom offset at wavelength lambda (nm); minus: blue is shorter
double omega_to_angstrom(double lambda_nm) {
  const double l = lambda_nm * 1e-9;
  return -l * l * 1e15 / (2.0 * kPi * units::c_si) * 1e10;
}

double omega_to_ev() { return units::hbar_si * 1e15 / units::e_si; }

std::pair<double, double> half_max_crossings(const std::vector<double>& x,
                                             const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw ConfigError("profile axes differ in size");
  const auto it = std::max_element(y.begin(), y.end());
  if (!(*it > 0.0)) return {0.0, 0.0};
  const double half = 0.5 * *it;
  std::size_t lo = static_cast<std::size_t>(it - y.begin()), hi = lo;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  while (hi + 1 < y.size() && y[hi + 1] >= half) ++hi;
  double a = x[lo], b = x[hi];
  if (lo > 0) a = x[lo - 1] + (half - y[lo - 1]) / (y[lo] - y[lo - 1]) * (x[lo] - x[lo - 1]);
  if (hi + 1 < y.size())
    b = x[hi] + (y[hi] - half) / (y[hi] - y[hi + 1]) * (x[hi + 1] - x[hi]);
  return {a, b};
}

// Spectral grid of a zero-padded transform, ascending in omega.
struct Padded {
  std::size_t n = 0;       // padded length
  double dt = 0.0;         // fs
  double domega = 0.0;     // rad/fs
  double omega(std::size_t m) const {  // raw FFT index -> rad/fs
    const auto s = static_cast<std::ptrdiff_t>(m);
    const auto N = static_cast<std::ptrdiff_t>(n);
    return domega * static_cast<double>(s < N / 2 ? s : s - N);
  }
};

Padded make_padded(const std::vector<double>& times, std::size_t padding) {
  if (times.size() < 2) throw ConfigError("spectrum needs at least two time samples");
  const double dt = times[1] - times[0];
  for (std::size_t k = 2; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-6 * dt)
      throw ConfigError("spectral analysis needs a uniform slice-time grid");
  Padded p;
  p.n = times.size() * std::max<std::size_t>(padding, 1);
  p.dt = dt;
  p.domega = 2.0 * kPi / (static_cast<double>(p.n) * dt);
  return p;
}

// sum_k x_k exp(+i w (k dt)), k = 0..n-1, zero padded. Positive w = blue.
std::vector<cplx> raw_spectrum(const std::vector<cplx>& x, const Padded& p) {
  std::vector<cplx> buf(p.n, cplx(0.0));
  std::copy(x.begin(), x.end(), buf.begin());
  return fft::backward(buf);
}

std::vector<double> unwrap_from(const std::vector<cplx>& v, std::size_t start) {
  std::vector<double> ph(v.size());
  ph[start] = std::arg(v[start]);
  for (std::size_t m = start + 1; m < v.size(); ++m) {
    double d = std::arg(v[m]) - std::arg(v[m - 1]);
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    ph[m] = ph[m - 1] + d;
  }
  for (std::size_t m = start; m-- > 0;) {
    double d = std::arg(v[m]) - std::arg(v[m + 1]);
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    ph[m] = ph[m + 1] + d;
  }
  return ph;
}

TemporalProfile make_profile(std::vector<double> t, std::vector<double> p) {
  TemporalProfile out;
  const auto [a, b] = half_max_crossings(t, p);
  out.fwhm_fs = b - a;
  out.peak_time_fs = 0.5 * (a + b);
  out.times_fs = std::move(t);
  out.power = std::move(p);
  return out;
}

// Radially weighted series -> time profile, rotated so the maximum sits mid-array.
TemporalProfile padded_profile(const std::vector<std::vector<cplx>>& spectra,
                               const std::vector<double>& weights, double scale, const Padded& p,
                               double t0) {
  std::vector<double> power(p.n, 0.0);
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const auto y = fft::forward(spectra[j]);
    const double inv = 1.0 / static_cast<double>(p.n);
    for (std::size_t k = 0; k < p.n; ++k) power[k] += weights[j] * std::norm(y[k] * inv);
  }
  for (double& v : power) v *= scale;
  const auto imax = static_cast<std::ptrdiff_t>(std::max_element(power.begin(), power.end()) -
                                                power.begin());
  const auto N = static_cast<std::ptrdiff_t>(p.n);
  const std::ptrdiff_t shift = N / 2 - imax;
  std::vector<double> rot(p.n), t(p.n);
  for (std::ptrdiff_t k = 0; k < N; ++k) {
    const std::ptrdiff_t d = ((k + shift) % N + N) % N;
    rot[d] = power[k];
  }
  for (std::ptrdiff_t d = 0; d < N; ++d) t[d] = t0 + static_cast<double>(d - shift) * p.dt;
  return make_profile(std::move(t), std::move(rot));
}

CompressionResult compress_core(const std::vector<double>& times,
                                const std::vector<std::vector<cplx>>& series,
                                const std::vector<double>& weights, double scale,
                                double threshold, std::size_t padding) {
  const Padded p = make_padded(times, padding);
  std::vector<std::vector<cplx>> spec(series.size());
  std::vector<double> energy(series.size(), 0.0);
  for (std::size_t j = 0; j < series.size(); ++j) {
    if (weights[j] == 0.0) continue;
    spec[j] = raw_spectrum(series[j], p);
    for (const cplx& v : spec[j]) energy[j] += std::norm(v);
  }
  double emax = 0.0;
  for (std::size_t j = 0; j < series.size(); ++j) emax = std::max(emax, weights[j] * energy[j]);
  if (!(emax > 0.0)) throw FitError("no spectral energy to fit");

  double csum = 0.0, wsum = 0.0;
  std::size_t dominant_bins = 0;
  double dominant = -1.0;
  for (std::size_t j = 0; j < series.size(); ++j) {
    const double wj = weights[j] * energy[j];
    if (wj < 1e-12 * emax) continue;
    const auto& s = spec[j];
    std::size_t peak = 0;
    for (std::size_t m = 1; m < p.n; ++m)
      if (std::norm(s[m]) > std::norm(s[peak])) peak = m;
    // Ascending omega order so that the unwrap walks neighbouring bins.
    std::vector<cplx> ordered(p.n);
    std::vector<double> om(p.n);
    for (std::size_t m = 0; m < p.n; ++m) {
      const std::size_t d = (m + p.n / 2) % p.n;
      ordered[d] = s[m];
      om[d] = p.omega(m);
    }
    const std::size_t start = (peak + p.n / 2) % p.n;
    const auto ph = unwrap_from(ordered, start);
    const double level = threshold * std::norm(ordered[start]);
    std::vector<double> x, y, w;
    for (std::size_t d = 0; d < p.n; ++d) {
      if (std::norm(ordered[d]) < level) continue;
      x.push_back(om[d]);
      y.push_back(ph[d]);
      w.push_back(std::norm(ordered[d]));
    }
    if (wj > dominant) {
      dominant = wj;
      dominant_bins = x.size();
    }
    if (x.size() < 3) continue;
    double c = 0.0;
    try {
      // centred in the fitted band for conditioning; c is unaffected
      const double xc = x[x.size() / 2];
      for (double& v : x) v -= xc;
      c = quadratic_fit(x, y, w)[2];
    } catch (const FitError&) {
      continue;
    }
    csum += wj * c;
    wsum += wj;
  }
  if (!(wsum > 0.0)) throw FitError("spectrum narrower than three bins: quadratic phase undefined");
  const double cbar = csum / wsum;

  CompressionResult out;
  out.quadratic_fs2 = cbar;
  out.fitted_bins = dominant_bins;
  auto comp = spec, tl = spec;
  for (std::size_t j = 0; j < series.size(); ++j) {
    if (spec[j].empty()) continue;
    for (std::size_t m = 0; m < p.n; ++m) {
      const double w = p.omega(m);
      comp[j][m] *= std::polar(1.0, -cbar * w * w);
      tl[j][m] = std::abs(spec[j][m]);
    }
  }
  out.compressed = padded_profile(comp, weights, scale, p, times.front());
  out.transform_limited = padded_profile(tl, weights, scale, p, times.front());
  return out;
}

void check_assembly_spectral(const PulseAssembly& pulse) {
  pulse.validate();
  if (!pulse.uniform()) throw ConfigError("spectral analysis needs a uniform slice-time grid");
}

}  // namespace

PulseAssembly PulseAssembly::from_run(const PulseRun& run, const PropagationSetup& setup) {
  PulseAssembly a;
  a.times_fs = run.times_fs;
  a.slices = run.harmonic;
  a.z_mm = run.harmonic.empty() ? setup.exit_plane_mm() : run.harmonic.front().z_mm;
  a.order = setup.order;
  a.drive_wavelength_nm = setup.geometry.wavelength_nm;
  a.drive_fwhm_fs = setup.fwhm_fs;
  return a;
}

bool PulseAssembly::uniform() const {
  if (times_fs.size() < 3) return true;
  const double dt = times_fs[1] - times_fs[0];
  for (std::size_t k = 2; k < times_fs.size(); ++k)
    if (std::abs(times_fs[k] - times_fs[k - 1] - dt) > 1e-6 * std::abs(dt)) return false;
  return true;
}

double PulseAssembly::dt_fs() const {
  if (times_fs.size() < 2) throw ConfigError("assembly has fewer than two slices");
  return times_fs[1] - times_fs[0];
}

void PulseAssembly::validate() const {
  if (slices.empty() || slices.size() != times_fs.size())
    throw ConfigError("assembly needs one slice per time");
  for (std::size_t k = 1; k < times_fs.size(); ++k)
    if (!(times_fs[k] > times_fs[k - 1])) throw ConfigError("slice times must increase strictly");
  for (const auto& s : slices) {
    if (s.r_um != slices.front().r_um) throw ConfigError("slices must share one radial grid");
    if (s.wavelength_nm != slices.front().wavelength_nm)
      throw ConfigError("slices must share one wavelength");
  }
  if (order < 1 || !(drive_wavelength_nm > 0.0)) throw ConfigError("assembly drive metadata invalid");
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  const auto [a, b] = half_max_crossings(x, y);
  return b - a;
}

TemporalProfile series_profile(const std::vector<double>& times, const std::vector<cplx>& x) {
  if (times.size() != x.size()) throw ConfigError("series and time axis differ in size");
  std::vector<double> p(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) p[k] = std::norm(x[k]);
  return make_profile(times, std::move(p));
}

TemporalProfile temporal_profile(const PulseAssembly& pulse, std::size_t min_slices) {
  pulse.validate();
  if (pulse.size() < min_slices)
    throw ConfigError("temporal profile needs at least " + std::to_string(min_slices) + " slices");
  std::vector<double> p(pulse.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = harmonic_power_w(pulse.slices[k]);
  return make_profile(pulse.times_fs, std::move(p));
}

RadialField fluence_profile(const PulseAssembly& pulse) {
  pulse.validate();
  RadialField f = pulse.slices.front();
  for (std::size_t j = 0; j < f.size(); ++j) {
    double s = 0.0;
    for (const auto& sl : pulse.slices) s += std::norm(sl.values[j]);
    f.values[j] = std::sqrt(s);
  }
  return f;
}

SpectralProfile spectral_profile(const PulseAssembly& pulse, const SpectralOptions& opt) {
  check_assembly_spectral(pulse);
  const Padded p = make_padded(pulse.times_fs, opt.padding);
  const auto& r = pulse.r_um();
  const auto w = radial_weights(r);
  const std::size_t nr = r.size(), ns = pulse.size();
  const double t0 = pulse.times_fs.front();

  std::vector<std::vector<cplx>> spec(nr);
  SpectralProfile out;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(nr); ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    std::vector<cplx> x(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      const cplx v = pulse.slices[k].values[j];
      x[k] = opt.zero_phase ? cplx(std::abs(v)) : v;
    }
    auto s = raw_spectrum(x, p);
    // Absolute time origin and the dt of the integral.
    for (std::size_t m = 0; m < p.n; ++m) s[m] *= p.dt * std::polar(1.0, p.omega(m) * t0);
    spec[j] = std::move(s);
  }

  std::vector<double> inten(p.n, 0.0);
  std::vector<cplx> sum(p.n, 0.0);
  double best = -1.0;
  std::size_t jdom = 0;
  for (std::size_t j = 0; j < nr; ++j) {
    double e = 0.0;
    for (std::size_t m = 0; m < p.n; ++m) {
      const double a = std::norm(spec[j][m]);
      e += a;
      inten[m] += 2.0 * kPi * w[j] * a;
      sum[m] += 2.0 * kPi * w[j] * spec[j][m];
    }
    out.spectral_energy += 2.0 * kPi * w[j] * e * p.domega / (2.0 * kPi);
    if (w[j] * e > best) {
      best = w[j] * e;
      jdom = j;
    }
    for (std::size_t k = 0; k < ns; ++k)
      out.time_energy += 2.0 * kPi * w[j] * std::norm(pulse.slices[k].values[j]) * p.dt;
  }
  if (opt.coherent)
    for (std::size_t m = 0; m < p.n; ++m) inten[m] = std::norm(sum[m]);
  if (opt.phase_radius_um) {
    jdom = 0;
    for (std::size_t j = 1; j < nr; ++j)
      if (std::abs(r[j] - *opt.phase_radius_um) < std::abs(r[jdom] - *opt.phase_radius_um)) jdom = j;
  }
  out.phase_radius_um = r[jdom];

  const double to_a = omega_to_angstrom(pulse.harmonic_wavelength_nm());
  const double to_ev = omega_to_ev();
  out.domega_rad_fs.resize(p.n);
  out.dlambda_angstrom.resize(p.n);
  out.denergy_ev.resize(p.n);
  out.intensity.resize(p.n);
  std::vector<cplx> phase_src(p.n);
  for (std::size_t m = 0; m < p.n; ++m) {
    const std::size_t d = (m + p.n / 2) % p.n;
    const double om = p.omega(m);
    out.domega_rad_fs[d] = om;
    out.dlambda_angstrom[d] = om * to_a;
    out.denergy_ev[d] = om * to_ev;
    out.intensity[d] = inten[m];
    phase_src[d] = spec[jdom][m];
  }
  std::size_t peak = 0;
  for (std::size_t d = 1; d < p.n; ++d)
    if (std::norm(phase_src[d]) > std::norm(phase_src[peak])) peak = d;
  out.phase = unwrap_from(phase_src, peak);

  const double fw = fwhm(out.domega_rad_fs, out.intensity);
  out.fwhm_angstrom = std::abs(fw * to_a);
  out.fwhm_ev = std::abs(fw * to_ev);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t d = 0; d < p.n; ++d) {
    s0 += out.intensity[d];
    s1 += out.intensity[d] * out.domega_rad_fs[d];
  }
  if (s0 > 0.0) {
    out.centroid_angstrom = s1 / s0 * to_a;
    out.centroid_ev = s1 / s0 * to_ev;
  }
  return out;
}

SpectralProfile series_spectrum(const std::vector<double>& times, const std::vector<cplx>& x,
                                double carrier_nm, std::size_t padding) {
  if (times.size() != x.size()) throw ConfigError("series and time axis differ in size");
  PulseAssembly a;
  a.times_fs = times;
  a.order = 1;
  a.drive_wavelength_nm = carrier_nm;
  // One node on the axis; weight factors cancel in every normalized output.
  a.slices.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    a.slices[k].r_um = {0.0, 1.0};
    a.slices[k].values = {x[k], 0.0};
    a.slices[k].wavelength_nm = carrier_nm;
  }
  SpectralOptions opt;
  opt.padding = padding;
  return spectral_profile(a, opt);
}

CoherenceCurve coherence_degree(const PulseAssembly& pulse, double r_ref_um) {
  pulse.validate();
  const auto& r = pulse.r_um();
  std::size_t ref = 0;
  for (std::size_t j = 1; j < r.size(); ++j)
    if (std::abs(r[j] - r_ref_um) < std::abs(r[ref] - r_ref_um)) ref = j;
  double e_ref = 0.0;
  for (const auto& s : pulse.slices) e_ref += std::norm(s.values[ref]);
  if (!(e_ref > 0.0)) throw DomainError("degree of coherence: reference point carries no energy");
  CoherenceCurve c;
  c.r_ref_um = r[ref];
  c.r_um = r;
  c.gamma.resize(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    cplx cross = 0.0;
    double e = 0.0;
    for (const auto& s : pulse.slices) {
      cross += s.values[ref] * std::conj(s.values[j]);
      e += std::norm(s.values[j]);
    }
    c.gamma[j] = e > 0.0 ? std::min(1.0, std::abs(cross) / std::sqrt(e_ref * e)) : 0.0;
  }
  c.gamma[ref] = 1.0;
  return c;
}

CompressionResult compress_pulse(const PulseAssembly& pulse, double threshold,
                                 std::size_t padding) {
  check_assembly_spectral(pulse);
  const auto w = radial_weights(pulse.r_um());
  std::vector<std::vector<cplx>> series(w.size(), std::vector<cplx>(pulse.size()));
  std::vector<double> weights(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    weights[j] = 2.0 * kPi * w[j];
    for (std::size_t k = 0; k < pulse.size(); ++k) series[j][k] = pulse.slices[k].values[j];
  }
  auto out = compress_core(pulse.times_fs, series, weights, kPowerScale, threshold, padding);
  out.before = temporal_profile(pulse, 2);
  return out;
}

CompressionResult compress_series(const std::vector<double>& times, const std::vector<cplx>& x,
                                  double threshold, std::size_t padding) {
  if (times.size() != x.size()) throw ConfigError("series and time axis differ in size");
  auto out = compress_core(times, {x}, {1.0}, 1.0, threshold, padding);
  out.before = series_profile(times, x);
  return out;
}

std::vector<double> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& w) {
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = w[i];
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y[i];
      p *= x[i];
    }
  }
  double m[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
  // Gaussian elimination with partial pivoting
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (!(std::abs(m[piv][c]) > 0.0)) throw FitError("quadratic fit is degenerate");
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

// Phase model -------------------------------------------------------------------

double PhaseModulationModel::intensity(double t) const {
  return i0_wcm2 * std::exp(-4.0 * std::log(2.0) * t * t / (tau_fwhm_fs * tau_fwhm_fs));
}

double PhaseModulationModel::delta_phase(double t) const { return -eta * intensity(t); }

double PhaseModulationModel::delta_omega(double t) const {
  const double didt = -8.0 * std::log(2.0) * t / (tau_fwhm_fs * tau_fwhm_fs) * intensity(t);
  return eta * didt;
}

double PhaseModulationModel::inflection_time_fs() const {
  return tau_fwhm_fs / std::sqrt(8.0 * std::log(2.0));
}

double PhaseModulationModel::lambda_coefficient() const {
  // |d lambda| = lambda^2 / (2 pi c) |dw|, |dw|max = eta I0 sqrt(8 ln 2) e^{-1/2} / tau
  const double l = harmonic_wavelength_nm * 1e-9;
  const double tau = tau_fwhm_fs * 1e-15;
  return l * l * std::sqrt(8.0 * std::log(2.0)) * std::exp(-0.5) /
         (2.0 * kPi * units::c_si * tau) * 1e10;
}

double PhaseModulationModel::delta_lambda_ext_angstrom() const {
  return lambda_coefficient() * eta * i0_wcm2;
}

double spherical_wave_coefficient(double wavelength_nm, double distance_mm) {
  if (!(distance_mm > 0.0)) throw DomainError("spherical wave needs a positive distance");
  const double k = 2.0 * kPi / (wavelength_nm * 1e-3);
  return k / (2.0 * distance_mm * 1e3);
}

// Polarization phase map ----------------------------------------------------------

PhaseMap polarization_phase_map(const FocusGeometry& g, const DipoleTable& table, double i0,
                                const std::vector<double>& z, const std::vector<double>& r) {
  g.validate();
  if (z.size() < 3 || r.empty()) throw ConfigError("phase map needs >= 3 z planes and radii");
  const int q = table.order;
  PhaseMap m;
  m.z_mm = z;
  m.r_um = r;
  m.geometric.assign(r.size(), std::vector<double>(z.size()));
  m.dipole = m.geometric;
  m.total = m.geometric;
  const double w0 = g.waist_um();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double w = g.radius_um(z[i]);
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double I = i0 * (w0 / w) * (w0 / w) * std::exp(-2.0 * r[j] * r[j] / (w * w));
      m.geometric[j][i] = g.gouy_phase(z[i], q) + g.curvature_coefficient(z[i], q) * r[j] * r[j];
      m.dipole[j][i] = query(table, I).phase;
      m.total[j][i] = m.geometric[j][i] + m.dipole[j][i];
    }
  }
  // On-axis derivative (central differences) and the flattest z > focus.
  std::vector<double> d(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == z.size() ? i : i + 1;
    d[i] = (m.total[0][b] - m.total[0][a]) / (z[b] - z[a]);
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] > g.focus_z_mm && (!best || std::abs(d[i]) < std::abs(d[*best]))) best = i;
  if (best) {
    const double limit = 0.5 * q * 2.0 / g.confocal_mm;
    std::size_t lo = *best, hi = *best;
    while (lo > 0 && std::abs(d[lo - 1]) < limit) --lo;
    while (hi + 1 < z.size() && std::abs(d[hi + 1]) < limit) ++hi;
    m.compensation_z_mm = z[*best];
    m.compensation_begin_mm = z[lo];
    m.compensation_end_mm = z[hi];
  }
  m.radial_coefficient.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double w = g.radius_um(z[i]);
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] > w) break;
      const double x = r[j] * r[j], y = m.total[j][i];
      const double wt = std::exp(-4.0 * x / (w * w));
      sw += wt;
      sx += wt * x;
      sy += wt * y;
      sxx += wt * x * x;
      sxy += wt * x * y;
    }
    const double den = sw * sxx - sx * sx;
    m.radial_coefficient[i] = den > 0.0 ? (sw * sxy - sx * sy) / den : 0.0;
  }
  return m;
}

double reference_drive_chirp() { return chirp_for_bandwidth(150.0, 825.0, 32.0); }

SpectralProfile chirped_drive_scenario(PropagationSetup setup, int sign, const DipoleTable& table,
                                       const SpectralOptions& options) {
  if (sign == 0) throw ConfigError("chirp sign must be +1 or -1");
  setup.chirp_rad_per_fs2 = (sign > 0 ? 1.0 : -1.0) * reference_drive_chirp();
  const PulseRun run = run_pulse(setup, table);
  return spectral_profile(PulseAssembly::from_run(run, setup), options);
}

}  // namespace hhg
