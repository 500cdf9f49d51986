#include "hhg/nonadiabatic.hpp"

#include <algorithm>
#include <cmath>

#include "hhg/errors.hpp"
#include "hhg/fft.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {
constexpr double kPi = units::pi;
}

double WindowSpec::operator()(double detuning) const {
  const double u = std::abs(detuning) / (0.5 * full_width_omega);
  return std::exp(-std::log(2.0) * std::pow(u, 2 * order));
}

void WindowSpec::validate() const {
  if (!(full_width_omega > 0.0) || order < 1) throw ConfigError("spectral window needs width and order");
  if (0.5 * full_width_omega >= 2.0)
    throw DomainError("spectral window reaches the neighbouring harmonic centres");
}

DriveWaveform NonadiabaticSetup::waveform() const {
  DriveWaveform w;
  w.wavelength_nm = wavelength_nm;
  w.peak_intensity_wcm2 = peak_intensity_wcm2;
  w.envelope = Envelope::gaussian;
  w.fwhm_fs = fwhm_fs;
  w.adiabatic = false;
  return w;
}

void NonadiabaticSetup::validate() const {
  atom.validate();
  waveform().validate();
  window.validate();
  numerics.validate();
  if (order < 1 || order % 2 == 0) throw ConfigError("harmonic order must be odd");
  if (!(span_fwhm >= 1.0)) throw ConfigError("time span must cover at least one fwhm each side");
  if (table_nodes < 16) throw ConfigError("adiabatic table needs at least 16 nodes");
}

NonadiabaticResult nonadiabatic_pulse(const NonadiabaticSetup& setup) {
  setup.validate();
  GridSpec grid;
  grid.i_min = 0.0;
  grid.i_max = setup.peak_intensity_wcm2;
  grid.nodes = setup.table_nodes;
  const auto table = build_table(setup.atom, setup.wavelength_nm, setup.order, grid, setup.numerics);
  return nonadiabatic_pulse(setup, table);
}

NonadiabaticResult nonadiabatic_pulse(const NonadiabaticSetup& setup, const DipoleTable& table) {
  setup.validate();
  if (table.order != setup.order || table.atom_id != setup.atom.id)
    throw ConfigError("adiabatic table does not match the short-pulse setup");
  if (table.i_max() < setup.peak_intensity_wcm2 * (1.0 - 1e-9))
    throw RangeError("adiabatic table ends below the peak intensity");

  const DriveWaveform wf = setup.waveform();
  const double span = setup.span_fwhm * units::fs_to_au(setup.fwhm_fs);
  const double step = wf.period() / setup.numerics.t_samples;
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * span / step)) + 1;
  const DipoleSeries ds = dipole_series(wf, setup.atom, setup.numerics, -span, count);

  // Spectrum with e^{+i W t}: x_q e^{-i q w t} sits at W = +q w.
  std::vector<cplx> buf(count);
  for (std::size_t k = 0; k < count; ++k) buf[k] = ds.x[k];
  auto spec = fft::backward(buf);
  const double w0 = wf.omega();
  const double dW = 2.0 * kPi / (static_cast<double>(count) * ds.step);
  for (std::size_t m = 0; m < count; ++m) {
    const auto s = static_cast<std::ptrdiff_t>(m);
    const auto N = static_cast<std::ptrdiff_t>(count);
    const double W = dW * static_cast<double>(s < (N + 1) / 2 ? s : s - N);
    spec[m] *= setup.window(W / w0 - setup.order);
  }
  const auto env = fft::forward(spec);

  NonadiabaticResult out;
  out.times_fs.resize(count);
  out.nonadiabatic.resize(count);
  out.adiabatic.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = ds.t0 + static_cast<double>(k) * ds.step;
    out.times_fs[k] = units::au_to_fs(t);
    // Remove the carrier of order q; same convention as the table's x_q.
    out.nonadiabatic[k] = env[k] / static_cast<double>(count) * std::polar(1.0, setup.order * w0 * t);
    const double I = std::min(wf.envelope_intensity(t), table.i_max());
    out.adiabatic[k] = query(table, I).x_q;
  }

  out.adiabatic_profile = series_profile(out.times_fs, out.adiabatic);
  out.nonadiabatic_profile = series_profile(out.times_fs, out.nonadiabatic);
  out.delay_fs = out.nonadiabatic_profile.peak_time_fs - out.adiabatic_profile.peak_time_fs;

  // Temporal phase of the adiabatic envelope against a parabola over its FWHM.
  {
    const double a = out.adiabatic_profile.peak_time_fs - 0.5 * out.adiabatic_profile.fwhm_fs;
    const double b = out.adiabatic_profile.peak_time_fs + 0.5 * out.adiabatic_profile.fwhm_fs;
    std::vector<double> x, y, w;
    double prev = 0.0, ph = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < count; ++k) {
      if (out.times_fs[k] < a || out.times_fs[k] > b) continue;
      const double arg = std::arg(out.adiabatic[k]);
      if (first) {
        ph = arg;
        first = false;
      } else {
        double d = arg - prev;
        d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
        ph += d;
      }
      prev = arg;
      x.push_back(out.times_fs[k] - out.adiabatic_profile.peak_time_fs);
      y.push_back(ph);
      w.push_back(1.0);
    }
    if (x.size() >= 3) {
      const auto c = quadratic_fit(x, y, w);
      double s2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (c[0] + c[1] * x[i] + c[2] * x[i] * x[i]);
        s2 += r * r;
      }
      out.adiabatic_phase_residual = std::sqrt(s2 / static_cast<double>(x.size()));
    }
  }

  const double carrier_nm = setup.wavelength_nm / setup.order;
  out.adiabatic_spectrum = series_spectrum(out.times_fs, out.adiabatic, carrier_nm, 4);
  out.nonadiabatic_spectrum = series_spectrum(out.times_fs, out.nonadiabatic, carrier_nm, 4);
  out.red_shift_ev = out.adiabatic_spectrum.centroid_ev - out.nonadiabatic_spectrum.centroid_ev;
  out.adiabatic_compressed = compress_series(out.times_fs, out.adiabatic);
  out.nonadiabatic_compressed = compress_series(out.times_fs, out.nonadiabatic);
  return out;
}

}  // namespace hhg
