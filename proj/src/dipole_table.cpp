#include "hhg/dipole_table.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_intensity(double i) {
  std::ostringstream s;
  s << std::setprecision(4) << std::scientific << i << " W/cm^2";
  return s.str();
}

// Linear least squares y = a + b x.
struct LineFit {
  double a = 0.0, b = 0.0, rms = 0.0;
};

LineFit fit_line(const double* x, const double* y, std::size_t n) {
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.b = sxx > 0 ? sxy / sxx : 0.0;
  f.a = my - f.b * mx;
  double r2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.a + f.b * x[i]);
    r2 += r * r;
  }
  f.rms = std::sqrt(r2 / n);
  return f;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("table file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

std::vector<double> GridSpec::intensities() const {
  validate();
  std::vector<double> out(nodes);
  if (log_spacing) {
    const double lo = std::max(i_min, i_max * 1e-3);
    const double r = std::log(i_max / lo) / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k) out[k] = lo * std::exp(r * static_cast<double>(k));
    out.back() = i_max;
  } else {
    const double h = (i_max - i_min) / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k) out[k] = i_min + h * static_cast<double>(k);
    out.back() = i_max;
  }
  return out;
}

void GridSpec::validate() const {
  if (!(i_min >= 0.0) || !(i_max > i_min) || !std::isfinite(i_max))
    throw ConfigError("table grid needs 0 <= i_min < i_max");
  if (nodes < 2) throw ConfigError("table grid needs at least two nodes");
}

void DipoleTable::validate() const {
  const std::size_t n = intensity.size();
  if (n < 2 || amplitude.size() != n || phase.size() != n || gamma.size() != n)
    throw ConfigError("dipole table columns are inconsistent");
  if (order < 1 || order % 2 == 0) throw ConfigError("dipole table order must be odd");
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(intensity[k] > intensity[k - 1]))
      throw ConfigError("dipole table intensities must be strictly ascending");
    if (!(amplitude[k] >= 0.0) || !(gamma[k] >= 0.0) || !std::isfinite(phase[k]))
      throw ConfigError("dipole table holds invalid node values");
  }
}

TableSample evaluate_node(const AtomModel& atom, double wavelength_nm, int order,
                          double intensity_wcm2, const SfaNumerics& numerics) {
  TableSample s;
  if (intensity_wcm2 <= 0.0) return s;  // no field, no response
  const auto wf = DriveWaveform::monochromatic(wavelength_nm, intensity_wcm2);
  // Weak fields leave a relatively larger tail at tau_max; extend the
  // return-time range there before giving up.
  SfaNumerics num = numerics;
  for (int attempt = 0;; ++attempt) {
    try {
      const HarmonicPoint hp = harmonic_point(wf, atom, num, order);
      s.x_q = hp.x_q;
      s.amplitude = std::abs(hp.x_q);
      s.phase = std::arg(hp.x_q);
      s.gamma = hp.gamma / units::au_time_s;
      return s;
    } catch (const NumericalAccuracyError& e) {
      if (attempt >= 2)
        throw NumericalAccuracyError(
            std::string(e.what()) + " at " + fmt_intensity(intensity_wcm2), e.estimate());
      num.tau_max_periods *= 2.0;
    }
  }
}

DipoleTable build_table(const AtomModel& atom, double wavelength_nm, int order,
                        const GridSpec& grid, const SfaNumerics& numerics) {
  atom.validate();
  numerics.validate();
  if (order < 1 || order % 2 == 0) throw DomainError("harmonic order must be odd");
  DipoleTable t;
  t.order = order;
  t.atom_id = atom.id;
  t.wavelength_nm = wavelength_nm;
  t.intensity = grid.intensities();
  const std::size_t n = t.intensity.size();
  t.amplitude.assign(n, 0.0);
  t.phase.assign(n, 0.0);
  t.gamma.assign(n, 0.0);

  std::vector<double> raw_phase(n, 0.0);
  std::string failure;
  double failure_estimate = 0.0;
  std::exception_ptr other;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    try {
      const auto s = evaluate_node(atom, wavelength_nm, order, t.intensity[k], numerics);
      t.amplitude[k] = s.amplitude;
      raw_phase[k] = s.phase;
      t.gamma[k] = s.gamma;
    } catch (const NumericalAccuracyError& e) {
#pragma omp critical(hhg_table_failure)
      if (failure.empty()) {
        failure = e.what();
        failure_estimate = e.estimate();
      }
    } catch (...) {
#pragma omp critical(hhg_table_failure)
      if (!other) other = std::current_exception();
    }
  }
  if (other) std::rethrow_exception(other);
  if (!failure.empty()) throw NumericalAccuracyError(failure, failure_estimate);

  // Nodes far below the signal carry round-off phases. Those are replaced by
  // the phase of the first resolved node so continuation starts cleanly.
  const double amax = *std::max_element(t.amplitude.begin(), t.amplitude.end());
  std::size_t first = 0;
  while (first < n && !(t.amplitude[first] > 1e-9 * amax)) ++first;
  if (first == n) first = 0;
  for (std::size_t k = 0; k < first; ++k) raw_phase[k] = raw_phase[first];

  t.phase[0] = raw_phase[0];
  for (std::size_t k = 1; k < n; ++k) {
    double d = raw_phase[k] - raw_phase[k - 1];
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    t.phase[k] = t.phase[k - 1] + d;
  }
  // Rate noise at the lowest intensities is far below anything physical; the
  // running maximum keeps the column monotone.
  for (std::size_t k = 1; k < n; ++k) t.gamma[k] = std::max(t.gamma[k], t.gamma[k - 1]);
  return t;
}

TableSample query(const DipoleTable& table, double intensity_wcm2) {
  const auto& I = table.intensity;
  if (I.empty()) throw RangeError("empty dipole table");
  if (!(intensity_wcm2 >= I.front() && intensity_wcm2 <= I.back()))
    throw RangeError("intensity " + fmt_intensity(intensity_wcm2) + " outside table range [" +
                     fmt_intensity(I.front()) + ", " + fmt_intensity(I.back()) + "]");
  auto it = std::upper_bound(I.begin(), I.end(), intensity_wcm2);
  std::size_t hi = static_cast<std::size_t>(it - I.begin());
  if (hi == I.size()) hi = I.size() - 1;
  const std::size_t lo = hi - 1;
  TableSample s;
  if (intensity_wcm2 == I[hi]) {
    s.amplitude = table.amplitude[hi];
    s.phase = table.phase[hi];
    s.gamma = table.gamma[hi];
  } else if (intensity_wcm2 == I[lo]) {
    s.amplitude = table.amplitude[lo];
    s.phase = table.phase[lo];
    s.gamma = table.gamma[lo];
  } else {
    const double w = (intensity_wcm2 - I[lo]) / (I[hi] - I[lo]);
    s.amplitude = (1 - w) * table.amplitude[lo] + w * table.amplitude[hi];
    s.phase = (1 - w) * table.phase[lo] + w * table.phase[hi];
    s.gamma = (1 - w) * table.gamma[lo] + w * table.gamma[hi];
  }
  s.x_q = std::polar(s.amplitude, s.phase);
  return s;
}

PhaseSlope phase_slope(const DipoleTable& table, double i_lo, double i_hi, SlopeRegion region) {
  if (!(i_hi > i_lo)) throw DomainError("phase-slope window is empty");
  if (i_lo < table.i_min() || i_hi > table.i_max())
    throw RangeError("phase-slope window outside table range");
  const auto b = std::lower_bound(table.intensity.begin(), table.intensity.end(), i_lo);
  const auto e = std::upper_bound(table.intensity.begin(), table.intensity.end(), i_hi);
  const std::size_t k0 = static_cast<std::size_t>(b - table.intensity.begin());
  const std::size_t n = static_cast<std::size_t>(e - b);
  if (n < 10) throw DomainError("phase-slope window holds fewer than 10 nodes");
  // Fit in units of 1e14 W/cm^2 for conditioning.
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = table.intensity[k0 + k] * 1e-14;
  const LineFit f = fit_line(x.data(), table.phase.data() + k0, n);
  PhaseSlope p;
  p.slope = f.b * 1e-14;
  p.eta = std::abs(p.slope);
  p.i_lo = i_lo;
  p.i_hi = i_hi;
  p.region = region;
  p.fit_residual = f.rms;
  p.nodes = n;
  return p;
}

double half_slope_transition(const std::vector<double>& I, const std::vector<double>& signal) {
  if (I.size() != signal.size()) throw DomainError("transition search: size mismatch");
  const std::size_t n = I.size();
  double smax = 0.0;
  for (double v : signal) smax = std::max(smax, v);
  if (!(smax > 0.0)) throw NotFoundError("no signal for transition search");

  // Local power-law exponent s = d ln(signal) / d ln I, fitted over +-5% in
  // intensity (at least three points) to damp plateau interferences. Points
  // below the round-off floor are skipped.
  std::vector<double> lx, ly, Ii;
  for (std::size_t k = 0; k < n; ++k) {
    if (I[k] > 0.0 && signal[k] > 1e-18 * smax) {
      lx.push_back(std::log(I[k]));
      ly.push_back(std::log(signal[k]));
      Ii.push_back(I[k]);
    }
  }
  const std::size_t m = lx.size();
  if (m < 5) throw NotFoundError("too few resolved points for transition search");
  constexpr double kHalfWidth = 0.05;
  std::vector<double> slope, at;
  for (std::size_t k = 1; k + 1 < m; ++k) {
    if (lx[k] - kHalfWidth < lx.front() || lx[k] + kHalfWidth > lx.back()) {
      if (lx[k] - lx[k - 1] <= kHalfWidth && lx[k + 1] - lx[k] <= kHalfWidth) continue;
    }
    std::size_t lo = k, hi = k;
    while (lo > 0 && lx[lo - 1] >= lx[k] - kHalfWidth) --lo;
    while (hi + 1 < m && lx[hi + 1] <= lx[k] + kHalfWidth) ++hi;
    if (lo == k) lo = k - 1;
    if (hi == k) hi = k + 1;
    slope.push_back(fit_line(lx.data() + lo, ly.data() + lo, hi - lo + 1).b);
    at.push_back(Ii[k]);
  }
  if (slope.size() < 3) throw NotFoundError("too few resolved points for transition search");

  // The low-intensity value is the exponent at the lowest resolved point.
  const double ref = slope.front();
  if (!(ref > 0.0)) throw NotFoundError("response does not start on a rising edge");
  for (std::size_t k = 1; k < slope.size(); ++k) {
    if (slope[k] < 0.5 * ref) {
      const double s0 = slope[k - 1], s1 = slope[k];
      const double w = s0 == s1 ? 0.0 : (s0 - 0.5 * ref) / (s0 - s1);
      return at[k - 1] + w * (at[k] - at[k - 1]);
    }
  }
  throw NotFoundError("no plateau-cutoff transition in range");
}

double transition_intensity(const DipoleTable& table) {
  // Squared amplitude keeps the round-off floor test meaningful (1e-18 in
  // |x|^2 is 1e-9 in |x|); the half-slope criterion is scale free.
  std::vector<double> strength(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) strength[k] = table.amplitude[k] * table.amplitude[k];
  return half_slope_transition(table.intensity, strength);
}

SlopeWindows default_slope_windows(double transition_wcm2, double table_max_wcm2) {
  SlopeWindows w;
  w.cutoff_lo = 0.75 * transition_wcm2;
  w.cutoff_hi = 1.05 * transition_wcm2;
  w.plateau_lo = 1.4 * transition_wcm2;
  w.plateau_hi = std::min(table_max_wcm2, 3.0 * transition_wcm2);
  return w;
}

std::uint64_t atom_code(const std::string& atom_id) {
  if (atom_id.empty() || atom_id.size() > 8) throw ConfigError("atom id must have 1..8 characters");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < atom_id.size(); ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(atom_id[i])) << (8 * i);
  return v;
}

std::string atom_from_code(std::uint64_t code) {
  std::string s;
  for (int i = 0; i < 8; ++i) {
    const char c = static_cast<char>((code >> (8 * i)) & 0xff);
    if (c == '\0') break;
    s.push_back(c);
  }
  return s;
}

void write_table_binary(const DipoleTable& table, std::ostream& out) {
  table.validate();
  put_u64(out, kTableMagic);
  put_u64(out, kTableVersion);
  put_u64(out, static_cast<std::uint64_t>(table.order));
  put_u64(out, atom_code(table.atom_id));
  put_f64(out, table.wavelength_nm);
  put_u64(out, table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    put_f64(out, table.intensity[k]);
    put_f64(out, table.amplitude[k]);
    put_f64(out, table.phase[k]);
    put_f64(out, table.gamma[k]);
  }
}

DipoleTable read_table_binary(std::istream& in) {
  if (get_u64(in) != kTableMagic) throw ConfigError("not a dipole table file");
  if (get_u64(in) != kTableVersion) throw ConfigError("unsupported dipole table version");
  DipoleTable t;
  t.order = static_cast<int>(get_u64(in));
  t.atom_id = atom_from_code(get_u64(in));
  t.wavelength_nm = get_f64(in);
  const std::uint64_t n = get_u64(in);
  if (n > (1ull << 26)) throw ConfigError("dipole table node count is implausible");
  t.intensity.resize(n);
  t.amplitude.resize(n);
  t.phase.resize(n);
  t.gamma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.intensity[k] = get_f64(in);
    t.amplitude[k] = get_f64(in);
    t.phase[k] = get_f64(in);
    t.gamma[k] = get_f64(in);
  }
  t.validate();
  return t;
}

void save_table(const DipoleTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_table_binary(table, out);
}

DipoleTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return read_table_binary(in);
}

void write_table_csv(const DipoleTable& table, std::ostream& out) {
  out << "intensity_wcm2,amplitude_au,phase_rad,gamma_per_s\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < table.size(); ++k)
    out << table.intensity[k] << ',' << table.amplitude[k] << ',' << table.phase[k] << ','
        << table.gamma[k] << '\n';
}

}  // namespace hhg
