#include "hhg/beam.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

constexpr double kPi = units::pi;

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("field file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

double crossing(const std::vector<double>& r, const std::vector<double>& y, std::size_t k0,
                std::size_t k1, double level) {
  // y[k0] >= level > y[k1], adjacent
  const double w = (y[k0] - level) / (y[k0] - y[k1]);
  return r[k0] + w * (r[k1] - r[k0]);
}

}  // namespace

double FocusGeometry::waist_um() const {
  return std::sqrt(confocal_mm * 1e3 * wavelength_nm * 1e-3 / (2.0 * kPi));
}

double FocusGeometry::radius_um(double z_mm) const {
  const double u = 2.0 * (z_mm - focus_z_mm) / confocal_mm;
  return waist_um() * std::sqrt(1.0 + u * u);
}

double FocusGeometry::gouy_phase(double z_mm, int q) const {
  return -q * std::atan(2.0 * (z_mm - focus_z_mm) / confocal_mm);
}

double FocusGeometry::curvature_coefficient(double z_mm, int q) const {
  const double w = radius_um(z_mm);
  return q * (2.0 * (z_mm - focus_z_mm) / confocal_mm) / (w * w);
}

void FocusGeometry::validate() const {
  if (!(confocal_mm > 0.0)) throw ConfigError("confocal parameter must be positive");
  if (!(wavelength_nm > 0.0)) throw ConfigError("wavelength must be positive");
  if (!std::isfinite(focus_z_mm)) throw ConfigError("focus position must be finite");
}

double JetProfile::peak_density_cm3() const {
  return units::gas_density_cm3(peak_pressure_torr, temperature_k);
}

void JetProfile::validate() const {
  if (!(fwhm_mm > 0.0)) throw ConfigError("jet fwhm must be positive");
  if (!(truncation_halfwidth_mm > 0.0)) throw ConfigError("jet truncation must be positive");
  if (!(peak_pressure_torr >= 0.0)) throw ConfigError("jet pressure must be non-negative");
  if (!(temperature_k > 0.0)) throw ConfigError("jet temperature must be positive");
  atom.validate();
}

double jet_density(const JetProfile& jet, double z_mm) {
  const double d = z_mm - jet.center_mm;
  if (std::abs(d) > jet.truncation_halfwidth_mm) return 0.0;
  const double h = 0.5 * jet.fwhm_mm;
  return jet.peak_density_cm3() * h * h / (d * d + h * h);
}

double RadialField::power() const {
  const auto w = radial_weights(r_um);
  double p = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) p += w[j] * std::norm(values[j]);
  return 2.0 * kPi * p;
}

void RadialField::validate() const {
  if (r_um.size() < 2 || values.size() != r_um.size())
    throw ConfigError("radial field grid and values differ in size");
  if (r_um.front() != 0.0) throw ConfigError("radial grid must start on the axis");
  for (std::size_t j = 1; j < r_um.size(); ++j)
    if (!(r_um[j] > r_um[j - 1])) throw ConfigError("radial grid must be ascending");
}

std::vector<double> radial_weights(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = j == 0 ? 0.0 : 0.5 * (r[j - 1] + r[j]);
    const double hi = j + 1 == n ? r[j] : 0.5 * (r[j] + r[j + 1]);
    w[j] = 0.5 * (hi * hi - lo * lo);
  }
  return w;
}

std::vector<double> uniform_radii(std::size_t n, double r_max_um) {
  if (n < 2 || !(r_max_um > 0.0)) throw ConfigError("radial grid needs n >= 2 and r_max > 0");
  std::vector<double> r(n);
  const double h = r_max_um / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) r[j] = h * static_cast<double>(j);
  return r;
}

cplx gaussian_reference(const FocusGeometry& g, double peak_intensity_wcm2, double z_mm,
                        double r_um, int q) {
  const double w0 = g.waist_um();
  const double w = g.radius_um(z_mm);
  const double amp = std::sqrt(peak_intensity_wcm2) * w0 / w * std::exp(-r_um * r_um / (w * w));
  const double phase = g.gouy_phase(z_mm, q) + g.curvature_coefficient(z_mm, q) * r_um * r_um;
  return std::polar(amp, phase);
}

RadialField gaussian_field(const FocusGeometry& g, double peak_intensity_wcm2, double z_mm,
                           const std::vector<double>& r_um) {
  RadialField f;
  f.r_um = r_um;
  f.z_mm = z_mm;
  f.wavelength_nm = g.wavelength_nm;
  f.values.resize(r_um.size());
  for (std::size_t j = 0; j < r_um.size(); ++j)
    f.values[j] = gaussian_reference(g, peak_intensity_wcm2, z_mm, r_um[j]);
  return f;
}

double radius_1e2_um(const RadialField& field) {
  std::vector<double> I(field.size());
  for (std::size_t j = 0; j < I.size(); ++j) I[j] = std::norm(field.values[j]);
  const auto it = std::max_element(I.begin(), I.end());
  if (*it <= 0.0) return 0.0;
  const double level = *it * std::exp(-2.0);
  for (std::size_t j = static_cast<std::size_t>(it - I.begin()); j + 1 < I.size(); ++j)
    if (I[j + 1] < level) return crossing(field.r_um, I, j, j + 1, level);
  return field.r_um.back();
}

double outer_radius_1e2_um(const RadialField& field) {
  std::vector<double> I(field.size());
  for (std::size_t j = 0; j < I.size(); ++j) I[j] = std::norm(field.values[j]);
  const double peak = *std::max_element(I.begin(), I.end());
  if (peak <= 0.0) return 0.0;
  const double level = peak * std::exp(-2.0);
  for (std::size_t j = I.size() - 1; j > 0; --j)
    if (I[j - 1] >= level && I[j] < level) return crossing(field.r_um, I, j - 1, j, level);
  return field.r_um.back();
}

double radial_phase_coefficient(const RadialField& field, double floor) {
  std::vector<double> I(field.size());
  for (std::size_t j = 0; j < I.size(); ++j) I[j] = std::norm(field.values[j]);
  const double peak = *std::max_element(I.begin(), I.end());
  if (peak <= 0.0) throw DomainError("phase coefficient of a zero field");
  // Unwrap outwards from the axis, then weighted fit in x = r^2.
  std::vector<double> ph(field.size());
  ph[0] = std::arg(field.values[0]);
  for (std::size_t j = 1; j < ph.size(); ++j) {
    double d = std::arg(field.values[j]) - std::arg(field.values[j - 1]);
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    ph[j] = ph[j - 1] + d;
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < ph.size(); ++j) {
    if (I[j] < floor * peak) continue;
    const double x = field.r_um[j] * field.r_um[j];
    const double w = I[j];
    sw += w;
    sx += w * x;
    sy += w * ph[j];
    sxx += w * x * x;
    sxy += w * x * ph[j];
  }
  const double den = sw * sxx - sx * sx;
  if (!(den > 0.0)) throw DomainError("phase profile too narrow for a quadratic fit");
  return (sw * sxy - sx * sy) / den;
}

FieldStack make_stack(const std::vector<RadialField>& planes) {
  FieldStack s;
  if (planes.empty()) return s;
  s.r_um = planes.front().r_um;
  s.wavelength_nm = planes.front().wavelength_nm;
  s.slice_time_fs = planes.front().slice_time_fs;
  for (const auto& p : planes) {
    if (p.r_um != s.r_um) throw ConfigError("field planes must share one radial grid");
    s.z_mm.push_back(p.z_mm);
    s.values.insert(s.values.end(), p.values.begin(), p.values.end());
  }
  return s;
}

// Layout: magic, version, r-count, z-count, wavelength, slice time, then
// row-major (re, im) pairs; the r and z axes follow as a trailer.
void write_stack_binary(const FieldStack& s, std::ostream& out) {
  if (s.values.size() != s.r_um.size() * s.z_mm.size())
    throw ConfigError("field stack shape mismatch");
  put_u64(out, kPlaneMagic);
  put_u64(out, kPlaneVersion);
  put_u64(out, s.r_um.size());
  put_u64(out, s.z_mm.size());
  put_f64(out, s.wavelength_nm);
  put_f64(out, s.slice_time_fs);
  for (const cplx& v : s.values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  for (double r : s.r_um) put_f64(out, r);
  for (double z : s.z_mm) put_f64(out, z);
}

FieldStack read_stack_binary(std::istream& in) {
  if (get_u64(in) != kPlaneMagic) throw ConfigError("not a field-plane file");
  if (get_u64(in) != kPlaneVersion) throw ConfigError("unsupported field-plane version");
  FieldStack s;
  const std::uint64_t nr = get_u64(in), nz = get_u64(in);
  if (nr * nz > (1ull << 28)) throw ConfigError("field-plane dimensions are implausible");
  s.wavelength_nm = get_f64(in);
  s.slice_time_fs = get_f64(in);
  s.values.resize(nr * nz);
  for (auto& v : s.values) {
    const double re = get_f64(in);
    v = cplx(re, get_f64(in));
  }
  s.r_um.resize(nr);
  s.z_mm.resize(nz);
  for (auto& r : s.r_um) r = get_f64(in);
  for (auto& z : s.z_mm) z = get_f64(in);
  return s;
}

void write_field_csv(const RadialField& f, std::ostream& out) {
  out << "r_um,re,im,intensity,phase_rad\n" << std::setprecision(12);
  for (std::size_t j = 0; j < f.size(); ++j)
    out << f.r_um[j] << ',' << f.values[j].real() << ',' << f.values[j].imag() << ','
        << std::norm(f.values[j]) << ',' << std::arg(f.values[j]) << '\n';
}

}  // namespace hhg
