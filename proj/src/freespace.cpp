#include "hhg/freespace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/bessel.hpp>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

constexpr double kPi = units::pi;

double j0(double x) { return std::cyl_bessel_j(0.0, x); }

// Trapezoid weights for int g(r) r dr on a uniform grid from r = 0.
std::vector<double> trapezoid_r(const std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> w(n);
  const double h = r[1] - r[0];
  for (std::size_t j = 0; j < n; ++j) w[j] = h * r[j];
  w.back() *= 0.5;
  return w;
}

void check_grid(const std::vector<double>& r) {
  if (r.size() < 4 || r.front() != 0.0) throw ConfigError("free-space transport needs r from 0");
  const double h = r[1] - r[0];
  for (std::size_t j = 2; j < r.size(); ++j)
    if (std::abs(r[j] - r[j - 1] - h) > 1e-9 * h * static_cast<double>(j))
      throw ConfigError("free-space transport needs a uniform radial grid");
}

double edge_fraction(const BesselBasis& b, const std::vector<cplx>& c) {
  // Power beyond 0.95 R, from a resampling of the outer band.
  const double R = b.radius();
  const std::size_t n = 200;
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = 0.95 * R + 0.05 * R * static_cast<double>(j) / (n - 1);
  const auto f = b.synthesize(c, r);
  double p = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    p += 0.5 * (std::norm(f[j]) * r[j] + std::norm(f[j + 1]) * r[j + 1]) * (r[j + 1] - r[j]);
  const double total = b.power(c);
  return total > 0.0 ? 2.0 * kPi * p / total : 0.0;
}

// Modes up to half the grid Nyquist wave number; the top modes are aliased
// by the trapezoid sums.
std::size_t mode_count(const std::vector<double>& r) { return std::max<std::size_t>(r.size() / 2, 2); }

}  // namespace

BesselBasis::BesselBasis(double radius_um, std::size_t modes) : radius_(radius_um) {
  if (!(radius_um > 0.0) || modes < 1) throw ConfigError("Bessel basis needs R > 0 and modes");
  k_.resize(modes);
  norm_.resize(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    const double z = boost::math::cyl_bessel_j_zero(0.0, static_cast<int>(m + 1));
    k_[m] = z / radius_um;
    const double j1 = std::cyl_bessel_j(1.0, z);
    norm_[m] = 0.5 * radius_um * radius_um * j1 * j1;
  }
}

std::vector<cplx> BesselBasis::analyze(const std::vector<double>& r,
                                       const std::vector<cplx>& f) const {
  check_grid(r);
  const auto w = trapezoid_r(r);
  const double h = r[1] - r[0];
  const cplx f2 = 2.0 * (f[1] - f[0]) / (h * h);  // f''(0) of an even profile
  std::vector<cplx> c(k_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(k_.size()); ++m) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] > radius_) break;
      s += w[j] * f[j] * j0(k_[m] * r[j]);
    }
    // Euler-Maclaurin end corrections at r = 0 for g = r f J0(k r):
    // g'(0) = f(0), g'''(0) = 3 f''(0) - 1.5 k^2 f(0).
    const cplx g3 = 3.0 * f2 - 1.5 * k_[m] * k_[m] * f[0];
    c[m] = (s + h * h / 12.0 * f[0] - h * h * h * h / 720.0 * g3) / norm_[m];
  }
  return c;
}

std::vector<cplx> BesselBasis::synthesize(const std::vector<cplx>& c,
                                          const std::vector<double>& r) const {
  std::vector<cplx> f(r.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(r.size()); ++j) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) s += c[m] * j0(k_[m] * r[j]);
    f[j] = s;
  }
  return f;
}

cplx BesselBasis::on_axis(const std::vector<cplx>& c) const {
  cplx s = 0.0;
  for (const cplx& v : c) s += v;
  return s;
}

double BesselBasis::power(const std::vector<cplx>& c) const {
  double p = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) p += std::norm(c[m]) * norm_[m];
  return 2.0 * kPi * p;
}

RadialField fresnel_propagate(const RadialField& field, double dz_mm,
                              FreeSpaceDiagnostics* diag) {
  return fresnel_propagate(field, dz_mm, field.r_um, diag);
}

RadialField fresnel_propagate(const RadialField& field, double dz_mm,
                              const std::vector<double>& r_out, FreeSpaceDiagnostics* diag) {
  field.validate();
  if (!(field.wavelength_nm > 0.0)) throw ConfigError("field has no wavelength");
  if (dz_mm < 0.0) {
    // Time reversal: conjugate, propagate forward, conjugate back.
    RadialField g = field;
    for (auto& v : g.values) v = std::conj(v);
    RadialField out = fresnel_propagate(g, -dz_mm, r_out, diag);
    for (auto& v : out.values) v = std::conj(v);
    out.z_mm = field.z_mm + dz_mm;
    return out;
  }
  const BesselBasis basis(field.r_um.back(), mode_count(field.r_um));
  auto c = basis.analyze(field.r_um, field.values);
  const double k = 2.0 * kPi / (field.wavelength_nm * 1e-3);  // 1/um
  const double dz = dz_mm * 1e3;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double km = basis.k()[m];
    c[m] *= std::polar(1.0, -km * km * dz / (2.0 * k));
  }
  RadialField out = field;
  out.r_um = r_out;
  out.values = basis.synthesize(c, r_out);
  out.z_mm = field.z_mm + dz_mm;
  const double edge = edge_fraction(basis, c);
  if (diag) {
    diag->edge_fraction = edge;
    if (edge > 0.05) {
      std::ostringstream s;
      s << "aliasing: " << edge * 100 << "% of the power lies within 5% of the outer boundary";
      diag->warnings.push_back(s.str());
    }
  }
  return out;
}

FarFieldProfile far_field(const RadialField& field, double distance_mm, double max_angle_mrad,
                          std::size_t samples) {
  field.validate();
  if (!(distance_mm > 0.0)) throw DomainError("far-field distance must be positive");
  if (samples < 3) throw ConfigError("far field needs at least three angles");
  const double k = 2.0 * kPi / (field.wavelength_nm * 1e-3);
  const auto w = trapezoid_r(field.r_um);
  const double h = field.r_um[1] - field.r_um[0];
  FarFieldProfile p;
  p.distance_mm = distance_mm;
  p.angle_mrad.resize(samples);
  p.intensity.resize(samples);
  p.radius_um.resize(samples);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(samples); ++a) {
    const double th = max_angle_mrad * 1e-3 * static_cast<double>(a) / (samples - 1);
    cplx s = 0.0;
    for (std::size_t j = 0; j < field.size(); ++j) s += w[j] * field.values[j] * j0(k * th * field.r_um[j]);
    s += h * h / 12.0 * field.values[0];
    p.angle_mrad[a] = th * 1e3;
    p.intensity[a] = std::norm(s);
    p.radius_um[a] = th * distance_mm * 1e3;
  }
  const double peak = *std::max_element(p.intensity.begin(), p.intensity.end());
  if (peak > 0.0)
    for (double& v : p.intensity) v /= peak;
  // Reuse the near-field radius helpers on the angular axis.
  RadialField tmp;
  tmp.r_um = p.angle_mrad;
  tmp.values.resize(samples);
  for (std::size_t a = 0; a < samples; ++a) tmp.values[a] = std::sqrt(p.intensity[a]);
  p.half_angle_1e2_mrad = radius_1e2_um(tmp);
  p.outer_half_angle_1e2_mrad = outer_radius_1e2_um(tmp);
  p.annular = p.intensity.front() < 0.5;
  return p;
}

VirtualFocus virtual_focus(const RadialField& exit, double z_min_mm, double dz_mm,
                           double profile_radius_um, double profile_step_um) {
  exit.validate();
  if (!(z_min_mm < exit.z_mm)) throw DomainError("virtual focus scan must extend upstream");
  if (!(dz_mm > 0.0)) throw DomainError("scan step must be positive");
  const BesselBasis basis(exit.r_um.back(), mode_count(exit.r_um));
  // Backward transport of every mode: conj -> forward -> conj is the phase
  // exp(+i k_m^2 |dz| / 2k).
  const auto c0 = basis.analyze(exit.r_um, exit.values);
  const double k = 2.0 * kPi / (exit.wavelength_nm * 1e-3);
  VirtualFocus vf;
  const auto n = static_cast<std::size_t>(std::floor((exit.z_mm - z_min_mm) / dz_mm + 1e-9)) + 1;
  vf.scan_z_mm.resize(n);
  vf.scan_axis_intensity.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double back = dz_mm * static_cast<double>(s) * 1e3;  // um
    cplx a = 0.0;
    for (std::size_t m = 0; m < c0.size(); ++m) {
      const double km = basis.k()[m];
      a += c0[m] * std::polar(1.0, km * km * back / (2.0 * k));
    }
    vf.scan_z_mm[s] = exit.z_mm - dz_mm * static_cast<double>(s);
    vf.scan_axis_intensity[s] = std::norm(a);
  }
  const auto best = static_cast<std::size_t>(
      std::max_element(vf.scan_axis_intensity.begin(), vf.scan_axis_intensity.end()) -
      vf.scan_axis_intensity.begin());
  vf.z_mm = vf.scan_z_mm[best];
  vf.at_boundary = best == 0 || best + 1 == n;
  if (vf.at_boundary) vf.warnings.push_back("on-axis maximum at the edge of the scan range");

  std::vector<double> r;
  for (double x = 0.0; x <= profile_radius_um + 1e-12; x += profile_step_um) r.push_back(x);
  auto c = c0;
  const double back = (exit.z_mm - vf.z_mm) * 1e3;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double km = basis.k()[m];
    c[m] *= std::polar(1.0, km * km * back / (2.0 * k));
  }
  vf.profile = exit;
  vf.profile.r_um = r;
  vf.profile.values = basis.synthesize(c, r);
  vf.profile.z_mm = vf.z_mm;
  vf.waist_um = radius_1e2_um(vf.profile);

  // Central lobe: up to the first local minimum of the intensity.
  vf.lobe_radius_um = vf.waist_um;
  const double i0 = std::norm(vf.profile.values[0]);
  for (std::size_t j = 1; j + 1 < r.size() && r[j] < 3.0 * vf.waist_um; ++j) {
    const double a = std::norm(vf.profile.values[j - 1]), b = std::norm(vf.profile.values[j]),
                 d = std::norm(vf.profile.values[j + 1]);
    if (b <= a && b < d && b < 0.5 * i0) {
      vf.lobe_radius_um = r[j];
      break;
    }
  }
  // Intensity-weighted rms of the unwrapped phase inside the lobe.
  double sw = 0.0, s1 = 0.0, s2 = 0.0, ph = std::arg(vf.profile.values[0]);
  for (std::size_t j = 0; j < r.size() && r[j] <= vf.lobe_radius_um; ++j) {
    if (j > 0) {
      double d = std::arg(vf.profile.values[j]) - std::arg(vf.profile.values[j - 1]);
      d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
      ph += d;
    }
    const double w = std::norm(vf.profile.values[j]) * std::max(r[j], 0.5 * profile_step_um);
    sw += w;
    s1 += w * ph;
    s2 += w * ph * ph;
  }
  if (sw > 0.0) {
    const double mean = s1 / sw;
    vf.phase_rms = std::sqrt(std::max(0.0, s2 / sw - mean * mean));
  }
  return vf;
}

}  // namespace hhg
