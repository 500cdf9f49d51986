#pragma once

// Focusing geometry, gas jet and radial field containers for the
// cylindrically symmetric propagation. Lengths: z in mm, r in um.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hhg/waveform.hpp"

namespace hhg {

using cplx = std::complex<double>;

struct FocusGeometry {
  double confocal_mm = 5.0;
  double wavelength_nm = 825.0;
  double focus_z_mm = 0.0;

  double waist_um() const;        // sqrt(b lambda / 2 pi)
  double rayleigh_mm() const { return 0.5 * confocal_mm; }
  double radius_um(double z_mm) const;  // 1/e^2 field radius w(z)
  /// On-axis Gouy phase of order q: -q arctan(2z/b).
  double gouy_phase(double z_mm, int q = 1) const;
  /// Radial phase coefficient q (2z/b) / w(z)^2 in rad/um^2.
  double curvature_coefficient(double z_mm, int q = 1) const;
  void validate() const;
};

/// Truncated Lorentzian gas jet.
struct JetProfile {
  double center_mm = 0.0;
  double fwhm_mm = 0.8;
  double truncation_halfwidth_mm = 0.8;
  double peak_pressure_torr = 15.0;
  double temperature_k = 293.0;
  AtomModel atom = AtomModel::neon();

  double z_begin() const { return center_mm - truncation_halfwidth_mm; }
  double z_end() const { return center_mm + truncation_halfwidth_mm; }
  double peak_density_cm3() const;
  void validate() const;
};

/// Atoms per cm^3 at position z (0 outside the truncation).
double jet_density(const JetProfile& jet, double z_mm);

/// Complex envelope on a radial grid. Fundamental fields are scaled so that
/// |E|^2 is the local intensity in W/cm^2; harmonic fields are in V/m.
struct RadialField {
  std::vector<double> r_um;
  std::vector<cplx> values;
  double z_mm = 0.0;
  double wavelength_nm = 0.0;
  double slice_time_fs = 0.0;

  std::size_t size() const { return r_um.size(); }
  /// Integral of |E|^2 2 pi r dr over the grid (units of |E|^2 um^2).
  double power() const;
  void validate() const;
};

/// Cylindrical quadrature weights w_j such that sum w_j f_j ~ int f r dr on
/// a uniform grid starting at r=0 (finite-volume cells).
std::vector<double> radial_weights(const std::vector<double>& r_um);

std::vector<double> uniform_radii(std::size_t n, double r_max_um);

/// Lowest-order Gaussian beam of order q (q=1: the fundamental) with peak
/// focal intensity `peak_intensity_wcm2`. Phase convention exp(i(kz - wt)).
cplx gaussian_reference(const FocusGeometry& geometry, double peak_intensity_wcm2, double z_mm,
                        double r_um, int q = 1);

RadialField gaussian_field(const FocusGeometry& geometry, double peak_intensity_wcm2,
                           double z_mm, const std::vector<double>& r_um);

/// 1/e^2 radius of the intensity profile (first outward crossing of the
/// global maximum times e^-2, linearly interpolated).
double radius_1e2_um(const RadialField& field);

/// Outer 1/e^2 radius: the last crossing, searching inwards from the edge.
double outer_radius_1e2_um(const RadialField& field);

/// Least-squares coefficient a of phase(r) ~ phi0 + a r^2 over the part of
/// the profile above `floor` of the peak intensity (rad/um^2).
double radial_phase_coefficient(const RadialField& field, double floor = 0.05);

// Field-plane dump ---------------------------------------------------------

inline constexpr std::uint64_t kPlaneMagic = 0x314e4c5044484848ull;  // "HHHDPLN1"
inline constexpr std::uint64_t kPlaneVersion = 1;

/// Planes share the r-grid of the first entry; values are row-major
/// [plane][r] complex pairs.
struct FieldStack {
  std::vector<double> r_um;
  std::vector<double> z_mm;
  std::vector<cplx> values;  // z.size() * r.size()
  double wavelength_nm = 0.0;
  double slice_time_fs = 0.0;
};

FieldStack make_stack(const std::vector<RadialField>& planes);
void write_stack_binary(const FieldStack& stack, std::ostream& out);
FieldStack read_stack_binary(std::istream& in);
void write_field_csv(const RadialField& field, std::ostream& out);

}  // namespace hhg
