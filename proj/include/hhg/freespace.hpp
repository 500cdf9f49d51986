#pragma once

// Free-space transport of radial fields: Fourier-Bessel (discrete Hankel)
// expansion on [0, R], exact paraxial phase per mode. Used for far fields
// and for backpropagation to the virtual source.

#include <string>
#include <vector>

#include "hhg/beam.hpp"

namespace hhg {

/// Fourier-Bessel basis J0(k_m r), k_m = j_{0,m} / R, m = 1..M.
class BesselBasis {
 public:
  BesselBasis(double radius_um, std::size_t modes);

  double radius() const { return radius_; }
  std::size_t modes() const { return k_.size(); }
  const std::vector<double>& k() const { return k_; }

  /// Expansion coefficients of a field sampled on a uniform grid from r=0.
  std::vector<cplx> analyze(const std::vector<double>& r_um, const std::vector<cplx>& f) const;
  /// Field at arbitrary radii.
  std::vector<cplx> synthesize(const std::vector<cplx>& c, const std::vector<double>& r_um) const;
  /// Field on the axis only.
  cplx on_axis(const std::vector<cplx>& c) const;
  /// 2 pi int |f|^2 r dr over [0, R] from the coefficients.
  double power(const std::vector<cplx>& c) const;

 private:
  double radius_;
  std::vector<double> k_;     // 1/um
  std::vector<double> norm_;  // R^2 J1(j_m)^2 / 2
};

struct FreeSpaceDiagnostics {
  double edge_fraction = 0.0;  // power within 5% of the outer boundary
  std::vector<std::string> warnings;
};

/// Paraxial free-space propagation over dz (mm). dz < 0 runs as
/// conjugate-propagate-conjugate. The output keeps the input r-grid.
RadialField fresnel_propagate(const RadialField& field, double dz_mm,
                              FreeSpaceDiagnostics* diagnostics = nullptr);

/// Same, evaluated on another radial grid.
RadialField fresnel_propagate(const RadialField& field, double dz_mm,
                              const std::vector<double>& r_out_um,
                              FreeSpaceDiagnostics* diagnostics = nullptr);

struct FarFieldProfile {
  std::vector<double> angle_mrad;
  std::vector<double> intensity;  // relative, peak normalized to 1
  std::vector<double> radius_um;  // angle * distance
  double distance_mm = 0.0;
  double half_angle_1e2_mrad = 0.0;        // from the global maximum outwards
  double outer_half_angle_1e2_mrad = 0.0;  // last 1/e^2 crossing
  bool annular = false;                    // on-axis value below half the peak
};

/// Fraunhofer angular distribution, half-angle = r / distance in the far zone.
FarFieldProfile far_field(const RadialField& field, double distance_mm, double max_angle_mrad = 40.0,
                          std::size_t samples = 801);

struct VirtualFocus {
  double z_mm = 0.0;
  double waist_um = 0.0;       // 1/e^2 radius of the central lobe
  double lobe_radius_um = 0.0; // first minimum (or 1/e^2 radius if none)
  double phase_rms = 0.0;      // over the central lobe, rad
  bool at_boundary = false;
  RadialField profile;         // fine-grid field at the focus plane
  std::vector<double> scan_z_mm;
  std::vector<double> scan_axis_intensity;
  std::vector<std::string> warnings;
};

/// Scan backward planes in [z_min, field.z_mm] for the maximal on-axis
/// intensity and describe the field there.
VirtualFocus virtual_focus(const RadialField& exit_field, double z_min_mm, double dz_mm = 0.01,
                           double profile_radius_um = 25.0, double profile_step_um = 0.02);

}  // namespace hhg
