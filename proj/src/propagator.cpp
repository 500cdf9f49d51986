#include "hhg/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "hhg/errors.hpp"
#include "hhg/sfa.hpp"
#include "hhg/units.hpp"

namespace hhg {

namespace {

constexpr double kPi = units::pi;

double omega_si(double wavelength_nm) { return 2.0 * kPi * units::c_si / (wavelength_nm * 1e-9); }

// Tridiagonal system a_j x_{j-1} + b_j x_j + c_j x_{j+1} = d_j; cp is scratch.
void thomas(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<cplx>& c,
            std::vector<cplx>& d, std::vector<cplx>& cp) {
  const std::size_t n = b.size();
  cp.resize(n);
  cplx den = b[0];
  cp[0] = c[0] / den;
  d[0] /= den;
  for (std::size_t j = 1; j < n; ++j) {
    den = b[j] - a[j] * cp[j - 1];
    cp[j] = c[j] / den;
    d[j] = (d[j] - a[j] * d[j - 1]) / den;
  }
  for (std::size_t j = n - 1; j-- > 0;) d[j] -= cp[j] * d[j + 1];
}

// Crank-Nicolson stepper for dE/dz = (i/2k) L E + i kappa(r) E + S, with z
// and r in um. L is the finite-volume cylindrical Laplacian (Neumann on the
// axis, zero field one cell past the edge).
class CnStepper {
 public:
  CnStepper(const std::vector<double>& r_um, double k_per_um, const PropagationGrid& grid)
      : n_(r_um.size()), lo_(n_), di_(n_), up_(n_), absorb_(n_, 0.0), a_(n_), b_(n_), c_(n_) {
    const double h = r_um[1] - r_um[0];
    const double g = 1.0 / (2.0 * k_per_um);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == 0) {
        lo_[j] = 0.0;
        up_[j] = 4.0 / (h * h);
        di_[j] = -4.0 / (h * h);
      } else {
        const double rp = r_um[j] + 0.5 * h, rm = r_um[j] - 0.5 * h;
        const double w = r_um[j] * h * h;
        lo_[j] = rm / w;
        up_[j] = j + 1 < n_ ? rp / w : 0.0;
        di_[j] = -(rp + rm) / w;
      }
      lo_[j] *= g;
      up_[j] *= g;
      di_[j] *= g;
    }
    const double r_max = r_um.back();
    const double r_abs = r_max * (1.0 - grid.absorber_fraction);
    for (std::size_t j = 0; j < n_; ++j) {
      if (r_um[j] > r_abs && grid.absorber_fraction > 0.0) {
        const double s = (r_um[j] - r_abs) / (r_max - r_abs);
        absorb_[j] = grid.absorber_per_mm * 1e-3 * s * s;
      }
    }
  }

  // kappa0/kappa1: real dk (1/um) at the two planes; may be empty (zero).
  void step(std::vector<cplx>& e, double dz_um, const std::vector<double>& kappa0,
            const std::vector<double>& kappa1, const std::vector<cplx>* s0 = nullptr,
            const std::vector<cplx>* s1 = nullptr) {
    const cplx I(0.0, 1.0);
    const double hz = 0.5 * dz_um;
    auto &a = a_, &b = b_, &c = c_, &d = d_;
    d.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double k0 = kappa0.empty() ? 0.0 : kappa0[j];
      const double k1 = kappa1.empty() ? 0.0 : kappa1[j];
      const cplx diag0 = I * di_[j] + I * k0 - absorb_[j];
      const cplx diag1 = I * di_[j] + I * k1 - absorb_[j];
      cplx rhs = (1.0 + hz * diag0) * e[j];
      if (j > 0) rhs += hz * I * lo_[j] * e[j - 1];
      if (j + 1 < n_) rhs += hz * I * up_[j] * e[j + 1];
      if (s0 && s1) rhs += hz * ((*s0)[j] + (*s1)[j]);
      d[j] = rhs;
      a[j] = -hz * I * lo_[j];
      b[j] = 1.0 - hz * diag1;
      c[j] = -hz * I * up_[j];
    }
    thomas(a, b, c, d, cp_);
    e.swap(d);
  }

  // Dimensionless step ratio dz / (k h^2).
  static double step_ratio(double dz_um, double k_per_um, double h_um) {
    return dz_um / (k_per_um * h_um * h_um);
  }

 private:
  std::size_t n_;
  std::vector<double> lo_, di_, up_, absorb_;
  std::vector<cplx> a_, b_, c_, d_, cp_;
};

void check_step(double dz_um, double k_per_um, const std::vector<double>& r_um,
                const FocusGeometry& g) {
  const double h = r_um[1] - r_um[0];
  if (!(dz_um > 0.0)) throw ConfigError("propagation step must be positive");
  if (dz_um > 0.05 * g.rayleigh_mm() * 1e3)
    throw ConfigError("propagation step exceeds 5% of the Rayleigh range");
  if (CnStepper::step_ratio(dz_um, k_per_um, h) > 2000.0)
    throw ConfigError("step ratio dz/(k dr^2) above 2000; refine z or coarsen r");
}

void check_finite(const std::vector<cplx>& e, std::size_t plane) {
  for (const cplx& v : e)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream s;
      s << "nonfinite field at plane " << plane;
      throw BlowUpError(s.str(), plane);
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> PropagationGrid::radii(const FocusGeometry& g) const {
  validate();
  return uniform_radii(nr, r_max_w0 * g.waist_um());
}

void PropagationGrid::validate() const {
  if (nr < 16) throw ConfigError("radial grid needs at least 16 points");
  if (!(r_max_w0 > 0.5)) throw ConfigError("r_max must exceed half a waist");
  if (!(dz_jet_um > 0.0) || !(dz_out_um > 0.0)) throw ConfigError("z steps must be positive");
  if (!(absorber_fraction >= 0.0 && absorber_fraction < 0.5))
    throw ConfigError("absorber fraction must lie in [0, 0.5)");
  if (!(absorber_per_mm >= 0.0)) throw ConfigError("absorber strength must be non-negative");
}

std::vector<double> march_planes(const JetProfile& jet, const PropagationGrid& grid,
                                 double z_begin, double z_end) {
  if (!(z_end > z_begin)) throw ConfigError("march needs z_end > z_begin");
  // Split into gas / gas-free stretches and fill each uniformly.
  std::vector<double> cuts{z_begin};
  for (double c : {jet.z_begin(), jet.z_end()})
    if (c > z_begin && c < z_end) cuts.push_back(c);
  cuts.push_back(z_end);
  std::vector<double> z{z_begin};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    const double mid = 0.5 * (a + b);
    const bool gas = mid > jet.z_begin() && mid < jet.z_end();
    const double dz = (gas ? grid.dz_jet_um : grid.dz_out_um) * 1e-3;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / dz - 1e-9)));
    for (std::size_t k = 1; k <= n; ++k) z.push_back(a + (b - a) * static_cast<double>(k) / n);
  }
  return z;
}

MediumState MediumState::neutral(const JetProfile& jet, std::vector<double> z_mm,
                                 std::vector<double> r_um) {
  MediumState m;
  m.z_mm = std::move(z_mm);
  m.r_um = std::move(r_um);
  m.atoms_cm3.resize(m.z_mm.size());
  for (std::size_t p = 0; p < m.z_mm.size(); ++p) m.atoms_cm3[p] = jet_density(jet, m.z_mm[p]);
  m.integrated_rate.assign(m.z_mm.size() * m.r_um.size(), 0.0);
  return m;
}

double MediumState::ionized_fraction(std::size_t plane, std::size_t j) const {
  return -std::expm1(-integrated_rate[plane * nr() + j]);
}

double MediumState::electrons_cm3(std::size_t plane, std::size_t j) const {
  return atoms_cm3[plane] * ionized_fraction(plane, j);
}

std::size_t MediumState::plane_near(double z) const {
  std::size_t best = 0;
  for (std::size_t p = 1; p < z_mm.size(); ++p)
    if (std::abs(z_mm[p] - z) < std::abs(z_mm[best] - z)) best = p;
  return best;
}

double plasma_dephasing(double electrons_cm3, int q, double wavelength_nm) {
  if (electrons_cm3 < 0.0) throw DomainError("electron density must be non-negative");
  const double ne = electrons_cm3 * 1e6;
  const double w = omega_si(wavelength_nm);
  const double dk = -units::e_si * units::e_si * ne /
                    (2.0 * units::eps0_si * units::me_si * q * units::c_si * w);
  return dk * 1e-3;
}

double plasma_mismatch(double electrons_cm3, int q, double wavelength_nm) {
  return std::abs(q * plasma_dephasing(electrons_cm3, 1, wavelength_nm) -
                  plasma_dephasing(electrons_cm3, q, wavelength_nm));
}

std::vector<RadialField> propagate_fundamental(const FocusGeometry& g, double slice_peak,
                                               const MediumState& m, bool plasma,
                                               const PropagationGrid& grid, double slice_time_fs) {
  g.validate();
  grid.validate();
  if (m.planes() < 2 || m.nr() < 2) throw ConfigError("medium needs at least two planes and radii");
  const double k = 2.0 * kPi / (g.wavelength_nm * 1e-3);  // 1/um
  CnStepper cn(m.r_um, k, grid);

  auto kappa = [&](std::size_t p) {
    std::vector<double> kap;
    if (!plasma || m.atoms_cm3[p] <= 0.0) return kap;
    kap.resize(m.nr());
    for (std::size_t j = 0; j < m.nr(); ++j)
      kap[j] = plasma_dephasing(m.electrons_cm3(p, j), 1, g.wavelength_nm) * 1e-3;
    return kap;
  };

  std::vector<RadialField> out;
  out.reserve(m.planes());
  RadialField f = gaussian_field(g, slice_peak, m.z_mm.front(), m.r_um);
  f.slice_time_fs = slice_time_fs;
  out.push_back(f);
  std::vector<cplx> e = f.values;
  auto kap0 = kappa(0);
  for (std::size_t p = 1; p < m.planes(); ++p) {
    const double dz = (m.z_mm[p] - m.z_mm[p - 1]) * 1e3;
    check_step(dz, k, m.r_um, g);
    auto kap1 = kappa(p);
    cn.step(e, dz, kap0, kap1);
    check_finite(e, p);
    f.values = e;
    f.z_mm = m.z_mm[p];
    out.push_back(f);
    kap0 = std::move(kap1);
  }
  return out;
}

void accumulate_electrons(MediumState& m, const std::vector<RadialField>& e1,
                          const DipoleTable& table, double dt_fs) {
  if (e1.size() != m.planes()) throw ConfigError("fundamental planes do not match the medium");
  const double dt_s = dt_fs * 1e-15;
  for (std::size_t p = 0; p < m.planes(); ++p) {
    if (m.atoms_cm3[p] <= 0.0) continue;
    for (std::size_t j = 0; j < m.nr(); ++j) {
      const double I = std::norm(e1[p].values[j]);
      const double gamma = I <= table.i_min() ? 0.0 : query(table, std::min(I, table.i_max())).gamma;
      m.integrated_rate[p * m.nr() + j] += gamma * dt_s;
    }
  }
}

void accumulate_electrons(MediumState& m, const std::vector<std::vector<RadialField>>& history,
                          const DipoleTable& table, double dt_fs) {
  for (const auto& slice : history) accumulate_electrons(m, slice, table, dt_fs);
}

SourceField polarization_source(const DipoleTable& table, const std::vector<RadialField>& e1,
                                const MediumState& m, bool depletion, double extra_phase) {
  if (e1.size() != m.planes()) throw ConfigError("fundamental planes do not match the medium");
  const int q = table.order;
  SourceField s(m.planes(), std::vector<cplx>(m.nr()));
  for (std::size_t p = 0; p < m.planes(); ++p) {
    if (m.atoms_cm3[p] <= 0.0) continue;
    const double na = m.atoms_cm3[p] * 1e6;  // m^-3
    for (std::size_t j = 0; j < m.nr(); ++j) {
      const cplx e = e1[p].values[j];
      const double I = std::norm(e);
      if (I > table.i_max() * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "intensity " << I << " W/cm^2 above table range at z=" << m.z_mm[p]
            << " mm, r=" << m.r_um[j] << " um";
        throw RangeError(msg.str());
      }
      const TableSample x = query(table, std::clamp(I, table.i_min(), table.i_max()));
      double amp = 2.0 * na * x.amplitude * units::au_dipole_cm;
      if (depletion) amp *= std::exp(-m.integrated_rate[p * m.nr() + j]);
      s[p][j] = std::polar(amp, x.phase + q * std::arg(e) + extra_phase);
    }
  }
  return s;
}

RadialField propagate_harmonic(const SourceField& source, const MediumState& m,
                               const FocusGeometry& g, int q, bool plasma,
                               const PropagationGrid& grid, double slice_time_fs) {
  if (source.size() != m.planes()) throw ConfigError("source planes do not match the medium");
  const double lambda_q_nm = g.wavelength_nm / q;
  const double k = 2.0 * kPi / (lambda_q_nm * 1e-3);  // 1/um
  const double wq = q * omega_si(g.wavelength_nm);
  // dE/dz = i (q w / 2 eps0 c) P, per um
  const cplx coupling(0.0, wq / (2.0 * units::eps0_si * units::c_si) * 1e-6);
  CnStepper cn(m.r_um, k, grid);

  auto kappa = [&](std::size_t p) {
    std::vector<double> kap;
    if (!plasma || m.atoms_cm3[p] <= 0.0) return kap;
    kap.resize(m.nr());
    for (std::size_t j = 0; j < m.nr(); ++j)
      kap[j] = plasma_dephasing(m.electrons_cm3(p, j), q, g.wavelength_nm) * 1e-3;
    return kap;
  };
  auto src = [&](std::size_t p) {
    std::vector<cplx> v(m.nr());
    for (std::size_t j = 0; j < m.nr(); ++j) v[j] = coupling * source[p][j];
    return v;
  };

  std::vector<cplx> e(m.nr(), cplx(0.0));
  auto kap0 = kappa(0);
  auto s0 = src(0);
  for (std::size_t p = 1; p < m.planes(); ++p) {
    const double dz = (m.z_mm[p] - m.z_mm[p - 1]) * 1e3;
    check_step(dz, k, m.r_um, g);
    auto kap1 = kappa(p);
    auto s1 = src(p);
    cn.step(e, dz, kap0, kap1, &s0, &s1);
    check_finite(e, p);
    kap0 = std::move(kap1);
    s0 = std::move(s1);
  }
  RadialField out;
  out.r_um = m.r_um;
  out.values = std::move(e);
  out.z_mm = m.z_mm.back();
  out.wavelength_nm = lambda_q_nm;
  out.slice_time_fs = slice_time_fs;
  return out;
}

// ---------------------------------------------------------------------------

double PropagationSetup::exit_plane_mm() const {
  return std::max(exit_z_mm, jet.z_end());
}

std::vector<double> PropagationSetup::slice_times_fs() const {
  if (envelope == Envelope::square) return {0.0};
  const double span = slice_span_fwhm * fwhm_fs;
  std::vector<double> t(slices);
  for (std::size_t k = 0; k < slices; ++k)
    t[k] = -span + 2.0 * span * static_cast<double>(k) / static_cast<double>(slices - 1);
  return t;
}

double PropagationSetup::slice_intensity(double t_fs) const {
  if (envelope == Envelope::square) return peak_intensity_wcm2;
  return peak_intensity_wcm2 * std::exp(-4.0 * std::log(2.0) * t_fs * t_fs / (fwhm_fs * fwhm_fs));
}

void PropagationSetup::validate() const {
  geometry.validate();
  jet.validate();
  grid.validate();
  if (!(peak_intensity_wcm2 > 0.0)) throw ConfigError("peak intensity must be positive");
  if (!(fwhm_fs > 0.0)) throw ConfigError("pulse fwhm must be positive");
  if (order < 1 || order % 2 == 0) throw ConfigError("harmonic order must be odd");
  if (envelope == Envelope::gaussian && slices < 16) throw ConfigError("need at least 16 slices");
  if (!(slice_span_fwhm > 0.0)) throw ConfigError("slice span must be positive");
}

PulseRun run_pulse(const PropagationSetup& setup, const DipoleTable& table,
                   const SliceObserver& observer) {
  setup.validate();
  if (table.order != setup.order) throw ConfigError("dipole table order differs from the setup");
  const auto r = setup.grid.radii(setup.geometry);
  const double z0 = setup.jet.z_begin();
  const double z1 = setup.exit_plane_mm();
  PulseRun run;
  run.medium = MediumState::neutral(setup.jet, march_planes(setup.jet, setup.grid, z0, z1), r);
  run.times_fs = setup.slice_times_fs();
  const std::size_t ns = run.times_fs.size();
  run.dt_fs = ns > 1 ? run.times_fs[1] - run.times_fs[0] : 0.0;
  run.harmonic.resize(ns);
  run.fundamental_exit_peak_wcm2.resize(ns);
  run.fundamental_exit_axis_wcm2.resize(ns);
  const bool plasma_fund = setup.flags.ionization && setup.flags.defocusing;
  // Electron density couples the slices; observers also want them in order.
  const bool sequential = setup.flags.ionization || setup.flags.depletion || observer;
  std::size_t peak_slice = 0;
  for (std::size_t k = 1; k < ns; ++k)
    if (std::abs(run.times_fs[k]) < std::abs(run.times_fs[peak_slice])) peak_slice = k;

  auto one_slice = [&](std::size_t k, const MediumState& medium) {
    const double t = run.times_fs[k];
    const double drive_phase = setup.chirp_rad_per_fs2 * t * t;
    auto e1 = propagate_fundamental(setup.geometry, setup.slice_intensity(t), medium, plasma_fund,
                                    setup.grid, t);
    // Drive field ~ exp(-i(w t + b t^2)): envelope phase -b t^2, q-fold in the source.
    auto src = polarization_source(table, e1, medium, setup.flags.depletion,
                                   -setup.order * drive_phase);
    run.harmonic[k] = propagate_harmonic(src, medium, setup.geometry, setup.order,
                                         setup.flags.ionization, setup.grid, t);
    double peak = 0.0;
    for (const cplx& v : e1.back().values) peak = std::max(peak, std::norm(v));
    run.fundamental_exit_peak_wcm2[k] = peak;
    run.fundamental_exit_axis_wcm2[k] = std::norm(e1.back().values.front());
    return e1;
  };

  if (sequential) {
    for (std::size_t k = 0; k < ns; ++k) {
      auto e1 = one_slice(k, run.medium);
      if (observer) observer(k, e1);
      if (k == peak_slice) run.peak_fundamental = e1;
      // Rectangle rule: slice k contributes over [t_k, t_k + dt).
      if ((setup.flags.ionization || setup.flags.depletion) && ns > 1)
        accumulate_electrons(run.medium, e1, table, run.dt_fs);
    }
  } else {
    std::vector<std::vector<RadialField>> keep(ns);
    std::exception_ptr failure;  // exceptions must not leave the parallel region
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(ns); ++k) {
      try {
        auto e1 = one_slice(static_cast<std::size_t>(k), run.medium);
        if (static_cast<std::size_t>(k) == peak_slice) keep[k] = std::move(e1);
      } catch (...) {
#pragma omp critical(hhg_slice_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    run.peak_fundamental = std::move(keep[peak_slice]);
  }
  return run;
}

double harmonic_power_w(const RadialField& f) {
  // P = int (1/2) c eps0 |E|^2 dA, r in um
  return 0.5 * units::c_si * units::eps0_si * f.power() * 1e-12;
}

double fundamental_power_w(const FocusGeometry& g, double peak_intensity_wcm2) {
  const double w0_cm = g.waist_um() * 1e-4;
  return peak_intensity_wcm2 * kPi * w0_cm * w0_cm / 2.0;
}

std::vector<ConversionPoint> conversion_scan(const PropagationSetup& base,
                                             const std::vector<double>& jets,
                                             const std::vector<double>& intensities,
                                             const DipoleTable& table) {
  std::vector<ConversionPoint> out(jets.size() * intensities.size());
  for (double z : jets)
    if (std::abs(z) > 5.0) throw ConfigError("jet positions must lie within +-5 mm of focus");
  for (double I : intensities)
    if (I > table.i_max() * (1.0 + 1e-9))
      throw RangeError("scan intensity above the dipole table range");
  const double photon_j = units::hbar_si * base.order * omega_si(base.geometry.wavelength_nm);
  for (std::size_t a = 0; a < intensities.size(); ++a) {
    for (std::size_t b = 0; b < jets.size(); ++b) {
      PropagationSetup s = base;
      s.peak_intensity_wcm2 = intensities[a];
      s.jet.center_mm = jets[b];
      s.exit_z_mm = 0.0;
      const PulseRun run = run_pulse(s, table);
      ConversionPoint& c = out[a * jets.size() + b];
      c.z_jet_mm = jets[b];
      c.intensity_wcm2 = intensities[a];
      if (s.envelope == Envelope::square) {
        c.exit_power_w = harmonic_power_w(run.harmonic.front());
        c.efficiency = c.exit_power_w / fundamental_power_w(s.geometry, s.peak_intensity_wcm2);
      } else {
        double energy = 0.0, drive = 0.0;
        for (std::size_t k = 0; k < run.times_fs.size(); ++k) {
          energy += harmonic_power_w(run.harmonic[k]) * run.dt_fs * 1e-15;
          drive += fundamental_power_w(s.geometry, s.slice_intensity(run.times_fs[k])) *
                   run.dt_fs * 1e-15;
        }
        c.exit_power_w = energy / (s.fwhm_fs * 1e-15);
        c.photon_number = energy / photon_j;
        c.efficiency = energy / drive;
      }
    }
  }
  return out;
}

double efficiency_transition(const std::vector<double>& intensities,
                             const std::vector<double>& efficiency) {
  return half_slope_transition(intensities, efficiency);
}

CutoffCheck modified_cutoff_check(const std::vector<double>& intensities,
                                  const std::vector<double>& efficiency, const AtomModel& atom,
                                  int q, double wavelength_nm) {
  CutoffCheck c;
  c.transition_wcm2 = efficiency_transition(intensities, efficiency);
  c.coefficient = cutoff_coefficient(atom, q, wavelength_nm, c.transition_wcm2);
  return c;
}

CutoffCheck modified_cutoff_check(const DipoleTable& table, const AtomModel& atom) {
  CutoffCheck c;
  c.transition_wcm2 = transition_intensity(table);
  c.coefficient = cutoff_coefficient(atom, table.order, table.wavelength_nm, c.transition_wcm2);
  return c;
}

}  // namespace hhg
