#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hhg/coherence.hpp"
#include "hhg/errors.hpp"
#include "hhg/nonadiabatic.hpp"
#include "hhg/units.hpp"

using namespace hhg;

namespace {

constexpr double kPi = units::pi;
const double kLn2 = std::log(2.0);

// Slices of f(r, t) on a uniform time grid.
template <typename F>
PulseAssembly assembly(std::size_t n, double dt, std::size_t nr, F f) {
  PulseAssembly p;
  const auto r = uniform_radii(nr, 30.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) * dt;
    RadialField s;
    s.r_um = r;
    s.wavelength_nm = 825.0 / 45.0;
    s.slice_time_fs = t;
    for (double x : r) s.values.push_back(f(x, t));
    p.times_fs.push_back(t);
    p.slices.push_back(std::move(s));
  }
  return p;
}

// Chirped gaussian exp(-(a - i b) t^2), a = 2 ln2 / tau^2 (intensity FWHM tau).
cplx chirped(double t, double tau, double b) {
  const double a = 2.0 * kLn2 / (tau * tau);
  return std::exp(cplx(-a, b) * t * t);
}

// Spectral intensity FWHM (rad/fs) of the same pulse.
double chirped_width(double tau, double b) {
  const double a = 2.0 * kLn2 / (tau * tau);
  return 2.0 * std::sqrt(2.0 * kLn2 * (a * a + b * b) / a);
}

double to_angstrom(double dw_rad_fs, double lambda_nm) {
  const double l = lambda_nm * 1e-9;
  return l * l * dw_rad_fs * 1e15 / (2.0 * kPi * units::c_si) * 1e10;
}

}  // namespace

TEST_CASE("fwhm helper") {
  std::vector<double> x, y;
  for (int i = -300; i <= 300; ++i) {
    x.push_back(0.1 * i);
    y.push_back(std::exp(-4.0 * kLn2 * std::pow(0.1 * i / 7.0, 2)));
  }
  CHECK(fwhm(x, y) == doctest::Approx(7.0).epsilon(1e-3));
  // a second, smaller peak elsewhere does not count
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += 0.8 * std::exp(-std::pow((x[i] - 20.0) / 0.5, 2));
  CHECK(fwhm(x, y) == doctest::Approx(7.0).epsilon(1e-3));
  CHECK(fwhm(x, std::vector<double>(x.size(), 0.0)) == 0.0);
  CHECK_THROWS_AS(fwhm(x, {1.0}), ConfigError);
}

TEST_CASE("assembly validation") {
  auto p = assembly(20, 1.0, 8, [](double, double) { return cplx(1.0); });
  CHECK_NOTHROW(p.validate());
  CHECK(p.uniform());
  std::swap(p.times_fs[3], p.times_fs[4]);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  std::swap(p.times_fs[3], p.times_fs[4]);
  p.slices[5].wavelength_nm = 20.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("temporal profile") {
  SUBCASE("square envelope gives a constant profile") {
    const auto p = assembly(32, 2.0, 16, [](double r, double) { return cplx(std::exp(-r * r / 50.0)); });
    const auto t = temporal_profile(p);
    for (double v : t.power) CHECK(v == doctest::Approx(t.power.front()).epsilon(1e-12));
  }
  SUBCASE("gaussian power envelope") {
    const auto p = assembly(201, 0.5, 8, [](double, double t) { return chirped(t, 20.0, 0.0); });
    const auto t = temporal_profile(p);
    CHECK(t.fwhm_fs == doctest::Approx(20.0).epsilon(1e-3));
    CHECK(t.peak_time_fs == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("too few slices") {
    const auto p = assembly(8, 1.0, 8, [](double, double) { return cplx(1.0); });
    CHECK_THROWS_AS(temporal_profile(p), ConfigError);
  }
}

TEST_CASE("spectrum: chirped gaussian width and Parseval") {
  const double tau = 30.0, b = 0.004;
  const auto p = assembly(512, 0.5, 12, [&](double r, double t) {
    return std::exp(-r * r / 200.0) * chirped(t, tau, b);
  });
  const auto s = spectral_profile(p);
  const double lambda = 825.0 / 45.0;
  CHECK(s.fwhm_angstrom == doctest::Approx(to_angstrom(chirped_width(tau, b), lambda)).epsilon(0.01));
  CHECK(std::abs(s.spectral_energy / s.time_energy - 1.0) < 0.01);
  for (double v : s.intensity) CHECK(v >= 0.0);
  CHECK(std::abs(s.centroid_angstrom) < 1e-3);

  SpectralOptions tl;
  tl.zero_phase = true;
  const auto z = spectral_profile(p, tl);
  CHECK(z.fwhm_angstrom == doctest::Approx(to_angstrom(chirped_width(tau, 0.0), lambda)).epsilon(0.01));
  CHECK(z.fwhm_angstrom < s.fwhm_angstrom);

  auto bad = p;
  bad.times_fs.back() += 0.3;
  for (std::size_t k = 0; k < bad.size(); ++k) bad.slices[k].slice_time_fs = bad.times_fs[k];
  CHECK_THROWS_AS(spectral_profile(bad), ConfigError);
}

TEST_CASE("spectrum: a carrier offset moves the line") {
  // exp(-i dw t) with exp(-i w t) carriers is a blue shift of dw
  const double dw = 0.05;  // rad/fs
  const auto p = assembly(512, 0.5, 8, [&](double, double t) {
    return chirped(t, 40.0, 0.0) * std::polar(1.0, -dw * t);
  });
  const auto s = spectral_profile(p);
  const double lambda = 825.0 / 45.0;
  CHECK(std::abs(s.centroid_angstrom) == doctest::Approx(to_angstrom(dw, lambda)).epsilon(0.02));
  CHECK(s.centroid_ev > 0.0);
}

TEST_CASE("degree of coherence") {
  SUBCASE("separable field is fully coherent") {
    const auto p = assembly(64, 1.0, 20, [](double r, double t) {
      return std::exp(-r * r / 300.0) * chirped(t, 20.0, 0.01) * std::polar(1.0, 0.02 * r * r);
    });
    const auto c = coherence_degree(p, 0.0);
    for (double g : c.gamma) CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("linear phase drift: closed-form sum") {
    // E(r_ref) = 1, E(r) = exp(i phi(r) k) over k = 0..N-1
    const std::size_t n = 40;
    const auto p = assembly(n, 1.0, 20, [&](double r, double t) {
      return std::polar(1.0, 0.01 * r * (t + 0.5 * (n - 1)));
    });
    const auto c = coherence_degree(p, 0.0);
    CHECK(c.gamma.front() == 1.0);
    for (std::size_t j = 1; j < c.r_um.size(); ++j) {
      const double phi = 0.01 * c.r_um[j];
      const double expect = std::abs(std::sin(n * phi / 2.0) / (n * std::sin(phi / 2.0)));
      CHECK(c.gamma[j] == doctest::Approx(expect).epsilon(1e-9));
    }
  }
  SUBCASE("random fields stay within [0, 1] and hit 1 at the reference") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    const auto p = assembly(50, 1.0, 30, [&](double, double) { return cplx(nd(rng), nd(rng)); });
    const auto c = coherence_degree(p, 12.0);
    std::size_t ref = 0;
    for (std::size_t j = 0; j < c.r_um.size(); ++j)
      if (std::abs(c.r_um[j] - 12.0) < std::abs(c.r_um[ref] - 12.0)) ref = j;
    for (std::size_t j = 0; j < c.gamma.size(); ++j) {
      CHECK(c.gamma[j] >= 0.0);
      CHECK(c.gamma[j] <= 1.0);
    }
    CHECK(c.gamma[ref] == 1.0);
  }
  SUBCASE("dark reference") {
    const auto p = assembly(20, 1.0, 8, [](double r, double) { return cplx(r); });
    CHECK_THROWS_AS(coherence_degree(p, 0.0), DomainError);
  }
}

TEST_CASE("compression") {
  SUBCASE("transform-limited input is unchanged") {
    std::vector<double> t;
    std::vector<cplx> x;
    for (int k = -256; k < 256; ++k) {
      t.push_back(0.25 * k);
      x.push_back(chirped(0.25 * k, 8.0, 0.0));
    }
    const auto c = compress_series(t, x);
    CHECK(c.compressed.fwhm_fs == doctest::Approx(c.before.fwhm_fs).epsilon(0.02));
    CHECK(std::abs(c.quadratic_fs2) < 1e-6);
  }
  SUBCASE("chirped gaussian returns to its transform limit") {
    const double tau = 8.0, b = 0.05;
    std::vector<double> t;
    std::vector<cplx> x;
    for (int k = -512; k < 512; ++k) {
      t.push_back(0.25 * k);
      x.push_back(chirped(0.25 * k, tau, b));
    }
    const auto c = compress_series(t, x, 0.01);
    const double a = 2.0 * kLn2 / (tau * tau);
    // spectral field of exp(-(a - ib)t^2) carries phase b w^2 / (4 (a^2 + b^2))
    CHECK(std::abs(c.quadratic_fs2) == doctest::Approx(b / (4.0 * (a * a + b * b))).epsilon(0.01));
    // transform limit of that spectrum: tau_tl = tau a / sqrt(a^2 + b^2)
    const double tl = tau * a / std::sqrt(a * a + b * b);
    CHECK(c.transform_limited.fwhm_fs == doctest::Approx(tl).epsilon(0.01));
    CHECK(c.compressed.fwhm_fs == doctest::Approx(tl).epsilon(0.02));
    CHECK(c.compressed.fwhm_fs <= c.before.fwhm_fs);
    CHECK(c.compressed.fwhm_fs >= 0.95 * c.transform_limited.fwhm_fs);
  }
  SUBCASE("assembly with a radius-dependent chirp") {
    const auto p = assembly(256, 0.5, 16, [](double r, double t) {
      return std::exp(-r * r / 200.0) * chirped(t, 20.0, 0.01 + 1e-5 * r * r);
    });
    const auto c = compress_pulse(p);
    CHECK(c.compressed.fwhm_fs <= c.before.fwhm_fs);
    CHECK(c.compressed.fwhm_fs >= 0.95 * c.transform_limited.fwhm_fs);
    CHECK(c.fitted_bins > 3);
  }
  SUBCASE("degenerate spectrum") {
    std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    std::vector<cplx> x(4, cplx(0.0));
    CHECK_THROWS_AS(compress_series(t, x), FitError);
  }
}

TEST_CASE("quadratic fit") {
  std::vector<double> x, y, w;
  for (int i = -20; i <= 20; ++i) {
    x.push_back(0.1 * i);
    y.push_back(1.5 - 0.3 * x.back() + 2.25 * x.back() * x.back());
    w.push_back(1.0 + i * i);
  }
  const auto c = quadratic_fit(x, y, w);
  CHECK(c[0] == doctest::Approx(1.5));
  CHECK(c[1] == doctest::Approx(-0.3));
  CHECK(c[2] == doctest::Approx(2.25));
  CHECK_THROWS_AS(quadratic_fit({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), FitError);
}

TEST_CASE("phase modulation model") {
  PhaseModulationModel m;
  m.i0_wcm2 = 6e14;
  m.tau_fwhm_fs = 150.0;
  m.harmonic_wavelength_nm = 825.0 / 45.0;
  SUBCASE("no slope, no modulation") {
    for (double t = -200.0; t <= 200.0; t += 10.0) {
      CHECK(m.delta_phase(t) == 0.0);
      CHECK(m.delta_omega(t) == 0.0);
    }
    CHECK(m.delta_lambda_ext_angstrom() == 0.0);
  }
  m.eta = 25e-14;
  SUBCASE("odd frequency sweep") {
    for (double s = 1.0; s < 300.0; s *= 1.7) CHECK(m.delta_omega(s) == doctest::Approx(-m.delta_omega(-s)));
    CHECK(m.delta_omega(0.0) == doctest::Approx(0.0).scale(1e-6));
  }
  SUBCASE("extremes at the inflection points") {
    // brute-force the largest frequency excursion of eta dI/dt
    double best = 0.0, tbest = 0.0;
    for (double t = 0.0; t < 300.0; t += 0.01) {
      const double h = 1e-3;
      const double dw = m.eta * (m.intensity(t + h) - m.intensity(t - h)) / (2.0 * h);
      if (std::abs(dw) > best) {
        best = std::abs(dw);
        tbest = t;
      }
    }
    CHECK(m.inflection_time_fs() == doctest::Approx(tbest).epsilon(1e-3));
    CHECK(std::abs(m.delta_omega(tbest)) == doctest::Approx(best).epsilon(1e-6));
    const double dl = to_angstrom(best, m.harmonic_wavelength_nm);
    CHECK(m.delta_lambda_ext_angstrom() == doctest::Approx(dl).epsilon(1e-4));
    CHECK(m.lambda_coefficient() > 1.6e-2);
    CHECK(m.lambda_coefficient() < 1.7e-2);
  }
  CHECK(spherical_wave_coefficient(825.0 / 45.0, 3.8) == doctest::Approx(0.0451).epsilon(0.002));
  CHECK_THROWS_AS(spherical_wave_coefficient(18.0, 0.0), DomainError);
}

TEST_CASE("geometric phase terms") {
  FocusGeometry g;
  CHECK(g.gouy_phase(2.5, 45) == doctest::Approx(-45.0 * kPi / 4.0));
  CHECK(g.curvature_coefficient(3.8, 45) == doctest::Approx(0.032).epsilon(0.02));

  DipoleTable flat;
  flat.order = 45;
  flat.atom_id = "neon";
  flat.wavelength_nm = 825.0;
  for (int i = 0; i <= 10; ++i) {
    flat.intensity.push_back(i * 1e14);
    flat.amplitude.push_back(1.0);
    flat.phase.push_back(0.0);
    flat.gamma.push_back(0.0);
  }
  const auto map = polarization_phase_map(g, flat, 6e14, {-2.5, 0.0, 2.5}, {0.0, 10.0});
  CHECK(map.total[0][2] == doctest::Approx(-45.0 * kPi / 4.0));
  CHECK(map.total[0][0] == doctest::Approx(45.0 * kPi / 4.0));
  CHECK(map.dipole[1][1] == 0.0);
}

TEST_CASE("drive chirp for a 32 nm bandwidth") {
  const double dw = 2.0 * kPi * units::c_si * 32e-9 / (825e-9 * 825e-9) * 1e-15;  // rad/fs
  const double b = reference_drive_chirp();
  CHECK(chirped_width(150.0, b) == doctest::Approx(dw).epsilon(1e-6));
}

TEST_CASE("harmonic window") {
  WindowSpec w;
  CHECK(w(0.0) == 1.0);
  CHECK(w(1.0) == doctest::Approx(0.5));
  CHECK(w(-1.0) == doctest::Approx(0.5));
  CHECK(w(2.0) < 1e-6);
  CHECK_NOTHROW(w.validate());
  w.full_width_omega = 4.0;
  CHECK_THROWS(w.validate());
  w.full_width_omega = 0.0;
  CHECK_THROWS(w.validate());
}
