#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "hhg/dipole_table.hpp"
#include "hhg/errors.hpp"

using namespace hhg;

namespace {

const DipoleTable& reference_table() {
  static const DipoleTable t = build_table(AtomModel::neon(), 825.0, 45, GridSpec{});
  return t;
}

DipoleTable synthetic(std::vector<double> I, double slope) {
  DipoleTable t;
  t.atom_id = "neon";
  t.order = 45;
  t.wavelength_nm = 825.0;
  t.intensity = I;
  for (double x : I) {
    t.amplitude.push_back(1.0 + x * 1e-14);
    t.phase.push_back(slope * x);
    t.gamma.push_back(0.0);
  }
  return t;
}

}  // namespace

TEST_CASE("query: node values, zero anchor, range") {
  const auto& t = reference_table();
  for (std::size_t i : {0ul, 1ul, 57ul, 133ul, t.size() - 1}) {
    const auto s = query(t, t.intensity[i]);
    CHECK(s.amplitude == t.amplitude[i]);
    CHECK(s.phase == t.phase[i]);
    CHECK(s.gamma == t.gamma[i]);
  }
  CHECK(query(t, 0.0).amplitude == 0.0);
  CHECK_THROWS_AS(query(t, -1.0), RangeError);
  CHECK_THROWS_AS(query(t, t.i_max() * 1.01), RangeError);
}

TEST_CASE("table: node recomputation is bit-identical") {
  const auto& t = reference_table();
  const std::size_t i = 77;
  const auto s = evaluate_node(AtomModel::neon(), 825.0, 45, t.intensity[i]);
  CHECK(s.amplitude == t.amplitude[i]);
  CHECK(s.gamma == t.gamma[i]);
  // stored phase is unwrapped; equal modulo 2 pi
  const double d = std::remainder(s.phase - t.phase[i], 2.0 * M_PI);
  CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("table: midpoint queries agree with direct evaluation in the cutoff region") {
  const auto& t = reference_table();
  const double tr = transition_intensity(t);
  double amax = 0.0;
  for (double a : t.amplitude) amax = std::max(amax, a);
  int checked = 0;
  for (std::size_t i = 20; i + 1 < t.size() && t.intensity[i + 1] < tr; i += 3) {
    // below ~1e-6 of the peak the phase is round-off
    if (std::min(t.amplitude[i], t.amplitude[i + 1]) < 1e-6 * amax) continue;
    const double mid = 0.5 * (t.intensity[i] + t.intensity[i + 1]);
    const auto direct = evaluate_node(AtomModel::neon(), 825.0, 45, mid);
    const auto interp = query(t, mid);
    const double d = std::remainder(direct.phase - interp.phase, 2.0 * M_PI);
    INFO("I = " << mid);
    CHECK(std::abs(d) < 0.2);
    ++checked;
  }
  CHECK(checked >= 5);
}

TEST_CASE("table: phase decreases across any 20-node cutoff window") {
  const auto& t = reference_table();
  const double tr = transition_intensity(t);
  const double lo = 0.35 * tr;  // below this |x_q| is too small to define a phase trend
  for (std::size_t i = 0; i + 20 < t.size() && t.intensity[i + 20] <= tr; ++i) {
    if (t.intensity[i] < lo) continue;
    const auto p = phase_slope(t, t.intensity[i], t.intensity[i + 20]);
    INFO("window from " << t.intensity[i]);
    CHECK(p.slope < 0.0);
  }
}

TEST_CASE("table: halving the spacing changes queries by < 1% amplitude, < 0.1 rad") {
  // Default grid against one with every interval split in two. Queries whose
  // amplitude sits at the quadrature noise floor are skipped.
  const auto& a = reference_table();
  GridSpec fine;
  fine.nodes = 2 * fine.nodes - 1;
  const auto b = build_table(AtomModel::neon(), 825.0, 45, fine);
  double amax = 0.0;
  for (double v : b.amplitude) amax = std::max(amax, v);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, a.i_max());
  int checked = 0, amp_bad = 0, phase_bad = 0;
  while (checked < 100) {
    const double I = u(rng);
    const auto x = query(a, I), y = query(b, I);
    if (y.amplitude < 1e-6 * amax) continue;
    ++checked;
    amp_bad += std::abs(x.amplitude / y.amplitude - 1.0) >= 0.01;
    phase_bad += std::abs(std::remainder(x.phase - y.phase, 2.0 * M_PI)) >= 0.1;
  }
  CHECK(amp_bad == 0);
  CHECK(phase_bad == 0);
}

TEST_CASE("table: deterministic bytes and binary round trip") {
  GridSpec g;
  g.i_max = 3e14;
  g.nodes = 24;
  const auto a = build_table(AtomModel::neon(), 825.0, 45, g);
  const auto b = build_table(AtomModel::neon(), 825.0, 45, g);
  std::ostringstream sa, sb;
  write_table_binary(a, sa);
  write_table_binary(b, sb);
  CHECK(sa.str() == sb.str());

  const std::string bytes = sa.str();
  std::uint64_t magic = 0;
  for (int i = 7; i >= 0; --i) magic = (magic << 8) | static_cast<unsigned char>(bytes[i]);
  CHECK(magic == kTableMagic);

  std::istringstream in(bytes);
  const auto c = read_table_binary(in);
  CHECK(c.intensity == a.intensity);
  CHECK(c.amplitude == a.amplitude);
  CHECK(c.phase == a.phase);
  CHECK(c.gamma == a.gamma);
  CHECK(c.order == a.order);
  CHECK(c.atom_id == a.atom_id);

  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS(read_table_binary(truncated));
}

TEST_CASE("phase slope of a synthetic linear table") {
  std::vector<double> I;
  for (int i = 0; i <= 50; ++i) I.push_back(i * 1e13);
  const auto t = synthetic(I, -2.5e-13);
  const auto p = phase_slope(t, 1e14, 4e14, SlopeRegion::plateau);
  CHECK(p.eta == doctest::Approx(2.5e-13).epsilon(1e-9));
  CHECK(p.eta_per_1e14() == doctest::Approx(25.0).epsilon(1e-9));
  CHECK(p.fit_residual < 1e-9);
  CHECK(p.nodes == 31);
}

TEST_CASE("half-slope detector on a broken power law") {
  std::vector<double> I, s;
  const double knee = 2.2e14;
  for (int i = 1; i <= 300; ++i) {
    const double x = i * 2.4e12;
    I.push_back(x);
    s.push_back(x < knee ? std::pow(x / knee, 9.0) : std::pow(x / knee, 1.0));
  }
  CHECK(half_slope_transition(I, s) == doctest::Approx(knee).epsilon(0.05));
}

TEST_CASE("transition moves up with the order") {
  GridSpec g;
  g.nodes = 120;
  const auto t61 = build_table(AtomModel::neon(), 825.0, 61, g);
  CHECK(transition_intensity(t61) > transition_intensity(reference_table()));
}
