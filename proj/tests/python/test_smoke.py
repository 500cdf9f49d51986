import math

import numpy as np
import pytest

hhgsim = pytest.importorskip("hhgsim")  # built with pip install -e .

TINY = """
[run]
id = tiny
stages = table, propagate
[table]
i_max_wcm2 = 4.5e14
nodes = 80
[drive]
envelope = square
peak_intensity_wcm2 = 2.5e14
[grid]
nr = 64
dz_jet_um = 20
dz_out_um = 50
"""


def test_geometry():
    g = hhgsim.FocusGeometry()
    assert g.waist_um == pytest.approx(math.sqrt(5e3 * 0.825 / (2 * math.pi)), rel=1e-12)
    assert g.radius_um(3.8) == pytest.approx(46.6, abs=0.1)
    assert hhgsim.spherical_wave_coefficient(825.0 / 45, 3.8) == pytest.approx(0.0451, rel=2e-3)


def test_small_table():
    grid = hhgsim.GridSpec()
    grid.i_max = 3e14
    grid.nodes = 24
    t = hhgsim.build_table(hhgsim.AtomModel.neon(), 825.0, 45, grid)
    assert len(t) == 24
    assert isinstance(t.intensity, np.ndarray)
    assert np.all(np.diff(t.intensity) > 0)
    assert np.all(t.amplitude >= 0)
    s = t.query(t.intensity[5])
    assert s.amplitude == t.amplitude[5]
    with pytest.raises(hhgsim.RangeError):
        t.query(1e15)


def test_free_space_power():
    lam = 825.0 / 45
    r = hhgsim.uniform_radii(600, 40.0)
    f = hhgsim.RadialField(r, np.exp(-(r / 2.0) ** 2).astype(complex), lam)
    g = hhgsim.fresnel_propagate(f, 1.0)
    assert g.power() == pytest.approx(f.power(), rel=5e-3)
    back = hhgsim.fresnel_propagate(g, -1.0)
    assert np.max(np.abs(back.values - f.values)) < 5e-3


def test_presets_and_errors():
    ids = [p.id for p in hhgsim.presets()]
    assert "fig-dipole" in ids and len(ids) == len(set(ids))
    s = hhgsim.Scenario.parse(hhgsim.find_preset("nfprof3").text)
    assert hhgsim.Scenario.parse(s.text()) == s
    with pytest.raises(hhgsim.ConfigError):
        hhgsim.Scenario.parse("[run]\nid = x\n[jet]\npressure_torr = -3\n")
    with pytest.raises(hhgsim.NotFoundError):
        hhgsim.find_preset("fig-nothing")


def test_run_and_verify(tmp_path):
    s = hhgsim.Scenario.parse(TINY)
    m = hhgsim.run_scenario(s, out_dir=tmp_path)
    assert m.ok()
    paths = {f.path for f in m.files}
    assert {"table.csv", "exit_field.csv", "summary.csv"} <= paths
    assert m.verify(tmp_path / "tiny")
    again = hhgsim.run_scenario(s, out_dir=tmp_path)
    assert again.cache[0][1]  # table cache hit
    assert again.scenario_hash == m.scenario_hash
    assert hhgsim.sha256_hex("abc").startswith("ba7816bf")
