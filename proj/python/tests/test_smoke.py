import math
import pathlib

import numpy as np
import pytest

import solmz

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_feshbach_zero_crossing():
    a = solmz.scattering_length(165.75 * solmz.gauss)
    assert abs(a / solmz.a0) < 0.1
    B = solmz.field_for_scattering_length(-30 * solmz.a0)
    assert B / solmz.gauss == pytest.approx(166.52896610169492, rel=1e-9)
    with pytest.raises(solmz.Error):
        solmz.scattering_length(155.041 * solmz.gauss)


def test_axial_frequency_and_alpha():
    w2 = solmz.axial_frequency_squared(-103e-3 * solmz.gauss / 1e-6)
    assert w2 == pytest.approx(-451.6438871340327, rel=1e-6)
    alpha = solmz.interaction_parameter(1e4, -30 * solmz.a0, solmz.mass_rb85, 2 * math.pi * 70)
    assert alpha == pytest.approx(-12.173968031797017, rel=1e-9)


def test_variational_saddle():
    alpha = solmz.interaction_parameter(1.5e4, -30 * solmz.a0, solmz.mass_rb85, 2 * math.pi * 70)
    p = solmz.find_stationary_point(alpha, -1 / 4900)
    assert p["kind"] == "saddle"
    assert p["gamma_z"] == pytest.approx(35.48608795538377, rel=1e-7)
    g = solmz.variational_gradient(alpha, -1 / 4900, p["gamma_rho"], p["gamma_z"])
    assert math.hypot(*g) < 1e-8


def test_matched_soliton_keeps_width():
    grid = solmz.Grid(2048, 400e-6)
    atoms = solmz.Atoms()
    s0 = solmz.sech_state(grid, 1.2854025190330864e-6, 0.0, 1e4)
    s = solmz.evolve(s0, grid, atoms, solmz.Potential(), -2.5 * solmz.a0, 5e-3)
    assert solmz.norm(s, grid) == pytest.approx(1.0, abs=1e-10)
    assert solmz.rms_width(s, grid) == pytest.approx(solmz.rms_width(s0, grid), rel=1e-3)
    amps = s.amplitudes
    assert amps.dtype == np.complex128 and amps.shape == (2048,)
    s.amplitudes = amps * np.exp(1j * 0.3)
    assert solmz.norm(s, grid) == pytest.approx(1.0, abs=1e-10)


def test_fringe_scan_and_fit():
    grid = solmz.Grid(1024, 400e-6)
    s = solmz.gaussian_state(grid, 5e-6, 0.0, 1e4)
    phases = [2 * math.pi * i / 8 for i in range(8)]
    n = solmz.fringe_scan(s, grid, solmz.Atoms(), solmz.Potential(acceleration=0.05), 0.0, 1e-3, phases)
    fit = solmz.fit_fringe(phases, n)
    assert fit["V"] == pytest.approx(1.0, abs=1e-6)
    k = 2 * math.pi / 780e-9
    expect = solmz.analytic_phase(k, 0.05, 1e-3)
    assert math.remainder(fit["Phi"] - expect, 2 * math.pi) == pytest.approx(0.0, abs=1e-6)


def test_fitters():
    x = np.linspace(0, 0.09, 10)
    f = solmz.fit_parabola(x, 1e-6 + 0.5 * 7e-3 * x**2)
    assert f["width_acceleration"] == pytest.approx(7e-3, rel=1e-9)
    T = np.array([1, 2, 3, 5, 8]) * 1e-3
    d = solmz.fit_gaussian_decay(T, 0.9 * np.exp(-((T / 4e-3) ** 2)))
    assert d["tau_g"] == pytest.approx(4e-3, rel=1e-8)
    with pytest.raises(solmz.FitError):
        solmz.fit_parabola([1, 1, 1], [1, 2, 3])


def test_commands(tmp_path):
    assert "expand" in solmz.command_names()
    dump = solmz.dry_run("expand", str(SCENARIOS / "guided_expansion.ini"))
    assert "hold_ms = 90" in dump
    with pytest.raises(solmz.ConfigError):
        solmz.dry_run("expand", set={"grid.bogus": "1"})
    r = solmz.run_command("fieldmap", str(SCENARIOS / "fieldmap_synthetic.ini"), out=str(tmp_path), seed=5)
    kv = solmz.parse_report(r["report"])
    assert abs(float(kv["curvature_mg_mm2"]) + 103) < 5 * float(kv["curvature_err_mg_mm2"])
    again = solmz.run_command("fieldmap", str(SCENARIOS / "fieldmap_synthetic.ini"), out=str(tmp_path / "b"), seed=5)
    assert (tmp_path / "rf_samples.csv").read_bytes() == (tmp_path / "b" / "rf_samples.csv").read_bytes()
    assert again["report"] == r["report"]
