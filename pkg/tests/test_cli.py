import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from doublewell_trap import ConfigurationError, quartic_fit
from doublewell_trap.cli import SCHEMA, Scenario, load_config, render_csv, run
from doublewell_trap.electrostatics import FIG2_GEOMETRY, VoltageSet, transition_voltage


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def column(header, rows, name, cast=float):
    i = header.index(name)
    return [cast(r[i]) if r[i] != "" else None for r in rows]


def test_defaults_match_fig2_caption():
    s = Scenario.from_config(load_config())
    assert s.geometry == FIG2_GEOMETRY
    assert s.voltages == VoltageSet(-12.8, -11.4, -12.8013)


def test_potential_rows_and_format():
    code, out, err = invoke("potential")
    assert code == 0
    header, rows = table(out)
    assert header == ["z_tilde", "z_m", "V_volts", "U_eV"]
    assert len(rows) == 501
    assert "\r" not in out and out.endswith("\n")
    z = np.array(column(header, rows, "z_tilde"))
    assert z[0] == pytest.approx(0.05 * 5.6) and z[-1] == pytest.approx(0.95 * 5.6)
    # 17 significant digits round-trip exactly
    assert all(format(float(r[2]), ".17g") == r[2] for r in rows)


def test_potential_symmetry_about_centre():
    code, out, _ = invoke("potential")
    header, rows = table(out)
    u = np.array(column(header, rows, "U_eV"))
    np.testing.assert_allclose(u, u[::-1], rtol=1e-9, atol=0)


def _emitted_quadratic(v3):
    code, out, _ = invoke("potential", f"voltages.v3_V={v3!r}", "potential.samples=2001")
    assert code == 0
    header, rows = table(out)
    z = np.array(column(header, rows, "z_tilde")) - 2.8
    u = np.array(column(header, rows, "U_eV"))
    near = np.abs(z) < 0.3
    coeffs = np.polyfit(z[near], u[near], 8)
    return coeffs[-3], coeffs[-5]


def test_potential_at_transition_is_quartic_flat():
    v_star = transition_voltage(FIG2_GEOMETRY, -12.8, -11.4)
    c2_star, c4_star = _emitted_quadratic(v_star)
    c2_off, _ = _emitted_quadratic(v_star - 0.05)
    assert abs(c2_star) < 1e-4 * abs(c2_off)
    assert c4_star > 0
    # same conclusion as quartic_fit on the library side
    fit = quartic_fit(FIG2_GEOMETRY, VoltageSet(-12.8, -11.4, v_star))
    assert abs(fit.b) < 1e-8 * fit.a


def test_transition_report():
    code, out, err = invoke("transition")
    assert code == 0
    values = dict(line.split(" = ") for line in err.strip().splitlines())
    assert abs(float(values["V3_transition_V"]) + 12.8) < 0.07
    header, rows = table(out)
    assert header[:4] == ["a1", "a2", "b1", "b2"] and len(rows) == 1


def test_transition_identical_electrode_limit():
    code, out, err = invoke("transition", "geometry.r2_tilde=1.000001")
    assert code == 0
    header, rows = table(out)
    b1, b2 = float(rows[0][2]), float(rows[0][3])
    assert b2 == pytest.approx(b1, rel=1e-4)
    assert "fit_check = unavailable" in err


def test_sweep():
    code, out, _ = invoke("sweep", "sweep.v3.count=31")
    assert code == 0
    header, rows = table(out)
    assert header == ["V3_volts", "L_m", "Eb_eV", "regime"]
    assert len(rows) == 31
    v3 = column(header, rows, "V3_volts")
    assert v3 == sorted(v3)
    double = [r for r in rows if r[3] == "double"]
    single = [r for r in rows if r[3] == "single"]
    assert double and single
    assert all(r[1] == "" and r[2] == "" for r in single)
    L = [float(r[1]) for r in double]
    eb = [float(r[2]) for r in double]
    # L and E_b shrink towards the transition (increasing V3)
    assert np.all(np.diff(L) < 0) and np.all(np.diff(eb) < 0)


def test_sweep_threads_do_not_change_output(monkeypatch):
    _, serial, _ = invoke("sweep", "sweep.v3.count=21")
    monkeypatch.setenv("TRAP_THREADS", "4")
    _, threaded, _ = invoke("sweep", "sweep.v3.count=21")
    assert threaded == serial


def test_tunneling_single_point():
    code, out, err = invoke("tunneling", "tunneling.L_m=1e-5", "tunneling.Eb_eV=6e-8")
    assert code == 0
    header, rows = table(out)
    assert header == ["L_m", "Eb_eV", "Eb_tilde", "f", "freq_Hz", "axial_freq_Hz", "regime"]
    (row,) = rows
    assert row[-1] == "TUNNELING"
    assert float(row[5]) == pytest.approx(9248716.026915688, rel=1e-12)
    assert abs(float(row[5]) / 10e6 - 1) < 0.1
    # converged value ~15 kHz; the quoted 50 kHz is not reproduced
    assert float(row[4]) == pytest.approx(14967.0, rel=1e-3)
    assert "TUNNELING" in err


def test_tunneling_grid_regimes_and_axial_slope():
    code, out, _ = invoke("tunneling")
    header, rows = table(out)
    assert len(rows) == 3 * 41
    for r in rows:
        if r[-1] == "TUNNELING":
            assert r[4] != ""
        else:
            assert r[4] == ""
    assert any(r[-1] == "NO_BOUND_PAIR" for r in rows)
    for L in (5e-6, 1e-5, 2e-5):
        sel = [r for r in rows if float(r[0]) == L]
        eb = np.log([float(r[1]) for r in sel])
        fz = np.log([float(r[5]) for r in sel])
        slope = np.polyfit(eb, fz, 1)[0]
        assert abs(slope - 0.5) < 1e-6


def test_evolve(tmp_path):
    snaps = tmp_path / "snap.csv"
    code, out, err = invoke("evolve", "--snapshots", str(snaps))
    assert code == 0
    header, rows = table(out)
    assert header == ["t_s", "P_left", "P_right", "P_right_twolevel"]
    assert len(rows) == 201
    data = np.array(rows, dtype=float)
    assert data[0, 2] > 0.99
    assert data[100, 1] > 0.99  # half period: electron in the left well
    np.testing.assert_allclose(data[:, 1] + data[:, 2], 1.0, atol=1e-6)
    assert np.max(np.abs(data[:, 2] - data[:, 3])) < 1e-2
    sh, srows = table(snaps.read_text())
    assert sh == ["t_s", "z_m", "density_per_m"]
    assert len(srows) == 5 * 501
    assert "relative_difference" in err


def test_out_file_and_report(tmp_path):
    target = tmp_path / "sub" / "pot.csv"
    code, out, err = invoke("potential", "--out", str(target), "potential.samples=11")
    assert code == 0 and out == "" and err == ""
    assert len(target.read_text().splitlines()) == 12
    assert not [p for p in target.parent.iterdir() if p.name.endswith(".tmp")]


def test_config_file(tmp_path):
    cfg = tmp_path / "trap.cfg"
    cfg.write_text("# Fig. 2 trap\ngeometry.zc_tilde = 5.5\npotential.samples = 7  # few\n\n")
    code, out, _ = invoke("potential", "--config", str(cfg))
    assert code == 0
    header, rows = table(out)
    assert len(rows) == 7
    assert float(rows[-1][0]) == pytest.approx(0.95 * 5.5)
    # command line overrides win over the file
    code, out, _ = invoke("potential", "--config", str(cfg), "potential.samples=3")
    assert len(table(out)[1]) == 3


def test_list_values():
    cfg = load_config(overrides=["tunneling.L_m=1e-6, 2e-6"])
    assert cfg["tunneling.L_m"] == [1e-6, 2e-6]


@pytest.mark.parametrize(
    "argv",
    [
        ("potential", "geometry.r1=1"),
        ("potential", "geometry.r1_m=abc"),
        ("potential", "geometry.r1_m=-1"),
        ("potential", "potential.samples=0"),
        ("potential", "noequals"),
        ("sweep", "sweep.v3.scale=cubic"),
        ("tunneling", "tunneling.L_m=-1e-6"),
        ("frobnicate",),
        ("figure", "5"),
        ("potential", "--config", "/nonexistent/trap.cfg"),
        (),
    ],
)
def test_configuration_errors(argv):
    code, out, err = invoke(*argv)
    assert code == 2
    assert "configuration error" in err


def test_bad_config_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("geometry.r1_m 1e-4\n")
    code, _, err = invoke("potential", "--config", str(cfg))
    assert code == 2 and "bad.cfg:1" in err


def test_bad_thread_env(monkeypatch):
    monkeypatch.setenv("TRAP_THREADS", "zero")
    assert invoke("potential")[0] == 2


def test_numerical_failure_exit_code():
    # no bound doublet to follow at a shallow barrier
    code, out, err = invoke("evolve", "evolve.eb_tilde=5")
    assert code == 3
    assert "numerical failure" in err


def test_schema_units_in_headers():
    for key in SCHEMA:
        assert key.count(".") >= 1


def test_render_csv_empty_fields():
    assert render_csv(("a", "b"), [(None, 1.5), ("x", 0.1)]) == "a,b\n,1.5\nx,0.10000000000000001\n"


@pytest.mark.parametrize("n", [2, 3, 4, 6, 7])
def test_figures(tmp_path, n):
    code, out, err = invoke("figure", str(n), "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / f"fig{n}.csv").exists()
    meta = (tmp_path / f"fig{n}.meta").read_text()
    assert "tool = doublewell_trap" in meta and "geometry.zc_tilde = 5.5999999999999996" in meta
    header, rows = table((tmp_path / f"fig{n}.csv").read_text())
    assert rows
    if n == 2:
        for label in ("below", "at", "above"):
            h, r = table((tmp_path / f"fig2_{label}.csv").read_text())
            assert h == ["z_tilde", "z_m", "V_volts", "U_eV"] and len(r) == 501
    if n == 6:
        assert header == ["Eb_tilde", "f"]
        f = np.array(rows, dtype=float)[:, 1]
        assert np.all(np.diff(f) < 0)
    if n == 4:
        assert header == ["L_m", "Eb_eV", "axial_freq_Hz", "regime"]


@pytest.mark.parametrize("argv", [("figure", "6"), ("tunneling",)])
def test_determinism(tmp_path, argv):
    outputs = []
    for i in range(2):
        d = tmp_path / str(i)
        d.mkdir()
        if argv[0] == "figure":
            assert invoke(*argv, "--out", str(d))[0] == 0
            outputs.append({p.name: p.read_bytes() for p in d.iterdir()})
        else:
            outputs.append(invoke(*argv)[1].encode())
    assert outputs[0] == outputs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "doublewell_trap", "potential", "potential.samples=3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "z_tilde,z_m,V_volts,U_eV"
    proc = subprocess.run(
        [sys.executable, "-m", "doublewell_trap", "potential", "nope=1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 2
