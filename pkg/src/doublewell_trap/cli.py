"""``trap``: command-line front end producing deterministic CSV datasets.

Usage::

    trap <subcommand> [--config PATH] [--out PATH] [key=value ...]

Subcommands: ``potential``, ``transition``, ``sweep``, ``tunneling``,
``evolve``, ``figure N`` (N in 2, 3, 4, 6, 7).  Configuration files hold one
``dotted.key = value`` per line (``#`` starts a comment); command-line
overrides use the same keys.  Unknown keys are rejected.

Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .eigensolver import Grid1D, quartic_spectrum
from .electrostatics import (
    TrapGeometry,
    VoltageSet,
    axial_potential,
    expansion_integrals,
    quartic_coefficients,
    quartic_fit,
    sweep_v3,
    transition_voltage,
)
from .errors import ConfigurationError, DomainError, NumericalError, TrapError
from .tunneling import Regime, rabi_oscillation, tunneling
from .units import CONSTANTS, dimensionless_barrier, joule_to_ev, time_scale
from .wells import DoubleWellShape, classical_axial_frequency

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

# key -> (type, default); None defaults are resolved from other settings
SCHEMA = {
    "geometry.r1_m": (float, 100e-6),
    "geometry.r2_tilde": (float, 4.45),
    "geometry.zc_tilde": (float, 5.6),
    "voltages.v1_V": (float, -12.8),
    "voltages.v2_V": (float, -11.4),
    "voltages.v3_V": (float, -12.8013),
    "solver.half_width": (float, 2.0),
    "solver.points": (int, 4001),
    "potential.samples": (int, 501),
    "sweep.v3.start_V": (float, None),
    "sweep.v3.stop_V": (float, None),
    "sweep.v3.count": (int, 61),
    "sweep.v3.scale": (str, "linear"),
    "sweep.eb.start_eV": (float, 1e-10),
    "sweep.eb.stop_eV": (float, 3e-7),
    "sweep.eb.count": (int, 41),
    "sweep.eb.scale": (str, "log"),
    "tunneling.L_m": (list, [5e-6, 10e-6, 20e-6]),
    "tunneling.Eb_eV": (float, None),
    "evolve.eb_tilde": (float, 157.4),
    "evolve.L_m": (float, 10e-6),
    "evolve.periods": (float, 1.0),
    "evolve.duration_s": (float, None),
    "evolve.steps": (int, 2000),
    "evolve.rows": (int, 201),
    "evolve.half_width": (float, 1.25),
    "evolve.points": (int, 501),
    "evolve.snapshots": (int, 5),
    "figure.fig2_offset_V": (float, 0.05),
    "figure.fig6.start": (float, 10.0),
    "figure.fig6.stop": (float, 1000.0),
    "figure.fig6.count": (int, 61),
}


def _parse_value(key, raw):
    kind = SCHEMA[key][0]
    text = raw.strip()
    if text.lower() in ("none", ""):
        return None
    try:
        if kind is list:
            return [float(x) for x in text.strip("[]").split(",") if x.strip()]
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        return text.strip("\"'")
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None


def _apply(config, key, raw, origin):
    if key not in SCHEMA:
        raise ConfigurationError(f"{origin}: unknown key {key!r}")
    config[key] = _parse_value(key, raw)


def load_config(path=None, overrides=()):
    """Resolve defaults, then the config file, then ``key=value`` overrides."""
    config = {k: v for k, (_, v) in SCHEMA.items()}
    if path is not None:
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        for n, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{n}: expected 'key = value'")
            key, raw = line.split("=", 1)
            _apply(config, key.strip(), raw, f"{path}:{n}")
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        _apply(config, key.strip(), raw, "override")
    return config


@dataclass(frozen=True)
class Scenario:
    geometry: TrapGeometry
    voltages: VoltageSet
    grid: Grid1D
    config: dict

    @classmethod
    def from_config(cls, config):
        def build(prefix, factory, **fields):
            try:
                return factory(**{name: config[key] for name, key in fields.items()})
            except (DomainError, TypeError) as exc:
                raise ConfigurationError(f"{prefix}: {exc}") from None

        geometry = build("geometry", TrapGeometry, r1="geometry.r1_m",
                         r2_tilde="geometry.r2_tilde", zc_tilde="geometry.zc_tilde")
        voltages = build("voltages", VoltageSet, v1="voltages.v1_V", v2="voltages.v2_V",
                         v3="voltages.v3_V")
        grid = build("solver", Grid1D, half_width="solver.half_width", n_points="solver.points")
        for key in ("potential.samples", "sweep.v3.count", "sweep.eb.count", "evolve.rows",
                    "evolve.steps", "figure.fig6.count"):
            if config[key] is None or config[key] < 1:
                raise ConfigurationError(f"{key}: must be a positive integer")
        for key in ("sweep.v3.scale", "sweep.eb.scale"):
            if config[key] not in ("linear", "log"):
                raise ConfigurationError(f"{key}: must be 'linear' or 'log'")
        for key in ("sweep.eb.start_eV", "sweep.eb.stop_eV", "evolve.eb_tilde", "evolve.L_m",
                    "evolve.periods", "figure.fig6.start", "figure.fig6.stop"):
            if config[key] is None or not config[key] > 0:
                raise ConfigurationError(f"{key}: must be > 0")
        if not config["tunneling.L_m"] or any(not x > 0 for x in config["tunneling.L_m"]):
            raise ConfigurationError("tunneling.L_m: need one or more positive lengths")
        for key in ("tunneling.Eb_eV", "evolve.duration_s"):
            if config[key] is not None and not config[key] > 0:
                raise ConfigurationError(f"{key}: must be > 0")
        return cls(geometry, voltages, grid, config)


def _workers():
    raw = os.environ.get("TRAP_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"TRAP_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigurationError("TRAP_THREADS must be >= 1")
    return n


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def render_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _grid(start, stop, count, scale):
    if scale == "log":
        return np.geomspace(start, stop, count)
    return np.linspace(start, stop, count)


# ---------------------------------------------------------------- commands


def potential_rows(scenario, samples=None, v3=None):
    geom = scenario.geometry
    volt = scenario.voltages if v3 is None else scenario.voltages.with_v3(v3)
    samples = samples or scenario.config["potential.samples"]
    z = np.linspace(0.05 * geom.zc_tilde, 0.95 * geom.zc_tilde, samples)
    v = axial_potential(z, geom, volt)
    u_ev = -v  # electron energy in eV is -V
    return [(zt, zt * geom.r1, vv, uu) for zt, vv, uu in zip(z, v, u_ev)]


POTENTIAL_HEADER = ("z_tilde", "z_m", "V_volts", "U_eV")


def cmd_potential(scenario):
    return render_csv(POTENTIAL_HEADER, potential_rows(scenario)), ""


def cmd_transition(scenario):
    geom, volt = scenario.geometry, scenario.voltages
    ints = expansion_integrals(geom)
    v_star = transition_voltage(geom, volt.v1, volt.v2)
    at_star = volt.with_v3(v_star)
    coeff = quartic_coefficients(geom, at_star)
    e = CONSTANTS.elementary_charge
    try:
        fit = quartic_fit(geom, at_star)
        fit_a, fit_b, fit_err = fit.a / e, fit.b / e, fit.b_err / e
    except NumericalError as exc:
        # nearly degenerate electrodes: the finite-difference check is lost in rounding
        fit_a = fit_b = fit_err = None
        fit_note = str(exc)
    lines = [
        f"a1 = {_fmt(ints.a1)}",
        f"a2 = {_fmt(ints.a2)}",
        f"b1 = {_fmt(ints.b1)}",
        f"b2 = {_fmt(ints.b2)}",
        f"V3_transition_V = {_fmt(v_star)}",
        f"V3_minus_V1_V = {_fmt(v_star - volt.v1)}",
        f"a_at_transition_eV = {_fmt(coeff.a / e)}",
    ]
    if fit_a is None:
        lines.append(f"fit_check = unavailable ({fit_note})")
    else:
        lines += [
            f"fit_a_at_transition_eV = {_fmt(fit_a)}",
            f"fit_b_at_transition_eV = {_fmt(fit_b)}",
            f"fit_b_rounding_eV = {_fmt(fit_err)}",
        ]
    report = "\n".join(lines) + "\n"
    header = ("a1", "a2", "b1", "b2", "V3_transition_V", "fit_a_eV", "fit_b_eV")
    row = (ints.a1, ints.a2, ints.b1, ints.b2, v_star, fit_a, fit_b)
    return render_csv(header, [row]), report


SWEEP_HEADER = ("V3_volts", "L_m", "Eb_eV", "regime")


def _v3_grid(scenario, start=None, stop=None, count=None):
    cfg = scenario.config
    v_star = transition_voltage(scenario.geometry, scenario.voltages.v1, scenario.voltages.v2)
    start = cfg["sweep.v3.start_V"] if start is None else start
    stop = cfg["sweep.v3.stop_V"] if stop is None else stop
    start = v_star - 0.1 if start is None else start
    stop = v_star + 0.02 if stop is None else stop
    return _grid(start, stop, count or cfg["sweep.v3.count"], cfg["sweep.v3.scale"])


def cmd_sweep(scenario):
    geom, volt = scenario.geometry, scenario.voltages
    rows = sweep_v3(geom, volt.v1, volt.v2, _v3_grid(scenario), workers=_workers())
    out = [
        (r.v3, r.well_distance, None if r.barrier_height is None else joule_to_ev(r.barrier_height),
         r.regime)
        for r in rows
    ]
    return render_csv(SWEEP_HEADER, out), ""


TUNNELING_HEADER = ("L_m", "Eb_eV", "Eb_tilde", "f", "freq_Hz", "axial_freq_Hz", "regime")


def tunneling_rows(scenario, L_values=None, eb_values=None):
    cfg = scenario.config
    L_values = L_values or cfg["tunneling.L_m"]
    if eb_values is None:
        if cfg["tunneling.Eb_eV"] is not None:
            eb_values = [cfg["tunneling.Eb_eV"]]
        else:
            eb_values = _grid(cfg["sweep.eb.start_eV"], cfg["sweep.eb.stop_eV"],
                              cfg["sweep.eb.count"], cfg["sweep.eb.scale"])
    jobs = [(L, eb) for L in L_values for eb in eb_values]

    def row(job):
        L, eb_ev = job
        E_b = eb_ev * CONSTANTS.elementary_charge
        res = tunneling(L, E_b, grid=scenario.grid)
        axial = classical_axial_frequency(DoubleWellShape(L, E_b))
        return (L, eb_ev, res.Eb_tilde, res.f_value, res.tunneling_frequency, axial,
                res.regime.value)

    workers = _workers()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, jobs))
    return [row(j) for j in jobs]


def cmd_tunneling(scenario):
    rows = tunneling_rows(scenario)
    report = []
    for L, eb, ebt, f, freq, axial, regime in rows:
        freq_txt = f"{freq:.6g} Hz" if freq is not None else "undefined"
        report.append(
            f"L={L:.6g} m  Eb={eb:.6g} eV  Eb_tilde={ebt:.6g}  f={f:.6g}  "
            f"tunneling={freq_txt}  axial={axial:.6g} Hz  [{regime}]"
        )
    return render_csv(TUNNELING_HEADER, rows), "\n".join(report) + "\n"


EVOLVE_HEADER = ("t_s", "P_left", "P_right", "P_right_twolevel")


def evolve_run(scenario):
    cfg = scenario.config
    grid = Grid1D(cfg["evolve.half_width"], cfg["evolve.points"])
    eb = cfg["evolve.eb_tilde"]
    reference = quartic_spectrum(eb, k=2)
    gap = float(reference.eigenvalues[1] - reference.eigenvalues[0])
    periods = cfg["evolve.periods"]
    L = cfg["evolve.L_m"]
    if cfg["evolve.duration_s"] is not None:
        periods = cfg["evolve.duration_s"] / time_scale(L) / (2 * np.pi / gap)
    steps = cfg["evolve.steps"]
    return rabi_oscillation(eb, periods=periods, steps_per_period=steps / periods,
                            samples=cfg["evolve.rows"] - 1, grid=grid), L


def cmd_evolve(scenario):
    run, L = evolve_run(scenario)
    seconds = time_scale(L)
    rows = [(t * seconds, 1.0 - p, p, q) for t, p, q in zip(run.times, run.p_right,
                                                             run.p_right_two_level)]
    report = (
        f"Eb_tilde = {_fmt(run.Eb_tilde)}\n"
        f"rabi_period_eigen_s = {_fmt(run.period_eigen * seconds)}\n"
        f"rabi_period_propagated_s = {_fmt(run.period_fit * seconds)}\n"
        f"relative_difference = {_fmt(run.period_relative_error)}\n"
    )
    return render_csv(EVOLVE_HEADER, rows), report


def snapshot_rows(scenario):
    """Two-level densities at evenly spaced times over one Rabi period (per metre)."""
    from .tunneling import localized_states, two_level_evolution

    cfg = scenario.config
    grid = Grid1D(cfg["evolve.half_width"], cfg["evolve.points"])
    L = cfg["evolve.L_m"]
    sol = quartic_spectrum(cfg["evolve.eb_tilde"], k=2, grid=grid)
    phi0, phi1 = sol.eigenvectors[:2]
    e0, e1 = sol.eigenvalues[:2]
    rows = []
    for t in np.linspace(0, 2 * np.pi / (e1 - e0), cfg["evolve.snapshots"]):
        rho = two_level_evolution(phi0, phi1, e0, e1, t)
        rows.extend((t * time_scale(L), z * L, r / L) for z, r in zip(grid.points, rho))
    return rows


# ----------------------------------------------------------------- figures


def _meta(scenario, figure, extra=()):
    lines = [f"tool = doublewell_trap {__version__}", f"figure = {figure}"]
    lines += [f"{k} = {_fmt(v) if not isinstance(v, list) else ','.join(_fmt(x) for x in v)}"
              for k, v in sorted(scenario.config.items())]
    lines += [f"{k} = {v}" for k, v in extra]
    return "\n".join(lines) + "\n"


def figure_files(n, scenario):
    """Mapping of file name -> contents for figure ``n``."""
    cfg = scenario.config
    geom, volt = scenario.geometry, scenario.voltages
    files = {}
    extra = []
    if n == 2:
        v_star = transition_voltage(geom, volt.v1, volt.v2)
        dv = cfg["figure.fig2_offset_V"]
        combined = []
        for label, v3 in (("below", v_star - dv), ("at", v_star), ("above", v_star + dv)):
            rows = potential_rows(scenario, v3=v3)
            files[f"fig2_{label}.csv"] = render_csv(POTENTIAL_HEADER, rows)
            combined.extend((v3,) + r for r in rows)
            extra.append((f"V3_{label}_V", _fmt(v3)))
        files["fig2.csv"] = render_csv(("V3_volts",) + POTENTIAL_HEADER, combined)
    elif n == 3:
        v3 = _v3_grid(scenario, count=121)
        rows = sweep_v3(geom, volt.v1, volt.v2, v3, workers=_workers())
        files["fig3.csv"] = render_csv(
            ("V3_volts", "L_over_r1", "L_m", "Eb_eV", "regime"),
            [(r.v3, None if r.well_distance is None else r.well_distance / geom.r1,
              r.well_distance, None if r.barrier_height is None else joule_to_ev(r.barrier_height),
              r.regime) for r in rows],
        )
    elif n == 4:
        eb = _grid(cfg["sweep.eb.start_eV"], cfg["sweep.eb.stop_eV"], cfg["sweep.eb.count"], "log")
        rows = []
        for L in cfg["tunneling.L_m"]:
            for e_ev in eb:
                E_b = e_ev * CONSTANTS.elementary_charge
                ground = quartic_spectrum(dimensionless_barrier(E_b, L), k=1,
                                          grid=scenario.grid).eigenvalues[0]
                rows.append((L, e_ev, classical_axial_frequency(DoubleWellShape(L, E_b)),
                             "CONFINED" if ground < 0 else "UNCONFINED"))
        files["fig4.csv"] = render_csv(("L_m", "Eb_eV", "axial_freq_Hz", "regime"), rows)
    elif n == 6:
        from .tunneling import tabulate_f

        grid = np.geomspace(cfg["figure.fig6.start"], cfg["figure.fig6.stop"],
                            cfg["figure.fig6.count"])
        table = tabulate_f(grid, grid=scenario.grid, workers=_workers())
        files["fig6.csv"] = render_csv(
            ("Eb_tilde", "f"),
            [(r.Eb_tilde, r.f_value) for r in table if r.regime is Regime.TUNNELING],
        )
    elif n == 7:
        rows = tunneling_rows(scenario)
        files["fig7.csv"] = render_csv(("L_m", "Eb_eV", "Eb_tilde", "freq_Hz", "regime"),
                                       [(r[0], r[1], r[2], r[4], r[6]) for r in rows])
    else:
        raise ConfigurationError(f"no figure {n}; choose from 2, 3, 4, 6, 7")
    files[f"fig{n}.meta"] = _meta(scenario, n, extra)
    return files


# -------------------------------------------------------------------- main


COMMANDS = {
    "potential": cmd_potential,
    "transition": cmd_transition,
    "sweep": cmd_sweep,
    "tunneling": cmd_tunneling,
    "evolve": cmd_evolve,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def build_parser():
    parser = _Parser(prog="trap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path)
        p.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
        if name == "evolve":
            p.add_argument("--snapshots", type=Path, help="also write density snapshots CSV")
        p.add_argument("overrides", nargs="*", metavar="key=value")
    p = sub.add_parser("figure")
    p.add_argument("number", type=int)
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("overrides", nargs="*", metavar="key=value")
    return parser


def run(argv, stdout, stderr):
    try:
        args = build_parser().parse_args(argv)
        scenario = Scenario.from_config(load_config(args.config, args.overrides))
        _workers()
    except ConfigurationError as exc:
        print(f"trap: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    try:
        if args.command == "figure":
            if args.number not in (2, 3, 4, 6, 7):
                print(f"trap: configuration error: no figure {args.number}", file=stderr)
                return EXIT_CONFIG
            for name, text in figure_files(args.number, scenario).items():
                write_atomic(args.out / name, text)
            return EXIT_OK
        table, report = COMMANDS[args.command](scenario)
        if args.command == "evolve" and args.snapshots is not None:
            write_atomic(args.snapshots,
                         render_csv(("t_s", "z_m", "density_per_m"), snapshot_rows(scenario)))
        if args.out is not None:
            write_atomic(args.out, table)
            stdout.write(report)
        else:
            stdout.write(table)
            stderr.write(report)
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"trap: configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (TrapError, ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"trap: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
