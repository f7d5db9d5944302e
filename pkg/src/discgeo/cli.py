"""Command-line front end.

Exit status: 0 when every check requested by the command passes, 1 when a
check fails, 2 on invalid input or an undefined result.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import sympy

from . import extremal, io, lie, models, nilgeo, symmetry, tanaka
from .vecfield import controllability_check, sample_points

DEFAULTS = {
    "system": None,
    "h1": 0.5,
    "h2": math.sqrt(3) / 2,
    "h3": 2.0,
    "start": "0,0,0",
    "horizon": math.pi,
    "grid": 201,
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "sym": "t0",
    "s_values": "0,1,3",
    "out": None,
    "format": None,
    "axes": "x,y",
    "depth": None,
    "n_points": 100,
    "fields": None,
    "ell": 1.0,
    "fixture": None,
    "g0": "fixture",
    "algebra": "disc",
    "input": None,
}

FLOAT_KEYS = {"h1", "h2", "h3", "horizon", "rel_tol", "abs_tol", "ell"}
INT_KEYS = {"grid", "depth", "n_points"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    system: str | None
    h1: float
    h2: float
    h3: float
    start: tuple[float, float, float]
    horizon: float
    grid: int
    rel_tol: float
    abs_tol: float
    sym: str
    s_values: tuple[float, ...]
    out: str | None
    format: str | None
    axes: tuple[str, str]
    depth: int | None
    n_points: int
    fields: tuple[str, ...] | None
    ell: float
    fixture: str | None
    g0: str
    algebra: str
    input: str | None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.horizon > 0:
            raise UsageError("horizon must be positive")
        if self.grid < 2:
            raise UsageError("grid must be at least 2")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise UsageError("tolerances must be positive")
        if self.format not in (None, "csv", "json", "svg"):
            raise UsageError(f"unknown format {self.format!r}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.grid)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(eval_number(v)) for v in str(text).split(",") if v.strip())


def eval_number(text) -> float:
    """Parse a number, allowing expressions such as ``pi/10`` or ``sqrt(3)/2``."""
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(sympy.sympify(str(text), locals={"pi": sympy.pi}))
    except (sympy.SympifyError, TypeError, ValueError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def read_config(path: str | None, command: str) -> dict:
    """Values from the ``[run]`` section and from a section named after the command."""
    if not path:
        return {}
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path}")
    out = {}
    for section in ("run", command):
        if cp.has_section(section):
            for k, v in cp.items(section):
                out[k.replace("-", "_")] = v.strip().strip('"')
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    conf = read_config(getattr(args, "config", None), args.command)
    values = {}
    for key, default in DEFAULTS.items():
        cli = getattr(args, key, None)
        values[key] = cli if cli is not None else conf.get(key, default)
    for key in FLOAT_KEYS:
        values[key] = eval_number(values[key])
    for key in INT_KEYS:
        if values[key] is not None:
            values[key] = int(values[key])
    start = _floats(values["start"])
    if len(start) != 3:
        raise UsageError("start needs three values x,y,theta")
    axes = tuple(a.strip() for a in str(values["axes"]).split(","))
    if len(axes) != 2 or any(a not in io.TRAJ_HEADER for a in axes):
        raise UsageError(f"axes must name two of {io.TRAJ_HEADER}")
    fields_ = values["fields"]
    return RunConfig(
        command=args.command,
        system=values["system"],
        h1=values["h1"],
        h2=values["h2"],
        h3=values["h3"],
        start=start,
        horizon=values["horizon"],
        grid=values["grid"],
        rel_tol=values["rel_tol"],
        abs_tol=values["abs_tol"],
        sym=values["sym"],
        s_values=_floats(values["s_values"]),
        out=values["out"],
        format=values["format"],
        axes=axes,
        depth=values["depth"],
        n_points=values["n_points"],
        fields=tuple(f.strip() for f in str(fields_).split(",")) if fields_ else None,
        ell=values["ell"],
        fixture=values["fixture"],
        g0=values["g0"],
        algebra=values["algebra"],
        input=values["input"],
        extra={"title": conf.get("title", "")},
    )


# --- output helpers ------------------------------------------------------------


def emit(cfg: RunConfig, text: str) -> None:
    """Write ``text`` to ``--out`` or stdout."""
    if cfg.out:
        io.write_text(cfg.out, text)
        print(f"wrote {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def emit_curves(cfg: RunConfig, csv_text: str, summary: dict) -> None:
    """CSV (and SVG derived from it) plus a JSON summary on stdout."""
    fmt = cfg.format or "csv"
    if fmt == "json":
        emit(cfg, io.json_report(summary))
        return
    if fmt == "svg":
        svg = io.svg_from_csv(csv_text, cfg.axes, cfg.extra.get("title", ""))
        if cfg.out:
            out = Path(cfg.out)
            io.write_text(out.with_suffix(".csv"), csv_text)
            io.write_text(out, svg)
            print(f"wrote {out.with_suffix('.csv')} and {out}", file=sys.stderr)
        else:
            sys.stdout.write(svg)
        sys.stderr.write(io.json_report(summary))
        return
    emit(cfg, csv_text)
    if cfg.out:
        sys.stdout.write(io.json_report(summary))


# --- commands ------------------------------------------------------------------


def cmd_controllability(cfg: RunConfig) -> int:
    """Rank test of iterated brackets at random points."""
    name = cfg.system or "disc4d"
    S = models.get_system(name, cfg.ell)
    gens = list(S.generators)
    if cfg.fields:
        lookup = {F.label: F for F in S.full_frame}
        missing = [f for f in cfg.fields if f not in lookup]
        if missing:
            raise UsageError(f"unknown fields {missing}; available {sorted(lookup)}")
        gens = [lookup[f] for f in cfg.fields]
    depth = cfg.depth if cfg.depth is not None else S.chart_dim - 2
    pts = sample_points(S.chart_dim, cfg.n_points)
    rep = controllability_check(gens, pts, max(depth, 1))
    payload = {"system": name, "depth": max(depth, 1), "summary": rep.summary(), **rep.to_dict()}
    if cfg.format == "json":
        emit(cfg, io.json_report(payload))
    else:
        verdict = "controllable" if rep.controllable else "not controllable"
        emit(cfg, f"{name}: {rep.summary()} ({verdict})\n")
    return 0 if rep.controllable else 1


def _initial_state(cfg: RunConfig) -> np.ndarray:
    x, y, th = cfg.start
    return extremal.make_state(x, y, th, cfg.h1, cfg.h2, cfg.h3)


def cmd_extremal(cfg: RunConfig) -> int:
    """Integrate a normal extremal and export it."""
    system = cfg.system or extremal.ORIGINAL
    if system not in extremal.RHS:
        raise UsageError(f"extremal system must be one of {sorted(extremal.RHS)}")
    traj = extremal.integrate_rkf45(system, _initial_state(cfg), cfg.horizon, cfg.rel_tol, cfg.abs_tol, grid=cfg.grid)
    d = traj.diagnostics
    summary = {"command": "extremal", "system": system, "end_state": traj.end, **d.to_dict()}
    emit_curves(cfg, io.trajectory_csv(traj.times, traj.states), summary)
    ok = d.hamiltonian_drift <= 1e-8 and d.casimir_drift <= 1e-8
    return 0 if ok else 1


def compare_curves(h: Sequence[float], horizon: float, grid: int, rel_tol: float = 1e-10, abs_tol: float = 1e-12):
    """Numeric original extremal, closed-form nilpotent one, and the sup-norm gap in (x, y, theta)."""
    s0 = extremal.make_state(0, 0, 0, *h)
    traj = extremal.integrate_rkf45(extremal.ORIGINAL, s0, horizon, rel_tol, abs_tol, grid=grid)
    C = nilgeo.constants_from_initial(*h)
    closed = nilgeo.eval_state(C, traj.times)
    gap = float(np.max(np.abs(traj.states[:, :3] - closed[:, :3])))
    return traj, closed, gap


def cmd_compare(cfg: RunConfig) -> int:
    """Overlay the disc extremal and its nilpotent approximation."""
    traj, closed, gap = compare_curves((cfg.h1, cfg.h2, cfg.h3), cfg.horizon, cfg.grid, cfg.rel_tol, cfg.abs_tol)
    text = io.multi_curve_csv([("original", None, traj.times, traj.states), ("nilpotent", None, traj.times, closed)])
    emit_curves(cfg, text, {"command": "compare", "sup_gap": gap, "horizon": cfg.horizon})
    print(f"sup-norm gap {gap:.6g}", file=sys.stderr)
    return 0


def cmd_cutpoint(cfg: RunConfig) -> int:
    """Cut time and cut point of a Heisenberg geodesic."""
    C = nilgeo.constants_from_initial(cfg.h1, cfg.h2, cfg.h3)
    try:
        t, p = nilgeo.cut_time(C), nilgeo.cut_point(C)
    except nilgeo.DegenerateGeodesic as exc:
        sys.stdout.write(io.json_report({"command": "cutpoint", "error": str(exc), "constants": C.__dict__}))
        return 2
    reached = np.column_stack(nilgeo.eval_horizontal(C, t))[0]
    ok = bool(np.max(np.abs(reached - p)) <= 1e-10)
    payload = {"command": "cutpoint", "constants": C.__dict__, "cut_time": t, "cut_point": p, "check": ok}
    emit(cfg, io.json_report(payload))
    return 0 if ok else 1


def orbit_curves(cfg: RunConfig):
    C = nilgeo.constants_from_initial(cfg.h1, cfg.h2, cfg.h3)
    curves = symmetry.orbit_of_geodesic(C, cfg.sym, cfg.s_values, cfg.times)
    rows = []
    for k, c in enumerate(curves):
        states = c.points
        if cfg.sym == "t0":
            Cs = symmetry.t0_image_constants(C, c.s)
            states = np.column_stack([c.points, np.column_stack(nilgeo.eval_vertical(Cs, c.times))])
        rows.append((f"s={c.s:g}", c.s, c.times, states))
    return C, curves, rows


def cmd_orbit(cfg: RunConfig) -> int:
    """Images of a geodesic under a symmetry flow."""
    C, curves, rows = orbit_curves(cfg)
    summary = {
        "command": "orbit",
        "symmetry": cfg.sym,
        "constants": C.__dict__,
        "curves": [{"s": c.s, "samples": len(c.times), "truncated": c.truncated} for c in curves],
    }
    emit_curves(cfg, io.multi_curve_csv(rows), summary)
    return 0


def cmd_tanaka(cfg: RunConfig) -> int:
    """Algebraic prolongation of a graded algebra."""
    depth = 2 if cfg.depth is None else cfg.depth
    if cfg.g0 == "gl2":
        G = tanaka.with_degree_zero(tanaka.heisenberg_m(), tanaka.GL2)
    elif cfg.fixture:
        A = lie.StructureConstants.from_json(cfg.fixture)
        if A.grading is None:
            raise UsageError("the input algebra needs a grading")
        G = tanaka.GradedAlgebraState(A, max(0, max(A.grading)))
    else:
        G = tanaka.fixture_state()
    G.check_generated()
    out = tanaka.prolong(G, depth)
    rep = tanaka.report(out)
    ref = tanaka.sl3_table()
    if out.algebra.dim == ref.dim and out.algebra.grading == ref.grading:
        P = tanaka.match_basis(out.algebra, ref)
        rep["reference_match"] = P is not None
        if P is not None:
            rep["basis_change"] = [[str(v) for v in row] for row in P]
    emit(cfg, io.json_report(rep))
    return 0 if rep.get("reference_match", True) else 1


TABLES = {
    "disc": lie.disc_algebra,
    "disc4d": lie.disc4d_algebra,
    "heisenberg": lie.heisenberg_algebra,
    "car-fixed-phi": lie.car_fixed_phi_algebra,
    "sl3": tanaka.sl3_table,
}


def cmd_table(cfg: RunConfig) -> int:
    """Print a multiplication table."""
    name = cfg.algebra
    if name not in TABLES:
        raise UsageError(f"unknown algebra {name!r}; choose from {sorted(TABLES)}")
    A = TABLES[name]()
    if cfg.format == "json":
        emit(cfg, io.json_report({"algebra": name, **A.to_json()}))
    else:
        emit(cfg, lie.multiplication_table(A) + "\n")
    return 0


def cmd_plot(cfg: RunConfig) -> int:
    """Re-plot a CSV file as SVG."""
    if not cfg.input:
        raise UsageError("plot needs --input CSV")
    svg = io.svg_from_csv(Path(cfg.input).read_text(), cfg.axes, cfg.extra.get("title", ""))
    emit(cfg, svg)
    return 0


COMMANDS = {
    "controllability": cmd_controllability,
    "extremal": cmd_extremal,
    "compare": cmd_compare,
    "cutpoint": cmd_cutpoint,
    "orbit": cmd_orbit,
    "tanaka": cmd_tanaka,
    "table": cmd_table,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file; [run] and [<command>] sections")
    common.add_argument("--system")
    common.add_argument("--h1")
    common.add_argument("--h2")
    common.add_argument("--h3")
    common.add_argument("--start", help="x,y,theta")
    common.add_argument("--horizon")
    common.add_argument("--grid")
    common.add_argument("--rel-tol", dest="rel_tol")
    common.add_argument("--abs-tol", dest="abs_tol")
    common.add_argument("--sym")
    common.add_argument("--s-values", dest="s_values")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json", "svg"))
    common.add_argument("--axes", help="two CSV columns to plot, e.g. x,y")
    common.add_argument("--depth")
    common.add_argument("--n-points", dest="n_points")
    common.add_argument("--fields", help="comma separated generator labels")
    common.add_argument("--ell")
    common.add_argument("--fixture", help="graded structure-constant JSON")
    common.add_argument("--g0", choices=("fixture", "gl2"))
    common.add_argument("--algebra")
    common.add_argument("--input", help="CSV to re-plot")
    parser = argparse.ArgumentParser(prog="discgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__ or name.replace("_", " "))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, ValueError, lie.StructureError, extremal.IntegrationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
