"""Command-line front end.

Usage:
    shrinkers find --model hm --d 4 --n-max 2 --out sols.json --format json
    shrinkers sweep --model hm --d 7 --n 500 --out sweep.csv
    shrinkers verify --model ym --d 7
    shrinkers spectrum --d-min 6.5 --d-max 8 --d-step 0.05 --out spec.csv

CSV files start with ``#`` metadata lines (the full run configuration as
JSON), then a header row. JSON files hold one object with the keys
``config``, ``results`` and ``checks``. Floats are written with Python's
shortest round-trip representation.

Exit codes: 0 success, 1 numerical failure or failed check, 2 invalid
arguments (including an inadmissible d or an empty range).
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import click
import numpy as np

from . import diagnostics, models
from .models import ModelParams
from .ode import IntegratorConfig
from .shooting import ShootConfig, bracket_sweep, find_shrinkers

__all__ = ["cli", "main"]

_IC = IntegratorConfig()
_SC = ShootConfig()


def fmt(x) -> str:
    """Shortest round-trip text for numbers; empty for None."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, sort_keys=False, allow_nan=False) + "\n"


def dump_csv(config: dict, header: list[str], rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _fail(config: dict, message: str, **extra):
    click.echo(dump_json({"config": config, "results": [], "checks": [],
                          "error": message, **extra}), err=True, nl=False)
    sys.exit(1)


def _params(model: str, d: float) -> ModelParams:
    try:
        return ModelParams.hm(d) if model == "hm" else ModelParams.ym(d)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--d") from None


def _configs(rel_tol, abs_tol, tail_tol, y_end, a_min=None, a_max=None, n=None):
    try:
        cfg = IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
        changes = {"tail_tol": tail_tol, "tail_point": y_end}
        if a_min is not None:
            changes.update(a_min=a_min, a_max=a_max, n_grid=n)
        scfg = ShootConfig(**{**asdict(_SC), **changes})
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    return cfg, scfg


def _common(fn):
    opts = [
        click.option("--model", type=click.Choice(["hm", "ym"]), required=True,
                     help="hm: harmonic map; ym: Yang-Mills."),
        click.option("--d", "d", type=float, required=True, help="Real dimension parameter."),
        click.option("--rel-tol", type=float, default=_IC.rel_tol, show_default=True),
        click.option("--abs-tol", type=float, default=_IC.abs_tol, show_default=True),
        click.option("--tail-tol", type=float, default=_SC.tail_tol, show_default=True,
                     help="Bound on the limit-form tail residual of a shrinker."),
        click.option("--y-end", type=float, default=None,
                     help="Tail point Y [default: max(12, 2 sqrt(2d))]."),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Output file [default: stdout]."),
        click.option("--format", "fmt_", type=click.Choice(["csv", "json"]), default="json",
                     show_default=True),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def _window(fn):
    opts = [
        click.option("--a-min", type=float, default=_SC.a_min, show_default=True),
        click.option("--a-max", type=float, default=_SC.a_max, show_default=True),
        click.option("--n", "n", type=int, default=_SC.n_grid, show_default=True,
                     help="Grid points in [a-min, a-max] (log-spaced)."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


def _check_window(a_min, a_max, n):
    if not 0 < a_min < a_max:
        raise click.BadParameter("need 0 < a-min < a-max", param_hint="--a-min/--a-max")
    if n < 2:
        raise click.BadParameter("need at least 2 grid points", param_hint="--n")


@click.group()
def cli():
    """Self-similar shrinkers of the harmonic-map and Yang-Mills heat flows."""


# -- find ---------------------------------------------------------------------------


def profile_rows(sol, n_points: int = 241):
    p = sol.params
    ys = np.linspace(0.0, sol.Y, n_points)
    u = sol.profile(ys)
    f = models.vector_field(p)
    rows = []
    for y, (v, vp) in zip(ys, u):
        if y == 0:
            h = hp = 0.0
            t1 = p.d * sol.a**2 if p.is_hm else None
        else:
            vpp = f(y, np.array([v, vp]))[1]
            h = y**3 * vp
            hp = y**3 * vpp + 3 * y**2 * vp
            t1 = vp**2 + (p.d - 1) * math.sin(v) ** 2 / y**2 if p.is_hm else None
        rows.append((y, v, vp, h, hp, t1))
    return rows


@cli.command()
@_common
@_window
@click.option("--n-max", type=int, default=3, show_default=True)
@click.option("--profile-points", type=int, default=241, show_default=True)
def find(model, d, rel_tol, abs_tol, tail_tol, y_end, out, fmt_, a_min, a_max, n, n_max,
         profile_points):
    """Find shrinkers with crossing counts 1..n-max; writes records and profile CSVs."""
    params = _params(model, d)
    _check_window(a_min, a_max, n)
    if n_max < 1:
        raise click.BadParameter("need n-max >= 1", param_hint="--n-max")
    cfg, scfg = _configs(rel_tol, abs_tol, tail_tol, y_end, a_min, a_max, n)
    config = {"command": "find", "model": model, "d": d, "n_max": n_max,
              "integrator": asdict(cfg), "shooting": asdict(scfg)}
    try:
        sols = find_shrinkers(params, n_max, cfg, scfg)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        _fail(config, f"{type(e).__name__}: {e}")
    records = [{"n": s.n, "a": s.a, "b": s.b, "energy": s.energy, "max_type1": s.max_type1,
                "tail_residual": s.tail_residual, "tail_condition_at_Y": s.tail_condition_at_Y,
                "seam_mismatch": s.seam_mismatch} for s in sols]
    checks = [{"name": f"tail_residual_n{s.n}", "passed": s.tail_residual < tail_tol,
               "residual": s.tail_residual, "tol": tail_tol} for s in sols]
    status = "found" if sols else "none_found"
    cols = ["n", "a", "b", "energy", "max_type1", "tail_residual", "tail_condition_at_Y",
            "seam_mismatch"]
    if fmt_ == "json":
        results = records if sols else [{"status": "none_found"}]
        text = dump_json({"config": config, "results": results, "checks": checks})
    else:
        text = dump_csv(config, cols, [[r[c] for c in cols] for r in records], {"status": status})
    _emit(text, out)
    if out is not None:
        stem = Path(out)
        for s in sols:
            path = stem.with_name(f"{stem.stem}_profile_n{s.n}.csv")
            path.write_text(dump_csv({**config, "n": s.n, "a": s.a, "b": s.b},
                                     ["y", "f", "fp", "h", "hp", "type1"],
                                     profile_rows(s, profile_points)))
    if not all(c["passed"] for c in checks):
        sys.exit(1)


# -- sweep --------------------------------------------------------------------------


@cli.command()
@_common
@_window
@click.option("--spacing", type=click.Choice(["log", "linear"]), default="log", show_default=True)
def sweep(model, d, rel_tol, abs_tol, tail_tol, y_end, out, fmt_, a_min, a_max, n, spacing):
    """Shoot on a grid of a; CSV rows plus a companion JSON of brackets."""
    params = _params(model, d)
    _check_window(a_min, a_max, n)
    cfg, scfg = _configs(rel_tol, abs_tol, tail_tol, y_end, a_min, a_max, n)
    config = {"command": "sweep", "model": model, "d": d, "spacing": spacing,
              "integrator": asdict(cfg), "shooting": asdict(scfg)}
    try:
        table = bracket_sweep(params, a_min, a_max, n, cfg, scfg, spacing)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        _fail(config, f"{type(e).__name__}: {e}")
    cols = ["a", "crossings", "exit", "miss", "b_estimate"]
    rows = [[r.a, r.outcome.crossings, r.outcome.exit, r.outcome.miss, r.outcome.b_estimate]
            for r in table.rows]
    brackets = [{"a_lo": lo, "a_hi": hi} for lo, hi in table.brackets]
    counts = {e: table.count(e) for e in ("tail_matched", "overshoot_top", "undershoot_bottom",
                                          "diverged", "inconclusive")}
    summary = {"config": config, "results": {"brackets": brackets, "exit_counts": counts},
               "checks": []}
    if fmt_ == "json":
        summary["results"]["rows"] = [dict(zip(cols, r)) for r in rows]
        _emit(dump_json(summary), out)
    else:
        _emit(dump_csv(config, cols, rows), out)
        if out is not None:
            Path(out).with_suffix(".brackets.json").write_text(dump_json(summary))


# -- verify -------------------------------------------------------------------------


@cli.command()
@_common
def verify(model, d, rel_tol, abs_tol, tail_tol, y_end, out, fmt_):
    """Run the residual and symmetry checks for one (model, d)."""
    params = _params(model, d)
    cfg, _ = _configs(rel_tol, abs_tol, tail_tol, y_end)
    config = {"command": "verify", "model": model, "d": d, "integrator": asdict(cfg)}
    try:
        checks = diagnostics.verify_suite(params, cfg)
    except (ArithmeticError, RuntimeError, ValueError) as e:
        _fail(config, f"{type(e).__name__}: {e}")
    recs = [{"name": c.name, "passed": bool(c.passed), "residual": c.residual, "tol": c.tol,
             "note": c.note} for c in checks]
    ok = all(r["passed"] for r in recs)
    if fmt_ == "json":
        text = dump_json({"config": config, "results": {"all_passed": ok}, "checks": recs})
    else:
        cols = ["name", "passed", "residual", "tol", "note"]
        text = dump_csv(config, cols, [[r[c] for c in cols] for r in recs])
    _emit(text, out)
    if not ok:
        sys.exit(1)


# -- spectrum -----------------------------------------------------------------------


@cli.command()
@click.option("--d", "d", type=float, default=None, help="Single d (overrides the range).")
@click.option("--d-min", type=float, default=6.5, show_default=True)
@click.option("--d-max", type=float, default=8.0, show_default=True)
@click.option("--d-step", type=float, default=0.05, show_default=True)
@click.option("--nodes", type=int, default=2000, show_default=True)
@click.option("--y-min", type=float, default=1e-3, show_default=True)
@click.option("--y-max", type=float, default=20.0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt_", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
def spectrum(d, d_min, d_max, d_step, nodes, y_min, y_max, out, fmt_):
    """Negative-eigenvalue count of the equator-map Hessian over a range of d."""
    if d is not None:
        ds = [d]
    else:
        if not d_step > 0 or d_max < d_min:
            raise click.BadParameter("empty d range", param_hint="--d-min/--d-max/--d-step")
        k = int(math.floor((d_max - d_min) / d_step + 1e-9))
        ds = [round(d_min + i * d_step, 12) for i in range(k + 1)]
    if any(not x > 2 for x in ds):
        raise click.BadParameter("need d > 2", param_hint="--d")
    if nodes < 3 or not 0 < y_min < y_max:
        raise click.BadParameter("need nodes >= 3 and 0 < y-min < y-max")
    config = {"command": "spectrum", "d": ds, "nodes": nodes, "y_min": y_min, "y_max": y_max}
    try:
        reports = [diagnostics.morse_index(x, nodes, y_max, y_min) for x in ds]
    except diagnostics.EigenSolveError as e:
        _fail(config, str(e))
    cols = ["d", "discriminant", "oscillatory", "negative_count", "eig1", "eig2", "eig3"]
    rows = [[r.d, r.discriminant, r.oscillatory, r.negative_count, *(r.smallest + [None] * 3)[:3]]
            for r in reports]
    if fmt_ == "json":
        text = dump_json({"config": config, "results": [dict(zip(cols, r)) for r in rows],
                          "checks": []})
    else:
        text = dump_csv(config, cols, rows)
    _emit(text, out)


def main(argv=None):
    cli.main(args=argv, prog_name="shrinkers")


if __name__ == "__main__":
    main()
