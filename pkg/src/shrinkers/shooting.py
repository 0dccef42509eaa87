"""Shooting from the singular origin, bracketing, bisection and tail matching.

A trajectory launched from the origin with parameter ``a`` either settles on
the regular tail (a shrinker) or runs away. The runaway is dominated by the
mode ``v' ~ y^(-p) e^(y^2/4) A`` and its direction is the sign of the flux
``A``. Shrinkers sit exactly where that sign changes, so brackets are found
by a sweep over ``a`` and refined by bisection on the escape direction.

Forward integration alone cannot reproduce a shrinker's tail: integration
errors of size ``rel_tol`` are amplified by ``e^(Y^2/4)`` (about 4e15 at
``Y = 12``). A refined solution is therefore stitched together from the
forward solution on ``[0, y_match]`` and a backward integration of the
regular tail with limit ``b``, launched from ``Y_far`` and matched in value
at ``y_match``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import models
from .models import ModelParams, OriginData, TailData
from .ode import EventSpec, IntegratorConfig, SystemState, Trajectory, integrate, reverse

__all__ = [
    "ShootConfig",
    "ShootOutcome",
    "ShrinkerSolution",
    "SweepRow",
    "SweepTable",
    "BracketError",
    "EXITS",
    "shoot",
    "shoot_trajectory",
    "bracket_sweep",
    "refine",
    "find_shrinkers",
    "match_tail",
    "crossing_count",
]

EXITS = ("tail_matched", "overshoot_top", "undershoot_bottom", "diverged", "inconclusive")


class BracketError(ValueError):
    pass


@dataclass(frozen=True)
class ShootConfig:
    """Numerical knobs of the shooting procedure (integrator settings excluded)."""

    tail_point: float | None = None  # Y; None -> models.default_tail_point(d)
    y_start: float = 1e-3
    series_order: int = 7
    escape_width: float = 2.0  # escape when |v - equator| > escape_width * half_width
    flux_tol: float = 1e-8
    flux_rel_tol: float = 1e-6  # |A(Y)| relative to max |A| along the shot
    tail_tol: float = 1e-6
    bound_cap: float = 1e4
    tangency_tol: float = 1e-12
    tail_terms: int = 16
    y_match: float = 3.0
    far_factor: float = 1.5  # backward tail launched from far_factor * Y
    a_min: float = 1e-2
    a_max: float = 50.0
    n_grid: int = 500
    tol_a: float = 1e-10
    max_window: float = 1e5
    extension_per_decade: int = 40  # grid density beyond a_max
    refine_tol_factor: float = 1e-2  # integrator tolerances scale for the final bisection phase
    coarse_width: float = 1e-4  # relative bracket width where that phase starts
    workers: int = 1

    def Y(self, params: ModelParams) -> float:
        return self.tail_point if self.tail_point is not None else models.default_tail_point(params.d)


@dataclass
class ShootOutcome:
    a: float
    crossings: int
    exit: str
    miss: float
    flux: float
    b_estimate: float | None
    y_exit: float
    max_type1: float | None = None
    reason: str = ""
    trajectory: Trajectory | None = field(default=None, repr=False)

    @property
    def side(self) -> int:
        """Escape direction: +1 upwards, -1 downwards, 0 if tail matched or undetermined."""
        if self.exit == "tail_matched" or not math.isfinite(self.flux) or self.flux == 0:
            return 0
        return 1 if self.flux > 0 else -1


@dataclass
class ShrinkerSolution:
    params: ModelParams
    a: float
    b: float
    n: int
    trajectory: Trajectory
    max_type1: float | None
    energy: float | None
    tail_residual: float
    tail_condition_at_Y: float
    seam_mismatch: float
    Y: float
    y_match: float
    bracket: tuple[float, float]

    def profile(self, y):
        """Profile value and derivative on ``[0, Y_far]``; uses the origin series below the launch point."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty((y.size, 2))
        y0 = self.trajectory.ys[0]
        inner = y < y0
        if np.any(inner):
            c = models.series_coefficients(self.params, self.a, 11)
            v, vp, _ = models.series_eval(c, y[inner])
            out[inner, 0], out[inner, 1] = v, vp
        if np.any(~inner):
            out[~inner] = self.trajectory(np.clip(y[~inner], y0, self.trajectory.ys[-1]))
        return out


@dataclass
class SweepRow:
    a: float
    outcome: ShootOutcome


@dataclass
class SweepTable:
    params: ModelParams
    rows: list[SweepRow]

    def __post_init__(self):
        a = [r.a for r in self.rows]
        if any(a2 <= a1 for a1, a2 in zip(a, a[1:])):
            raise ValueError("sweep rows must have strictly increasing a")

    @property
    def a(self) -> np.ndarray:
        return np.array([r.a for r in self.rows])

    @property
    def brackets(self) -> list[tuple[float, float]]:
        out = []
        for r1, r2 in zip(self.rows, self.rows[1:]):
            o1, o2 = r1.outcome, r2.outcome
            if o1.crossings != o2.crossings or o1.side * o2.side < 0:
                out.append((r1.a, r2.a))
        return out

    def count(self, exit: str) -> int:
        return sum(r.outcome.exit == exit for r in self.rows)


# -- single shot ------------------------------------------------------------------


def _events(params: ModelParams, scfg: ShootConfig):
    eq = params.equator
    width = scfg.escape_width * params.half_width
    return [
        EventSpec(lambda s: s.u[0] - eq, 0, False, "crossing"),
        EventSpec(lambda s: abs(s.u[0] - eq) - width, 1, True, "escape"),
    ]


def crossing_count(traj: Trajectory, tangency_tol: float = 1e-12) -> int:
    """Transversal equator crossings recorded on ``traj``."""
    return int(sum(abs(h.state.u[1]) >= tangency_tol for h in traj.hits("crossing")))


def shoot_trajectory(params: ModelParams, a: float, cfg: IntegratorConfig | None = None,
                     scfg: ShootConfig | None = None, y_end: float | None = None,
                     escape: bool = True) -> Trajectory:
    """Integrate the profile equation from the origin series out to ``y_end`` (default ``Y``)."""
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    if not a > 0:
        raise ValueError("shooting parameter a must be positive")
    y0 = models.default_launch(params, a, scfg.y_start)
    s0 = models.series_origin(params, OriginData(a, y0, scfg.series_order))
    events = _events(params, scfg)
    if not escape:
        events = events[:1]
    return integrate(models.vector_field(params), s0, y_end or scfg.Y(params), cfg, events)


def _clean_point(params, traj, A, cap=1e-10):
    """Largest sample ``y`` where the runaway mode is still below ``cap`` in the profile."""
    if not math.isfinite(A) or A == 0:
        return float(traj.ys[-1])
    p = float(params.friction_power)
    cst = 0.5 * (params.d - 1) if params.is_hm else params.d - 2
    ys = traj.ys
    with np.errstate(over="ignore"):
        contamination = 2 * cst * abs(A) * np.exp(0.25 * ys * ys - (p + 1) * np.log(ys))
    ok = np.nonzero(contamination <= cap)[0]
    return float(ys[ok[-1]]) if ok.size else float(ys[0])


def _type1_max(params, ys, us):
    if not params.is_hm:
        return None
    return float(np.max(us[:, 1] ** 2 + (params.d - 1) * np.sin(us[:, 0]) ** 2 / ys**2))


def shoot(params: ModelParams, a: float, cfg: IntegratorConfig | None = None,
          scfg: ShootConfig | None = None, keep_trajectory: bool = False) -> ShootOutcome:
    """Launch at ``a`` and classify the trajectory.

    ``flux`` is the normalised flux ``A`` at the exit point; its sign is the
    escape direction. ``miss`` is the runaway part of ``Y^3 v'(Y)``, i.e.
    ``Y^3 C Y^(-p) e^(Y^2/4) A``; on the regular tail it vanishes, and at
    leading order it equals ``Y^3 v'(Y) + 2 N(v(Y))``. The outcome is
    ``tail_matched`` when ``|A| <= flux_tol``, ``|A|`` has dropped below
    ``flux_rel_tol`` times its peak along the shot, and the type-I quantity
    stays below ``bound_cap`` on the resolved part of the profile. The
    relative test keeps shots that merely hug the equator (tiny flux
    throughout) out of ``tail_matched``.
    """
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    Y = scfg.Y(params)
    traj = shoot_trajectory(params, a, cfg, scfg)
    fin = traj.final
    crossings = crossing_count(traj, scfg.tangency_tol)
    keep = traj if keep_trajectory else None

    if traj.reason == "step_limit":
        return ShootOutcome(a, crossings, "inconclusive", math.nan, math.nan, None, fin.y,
                            None, traj.reason, keep)
    if fin.diverged:
        return ShootOutcome(a, crossings, "diverged", math.nan, math.nan, None, fin.y,
                            None, traj.reason, keep)

    A = models.flux(params, fin.y, fin.u[1])
    p = float(params.friction_power)
    cst = 0.5 * (params.d - 1) if params.is_hm else params.d - 2
    with np.errstate(over="ignore"):
        miss = float(Y**3 * cst * A * math.exp(min(0.25 * Y * Y - p * math.log(Y), 700.0)))

    y_clean = _clean_point(params, traj, A)
    sel = traj.ys <= y_clean
    t1 = _type1_max(params, traj.ys[sel], traj.us[sel])
    # the quantity starts at d a^2 at the origin, so the cap scales with it
    bounded = t1 is None or t1 <= max(scfg.bound_cap, 10 * params.d * a * a)

    weight = np.exp(p * np.log(traj.ys) - 0.25 * traj.ys**2) / cst
    peak = float(np.max(np.abs(traj.us[:, 1] * weight)))
    decayed = abs(A) <= scfg.flux_rel_tol * peak

    b_est = None
    if abs(A) <= scfg.flux_tol and decayed and bounded:
        exit = "tail_matched"
        # b from the last point where the runaway part is below 1e-7,
        # and only crossings on that resolved stretch
        yb = min(_clean_point(params, traj, A, cap=1e-7), Y)
        crossings = sum(abs(h.state.u[1]) >= scfg.tangency_tol and h.y <= yb
                        for h in traj.hits("crossing"))
        if yb >= 6.0:
            b_est = models.tail_limit(params, yb, float(traj(yb)[0]), scfg.tail_terms)
    elif traj.reason == "diverged":
        exit = "diverged"
    else:
        exit = "overshoot_top" if A > 0 else "undershoot_bottom"
    return ShootOutcome(a, crossings, exit, miss, A, b_est, fin.y, t1, traj.reason, keep)


# -- sweeps -----------------------------------------------------------------------


def _shoot_row(args):
    params, a, cfg, scfg, keep = args
    return shoot(params, a, cfg, scfg, keep)


def bracket_sweep(params: ModelParams, a_min: float, a_max: float, n_grid: int,
                  cfg: IntegratorConfig | None = None, scfg: ShootConfig | None = None,
                  spacing: str = "log", keep_trajectories: bool = False) -> SweepTable:
    """Shoot on a grid of ``a`` values; ``SweepTable.brackets`` lists sign/crossing changes."""
    if not 0 < a_min < a_max:
        raise ValueError("need 0 < a_min < a_max")
    if n_grid < 2:
        raise ValueError("need n_grid >= 2")
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    if spacing == "log":
        grid = np.geomspace(a_min, a_max, n_grid)
    elif spacing == "linear":
        grid = np.linspace(a_min, a_max, n_grid)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    jobs = [(params, float(a), cfg, scfg, keep_trajectories) for a in grid]
    if scfg.workers > 1:
        with ProcessPoolExecutor(scfg.workers) as pool:
            outcomes = list(pool.map(_shoot_row, jobs, chunksize=8))
    else:
        outcomes = [_shoot_row(j) for j in jobs]
    return SweepTable(params, [SweepRow(o.a, o) for o in outcomes])


# -- refinement -------------------------------------------------------------------


def _integrate_back(params, b, y_from, y_to, cfg, scfg):
    """Regular tail with limit ``b``, integrated from ``y_from`` down to ``y_to``."""
    s_far = models.tail_state(params, TailData(b, y_from), terms=scfg.tail_terms)
    back = reverse(models.vector_field(params))
    eq = params.equator
    ev = [EventSpec(lambda s: s.u[0] - eq, 0, False, "crossing")]
    tr = integrate(back, SystemState(-y_from, s_far.u), -y_to, cfg, ev)
    return tr


def _flip(tr: Trajectory, params) -> Trajectory:
    """Map a trajectory in ``s = -y`` back to increasing ``y``."""
    ys = -tr.ys[::-1]
    us = tr.us[::-1]
    f = models.vector_field(params)
    dus = np.array([f(y, u) for y, u in zip(ys, us)])
    hits = [
        type(h)(-h.y, h.index, SystemState(-h.y, h.state.u), h.name)
        for h in reversed(tr.events)
    ]
    return Trajectory(ys, us, dus, hits, tr.reason)


def match_tail(params: ModelParams, a: float, b_guess: float, cfg: IntegratorConfig | None = None,
               scfg: ShootConfig | None = None, max_iter: int = 40):
    """Stitch the forward solution at ``a`` to the regular tail matching its value at ``y_match``.

    Returns ``(b, forward, tail)`` with both trajectories in increasing ``y``.
    """
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    Y = scfg.Y(params)
    y_far = scfg.far_factor * Y
    ym = scfg.y_match
    fwd = shoot_trajectory(params, a, cfg, scfg, y_end=ym, escape=False)
    if fwd.reason != "reached_end":
        raise BracketError(f"forward solution did not reach y_match={ym} ({fwd.reason})")
    target = float(fwd.final.u[0])

    def resid(b):
        tr = _integrate_back(params, b, y_far, ym, cfg, scfg)
        if tr.reason != "reached_end":
            return math.nan, tr
        return float(tr.final.u[0]) - target, tr

    b0 = b_guess
    r0, tr0 = resid(b0)
    b1 = b0 + 1e-4 * max(1.0, abs(b0))
    r1, tr1 = resid(b1)
    for _ in range(max_iter):
        if not (math.isfinite(r0) and math.isfinite(r1)) or r1 == r0:
            break
        b2 = b1 - r1 * (b1 - b0) / (r1 - r0)
        b0, r0 = b1, r1
        b1 = b2
        r1, tr1 = resid(b1)
        if abs(b1 - b0) <= 1e-15 * max(1.0, abs(b1)) or r1 == 0:
            break
    if not math.isfinite(r1) or abs(r1) > 1e-8:
        raise BracketError(f"tail matching failed at a={a} (residual {r1})")
    return b1, fwd, _flip(tr1, params)


def _stitch(fwd: Trajectory, tail: Trajectory) -> Trajectory:
    keep = tail.ys > fwd.ys[-1]
    ys = np.concatenate([fwd.ys, tail.ys[keep]])
    us = np.concatenate([fwd.us, tail.us[keep]])
    dus = np.concatenate([fwd.dus, tail.dus[keep]])
    hits = [h for h in fwd.events] + [h for h in tail.events if h.y > fwd.ys[-1]]
    return Trajectory(ys, us, dus, hits, "matched")


def _b_guess(params, traj: Trajectory, scfg: ShootConfig):
    fin = traj.final
    A = models.flux(params, fin.y, fin.u[1]) if not fin.diverged else math.nan
    yb = _clean_point(params, traj, A, cap=1e-6)
    yb = max(min(yb, traj.ys[-1]), traj.ys[0])
    return models.tail_limit(params, yb, float(traj(yb)[0]), min(scfg.tail_terms, 8))


def _direction(o: ShootOutcome) -> int:
    # sign of the flux even inside the tail_matched window
    if not math.isfinite(o.flux) or o.flux == 0:
        return 0
    return 1 if o.flux > 0 else -1


def refine(params: ModelParams, a_lo: float, a_hi: float, tol_a: float | None = None,
           cfg: IntegratorConfig | None = None, scfg: ShootConfig | None = None) -> ShrinkerSolution:
    """Bisect a bracket on the escape direction and build the matched profile.

    The returned ``a`` is the midpoint of the final bracket. ``b`` is the
    tail limit whose backward-integrated regular tail meets the forward
    solution in value at ``y_match``; ``seam_mismatch`` is the remaining jump
    in the derivative there.

    Once the bracket is narrower than ``coarse_width * a`` the shots and the
    tail assembly use integrator tolerances scaled by ``refine_tol_factor``,
    since the integration noise in the flux then decides the sign. The
    bracket ends are also shot at the tighter tolerances up front, and a
    bracket whose sign change disappears raises ``BracketError``.
    """
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    tol_a = scfg.tol_a if tol_a is None else tol_a
    if not tol_a > 0:
        raise ValueError("tol_a must be positive")
    if not 0 < a_lo < a_hi:
        raise ValueError("need 0 < a_lo < a_hi")
    s_lo = _direction(shoot(params, a_lo, cfg, scfg))
    s_hi = _direction(shoot(params, a_hi, cfg, scfg))
    if s_lo * s_hi >= 0:
        raise BracketError(f"no sign change of the escape direction on [{a_lo}, {a_hi}]")
    bracket = (a_lo, a_hi)
    last = None
    f = scfg.refine_tol_factor
    fine = cfg.with_(rel_tol=cfg.rel_tol * f, abs_tol=cfg.abs_tol * f)
    # a sign change made of integration noise does not survive tighter tolerances
    if f != 1.0 and _direction(shoot(params, a_lo, fine, scfg)) * _direction(shoot(params, a_hi, fine, scfg)) >= 0:
        raise BracketError(f"sign change on [{a_lo}, {a_hi}] does not persist at rel_tol {fine.rel_tol:g}")
    while a_hi - a_lo > tol_a:
        mid = 0.5 * (a_lo + a_hi)
        if mid <= a_lo or mid >= a_hi:
            break
        # escape directions are unambiguous until the bracket nears the noise level
        use = cfg if a_hi - a_lo > scfg.coarse_width * max(1.0, a_hi) else fine
        o = shoot(params, mid, use, scfg, keep_trajectory=True)
        s = _direction(o)
        if s == 0:
            a_lo = a_hi = mid
            last = o
            break
        if s == s_lo:
            a_lo = mid
        else:
            a_hi = mid
        last = o
    a = 0.5 * (a_lo + a_hi)
    traj = last.trajectory if last is not None else shoot(params, a, fine, scfg, keep_trajectory=True).trajectory
    return _assemble(params, a, _b_guess(params, traj, scfg), fine, scfg, bracket)


def _assemble(params, a, b_guess, cfg, scfg, bracket) -> ShrinkerSolution:
    from . import diagnostics

    Y = scfg.Y(params)
    b, fwd, tail = match_tail(params, a, b_guess, cfg, scfg)
    traj = _stitch(fwd, tail)
    n = crossing_count(traj, scfg.tangency_tol)
    seam = abs(float(fwd.final.u[1]) - float(tail.us[0, 1]))

    uY = traj(Y)
    asym = models.tail_coefficients(params, b, scfg.tail_terms)
    _, vpY = models.tail_eval(asym, Y)
    tail_residual = float(Y**3 * abs(uY[1] - vpY))
    literal = float(Y**3 * uY[1] - params.tail_limit_value(b))

    sel = traj.ys <= Y
    t1 = _type1_max(params, traj.ys[sel], traj.us[sel])
    sol = ShrinkerSolution(params, a, b, n, traj, t1, None, tail_residual, literal, seam, Y,
                           scfg.y_match, bracket)
    if params.is_hm:
        sol.energy = diagnostics.energy(sol, params.d).value
    return sol


def find_shrinkers(params: ModelParams, n_max: int, cfg: IntegratorConfig | None = None,
                   scfg: ShootConfig | None = None) -> list[ShrinkerSolution]:
    """Shrinkers with crossing counts ``1..n_max`` found in the sweep window.

    The window ``[a_min, a_max]`` is extended geometrically (up to
    ``max_window``) while fewer than ``n_max`` brackets have been seen, with
    ``extension_per_decade`` grid points per decade.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    cfg = cfg or IntegratorConfig()
    scfg = scfg or ShootConfig()
    table = bracket_sweep(params, scfg.a_min, scfg.a_max, scfg.n_grid, cfg, scfg)
    rows = list(table.rows)
    a_hi = scfg.a_max
    while len(SweepTable(params, rows).brackets) < n_max and a_hi < scfg.max_window:
        nxt = min(a_hi * 10.0, scfg.max_window)
        n = max(2, int(round(scfg.extension_per_decade * math.log10(nxt / a_hi))) + 1)
        ext = bracket_sweep(params, a_hi, nxt, n, cfg, scfg)
        rows.extend(ext.rows[1:])
        a_hi = nxt
    table = SweepTable(params, rows)

    found: dict[int, ShrinkerSolution] = {}
    for lo, hi in table.brackets:
        try:
            sol = refine(params, lo, hi, None, cfg, scfg)
        except BracketError:
            continue
        if 1 <= sol.n <= n_max and sol.n not in found:
            found[sol.n] = sol
        if len(found) >= n_max:
            break
    return [found[k] for k in sorted(found)]
