"""Checkable numerical versions of the quantities behind the nonexistence argument.

* ``h = y^3 v'`` and its second-order equation ``y^2 h'' = alpha h' + beta h``;
* the coefficient pair ``(alpha, beta)`` for both flows;
* the weighted Dirichlet energy of a harmonic-map profile;
* the oscillation discriminant ``d^2 - 8d + 8`` of the equator map;
* the number of negative eigenvalues of the Hessian of the energy at the
  equator map, from a finite-difference discretisation and Sturm counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special

from . import models
from .models import ModelParams
from .ode import IntegratorConfig, SystemState, Trajectory, step

__all__ = [
    "CoefficientPair",
    "HProfile",
    "MonotonicityReport",
    "EnergyResult",
    "Discriminant",
    "SpectrumReport",
    "EigenSolveError",
    "coefficients",
    "alpha_root",
    "h_profile",
    "h_second_direct",
    "h_second_fd",
    "h_equation_residual",
    "tangency_derivatives",
    "monotonicity_certificate",
    "certificate_from_trajectory",
    "adaptive_simpson",
    "energy",
    "equator_energy",
    "flux_integral_residual",
    "equator_discriminant",
    "equator_hessian",
    "sturm_count",
    "morse_index",
    "morse_refinement",
    "Check",
    "ode_residual",
    "series_residual_exponent",
    "expected_series_exponent",
    "verify_suite",
]


class CoefficientPair(NamedTuple):
    alpha: float
    beta: float


def coefficients(params: ModelParams, y, value) -> CoefficientPair:
    """``alpha(y)`` and ``beta(y)`` of the h-equation at profile value ``value``.

    Works elementwise on arrays.
    """
    d = params.d
    y = np.asarray(y, dtype=float)
    v = np.asarray(value, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be non-negative")
    if params.is_hm:
        alpha = 0.5 * y * (y * y - 2 * d + 10)
        beta = d - 7 + (d - 1) * (1 + np.cos(2 * v))
    else:
        alpha = 0.5 * y * (y * y - 2 * d + 14)
        beta = d - 10 + 3 * (d - 2) * (1 - v) ** 2
    if alpha.ndim == 0 and beta.ndim == 0:
        return CoefficientPair(float(alpha), float(beta))
    return CoefficientPair(alpha, beta)


def alpha_root(params: ModelParams) -> float:
    """Point beyond which ``alpha > 0`` (0 when alpha is positive for all y > 0)."""
    c = 2 * params.d - (10 if params.is_hm else 14)
    return math.sqrt(c) if c > 0 else 0.0


# -- h-function ----------------------------------------------------------------------


@dataclass
class HProfile:
    y: np.ndarray
    h: np.ndarray
    hp: np.ndarray
    hpp: np.ndarray


def h_profile(traj: Trajectory, params: ModelParams) -> HProfile:
    """``h``, ``h'`` and ``h''`` at the trajectory samples.

    ``h'`` uses ``v''`` from the profile equation; ``h''`` comes from the
    h-equation itself.
    """
    y = traj.ys
    v, vp = traj.us[:, 0], traj.us[:, 1]
    f = models.vector_field(params)
    vpp = np.array([f(yy, u)[1] for yy, u in zip(y, traj.us)])
    h = y**3 * vp
    hp = y**3 * vpp + 3 * y**2 * vp
    al, be = coefficients(params, y, v)
    hpp = (al * hp + be * h) / y**2
    return HProfile(y, h, hp, hpp)


def h_second_direct(params: ModelParams, y: float, v: float, vp: float) -> float:
    """``h''`` by differentiating ``h = y^3 v'`` twice along the flow."""
    f = models.vector_field(params)
    vpp = f(y, np.array([v, vp]))[1]
    vppp = models.third_derivative(params, y, v, vp)
    return y**3 * vppp + 6 * y**2 * vpp + 6 * y * vp


def h_second_fd(params: ModelParams, state: SystemState, delta: float) -> float:
    """``h''`` from fourth-order central differences of ``h'``.

    Neighbouring states are produced by single Runge-Kutta steps from
    ``state`` (forward, and backward through the reversed field), so their
    error is far below the difference truncation error.
    """
    f = models.vector_field(params)

    def back(s, u):
        return -f(-s, u)

    def hp_at(sign, dist):
        if sign > 0:
            s, _ = step(f, state, dist)
            yy, u = s.y, s.u
        else:
            s, _ = step(back, SystemState(-state.y, state.u), dist)
            yy, u = -s.y, s.u
        return yy**3 * f(yy, u)[1] + 3 * yy**2 * u[1]

    p1, m1 = hp_at(1, delta), hp_at(-1, delta)
    p2, m2 = hp_at(1, 2 * delta), hp_at(-1, 2 * delta)
    return (8 * (p1 - m1) - (p2 - m2)) / (12 * delta)


def h_equation_residual(params: ModelParams, traj: Trajectory, delta: float = 1e-3):
    """Relative residual ``|y^2 h'' - alpha h' - beta h| / (1 + |h|)`` at every sample.

    ``h''`` is taken from finite differences, independent of the
    h-equation.
    """
    out = np.empty(len(traj))
    for i, (y, u) in enumerate(zip(traj.ys, traj.us)):
        dl = delta * min(1.0, 0.5 * y, 2.0 / max(y, 1e-300))
        hpp = h_second_fd(params, SystemState(y, u), dl)
        fv = models.vector_field(params)(y, u)
        h = y**3 * u[1]
        hp = y**3 * fv[1] + 3 * y**2 * u[1]
        al, be = coefficients(params, y, u[0])
        out[i] = abs(y * y * hpp - al * hp - be * h) / (1 + abs(h))
    return out


def tangency_derivatives(d: float, y0: float, h0: float):
    """``(h'', h''', h'''')`` at a harmonic-map point with ``h' = 0`` and ``f = pi/2``.

    Uses only the h-equation and ``h = y^3 f'``: differentiating
    ``y^2 h'' = alpha h' + beta h`` with ``beta = d - 7 + (d-1)(1 + cos 2f)``
    gives ``h'' = 0``, ``h''' = 0`` and ``h'''' = beta'' h / y^2`` where
    ``beta'' = -2 (d-1)(cos(2f) (2f')^2 + sin(2f) 2f'')``. With
    ``f = pi/2``, ``f' = h/y^3`` and ``d = 7`` this is ``24 h^3 / y^8``.
    """
    fp = h0 / y0**3
    # f'' from h' = y^3 f'' + 3 y^2 f' = 0
    fpp = -3 * fp / y0
    f = math.pi / 2
    beta = d - 7 + (d - 1) * (1 + math.cos(2 * f))
    al = 0.5 * y0 * (y0**2 - 2 * d + 10)
    hpp = (al * 0.0 + beta * h0) / y0**2
    # (y^2 h'')' = alpha' h' + alpha h'' + beta' h + beta h'
    beta_p = -2 * (d - 1) * math.sin(2 * f) * fp
    hppp = (al * hpp + beta_p * h0 - 2 * y0 * hpp) / y0**2
    beta_pp = -2 * (d - 1) * (2 * math.cos(2 * f) * fp * fp + math.sin(2 * f) * fpp)
    # terms with h', h'', h''' or beta, beta' drop out at the tangency point
    hpppp = beta_pp * h0 / y0**2
    return hpp, hppp, hpppp


@dataclass
class MonotonicityReport:
    params: ModelParams
    a: float
    min_hp: float
    y_at_min: float
    first_nonpositive: float | None
    y_exit: float
    alpha_root: float
    increasing_beyond_root: bool
    verdict: str  # "monotone", "not_monotone" or "inconclusive"
    reason: str = ""


def certificate_from_trajectory(params: ModelParams, a: float, traj: Trajectory) -> MonotonicityReport:
    hp = h_profile(traj, params)
    i = int(np.argmin(hp.hp))
    bad = np.nonzero(hp.hp <= 0)[0]
    first = float(hp.y[bad[0]]) if bad.size else None
    root = alpha_root(params)
    y_exit = float(traj.ys[-1])
    beyond = hp.y >= root
    increasing = bool(np.all(np.diff(hp.h[beyond]) > 0)) if np.count_nonzero(beyond) > 1 else False
    if y_exit < root:
        verdict = "inconclusive"
    elif first is None and increasing:
        verdict = "monotone"
    else:
        verdict = "not_monotone"
    return MonotonicityReport(params, a, float(hp.hp[i]), float(hp.y[i]), first, y_exit, root,
                              increasing, verdict, traj.reason)


def monotonicity_certificate(params: ModelParams, a: float, cfg: IntegratorConfig | None = None,
                             scfg=None) -> MonotonicityReport:
    """Integrate from the origin at ``a`` and report the sign of ``h'``.

    The trajectory runs to the tail point or until it diverges, with no
    escape cut-off. For the harmonic map with ``d >= 7`` (Yang-Mills with
    ``d >= 10``) the expected verdict is ``monotone``: ``h' > 0`` at every
    sample and ``h`` increasing beyond the root of ``alpha``.
    """
    from .shooting import shoot_trajectory

    traj = shoot_trajectory(params, a, cfg, scfg, escape=False)
    return certificate_from_trajectory(params, a, traj)


# -- quadrature and energy -----------------------------------------------------------


def adaptive_simpson(fn: Callable[[np.ndarray], np.ndarray], breaks, tol: float = 1e-9,
                     max_level: int = 40):
    """Adaptive Simpson rule on the partition ``breaks``; returns ``(value, error_estimate)``.

    Intervals are refined level by level with vectorised evaluations; an
    interval is accepted once the Richardson error estimate falls below its
    share of ``tol`` (proportional to its width).
    """
    breaks = np.asarray(breaks, dtype=float)
    total = breaks[-1] - breaks[0]
    a, b = breaks[:-1], breaks[1:]
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    value = 0.0
    err = 0.0
    for _ in range(max_level):
        if a.size == 0:
            break
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fn(lm), fn(rm)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        ok = np.abs(delta) <= 15 * tol * (b - a) / total
        value += float(np.sum((left + right + delta / 15)[ok]))
        err += float(np.sum(np.abs(delta[ok]) / 15))
        keep = ~ok
        a_n = np.concatenate([a[keep], m[keep]])
        b_n = np.concatenate([m[keep], b[keep]])
        fa_n = np.concatenate([fa[keep], fm[keep]])
        fb_n = np.concatenate([fm[keep], fb[keep]])
        fm_n = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        a, b, fa, fb, fm = a_n, b_n, fa_n, fb_n, fm_n
        m = 0.5 * (a + b)
    if a.size:
        # unconverged leftovers
        rest = (b - a) / 6 * (fa + 4 * fm + fb)
        value += float(np.sum(rest))
        err += float(np.sum(np.abs(rest)))
    return value, err


@dataclass
class EnergyResult:
    value: float
    error: float
    tail: float


def _energy_density(d, y, f, fp):
    with np.errstate(divide="ignore", invalid="ignore"):
        return (fp * fp + (d - 1) * np.sin(f) ** 2 / (y * y)) * np.exp(
            (d - 1) * np.log(y) - 0.25 * y * y
        )


def _tail_closure(d, Y, b):
    """``(d-1) sin^2 b * int_Y^inf y^(d-3) e^(-y^2/4) dy``."""
    s = 0.5 * (d - 2)
    return (d - 1) * math.sin(b) ** 2 * 2 ** (d - 3) * special.gamma(s) * special.gammaincc(s, Y * Y / 4)


def energy(profile, d: float, Y: float | None = None, b: float | None = None,
           tol: float = 1e-9) -> EnergyResult:
    """Weighted Dirichlet energy ``int (f'^2 + (d-1) sin^2 f / y^2) y^(d-1) e^(-y^2/4) dy``.

    ``profile`` is a ``ShrinkerSolution``, a ``Trajectory`` or a callable
    returning ``(f, f')`` arrays. The integral over ``[0, Y]`` uses
    adaptive Simpson on the dense output; ``[Y, inf)`` is closed
    analytically with the leading tail term and limit ``b``. Between 0 and
    the first trajectory sample the profile is continued by its tangent
    line (or by the origin series for a ``ShrinkerSolution``).
    """
    from .shooting import ShrinkerSolution

    if isinstance(profile, ShrinkerSolution):
        Y = profile.Y if Y is None else Y
        b = profile.b if b is None else b
        fn = profile.profile
        breaks_inner = profile.trajectory.ys
    elif isinstance(profile, Trajectory):
        traj = profile
        Y = float(traj.ys[-1]) if Y is None else Y
        b = float(traj(Y)[0]) if b is None else b
        y0, (f0, fp0) = traj.ys[0], traj.us[0]

        def fn(y):
            y = np.atleast_1d(y)
            out = np.empty((y.size, 2))
            inner = y < y0
            out[inner, 0] = f0 + fp0 * (y[inner] - y0)
            out[inner, 1] = fp0
            out[~inner] = traj(y[~inner])
            return out

        breaks_inner = traj.ys
    else:
        fn = profile
        if Y is None or b is None:
            raise ValueError("Y and b are required for a callable profile")
        breaks_inner = np.linspace(0.0, Y, 65)

    def integrand(y):
        u = fn(y)
        return _energy_density(d, y, u[:, 0], u[:, 1])

    knots = np.unique(np.concatenate([[0.0], breaks_inner[(breaks_inner > 0) & (breaks_inner < Y)], [Y]]))
    # Gauss-Legendre on the first interval avoids evaluating at y = 0
    x, w = np.polynomial.legendre.leggauss(30)
    lo, hi = knots[0], knots[1]
    yy = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    first = float(0.5 * (hi - lo) * np.sum(w * integrand(yy)))
    body, err = adaptive_simpson(integrand, knots[1:], tol) if knots.size > 2 else (0.0, 0.0)
    tail = _tail_closure(d, Y, b)
    return EnergyResult(first + body + tail, err, tail)


def equator_energy(d: float) -> float:
    """Closed form ``(d-1) 2^(d-3) Gamma((d-2)/2)`` of the equator map's energy."""
    return (d - 1) * 2 ** (d - 3) * special.gamma(0.5 * (d - 2))


def flux_integral_residual(params: ModelParams, traj: Trajectory, y_eval, tol: float = 1e-12):
    """Compare ``v'`` with its integral representation at the points ``y_eval``.

    Harmonic map: ``f' = (d-1)/2 y^(1-d) e^(y^2/4) int_0^y s^(d-3) e^(-s^2/4) sin(2f) ds``.
    Yang-Mills: ``g' = (d-2) y^(3-d) e^(y^2/4) int_0^y s^(d-5) e^(-s^2/4) P(g) ds``.
    Returns the absolute differences ``|v' - representation|``.
    """
    d = params.d
    y0 = traj.ys[0]
    q = (d - 3) if params.is_hm else (d - 5)
    c = models.series_coefficients(params, _launch_parameter(params, traj), 9)

    def nl(v):
        return np.sin(2 * v) if params.is_hm else v * (v - 1) * (v - 2)

    def integrand(s):
        s = np.atleast_1d(s)
        out = np.empty(s.size)
        inner = s < y0
        if np.any(inner):
            v, _, _ = models.series_eval(c, s[inner])
            out[inner] = nl(v)
        if np.any(~inner):
            out[~inner] = nl(traj(s[~inner])[:, 0])
        return out * np.exp(q * np.log(s) - 0.25 * s * s)

    res = []
    x, w = np.polynomial.legendre.leggauss(30)
    for ye in np.atleast_1d(y_eval):
        yy = 0.5 * y0 * (x + 1)
        head = float(0.5 * y0 * np.sum(w * integrand(yy)))
        knots = traj.ys[(traj.ys > y0) & (traj.ys < ye)]
        body, _ = adaptive_simpson(integrand, np.concatenate([[y0], knots, [ye]]), tol)
        cst = 0.5 * (d - 1) if params.is_hm else d - 2
        p = float(params.friction_power)
        rep = cst * math.exp(-p * math.log(ye) + 0.25 * ye * ye) * (head + body)
        res.append(abs(float(traj(ye)[1]) - rep))
    return np.array(res)


def _launch_parameter(params, traj):
    y0, (v0, vp0) = traj.ys[0], traj.us[0]
    # leading series term: v ~ a y (hm) or a y^2 / 2 (ym)
    return vp0 if params.is_hm else vp0 / y0


# -- equator map spectrum ------------------------------------------------------------


class Discriminant(NamedTuple):
    value: float
    oscillatory: bool


def equator_discriminant(d: float) -> Discriminant:
    """``d^2 - 8d + 8``; negative means oscillatory perturbations of ``f = pi/2``."""
    v = d * d - 8 * d + 8
    return Discriminant(v, v < 0)


class EigenSolveError(RuntimeError):
    pass


@dataclass
class SpectrumReport:
    d: float
    nodes: int
    y_min: float
    y_max: float
    negative_count: int
    smallest: list[float]
    discriminant: float
    oscillatory: bool


def equator_hessian(d: float, nodes: int = 2000, y_min: float = 1e-3, y_max: float = 20.0):
    """Symmetrically scaled tridiagonal matrix of the equator-map Hessian.

    The quadratic form ``int (u'^2 - (d-1) u^2 / y^2) w dy`` with weight
    ``w = y^(d-1) e^(-y^2/4)`` is discretised by central differences on a
    uniform grid with zero end values and a lumped mass matrix
    ``M = diag(w_i)``. Returns ``(diag, offdiag, y_interior)`` of
    ``M^(-1/2) K M^(-1/2)``, whose eigenvalues solve ``K u = lambda M u``.
    """
    if not d > 2:
        raise ValueError("need d > 2")
    if nodes < 3:
        raise ValueError("need at least 3 nodes")
    y = np.linspace(y_min, y_max, nodes)
    h = y[1] - y[0]
    yi = y[1:-1]
    yh = 0.5 * (y[:-1] + y[1:])

    def logw(s):
        return (d - 1) * np.log(s) - 0.25 * s * s

    lwi = logw(yi)
    lwh = logw(yh)
    # K_ii / w_i and K_i,i+1 / sqrt(w_i w_i+1), computed in log space
    diag = (np.exp(lwh[:-1] - lwi) + np.exp(lwh[1:] - lwi)) / (h * h) - (d - 1) / (yi * yi)
    off = -np.exp(lwh[1:-1] - 0.5 * (lwi[:-1] + lwi[1:])) / (h * h)
    return diag, off, yi


def sturm_count(diag, off, shift: float = 0.0) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``shift``.

    Counts negative pivots of the LDL^T factorisation of ``T - shift I``
    (Sylvester's law of inertia).
    """
    tiny = 1e-300
    count = 0
    q = diag[0] - shift
    if q < 0:
        count += 1
    off2 = (np.asarray(off) ** 2).tolist()
    dg = np.asarray(diag).tolist()
    for i in range(1, len(dg)):
        if q == 0:
            q = tiny
        q = (dg[i] - shift) - off2[i - 1] / q
        if q < 0:
            count += 1
    return count


def _gershgorin(diag, off):
    r = np.zeros_like(diag)
    r[:-1] += np.abs(off)
    r[1:] += np.abs(off)
    return float(np.min(diag - r)), float(np.max(diag + r))


def _kth_eigenvalue(diag, off, k, lo, hi, rtol=1e-12):
    """k-th smallest eigenvalue (0-based) by bisection on Sturm counts."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sturm_count(diag, off, mid) > k:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi), hi - lo


def morse_index(d: float, nodes: int = 2000, y_max: float = 20.0, y_min: float = 1e-3,
                n_smallest: int = 3) -> SpectrumReport:
    """Negative-eigenvalue count of the equator-map Hessian on a truncated grid."""
    diag, off, _ = equator_hessian(d, nodes, y_min, y_max)
    neg = sturm_count(diag, off, 0.0)
    lo, hi = _gershgorin(diag, off)
    eigs = []
    for k in range(min(n_smallest, diag.size)):
        lam, width = _kth_eigenvalue(diag, off, k, lo, hi)
        below = sturm_count(diag, off, lam - 2 * width - 1e-12 * max(1.0, abs(lam)))
        above = sturm_count(diag, off, lam + 2 * width + 1e-12 * max(1.0, abs(lam)))
        if not (below <= k < above):
            raise EigenSolveError(
                f"eigenvalue {k} not isolated: counts {below}..{above} around {lam} (width {width})"
            )
        eigs.append(lam)
    disc = equator_discriminant(d)
    return SpectrumReport(d, nodes, y_min, y_max, neg, eigs, disc.value, disc.oscillatory)


def morse_refinement(d: float, levels=((2000, 1e-3), (20000, 1e-4), (200000, 1e-5)),
                     y_max: float = 20.0) -> list[tuple[int, float, int]]:
    """Negative counts ``(nodes, y_min, count)`` along a refinement sequence."""
    out = []
    for nodes, y_min in levels:
        diag, off, _ = equator_hessian(d, nodes, y_min, y_max)
        out.append((nodes, y_min, sturm_count(diag, off, 0.0)))
    return out


# -- verification suite --------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    tol: float
    note: str = ""


def ode_residual(params: ModelParams, y, v, vp, vpp):
    """``v'' + (p/y - y/2) v' - N(v)/y^2`` elementwise."""
    p = float(params.friction_power)
    y = np.asarray(y, dtype=float)
    nl = np.array([params.force(float(x)) for x in np.atleast_1d(v)]).reshape(np.shape(v))
    return vpp + (p / y - 0.5 * y) * vp - nl / (y * y)


def series_residual_exponent(params: ModelParams, a: float = 1.0, order: int = 7,
                             ys=(0.4, 0.2, 0.1, 0.05)) -> tuple[float, np.ndarray]:
    """Fitted exponent of the truncated origin series' ODE residual and the residuals."""
    c = models.series_coefficients(params, a, order)
    ys = np.asarray(ys, dtype=float)
    v, vp, vpp = models.series_eval(c, ys)
    r = np.abs(ode_residual(params, ys, v, vp, vpp))
    slope = np.polyfit(np.log(ys), np.log(r), 1)[0]
    return float(slope), r


def expected_series_exponent(params: ModelParams, order: int) -> int:
    """Leading power of the residual after truncating at ``y^order``.

    The first dropped term ``c y^m`` contributes ``c y^(m-2)`` to the
    residual; ``m = order + 2`` for the odd series when ``order`` is odd,
    and the next even power above ``order`` for the even series.
    """
    if params.is_hm:
        m = order + 2 if order % 2 else order + 1
    else:
        m = order + 1 if order % 2 else order + 2
    return m - 2


def verify_suite(params: ModelParams, cfg: IntegratorConfig | None = None, seed: int = 0) -> list[Check]:
    """Residual checks for one ``(model, d)``; every check carries its measured value."""
    cfg = cfg or IntegratorConfig()
    rng = np.random.default_rng(seed)
    f = models.vector_field(params)
    out: list[Check] = []

    # roundoff is relative to the size of the individual terms of the equation
    c_nl = 0.5 * (params.d - 1) if params.is_hm else 2 * (params.d - 2)
    p = float(params.friction_power)

    def scale(y, vp):
        return 1 + c_nl / (y * y) + abs((p / y - 0.5 * y) * vp)

    consts = (0.0, math.pi / 2, math.pi) if params.is_hm else (0.0, 1.0, 2.0)
    ys = np.linspace(0.05, 20.0, 50)
    r = max(abs(f(y, np.array([c, 0.0]))[1]) / scale(y, 0.0) for c in consts for y in ys)
    out.append(Check("constant_solutions", bool(r <= 1e-12), float(r), 1e-12))

    mirror = math.pi if params.is_hm else 2.0
    worst = 0.0
    for _ in range(1000):
        y = rng.uniform(0.05, 20.0)
        u = np.array([rng.uniform(-1, mirror + 1), rng.uniform(-5, 5)])
        lhs = f(y, np.array([mirror - u[0], -u[1]]))[1]
        worst = max(worst, abs(lhs + f(y, u)[1]) / scale(y, u[1]))
    out.append(Check("reflection_symmetry", bool(worst <= 1e-12), float(worst), 1e-12))

    if not params.is_hm and 5 <= params.d < 10:
        yy = np.linspace(0.05, 20.0, 400)
        g1 = models.ym_explicit_g1(params.d, yy)
        gam, dl, _ = models.ym_g1_constants(params.d)
        gpp = 2 * gam * (gam - 3 * dl * yy**2) / (gam + dl * yy**2) ** 3
        r = float(np.max(np.abs(ode_residual(params, yy, g1.g, g1.gp, gpp))))
        out.append(Check("explicit_g1_residual", r <= 1e-9, r, 1e-9))

    order = 7
    slope, _ = series_residual_exponent(params, 1.0, order)
    want = expected_series_exponent(params, order)
    out.append(Check("series_residual_exponent", abs(slope - want) <= 0.5, abs(slope - want), 0.5,
                     f"fitted {slope:.3f}, expected {want}"))

    from .shooting import shoot_trajectory

    worst_h = 0.0
    worst_flux = 0.0
    for a in (0.5, 1.0, 3.0):
        traj = shoot_trajectory(params, a, cfg)
        worst_h = max(worst_h, float(np.max(h_equation_residual(params, traj))))
        pts = [y for y in (0.5, 1.0, 2.0, 3.0) if y < traj.ys[-1]]
        res = flux_integral_residual(params, traj, pts)
        scale = 1 + np.abs(traj(np.array(pts))[:, 1])
        worst_flux = max(worst_flux, float(np.max(res / scale)))
    out.append(Check("h_equation", worst_h < 1e-6, worst_h, 1e-6))
    out.append(Check("integral_form", worst_flux < 1e-7, worst_flux, 1e-7))
    return out
