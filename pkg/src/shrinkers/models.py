"""Shrinker profile equations for the equivariant harmonic-map and Yang-Mills heat flows.

Harmonic map (profile ``f``, dimension ``d``)::

    f'' + ((d-1)/y - y/2) f' - (d-1)/(2 y^2) sin(2 f) = 0

Yang-Mills (profile ``g``)::

    g'' + ((d-3)/y - y/2) g' - (d-2)/y^2 g (g-1) (g-2) = 0

Both are singular at ``y = 0``; trajectories are launched from a truncated
power series and the right-hand side refuses ``y <= 0``. Near infinity the
regular solutions form a one-parameter family labelled by the limit ``b``
and admit an asymptotic expansion in powers of ``1/y^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ode import SystemState

__all__ = [
    "ModelKind",
    "ModelParams",
    "OriginData",
    "TailData",
    "ExplicitG1",
    "PoleError",
    "UnsupportedModelError",
    "MAX_SERIES_ORDER",
    "rhs",
    "vector_field",
    "third_derivative",
    "series_coefficients",
    "series_eval",
    "series_origin",
    "default_launch",
    "tail_coefficients",
    "tail_eval",
    "tail_state",
    "tail_limit",
    "default_tail_point",
    "ym_g1_constants",
    "ym_explicit_g1",
    "type1_quantity",
    "flux",
]

MAX_SERIES_ORDER = 41


class PoleError(ValueError):
    pass


class UnsupportedModelError(ValueError):
    pass


class ModelKind(str, enum.Enum):
    HARMONIC_MAP = "hm"
    YANG_MILLS = "ym"


@dataclass(frozen=True)
class ModelParams:
    kind: ModelKind
    d: float

    def __post_init__(self):
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        d = float(self.d)
        object.__setattr__(self, "d", d)
        if not math.isfinite(d):
            raise ValueError("d must be finite")
        if kind is ModelKind.HARMONIC_MAP and not d > 2:
            raise ValueError(f"harmonic map flow needs d > 2, got d={d}")
        if kind is ModelKind.YANG_MILLS and not d > 4:
            raise ValueError(f"Yang-Mills flow needs d > 4, got d={d}")

    @classmethod
    def hm(cls, d):
        return cls(ModelKind.HARMONIC_MAP, d)

    @classmethod
    def ym(cls, d):
        return cls(ModelKind.YANG_MILLS, d)

    @property
    def is_hm(self) -> bool:
        return self.kind is ModelKind.HARMONIC_MAP

    @property
    def equator(self) -> float:
        """Value fixed by the reflection symmetry (pi/2 or 1)."""
        return math.pi / 2 if self.is_hm else 1.0

    @property
    def half_width(self) -> float:
        """Distance from the equator to the vacua (0, pi) or (0, 2)."""
        return math.pi / 2 if self.is_hm else 1.0

    @property
    def friction_power(self) -> int | float:
        # coefficient p in the first-derivative term p/y
        return self.d - 1 if self.is_hm else self.d - 3

    def force(self, v: float) -> float:
        """Nonlinear term ``N(v)`` with ``v'' + (p/y - y/2) v' = N(v)/y^2``."""
        if self.is_hm:
            return 0.5 * (self.d - 1) * math.sin(2 * v)
        return (self.d - 2) * v * (v - 1) * (v - 2)

    def dforce(self, v: float) -> float:
        if self.is_hm:
            return (self.d - 1) * math.cos(2 * v)
        return (self.d - 2) * (3 * v * v - 6 * v + 2)

    def tail_limit_value(self, b: float) -> float:
        """Limit of ``y^3 v'(y)`` on the regular tail with ``v(inf) = b``."""
        return -2.0 * self.force(b)

    def label(self) -> str:
        return f"{self.kind.value}(d={self.d:g})"


@dataclass(frozen=True)
class OriginData:
    a: float
    y_start: float = 1e-3
    order: int = 7

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("shooting parameter a must be positive")
        if not self.y_start > 0:
            raise ValueError("y_start must be positive")
        if self.order < 3:
            raise ValueError("series order must be at least 3")


@dataclass(frozen=True)
class TailData:
    b: float
    Y: float

    def __post_init__(self):
        if not self.Y > 0:
            raise ValueError("tail point Y must be positive")


def _check_y(y):
    if not y > 0:
        raise ValueError(f"profile equation is singular at y={y}; use series_origin near 0")


def rhs(params: ModelParams, state: SystemState) -> np.ndarray:
    """``(v', v'')`` from the profile equation at a state with ``y > 0``."""
    y = float(state.y)
    _check_y(y)
    return vector_field(params)(y, state.u)


def vector_field(params: ModelParams):
    """Fast ``(y, u) -> u'`` closure for the integrator."""
    p = float(params.friction_power)
    d = params.d
    if params.is_hm:
        c = 0.5 * (d - 1)

        def fn(y, u):
            f, fp = u[0], u[1]
            return np.array([fp, -(p / y - 0.5 * y) * fp + c * math.sin(2.0 * f) / (y * y)])

    else:
        c = d - 2

        def fn(y, u):
            g, gp = u[0], u[1]
            return np.array([gp, -(p / y - 0.5 * y) * gp + c * g * (g - 1.0) * (g - 2.0) / (y * y)])

    return fn


def third_derivative(params: ModelParams, y: float, v: float, vp: float) -> float:
    """``v'''`` obtained by differentiating the profile equation along a solution."""
    _check_y(y)
    p = float(params.friction_power)
    vpp = -(p / y - 0.5 * y) * vp + params.force(v) / (y * y)
    return (
        (p / (y * y) + 0.5) * vp
        - (p / y - 0.5 * y) * vpp
        - 2.0 * params.force(v) / y**3
        + params.dforce(v) * vp / (y * y)
    )


# -- origin series --------------------------------------------------------------


def _sin_cos_series(u):
    """Power-series coefficients of sin(u), cos(u) given those of u (u[0] may be nonzero)."""
    n = len(u)
    s = np.zeros(n)
    c = np.zeros(n)
    s[0], c[0] = math.sin(u[0]), math.cos(u[0])
    for k in range(1, n):
        j = np.arange(1, k + 1)
        s[k] = np.dot(j * u[1 : k + 1], c[k - 1 :: -1][: k]) / k
        c[k] = -np.dot(j * u[1 : k + 1], s[k - 1 :: -1][: k]) / k
    return s, c


def _cube_minus(coeffs, k):
    """Coefficient ``k`` of ``g^3 - 3 g^2`` for the series ``coeffs``."""
    sq = np.convolve(coeffs[: k + 1], coeffs[: k + 1])[: k + 1]
    cu = np.convolve(sq, coeffs[: k + 1])[: k + 1]
    return cu[k] - 3.0 * sq[k]


def series_coefficients(params: ModelParams, a: float, order: int = 7) -> np.ndarray:
    """Taylor coefficients ``c[k]`` of the regular solution, ``k = 0..order``.

    Harmonic map: odd series with ``c[1] = a``. Yang-Mills: even series with
    ``c[2] = a/2``. Higher coefficients come from matching powers of ``y``
    in ``y^2`` times the equation.
    """
    if order < 3:
        raise ValueError("series order must be at least 3")
    if order > MAX_SERIES_ORDER:
        raise ValueError(f"series order {order} exceeds implemented maximum {MAX_SERIES_ORDER}")
    d = params.d
    c = np.zeros(order + 1)
    if params.is_hm:
        c[1] = a
        for k in range(3, order + 1, 2):
            # residual of sin(2f) at y^k with c[k] still zero
            s, _ = _sin_cos_series(2.0 * c[: k + 1])
            c[k] = (0.5 * (k - 2) * c[k - 2] + 0.5 * (d - 1) * s[k]) / ((k - 1) * (k + d - 1))
    else:
        c[2] = 0.5 * a
        for k in range(4, order + 1, 2):
            q = _cube_minus(c, k)
            c[k] = (0.5 * (k - 2) * c[k - 2] + (d - 2) * q) / ((k - 2) * (k + d - 2))
    return c


def series_eval(coeffs: np.ndarray, y):
    """Value, first and second derivative of a power series at ``y``."""
    k = np.arange(len(coeffs))
    y = np.asarray(y, dtype=float)
    v = np.polynomial.polynomial.polyval(y, coeffs)
    d1 = np.polynomial.polynomial.polyval(y, (k * coeffs)[1:])
    d2 = np.polynomial.polynomial.polyval(y, (k * (k - 1) * coeffs)[2:])
    return v, d1, d2


def default_launch(params: ModelParams, a: float, y_start: float = 1e-3) -> float:
    """Launch offset small enough for the series to converge quickly.

    The series is an expansion in ``a*y`` (harmonic map) or ``a*y^2``
    (Yang-Mills), so the default offset is reduced for large ``a``.
    """
    if params.is_hm:
        return min(y_start, 0.05 / a)
    return min(y_start, math.sqrt(0.05 / a))


def series_origin(params: ModelParams, origin: OriginData) -> SystemState:
    coeffs = series_coefficients(params, origin.a, origin.order)
    v, vp, _ = series_eval(coeffs, origin.y_start)
    return SystemState(origin.y_start, np.array([float(v), float(vp)]))


# -- tail asymptotics ---------------------------------------------------------------


def default_tail_point(d: float) -> float:
    return max(12.0, 2.0 * math.sqrt(2.0 * d))


def tail_coefficients(params: ModelParams, b: float, terms: int = 1) -> np.ndarray:
    """Coefficients ``t[m]`` of ``v ~ sum_m t[m] y^(-2m)`` with ``t[0] = b``.

    The expansion is asymptotic, not convergent; a dozen or so terms are
    useful at ``y >= 10``.
    """
    if terms < 1:
        raise ValueError("need at least one correction term")
    p = float(params.friction_power)
    t = np.zeros(terms + 1)
    t[0] = b
    for m in range(1, terms + 1):
        # coefficient of y^(-2(m-1)) in the nonlinear term N(v)
        if params.is_hm:
            s, _ = _sin_cos_series(2.0 * t[:m])
            nl = 0.5 * (params.d - 1) * s[m - 1]
        else:
            sq = np.convolve(t[:m], t[:m])[:m]
            cu = np.convolve(sq, t[:m])[:m]
            nl = (params.d - 2) * (cu[m - 1] - 3 * sq[m - 1] + 2 * t[m - 1])
        t[m] = (nl - 2 * (m - 1) * (2 * m - 1) * t[m - 1] + 2 * (m - 1) * p * t[m - 1]) / m
    return t


def tail_eval(coeffs: np.ndarray, Y):
    x = 1.0 / np.asarray(Y, dtype=float) ** 2
    m = np.arange(len(coeffs))
    v = np.polynomial.polynomial.polyval(x, coeffs)
    # d/dy y^(-2m) = -2m y^(-2m-1)
    vp = -2.0 * np.polynomial.polynomial.polyval(x, m * coeffs) / np.asarray(Y, dtype=float)
    return v, vp


def _check_tail_point(params, Y):
    lo = max(10.0, 2.0 * math.sqrt(2.0 * params.d))
    if Y < lo * (1 - 1e-12):
        raise ValueError(f"tail point Y={Y} too small; need Y >= {lo:.6g}")


def tail_state(params: ModelParams, tail: TailData, terms: int = 1) -> SystemState:
    """State at ``Y`` on the regular tail with limit ``b``.

    With ``terms=1`` this is the leading-order integration of
    ``lim y^3 v' = -2 N(b)``: ``v = b + N(b)/Y^2``, ``v' = -2 N(b)/Y^3``.
    Larger ``terms`` add higher inverse powers of ``Y^2``.
    """
    _check_tail_point(params, tail.Y)
    coeffs = tail_coefficients(params, tail.b, terms)
    v, vp = tail_eval(coeffs, tail.Y)
    return SystemState(tail.Y, np.array([float(v), float(vp)]))


def tail_limit(params: ModelParams, Y: float, value: float, terms: int = 12,
               tol: float = 1e-14, max_iter: int = 50) -> float:
    """Limit ``b`` of the tail solution taking ``value`` at ``Y`` (Newton on ``b``)."""
    b = value
    for _ in range(max_iter):
        v, _ = tail_eval(tail_coefficients(params, b, terms), Y)
        h = 1e-7 * max(1.0, abs(b))
        vh, _ = tail_eval(tail_coefficients(params, b + h, terms), Y)
        slope = (vh - v) / h
        if slope == 0 or not math.isfinite(slope):
            break
        db = (v - value) / slope
        b -= db
        if abs(db) < tol * max(1.0, abs(b)):
            break
    return float(b)


# -- explicit Yang-Mills shrinker ---------------------------------------------------


class ExplicitG1(NamedTuple):
    g: np.ndarray
    gp: np.ndarray
    pole: float | None


def ym_g1_constants(d: float):
    """``(gamma, delta, pole)`` for ``g1 = y^2/(gamma + delta y^2)``."""
    gamma = 0.5 * (6 * d - 12 - (d + 2) * math.sqrt(2 * d - 4))
    delta = math.sqrt(d - 2) / (2 * math.sqrt(2))
    pole = math.sqrt(-gamma / delta) if gamma < 0 else None
    return gamma, delta, pole


def ym_explicit_g1(d: float, y) -> ExplicitG1:
    """Closed-form first Yang-Mills shrinker and its derivative.

    Regular on ``[0, inf)`` for ``5 <= d < 10``. For ``d > 10`` the
    denominator vanishes at ``pole``; evaluating there raises ``PoleError``.
    """
    gamma, delta, pole = ym_g1_constants(d)
    y = np.asarray(y, dtype=float)
    den = gamma + delta * y * y
    if np.any(den == 0) or (pole is not None and np.any(np.isclose(y, pole, rtol=1e-14, atol=0))):
        raise PoleError(f"g1 has a pole at y={pole}")
    g = y * y / den
    gp = 2 * gamma * y / (den * den)
    return ExplicitG1(g, gp, pole)


# -- scalar diagnostics on states ---------------------------------------------------


def type1_quantity(params: ModelParams, state: SystemState) -> float:
    """``f'^2 + (d-1) sin^2 f / y^2``, the self-similar gradient energy density."""
    if not params.is_hm:
        raise UnsupportedModelError("type-I quantity is defined for the harmonic map flow only")
    y = float(state.y)
    _check_y(y)
    f, fp = state.u[0], state.u[1]
    return float(fp * fp + (params.d - 1) * math.sin(f) ** 2 / (y * y))


def flux(params: ModelParams, y: float, vp: float) -> float:
    """Normalised flux ``A(y)`` with ``v' = C y^(-p) e^(y^2/4) A(y)``.

    ``C = (d-1)/2`` and ``p = d-1`` for the harmonic map, ``C = d-2`` and
    ``p = d-3`` for Yang-Mills. ``A`` is an integral of a bounded function
    of the profile, so it stays well conditioned on runaway trajectories.
    """
    p = float(params.friction_power)
    cst = 0.5 * (params.d - 1) if params.is_hm else params.d - 2
    return float(vp * math.exp(p * math.log(y) - 0.25 * y * y) / cst)
