"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

The integrator is deliberately small: a fixed Butcher tableau, an
elementary step-size controller and a trajectory container with cubic
Hermite interpolation between accepted steps. Events are located by
bisection on a re-integrated partial step, so their accuracy is that of
the Runge-Kutta method rather than of the interpolant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "IntegratorConfig",
    "SystemState",
    "EventSpec",
    "EventHit",
    "Trajectory",
    "step",
    "integrate",
    "reverse",
]

RHS = Callable[[float, np.ndarray], np.ndarray]

# Dormand & Prince (1980), 7 stages, FSAL.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4

ORDER = 5
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 5.0


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    initial_step: float = 1e-6
    max_step: float = 0.1
    max_steps: int = 200_000
    divergence_threshold: float = 1e8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if not 0 < self.initial_step <= self.max_step:
            raise ValueError("need 0 < initial_step <= max_step")
        if not self.divergence_threshold > 0:
            raise ValueError("divergence_threshold must be positive")

    def with_(self, **changes) -> "IntegratorConfig":
        fields = dict(self.__dict__)
        fields.update(changes)
        return IntegratorConfig(**fields)


@dataclass(frozen=True)
class SystemState:
    """Point ``(y, u)`` of a first-order system; ``u`` is a float vector."""

    y: float
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))

    @property
    def diverged(self) -> bool:
        return not bool(np.all(np.isfinite(self.u)))


@dataclass(frozen=True)
class EventSpec:
    """Scalar event function of a state.

    ``direction`` is +1 for rising zero crossings, -1 for falling and 0 for
    both. A terminal event stops the integration at its refined location.
    """

    fn: Callable[[SystemState], float]
    direction: int = 0
    terminal: bool = False
    name: str = ""


@dataclass(frozen=True)
class EventHit:
    y: float
    index: int
    state: SystemState
    name: str = ""


@dataclass
class Trajectory:
    ys: np.ndarray
    us: np.ndarray
    dus: np.ndarray
    events: list[EventHit] = field(default_factory=list)
    reason: str = "reached_end"

    @property
    def final(self) -> SystemState:
        return SystemState(float(self.ys[-1]), self.us[-1].copy())

    def __len__(self):
        return len(self.ys)

    def hits(self, name: str) -> list[EventHit]:
        return [e for e in self.events if e.name == name]

    def __call__(self, y):
        """Cubic Hermite interpolation of the solution at ``y`` (scalar or array)."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        if np.any(y < self.ys[0] - 1e-14 * max(1.0, abs(self.ys[0]))) or np.any(
            y > self.ys[-1] + 1e-14 * max(1.0, abs(self.ys[-1]))
        ):
            raise ValueError("interpolation point outside trajectory span")
        u, _ = _hermite(self.ys, self.us, self.dus, y)
        return u[0] if scalar else u

    def derivative(self, y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        _, du = _hermite(self.ys, self.us, self.dus, np.atleast_1d(y))
        return du[0] if scalar else du


def _hermite(ys, us, dus, y):
    i = np.clip(np.searchsorted(ys, y, side="right") - 1, 0, len(ys) - 2)
    y0, y1 = ys[i], ys[i + 1]
    h = (y1 - y0)[:, None]
    t = ((y - y0) / (y1 - y0))[:, None]
    u0, u1, d0, d1 = us[i], us[i + 1], dus[i], dus[i + 1]
    t2, t3 = t * t, t * t * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    u = h00 * u0 + h10 * h * d0 + h01 * u1 + h11 * h * d1
    g00 = (6 * t2 - 6 * t) / h
    g10 = 3 * t2 - 4 * t + 1
    g01 = (-6 * t2 + 6 * t) / h
    g11 = 3 * t2 - 2 * t
    du = g00 * u0 + g10 * d0 + g01 * u1 + g11 * d1
    return u, du


def _stages(rhs: RHS, y: float, u: np.ndarray, h: float, k0=None):
    k = np.empty((7, u.size))
    k[0] = rhs(y, u) if k0 is None else k0
    for i in range(1, 7):
        k[i] = rhs(y + _C[i] * h, u + h * (_A[i] @ k[:i]))
    return k


def step(rhs: RHS, state: SystemState, h: float, k0=None):
    """One Dormand-Prince step of size ``h``.

    Returns the fifth-order state and the difference between the fifth- and
    fourth-order solutions. Non-finite arithmetic leaves NaN/inf in the
    returned state, which is reported through ``SystemState.diverged``.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        k = _stages(rhs, state.y, state.u, h, k0)
        u_new = state.u + h * (_B5 @ k)
        err = h * (_E @ k)
    return SystemState(state.y + h, u_new), err


def _step_full(rhs, y, u, h, k0):
    with np.errstate(over="ignore", invalid="ignore"):
        k = _stages(rhs, y, u, h, k0)
        u_new = u + h * (_B5 @ k)
        err = h * (_E @ k)
    # stage 7 is evaluated at (y + h, u_new): FSAL
    return u_new, err, k[6]


def _locate(rhs, ev: EventSpec, y0, u0, h, g0, rel_tol):
    """Bisect the sign change of ``ev`` inside the step ``[y0, y0 + h]``."""
    lo, hi = 0.0, h
    g_lo = g0
    tol = rel_tol * max(abs(y0), abs(y0 + h)) + 4 * np.finfo(float).eps * abs(y0)
    tol = max(tol, 1e-300)
    state_hi = None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s_mid, _ = step(rhs, SystemState(y0, u0), mid)
        g_mid = ev.fn(s_mid)
        if g_mid == 0.0:
            return s_mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi, state_hi = mid, s_mid
    if state_hi is None:
        state_hi, _ = step(rhs, SystemState(y0, u0), hi)
    return state_hi


def _crossed(g0, g1, direction):
    if direction > 0:
        return g0 < 0 <= g1
    if direction < 0:
        return g0 > 0 >= g1
    return (g0 < 0 <= g1) or (g0 > 0 >= g1)


def integrate(
    rhs: RHS,
    state0: SystemState,
    y_end: float,
    cfg: IntegratorConfig | None = None,
    events: Sequence[EventSpec] = (),
) -> Trajectory:
    """Integrate ``u' = rhs(y, u)`` from ``state0`` towards ``y_end``.

    Termination reasons are ``reached_end``, ``event`` (a terminal event
    fired), ``diverged`` (non-finite values or a component above the
    divergence threshold) and ``step_limit``. Event hits are recorded with
    their refined state; only accepted steps are stored as samples.
    """
    cfg = cfg or IntegratorConfig()
    y = float(state0.y)
    if not y_end > y:
        raise ValueError("empty integration span: need y_end > state0.y")
    u = np.array(state0.u, dtype=float)
    span = y_end - y
    h = min(cfg.initial_step, cfg.max_step, span)

    k0 = rhs(y, u)
    ys, us, dus = [y], [u.copy()], [k0.copy()]
    hits: list[EventHit] = []
    g_prev = [ev.fn(SystemState(y, u)) for ev in events]
    reason = "reached_end"
    n_steps = 0
    thr = cfg.divergence_threshold

    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(k0))):
        return Trajectory(np.array(ys), np.array(us), np.array(dus), hits, "diverged")

    while y < y_end:
        if n_steps >= cfg.max_steps:
            reason = "step_limit"
            break
        last = False
        if y + h >= y_end or (y_end - (y + h)) < 1e-12 * span:
            h = y_end - y
            last = True
        u_new, err, k_new = _step_full(rhs, y, u, h, k0)
        n_steps += 1
        finite = bool(np.all(np.isfinite(u_new)) and np.all(np.isfinite(err)))
        if finite:
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(u), np.abs(u_new))
            e = float(np.max(np.abs(err) / scale))
        else:
            e = math.inf
        if e > 1.0:
            if not finite and h <= 1e-14 * max(1.0, abs(y)):
                reason = "diverged"
                break
            fac = _FAC_MIN if not finite else max(_FAC_MIN, _SAFETY * e ** (-1 / ORDER))
            h *= fac
            if h < 1e-15 * max(1.0, abs(y)):
                reason = "diverged" if not finite else "step_limit"
                break
            continue

        y_new = y + h if not last else y_end
        if not np.all(np.isfinite(k_new)):
            reason = "diverged"
            break

        # events over the accepted step, earliest terminal one wins
        g_new = [ev.fn(SystemState(y_new, u_new)) for ev in events]
        stop_at = None
        step_hits = []
        for i, ev in enumerate(events):
            if _crossed(g_prev[i], g_new[i], ev.direction):
                s = _locate(rhs, ev, y, u, y_new - y, g_prev[i], cfg.rel_tol)
                step_hits.append(EventHit(s.y, i, s, ev.name))
        step_hits.sort(key=lambda eh: eh.y)
        for eh in step_hits:
            hits.append(eh)
            if events[eh.index].terminal:
                stop_at = eh
                break
        if stop_at is not None:
            s = stop_at.state
            if s.y > y:
                ys.append(s.y)
                us.append(s.u.copy())
                dus.append(rhs(s.y, s.u))
            reason = "event"
            break

        y, u, k0 = y_new, u_new, k_new
        g_prev = g_new
        ys.append(y)
        us.append(u.copy())
        dus.append(k0.copy())
        if np.max(np.abs(u)) > thr:
            reason = "diverged"
            break
        if last:
            break
        fac = _FAC_MAX if e == 0 else min(_FAC_MAX, max(_FAC_MIN, _SAFETY * e ** (-1 / ORDER)))
        h = min(h * fac, cfg.max_step)

    return Trajectory(np.array(ys), np.array(us), np.array(dus), hits, reason)


def reverse(rhs: RHS) -> RHS:
    """Right-hand side for integrating towards decreasing ``y`` in ``s = -y``."""

    def back(s, u):
        return -rhs(-s, u)

    return back
