"""Independent reference computations used as test oracles.

Nothing here calls into the package's numerical routines.
"""
import math

import numpy as np
import sympy as sp
from scipy import integrate, special
from scipy.linalg import eigh_tridiagonal


def series_by_undetermined_coefficients(kind, d, a, order):
    """Taylor coefficients of the regular solution via sympy, solving order by order."""
    y = sp.symbols("y", positive=True)
    d = sp.nsimplify(d)
    a = sp.nsimplify(a)
    if kind == "hm":
        powers = list(range(3, order + 1, 2))
        cs = sp.symbols(f"c3:{order + 1}")
        coef = {k: sp.Symbol(f"c{k}") for k in powers}
        f = a * y + sum(coef[k] * y**k for k in powers)
        expr = y**2 * sp.diff(f, y, 2) + ((d - 1) * y - y**3 / 2) * sp.diff(f, y) - (d - 1) / 2 * sp.sin(2 * f)
    else:
        powers = list(range(4, order + 1, 2))
        coef = {k: sp.Symbol(f"c{k}") for k in powers}
        f = a / 2 * y**2 + sum(coef[k] * y**k for k in powers)
        expr = y**2 * sp.diff(f, y, 2) + ((d - 3) * y - y**3 / 2) * sp.diff(f, y) - (d - 2) * f * (f - 1) * (f - 2)
    ser = sp.series(expr, y, 0, order + 1).removeO()
    sol = {}
    for k in powers:
        eq = sp.expand(ser.coeff(y, k)).subs(sol)
        sol[coef[k]] = sp.solve(eq, coef[k])[0]
    out = np.zeros(order + 1)
    if kind == "hm":
        out[1] = float(a)
    else:
        out[2] = float(a) / 2
    for k in powers:
        out[k] = float(sol[coef[k]])
    return out


def g1_closed_form(d, y):
    """``(g, g', g'')`` of ``y^2/(gamma + delta y^2)`` by sympy differentiation."""
    s = sp.symbols("s", positive=True)
    dd = sp.nsimplify(d)
    gam = (6 * dd - 12 - (dd + 2) * sp.sqrt(2 * dd - 4)) / 2
    dl = sp.sqrt(dd - 2) / (2 * sp.sqrt(2))
    g = s**2 / (gam + dl * s**2)
    fs = [sp.lambdify(s, e, "numpy") for e in (g, sp.diff(g, s), sp.diff(g, s, 2))]
    return tuple(np.asarray(fn(np.asarray(y, dtype=float)), dtype=float) for fn in fs), float(gam), float(dl)


def equator_energy_quad(d):
    """``(d-1) int_0^inf y^(d-3) e^(-y^2/4) dy`` by scipy quadrature."""
    val, _ = integrate.quad(lambda y: (d - 1) * y ** (d - 3) * math.exp(-y * y / 4), 0, np.inf,
                            epsabs=1e-13, epsrel=1e-13)
    return val


def equator_energy_closed(d):
    return (d - 1) * 2 ** (d - 3) * special.gamma((d - 2) / 2)


def equator_spectrum_continuum(d, k_max=3):
    """Eigenvalues ``lambda_+/2 + k`` of the equator Hessian on the half line (d > 4 + 2 sqrt 2)."""
    disc = d * d - 8 * d + 8
    lp = (-(d - 2) + math.sqrt(disc)) / 2
    return [lp / 2 + k for k in range(k_max)]


def tridiagonal_eigs(diag, off, k):
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, k - 1))


def linear_escape_point(d, a, eps=1e-3):
    """Where the linearised small-a solution ``a phi`` reaches pi/2 (harmonic map, scipy solver)."""
    from scipy.integrate import solve_ivp

    def rhs(y, u):
        return [u[1], -((d - 1) / y - y / 2) * u[1] + (d - 1) / (y * y) * u[0]]

    ev = lambda y, u: a * u[0] - math.pi / 2
    ev.terminal = True
    sol = solve_ivp(rhs, (eps, 30.0), [eps, 1.0], events=ev, rtol=1e-11, atol=1e-14)
    return float(sol.t_events[0][0]) if sol.t_events[0].size else None
