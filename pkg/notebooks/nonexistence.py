"""Walk-through: no shrinkers for the harmonic map with d >= 7.

For every shot the function h = y^3 f' stays increasing, so the profile
cannot settle onto a regular tail. Prints a few certificates and the
coefficient structure behind them.

    python notebooks/nonexistence.py
"""
import math

from shrinkers import ModelParams, bracket_sweep
from shrinkers import diagnostics as D

for d in (7, 8, 10):
    p = ModelParams.hm(d)
    print(f"d={d}: beta at the equator = {D.coefficients(p, 1.0, math.pi / 2).beta:+.1f}, "
          f"alpha changes sign at y = {D.alpha_root(p):.3f}")
    table = bracket_sweep(p, 1e-3, 50.0, 40, keep_trajectories=True)
    worst = min(D.certificate_from_trajectory(p, r.a, r.outcome.trajectory).min_hp
                for r in table.rows)
    print(f"   exits: {sorted({r.outcome.exit for r in table.rows})}, min h' = {worst:.3e}")

# Below the threshold the certificate fails for some a
rep = D.monotonicity_certificate(ModelParams.hm(6), 3.0)
print("d=6, a=3:", rep.verdict, "first h' <= 0 at y =", rep.first_nonpositive)
