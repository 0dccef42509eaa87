"""Walk-through: the first three harmonic-map shrinkers for d = 3.

Shows the sweep that brackets them, the refined (a, b) pairs, how the
profile oscillates about the equator, and the sign pattern of h'.

    python notebooks/first_shrinkers.py
"""
import numpy as np

from shrinkers import ModelParams, bracket_sweep, find_shrinkers
from shrinkers import diagnostics as D

p = ModelParams.hm(3)

# Coarse picture: which way does the trajectory escape as a grows?
table = bracket_sweep(p, 0.1, 50.0, 60)
for r in table.rows[::6]:
    o = r.outcome
    print(f"a={r.a:8.3f}  crossings={o.crossings}  exit={o.exit:18s} y_exit={o.y_exit:6.2f}")
print("brackets:", [(round(lo, 4), round(hi, 4)) for lo, hi in table.brackets])

# Refined shrinkers
sols = find_shrinkers(p, 3)
for s in sols:
    hp = D.h_profile(s.trajectory, p)
    changes = hp.y[np.nonzero(np.diff(np.sign(hp.hp)))[0]]
    print(f"n={s.n}: a={s.a:.10f} b={s.b:.10f} energy={s.energy:.6f} "
          f"tail residual={s.tail_residual:.1e} h' sign changes near {np.round(changes, 4)}")

# The energies increase towards the equator value 2 sqrt(pi)
print("equator energy:", D.equator_energy(3))
